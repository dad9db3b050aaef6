#include "strip_vortex/errors.hpp"

namespace strip_vortex {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Geometry: return "geometry";
        case ErrorKind::Configuration: return "configuration";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Singular: return "singular-evaluation";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::IllConditioned: return "ill-conditioned-panelization";
        case ErrorKind::NearSingularQuadrature: return "near-singular-quadrature";
        case ErrorKind::Region: return "region";
        case ErrorKind::Regime: return "regime";
        case ErrorKind::Infeasible: return "infeasible";
        case ErrorKind::SupportExplosion: return "support-explosion";
        case ErrorKind::NonConvergence: return "non-convergence";
        case ErrorKind::BoundaryContact: return "boundary-contact";
        case ErrorKind::Io: return "io";
        case ErrorKind::Parse: return "parse";
    }
    return "unknown";
}

}  // namespace strip_vortex
