#pragma once

#include <stdexcept>
#include <string>

namespace strip_vortex {

/// Broad failure class; the CLI maps it to an exit status and a report tag.
enum class ErrorKind {
    Geometry,
    Configuration,
    Domain,
    Singular,
    Precondition,
    IllConditioned,
    NearSingularQuadrature,
    Region,
    Regime,
    Infeasible,
    SupportExplosion,
    NonConvergence,
    BoundaryContact,
    Io,
    Parse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace strip_vortex
