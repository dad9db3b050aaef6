#include "strip_vortex/strip_kernel.hpp"

#include <sstream>

#include "strip_vortex/errors.hpp"

namespace strip_vortex {

namespace {

void check_interior(Vec2 p, const char* name) {
    if (!(p.x2 > 0.0 && p.x2 < kPi) || !std::isfinite(p.x1)) {
        std::ostringstream msg;
        msg << name << " = (" << p.x1 << ", " << p.x2 << ") is not an interior strip point";
        fail(ErrorKind::Domain, msg.str());
    }
}

void check_pair(Vec2 y, Vec2 x) {
    check_interior(y, "y");
    check_interior(x, "x");
    if (y == x) fail(ErrorKind::Singular, "kernel evaluated at coincident points");
}

}  // namespace

double gs(Vec2 y, Vec2 x) {
    check_pair(y, x);
    return gs_fast(y, x);
}

double gs_two_log(Vec2 y, Vec2 x) {
    check_pair(y, x);
    const double d = y.x1 - x.x1;
    return -kInvFourPi * std::log(std::cosh(d) - std::cos(y.x2 - x.x2)) +
           kInvFourPi * std::log(std::cosh(d) - std::cos(y.x2 + x.x2));
}

Vec2 grad_gs(Vec2 y, Vec2 x) {
    check_pair(y, x);
    return grad_gs_fast(y, x);
}

double hs_robin(Vec2 x) {
    check_interior(x, "x");
    return -kInvTwoPi * std::log(2.0 * std::sin(x.x2));
}

double hs_regular(Vec2 y, Vec2 x) {
    check_interior(y, "y");
    check_interior(x, "x");
    const double r = norm(y - x);
    if (r < 1e-8) return hs_robin(x);
    return -kInvTwoPi * std::log(r) - gs_fast(y, x);
}

double gs_far_field(Vec2 y, Vec2 x) {
    check_interior(y, "y");
    check_interior(x, "x");
    const double sep = std::abs(x.x1 - y.x1);
    if (sep < 5.0) {
        fail(ErrorKind::Precondition, "far-field expansion needs horizontal separation of at least 5");
    }
    return std::sin(x.x2) * std::sin(y.x2) * std::exp(-sep) / kPi;
}

}  // namespace strip_vortex
