#pragma once

#include "strip_vortex/geometry.hpp"

namespace strip_vortex {

inline constexpr double kInvFourPi = 1.0 / (4.0 * kPi);
inline constexpr double kInvTwoPi = 1.0 / (2.0 * kPi);

/// Green function of -Laplace in the strip with zero walls; checks inputs.
/// Throws ErrorKind::Domain for points off (0, pi) and ErrorKind::Singular for y == x.
double gs(Vec2 y, Vec2 x);

/// Same value without input checks; used in assembly loops.
/// Written as log1p(sin x2 sin y2 / S) with S = sinh^2(d/2) + sin^2((y2 - x2)/2),
/// which is exactly symmetric and free of cancellation at every separation.
inline double gs_fast(Vec2 y, Vec2 x) {
    const double sh = std::sinh(0.5 * (y.x1 - x.x1));
    const double sd = std::sin(0.5 * (y.x2 - x.x2));
    const double minus = sh * sh + sd * sd;
    return kInvFourPi * std::log1p(std::sin(x.x2) * std::sin(y.x2) / minus);
}

/// Textbook two-logarithm form, kept as an independent reference.
double gs_two_log(Vec2 y, Vec2 x);

/// Gradient of gs with respect to its first argument y.
Vec2 grad_gs(Vec2 y, Vec2 x);

/// Unchecked gradient in y.
inline Vec2 grad_gs_fast(Vec2 y, Vec2 x) {
    const double d = y.x1 - x.x1;
    if (std::abs(d) > 600.0) return {0.0, 0.0};
    const double sh = std::sinh(0.5 * d);
    const double sm = std::sin(0.5 * (y.x2 - x.x2));
    const double sp = std::sin(0.5 * (y.x2 + x.x2));
    const double minus = sh * sh + sm * sm;
    const double plus = sh * sh + sp * sp;
    const double c = 0.5 * kInvFourPi;
    return {-c * std::sinh(d) * std::sin(x.x2) * std::sin(y.x2) / (plus * minus),
            c * (std::sin(y.x2 + x.x2) / plus - std::sin(y.x2 - x.x2) / minus)};
}

/// Diagonal regular part H_S(x, x) = -(1/2pi) ln(2 sin x2).
double hs_robin(Vec2 x);

/// Off-diagonal regular part (1/2pi) ln(1/|y - x|) - gs(y, x); diagonal value below 1e-8.
double hs_regular(Vec2 y, Vec2 x);

/// Leading far-field term sin x2 sin y2 e^{-|x1 - y1|} / pi; needs separation >= 5.
double gs_far_field(Vec2 y, Vec2 x);

/// Derivative of gs(source, .) along the outward wall normal at (x1, pi).
inline double top_wall_flux(Vec2 source, double x1) {
    const double sh = std::sinh(0.5 * (x1 - source.x1));
    const double c = std::cos(0.5 * source.x2);
    return -kInvFourPi * std::sin(source.x2) / (sh * sh + c * c);
}

/// Derivative of gs(source, .) along the outward wall normal at (x1, 0).
inline double bottom_wall_flux(Vec2 source, double x1) {
    const double sh = std::sinh(0.5 * (x1 - source.x1));
    const double s = std::sin(0.5 * source.x2);
    return -kInvFourPi * std::sin(source.x2) / (sh * sh + s * s);
}

}  // namespace strip_vortex
