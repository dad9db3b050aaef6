#include "strip_vortex/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/quadrature.hpp"

namespace strip_vortex {

namespace {

constexpr std::size_t kDenseSamples = 4096;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double star_radius(const FourierStar& s, double t) {
    double r = s.r0;
    for (std::size_t k = 0; k < s.cos_coeffs.size(); ++k) {
        r += s.cos_coeffs[k] * std::cos(static_cast<double>(k + 1) * t);
    }
    for (std::size_t k = 0; k < s.sin_coeffs.size(); ++k) {
        r += s.sin_coeffs[k] * std::sin(static_cast<double>(k + 1) * t);
    }
    return r;
}

double star_radius_second_derivative(const FourierStar& s, double t) {
    double d2r = 0.0;
    for (std::size_t k = 0; k < s.cos_coeffs.size(); ++k) {
        const double m = static_cast<double>(k + 1);
        d2r -= m * m * s.cos_coeffs[k] * std::cos(m * t);
    }
    for (std::size_t k = 0; k < s.sin_coeffs.size(); ++k) {
        const double m = static_cast<double>(k + 1);
        d2r -= m * m * s.sin_coeffs[k] * std::sin(m * t);
    }
    return d2r;
}

double star_radius_derivative(const FourierStar& s, double t) {
    double dr = 0.0;
    for (std::size_t k = 0; k < s.cos_coeffs.size(); ++k) {
        const double m = static_cast<double>(k + 1);
        dr -= m * s.cos_coeffs[k] * std::sin(m * t);
    }
    for (std::size_t k = 0; k < s.sin_coeffs.size(); ++k) {
        const double m = static_cast<double>(k + 1);
        dr += m * s.sin_coeffs[k] * std::cos(m * t);
    }
    return dr;
}

Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x1 - s * v.x2, s * v.x1 + c * v.x2};
}

void fill_nodes(const ParametricCurve& curve, double t0, double t1, QuadNode* out, std::size_t n) {
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (t1 - t0);
    const double mid = 0.5 * (t0 + t1);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = mid + half * rule.nodes[k];
        const Vec2 tangent = curve.derivative(t);
        const double speed = norm(tangent);
        out[k].point = curve.position(t);
        out[k].normal = {-tangent.x2 / speed, tangent.x1 / speed};
        out[k].weight = half * rule.weights[k] * speed;
    }
}

}  // namespace

Vec2 ParametricCurve::position(double t) const {
    return std::visit(Overloaded{
                          [t](const Disk& d) {
                              return d.center + d.radius * Vec2{std::cos(t), std::sin(t)};
                          },
                          [t](const Ellipse& e) {
                              return e.center + rotate({e.semi_a * std::cos(t), e.semi_b * std::sin(t)}, e.tilt);
                          },
                          [t](const FourierStar& s) {
                              return s.center + star_radius(s, t) * Vec2{std::cos(t), std::sin(t)};
                          },
                      },
                      shape_);
}

Vec2 ParametricCurve::derivative(double t) const {
    return std::visit(Overloaded{
                          [t](const Disk& d) { return d.radius * Vec2{-std::sin(t), std::cos(t)}; },
                          [t](const Ellipse& e) {
                              return rotate({-e.semi_a * std::sin(t), e.semi_b * std::cos(t)}, e.tilt);
                          },
                          [t](const FourierStar& s) {
                              const double r = star_radius(s, t);
                              const double dr = star_radius_derivative(s, t);
                              return Vec2{dr * std::cos(t) - r * std::sin(t), dr * std::sin(t) + r * std::cos(t)};
                          },
                      },
                      shape_);
}

Vec2 ParametricCurve::second_derivative(double t) const {
    return std::visit(Overloaded{
                          [t](const Disk& d) { return -d.radius * Vec2{std::cos(t), std::sin(t)}; },
                          [t](const Ellipse& e) {
                              return rotate({-e.semi_a * std::cos(t), -e.semi_b * std::sin(t)}, e.tilt);
                          },
                          [t](const FourierStar& s) {
                              const double r = star_radius(s, t);
                              const double dr = star_radius_derivative(s, t);
                              const double d2r = star_radius_second_derivative(s, t);
                              const double c = std::cos(t);
                              const double sn = std::sin(t);
                              return Vec2{d2r * c - 2.0 * dr * sn - r * c, d2r * sn + 2.0 * dr * c - r * sn};
                          },
                      },
                      shape_);
}

double ParametricCurve::curvature(double t) const {
    const Vec2 d1 = derivative(t);
    const Vec2 d2 = second_derivative(t);
    const double speed = norm(d1);
    return (d1.x1 * d2.x2 - d1.x2 * d2.x1) / (speed * speed * speed);
}

bool ParametricCurve::contains(Vec2 x) const {
    return std::visit(Overloaded{
                          [x](const Disk& d) {
                              const Vec2 v = x - d.center;
                              return dot(v, v) <= d.radius * d.radius;
                          },
                          [x](const Ellipse& e) {
                              const Vec2 v = rotate(x - e.center, -e.tilt);
                              const double u1 = v.x1 / e.semi_a;
                              const double u2 = v.x2 / e.semi_b;
                              return u1 * u1 + u2 * u2 <= 1.0;
                          },
                          [x](const FourierStar& s) {
                              const Vec2 v = x - s.center;
                              const double r = norm(v);
                              if (r == 0.0) return true;
                              return r <= star_radius(s, std::atan2(v.x2, v.x1));
                          },
                      },
                      shape_);
}

Vec2 ParametricCurve::center() const {
    return std::visit([](const auto& s) { return s.center; }, shape_);
}

double ParametricCurve::area() const {
    return std::visit(Overloaded{
                          [](const Disk& d) { return kPi * d.radius * d.radius; },
                          [](const Ellipse& e) { return kPi * e.semi_a * e.semi_b; },
                          [](const FourierStar& s) {
                              double a = kPi * s.r0 * s.r0;
                              for (double c : s.cos_coeffs) a += 0.5 * kPi * c * c;
                              for (double c : s.sin_coeffs) a += 0.5 * kPi * c * c;
                              return a;
                          },
                      },
                      shape_);
}

ObstacleCurve::ObstacleCurve(ParametricCurve curve, std::vector<Panel> panels)
    : curve_(std::move(curve)), panels_(std::move(panels)) {
    for (const Panel& p : panels_) max_length_ = std::max(max_length_, p.weight);
    const double t_start = panels_.empty() ? 0.0 : panels_.front().t0;
    box_lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    box_hi_ = {-box_lo_.x1, -box_lo_.x2};
    samples_.reserve(kDenseSamples);
    sample_t_.reserve(kDenseSamples);
    for (std::size_t k = 0; k < kDenseSamples; ++k) {
        const double t = t_start + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(kDenseSamples);
        const Vec2 p = curve_.position(t);
        samples_.push_back(p);
        sample_t_.push_back(t);
        box_lo_ = {std::min(box_lo_.x1, p.x1), std::min(box_lo_.x2, p.x2)};
        box_hi_ = {std::max(box_hi_.x1, p.x1), std::max(box_hi_.x2, p.x2)};
    }
}

double ObstacleCurve::perimeter() const {
    double sum = 0.0;
    for (const Panel& p : panels_) sum += p.weight;
    return sum;
}

double ObstacleCurve::diameter() const {
    return std::max(box_hi_.x1 - box_lo_.x1, box_hi_.x2 - box_lo_.x2);
}

double ObstacleCurve::divergence_identity() const {
    double sum = 0.0;
    for (const Panel& p : panels_) sum += dot(p.normal, p.mid) * p.weight;
    return sum;
}

BoundaryDistance ObstacleCurve::distance(Vec2 x) const {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        const Vec2 v = samples_[k] - x;
        const double d2 = dot(v, v);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
        }
    }
    const double dt = 2.0 * kPi / static_cast<double>(samples_.size());
    auto objective = [&](double t) {
        const Vec2 v = curve_.position(t) - x;
        return dot(v, v);
    };
    const auto [t, d2] = boost::math::tools::brent_find_minima(objective, sample_t_[best] - dt,
                                                                 sample_t_[best] + dt, 52);
    BoundaryDistance out;
    out.parameter = t;
    out.foot = curve_.position(t);
    out.distance = std::sqrt(std::max(d2, 0.0));
    const Vec2 tangent = curve_.derivative(t);
    const double speed = norm(tangent);
    out.inward = {tangent.x2 / speed, -tangent.x1 / speed};
    return out;
}

ObstacleCurve build_obstacle(const ShapeDescriptor& shape, std::size_t panel_count, double parameter_offset) {
    if (panel_count < 16) {
        fail(ErrorKind::Precondition, "panel count must be at least 16");
    }
    ParametricCurve curve(shape);

    std::visit(Overloaded{
                   [](const Disk& d) {
                       if (!(d.radius > 0.0)) fail(ErrorKind::Geometry, "disk radius must be positive");
                   },
                   [](const Ellipse& e) {
                       if (!(e.semi_a > 0.0 && e.semi_b > 0.0)) {
                           fail(ErrorKind::Geometry, "ellipse semi-axes must be positive");
                       }
                   },
                   [&curve](const FourierStar& s) {
                       for (std::size_t k = 0; k < kDenseSamples; ++k) {
                           const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(kDenseSamples);
                           if (!(star_radius(s, t) > 0.0)) {
                               fail(ErrorKind::Geometry, "Fourier radius changes sign: curve self-intersects");
                           }
                       }
                       (void)curve;
                   },
               },
               shape);

    for (std::size_t k = 0; k < kDenseSamples; ++k) {
        const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(kDenseSamples);
        const Vec2 p = curve.position(t);
        if (!(p.x2 > 0.0 && p.x2 < kPi)) {
            std::ostringstream msg;
            msg << "obstacle boundary leaves the strip at (" << p.x1 << ", " << p.x2 << ")";
            fail(ErrorKind::Geometry, msg.str());
        }
    }

    std::vector<Panel> panels(panel_count);
    const double dt = 2.0 * kPi / static_cast<double>(panel_count);
    for (std::size_t k = 0; k < panel_count; ++k) {
        Panel& p = panels[k];
        p.t0 = parameter_offset + dt * static_cast<double>(k);
        p.t1 = parameter_offset + dt * static_cast<double>(k + 1);
        const double tm = 0.5 * (p.t0 + p.t1);
        p.mid = curve.position(tm);
        const Vec2 tangent = curve.derivative(tm);
        p.speed_mid = norm(tangent);
        p.normal = {-tangent.x2 / p.speed_mid, tangent.x1 / p.speed_mid};
        fill_nodes(curve, p.t0, p.t1, p.gauss2.data(), 2);
        fill_nodes(curve, p.t0, p.t1, p.gauss4.data(), 4);
        fill_nodes(curve, p.t0, p.t1, p.gauss8.data(), 8);
        p.weight = 0.0;
        for (const QuadNode& q : p.gauss8) p.weight += q.weight;
        if (!(p.weight > 0.0)) fail(ErrorKind::Geometry, "degenerate panel with zero arc length");
    }
    return ObstacleCurve(std::move(curve), std::move(panels));
}

TruncatedGrid::TruncatedGrid(double half_width, double h, std::size_t n1, std::size_t n2,
                             std::vector<std::uint8_t> mask)
    : half_width_(half_width), h_(h), n1_(n1), n2_(n2), mask_(std::move(mask)) {}

std::size_t TruncatedGrid::unmasked_count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
}

std::size_t TruncatedGrid::column_of(double x1_value) const {
    const double s = (x1_value - x1(0)) / h_ + 0.5;
    if (!(s >= 0.0)) return npos;
    const auto i = static_cast<std::size_t>(std::floor(s));
    return i < n1_ ? i : npos;
}

std::size_t TruncatedGrid::row_of(double x2_value) const {
    const double s = x2_value / h_;
    if (!(s >= 0.0)) return npos;
    const auto j = static_cast<std::size_t>(std::floor(s));
    return j < n2_ ? j : npos;
}

std::size_t cells_across_strip(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        fail(ErrorKind::Configuration, "grid spacing h must be positive");
    }
    const double ratio = kPi / h;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio) {
        std::ostringstream msg;
        msg << "grid spacing h = " << h << " does not divide pi";
        fail(ErrorKind::Configuration, msg.str());
    }
    if (rounded < 32.0) {
        fail(ErrorKind::Configuration, "grid spacing h must not exceed pi/32");
    }
    return static_cast<std::size_t>(rounded);
}

TruncatedGrid build_grid(const ObstacleCurve& obstacle, double half_width, double h) {
    const std::size_t n2 = cells_across_strip(h);
    const double h_exact = kPi / static_cast<double>(n2);
    if (!(half_width > obstacle.half_width() + 1.0)) {
        fail(ErrorKind::Precondition, "window half-width L must exceed the obstacle extent by 1");
    }
    if (!(obstacle.max_x1() < half_width && obstacle.min_x1() > -half_width)) {
        fail(ErrorKind::Precondition, "obstacle must lie inside the window");
    }
    const auto n1 = static_cast<std::size_t>(std::floor(2.0 * half_width / h_exact + 1e-9));
    std::vector<std::uint8_t> mask(n1 * n2, 0);
    TruncatedGrid probe(half_width, h_exact, n1, n2, mask);
    for (std::size_t i = 0; i < n1; ++i) {
        const double x1 = probe.x1(i);
        if (x1 < obstacle.min_x1() - h_exact || x1 > obstacle.max_x1() + h_exact) continue;
        for (std::size_t j = 0; j < n2; ++j) {
            if (obstacle.contains({x1, probe.x2(j)})) mask[probe.index(i, j)] = 1;
        }
    }
    return TruncatedGrid(half_width, h_exact, n1, n2, std::move(mask));
}

}  // namespace strip_vortex
