#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <variant>
#include <vector>

namespace strip_vortex {

inline constexpr double kPi = std::numbers::pi;

/// Point or vector in strip coordinates: x1 horizontal, x2 in (0, pi).
struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }

struct Disk {
    Vec2 center;
    double radius = 0.0;

    bool operator==(const Disk&) const = default;
};

struct Ellipse {
    Vec2 center;
    double semi_a = 0.0;  // along x1 before tilt
    double semi_b = 0.0;
    double tilt = 0.0;    // radians, counterclockwise

    bool operator==(const Ellipse&) const = default;
};

/// Star-shaped curve r(t) = r0 + sum_k (a_k cos kt + b_k sin kt) about `center`.
struct FourierStar {
    Vec2 center;
    double r0 = 0.0;
    std::vector<double> cos_coeffs;  // a_1, a_2, ...
    std::vector<double> sin_coeffs;  // b_1, b_2, ...

    bool operator==(const FourierStar&) const = default;
};

using ShapeDescriptor = std::variant<Disk, Ellipse, FourierStar>;

/// Analytic counterclockwise parametrization t in [0, 2pi) of a descriptor.
class ParametricCurve {
public:
    explicit ParametricCurve(ShapeDescriptor shape) : shape_(std::move(shape)) {}

    Vec2 position(double t) const;
    Vec2 derivative(double t) const;
    Vec2 second_derivative(double t) const;
    double speed(double t) const { return norm(derivative(t)); }
    /// Signed curvature, positive where the curve bends toward the enclosed region.
    double curvature(double t) const;
    bool contains(Vec2 x) const;  // closure of the enclosed region
    Vec2 center() const;
    double area() const;
    const ShapeDescriptor& shape() const { return shape_; }

private:
    ShapeDescriptor shape_;
};

struct QuadNode {
    Vec2 point;
    Vec2 normal;          // unit normal into the obstacle
    double weight = 0.0;  // includes the arc-length Jacobian
};

/// One curved boundary panel: parameter interval plus cached quadrature.
struct Panel {
    double t0 = 0.0;
    double t1 = 0.0;
    Vec2 mid;          // collocation point gamma((t0 + t1) / 2)
    Vec2 normal;       // unit normal pointing out of the fluid, into the obstacle
    double weight = 0.0;  // arc length
    double speed_mid = 0.0;
    std::array<QuadNode, 2> gauss2{};
    std::array<QuadNode, 4> gauss4{};
    std::array<QuadNode, 8> gauss8{};
};

struct BoundaryDistance {
    double distance = 0.0;
    Vec2 foot;          // nearest boundary point
    Vec2 inward;        // unit normal at the foot pointing into the fluid
    double parameter = 0.0;
};

/// Closed obstacle boundary discretized into P curved panels.
class ObstacleCurve {
public:
    ObstacleCurve(ParametricCurve curve, std::vector<Panel> panels);

    const ParametricCurve& curve() const { return curve_; }
    const std::vector<Panel>& panels() const { return panels_; }
    std::size_t size() const { return panels_.size(); }
    const Panel& operator[](std::size_t i) const { return panels_[i]; }

    double perimeter() const;
    double max_panel_length() const { return max_length_; }
    double area() const { return curve_.area(); }
    bool contains(Vec2 x) const { return curve_.contains(x); }
    Vec2 centroid() const { return curve_.center(); }

    double min_x1() const { return box_lo_.x1; }
    double max_x1() const { return box_hi_.x1; }
    double min_x2() const { return box_lo_.x2; }
    double max_x2() const { return box_hi_.x2; }
    /// Half of the horizontal bounding-box width.
    double half_width() const { return 0.5 * (box_hi_.x1 - box_lo_.x1); }
    double diameter() const;

    /// Distance from x to the true curve (not the panel polygon).
    BoundaryDistance distance(Vec2 x) const;

    /// Sum over panels of (normal . midpoint) * weight; equals -2 |O0| up to O(P^-2).
    double divergence_identity() const;

private:
    ParametricCurve curve_;
    std::vector<Panel> panels_;
    double max_length_ = 0.0;
    Vec2 box_lo_;
    Vec2 box_hi_;
    std::vector<Vec2> samples_;  // dense polyline used to seed distance queries
    std::vector<double> sample_t_;
};

/// Build P panels with nodes at t_k = offset + 2 pi k / P.
/// Throws ErrorKind::Geometry if the curve leaves the strip or self-intersects.
ObstacleCurve build_obstacle(const ShapeDescriptor& shape, std::size_t panel_count,
                             double parameter_offset = 0.0);

/// Cartesian cells covering the truncated window (-L, L) x (0, pi), symmetric about x1 = 0.
class TruncatedGrid {
public:
    TruncatedGrid(double half_width, double h, std::size_t n1, std::size_t n2,
                  std::vector<std::uint8_t> mask);

    double half_width() const { return half_width_; }
    double h() const { return h_; }
    double cell_area() const { return h_ * h_; }
    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }
    std::size_t size() const { return n1_ * n2_; }

    std::size_t index(std::size_t i, std::size_t j) const { return i * n2_ + j; }
    std::size_t column(std::size_t k) const { return k / n2_; }
    std::size_t row(std::size_t k) const { return k % n2_; }

    double x1(std::size_t i) const { return (static_cast<double>(i) - 0.5 * static_cast<double>(n1_ - 1)) * h_; }
    double x2(std::size_t j) const { return (static_cast<double>(j) + 0.5) * h_; }
    Vec2 center(std::size_t k) const { return {x1(column(k)), x2(row(k))}; }

    bool masked(std::size_t k) const { return mask_[k] != 0; }
    std::size_t unmasked_count() const;
    double unmasked_area() const { return static_cast<double>(unmasked_count()) * cell_area(); }

    /// Column index of the cell containing x1, or npos when outside.
    std::size_t column_of(double x1) const;
    std::size_t row_of(double x2) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    double half_width_;
    double h_;
    std::size_t n1_;
    std::size_t n2_;
    std::vector<std::uint8_t> mask_;
};

/// Throws ErrorKind::Configuration unless pi / h is an integer and h <= pi / 32.
TruncatedGrid build_grid(const ObstacleCurve& obstacle, double half_width, double h);

/// Number of cells across the strip for a grid spacing, validating pi / h.
std::size_t cells_across_strip(double h);

}  // namespace strip_vortex
