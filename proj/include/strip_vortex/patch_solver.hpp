#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "strip_vortex/kirchhoff_routh.hpp"

namespace strip_vortex {

using CellId = std::uint64_t;

/// Vorticity value on one grid cell.
struct CellMass {
    CellId cell = 0;
    double omega = 0.0;

    bool operator==(const CellMass&) const = default;
};

/// Average of ln(1/|z|) over a square cell of side h centred at the origin.
double cell_log_average(double h);

struct BathtubResult {
    std::vector<double> omega;  // per input cell
    double mu = 0.0;            // level of the marginal group
    double fill = 0.0;          // c_eps: omega eps^2 on the marginal group
    std::size_t full_cells = 0;
    std::size_t marginal_cells = 0;
};

/// Bathtub rearrangement: the maximizer of sum omega psi over 0 <= omega <= 1/eps^2 with mass 1.
/// Values within 1e-14 form one level; ties are broken by input order. Throws ErrorKind::Infeasible
/// when the cells cannot hold unit mass.
BathtubResult bathtub_threshold(const std::vector<double>& psi, double cell_area, double eps);

/// Linear operator and background seen by the fixed-point iteration.
class PatchModel {
public:
    virtual ~PatchModel() = default;

    virtual double cell_area() const = 0;
    /// Cells eligible for vorticity, in a fixed order.
    virtual const std::vector<CellId>& candidates() const = 0;
    virtual Vec2 cell_center(CellId cell) const = 0;
    /// Green potential and background stream at every candidate.
    virtual void evaluate(const std::vector<CellMass>& support, std::vector<double>& green,
                          std::vector<double>& eta) = 0;
    /// Confirm that no admissible cell outside the candidates exceeds mu. May enlarge the
    /// candidate set, in which case it returns false and the step is repeated.
    virtual bool certify(const std::vector<CellMass>&, double) { return true; }
    /// Whether the free boundary {psi = mu} reaches the region boundary next to the support.
    virtual bool touches_boundary(const std::vector<CellMass>&, double) const { return false; }
    /// Lower bound on the multiplier, -b pi for the strip problem.
    virtual double mu_floor() const { return -std::numeric_limits<double>::infinity(); }
};

struct SolveOptions {
    std::size_t max_iterations = 500;
    double relaxation = 1.0;  // blend factor for omega updates; 1 disables relaxation
    double mu_tolerance = 1e-9;
    double energy_tolerance = 1e-12;
    std::size_t cycle_window = 8;
};

struct IterationRecord {
    std::size_t iteration = 0;
    double mu = 0.0;
    double energy = 0.0;
    std::size_t support_size = 0;
    double mass = 0.0;
};

struct PatchState {
    double eps = 0.0;
    double cell_area = 0.0;
    std::vector<CellMass> support;  // sorted by cell id
    double mu = 0.0;
    double fill = 0.0;
    double energy = 0.0;
    std::size_t iteration = 0;
    Vec2 centroid;
    double diameter = 0.0;
    /// psi = G omega - eta at the candidates and the matching cell ids.
    std::vector<CellId> cells;
    std::vector<double> psi;

    double mass() const;
    /// Integral of omega (G omega - eta - mu).
    double omega_psi() const;
};

struct IterationDiagnostics {
    bool converged = false;
    double max_mass_error = 0.0;
    double max_energy_drop = 0.0;  // largest decrease between consecutive iterates
    double min_mu = 0.0;
    bool mu_floor_respected = true;
    bool self_consistent = false;  // omega = eps^-2 1_{psi > mu} up to the marginal level
};

struct FixedPointResult {
    PatchState state;
    std::vector<IterationRecord> trace;
    IterationDiagnostics diagnostics;
};

/// Alternate Green evaluation and bathtub rearrangement until the support and mu settle.
/// Throws ErrorKind::NonConvergence on a support cycle or when the iteration limit is hit.
FixedPointResult iterate_patch(PatchModel& model, double eps, const std::vector<CellMass>& initial,
                               const SolveOptions& options);

/// Mass-one patch on the cells nearest to `center` among the model candidates.
std::vector<CellMass> initial_disk(const PatchModel& model, Vec2 center, double eps);

/// Dense synthetic model: explicit symmetric kernel on an n1 x n2 cell block.
class DenseKernelModel : public PatchModel {
public:
    DenseKernelModel(std::size_t n1, std::size_t n2, double h, Eigen::MatrixXd kernel, std::vector<double> eta);

    double cell_area() const override { return h_ * h_; }
    const std::vector<CellId>& candidates() const override { return cells_; }
    Vec2 cell_center(CellId cell) const override;
    void evaluate(const std::vector<CellMass>& support, std::vector<double>& green,
                  std::vector<double>& eta) override;

    double energy(const std::vector<double>& omega) const;
    const Eigen::MatrixXd& kernel() const { return kernel_; }

private:
    std::size_t n1_;
    std::size_t n2_;
    double h_;
    Eigen::MatrixXd kernel_;
    std::vector<double> eta_;
    std::vector<CellId> cells_;
};

/// Exhaustive maximum of the energy over patches with `full` saturated cells plus one partial cell.
double brute_force_energy(const DenseKernelModel& model, double eps);

/// Synthetic n x n instance on the unit square: Gaussian kernel of width `width` and a linear
/// background perturbed by seeded noise of size `noise`.
DenseKernelModel make_synthetic_model(std::size_t n, double width, double noise, std::uint64_t seed);

/// Uniform cell lattice of spacing h over the strip, columns centred on x1 = 0.
struct CellLattice {
    double h = 0.0;
    double half_width = 0.0;
    std::int64_t n1 = 0;  // columns inside the window |x1| < L
    std::int64_t n2 = 0;  // rows across the strip

    CellLattice(double half_width, double h);
    double x1(std::int64_t i) const { return (static_cast<double>(i) - 0.5 * static_cast<double>(n1 - 1)) * h; }
    double x2(std::int64_t j) const { return (static_cast<double>(j) + 0.5) * h; }
    CellId id(std::int64_t i, std::int64_t j) const;
    std::int64_t column(CellId cell) const;
    std::int64_t row(CellId cell) const;
    Vec2 center(CellId cell) const { return {x1(column(cell)), x2(row(cell))}; }
    std::int64_t column_of(double x) const;
    std::int64_t row_of(double y) const;

    static constexpr std::int64_t kColumnOffset = std::int64_t{1} << 30;
};

/// The strip problem restricted to a region: exact Green potential on a box of cells around
/// the support, with a maximum-principle certificate for everything outside the box.
class StripPatchModel : public PatchModel {
public:
    StripPatchModel(const BackgroundField& background, const RegionSpec& region, double h, double eps,
                    Vec2 start);

    double cell_area() const override { return lattice_.h * lattice_.h; }
    const std::vector<CellId>& candidates() const override { return candidates_; }
    Vec2 cell_center(CellId cell) const override { return lattice_.center(cell); }
    void evaluate(const std::vector<CellMass>& support, std::vector<double>& green,
                  std::vector<double>& eta) override;
    bool certify(const std::vector<CellMass>& support, double mu) override;
    bool touches_boundary(const std::vector<CellMass>& support, double mu) const override;
    double mu_floor() const override;

    const CellLattice& lattice() const { return lattice_; }
    const BackgroundField& background() const { return background_; }
    const RegionSpec& region() const { return region_; }
    bool in_region(std::int64_t i, std::int64_t j) const;
    /// Region membership of a point, ignoring the lattice.
    bool point_in_region(Vec2 x) const;
    /// Green potential G omega and background eta at arbitrary fluid points outside the collar.
    void evaluate_points(const std::vector<CellMass>& support, const std::vector<Vec2>& points,
                         std::vector<double>& green, std::vector<double>& eta) const;
    /// Area of the region estimated by cell counting on a coarse lattice.
    double region_area() const;
    double region_inradius() const;
    std::size_t box_half_size() const { return box_half_; }

    static constexpr std::size_t kMaxCandidates = 400000;

private:
    struct Target {
        Vec2 x;
        Eigen::VectorXd integrals;  // panel integrals I(x)
        Eigen::VectorXd data;       // correction data -g(x) + g(x*)
        std::optional<Vec2> image;
        double rho = 0.0;
        double eta = 0.0;
        double self = 0.0;  // cell-averaged strip kernel on its own cell
    };
    struct Sums;

    Target make_target(Vec2 x) const;
    Sums support_sums(const std::vector<CellMass>& support) const;
    double green_at(const Target& t, const Sums& sums, std::optional<CellId> own) const;
    const Target& target(CellId cell) const;
    void rebuild_box();
    bool box_covers_region() const;

    const BackgroundField& background_;
    RegionSpec region_;
    CellLattice lattice_;
    double eps_;
    double speed_;       // b + lambda
    double min_distance_;
    std::int64_t ci_;
    std::int64_t cj_;
    std::size_t box_half_;
    std::vector<CellId> candidates_;
    std::vector<CellId> ring_;
    mutable std::unordered_map<CellId, Target> targets_;
};

struct SolveReport {
    double eps = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    double mu = 0.0;
    double energy = 0.0;
    double fill = 0.0;
    double diameter = 0.0;
    Vec2 centroid;
    double minimizer_distance = 0.0;  // centroid to the nearest KR minimizer
    double mu_scaled = 0.0;           // mu - (1/2pi) ln(1/eps)
    double energy_scaled = 0.0;       // E - (1/4pi) ln(1/eps)
    double omega_psi = 0.0;
    double obstacle_distance = 0.0;   // centroid to the obstacle boundary
    double scaled_distance = 0.0;     // obstacle_distance times (b + lambda)
    std::size_t support_cells = 0;
    double max_mass_error = 0.0;
    double max_energy_drop = 0.0;
    double min_mu = 0.0;
    bool mu_floor_respected = true;
    bool self_consistent = false;
};

struct PatchSolution {
    PatchState state;
    SolveReport report;
    std::vector<IterationRecord> trace;
    std::shared_ptr<StripPatchModel> model;
};

/// Best landscape minimizer of the region, used as the starting point.
MinimizerRecord region_minimizer(const BackgroundField& background, const RegionSpec& region, double h);

/// Energy maximizer over the region by bathtub iteration from a disk at `start`.
/// Throws ErrorKind::Infeasible when eps is too large for the region and
/// ErrorKind::BoundaryContact if the converged support touches the region boundary.
PatchSolution solve_patch(const BackgroundField& background, const RegionSpec& region, double h, double eps,
                          Vec2 start, const std::vector<Vec2>& minimizers, const SolveOptions& options = {});

struct NegativityReport {
    bool passed = false;
    double max_psi = 0.0;
    std::size_t probes = 0;
};

/// psi = G omega - eta - mu on frame probes |x1| in [L, L+3] and along the walls.
NegativityReport verify_exterior_negativity(const PatchSolution& solution, double mu_override = std::nan(""));

struct SweepRow {
    double eps = 0.0;
    SolveReport report;
    NegativityReport negativity;
    double two_energy_minus_mu = 0.0;
    double diameter_ratio = 0.0;  // diameter / eps
};

struct SweepSummary {
    std::vector<SweepRow> rows;
    double max_mu_drift = 0.0;          // consecutive change of mu - (1/2pi) ln(1/eps)
    double two_energy_minus_mu_variation = 0.0;
    double diameter_ratio_spread = 0.0;  // max / min of diameter / eps
    double max_abs_omega_psi = 0.0;
};

/// Solve for each eps of a decreasing list and collect the asymptotic diagnostics.
SweepSummary asymptotic_sweep(const BackgroundField& background, const RegionSpec& region, double h,
                              const std::vector<double>& eps_list, Vec2 start, const std::vector<Vec2>& minimizers,
                              const SolveOptions& options = {});

}  // namespace strip_vortex
