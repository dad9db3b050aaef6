#include "strip_vortex/patch_solver.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

#include "strip_vortex/errors.hpp"
#include "strip_vortex/strip_kernel.hpp"

namespace strip_vortex {

namespace {

constexpr double kTieTolerance = 1e-14;
constexpr double kOmegaTolerance = 1e-12;  // in units of the cap 1/eps^2
constexpr double kBoxGrowth = 1.5;
constexpr double kInradiusFraction = 0.2;
constexpr int kRowBits = 24;

std::vector<CellMass> sorted_support(std::vector<CellMass> support) {
    std::sort(support.begin(), support.end(), [](const CellMass& a, const CellMass& b) { return a.cell < b.cell; });
    return support;
}

bool same_support(const std::vector<CellMass>& a, const std::vector<CellMass>& b, double cap) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].cell != b[k].cell) return false;
        if (std::abs(a[k].omega - b[k].omega) > kOmegaTolerance * cap) return false;
    }
    return true;
}

/// Blend omega_new with the previous iterate; relaxation 1 returns omega_new.
std::vector<CellMass> relax(const std::vector<CellMass>& old, const std::vector<CellMass>& fresh, double alpha) {
    if (alpha >= 1.0) return fresh;
    std::vector<CellMass> out;
    std::size_t a = 0, b = 0;
    while (a < old.size() || b < fresh.size()) {
        if (b == fresh.size() || (a < old.size() && old[a].cell < fresh[b].cell)) {
            out.push_back({old[a].cell, (1.0 - alpha) * old[a].omega});
            ++a;
        } else if (a == old.size() || fresh[b].cell < old[a].cell) {
            out.push_back({fresh[b].cell, alpha * fresh[b].omega});
            ++b;
        } else {
            out.push_back({old[a].cell, (1.0 - alpha) * old[a].omega + alpha * fresh[b].omega});
            ++a;
            ++b;
        }
    }
    return out;
}

void describe_support(PatchState& state, const PatchModel& model) {
    double mass = 0.0;
    Vec2 c{0.0, 0.0};
    std::vector<Vec2> pts;
    for (const CellMass& cm : state.support) {
        const double m = cm.omega * state.cell_area;
        const Vec2 x = model.cell_center(cm.cell);
        c = c + m * x;
        mass += m;
        pts.push_back(x);
    }
    state.centroid = (1.0 / mass) * c;
    double diam = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) diam = std::max(diam, norm(pts[a] - pts[b]));
    }
    state.diameter = diam + std::sqrt(state.cell_area);
}

}  // namespace

double cell_log_average(double h) {
    if (!(h > 0.0)) fail(ErrorKind::Precondition, "cell size must be positive");
    // Mean of ln(1/|z|) over the unit square centred at 0 is ln(2)/2 - pi/4 + 3/2.
    return -std::log(h) + 0.5 * std::log(2.0) - 0.25 * kPi + 1.5;
}

BathtubResult bathtub_threshold(const std::vector<double>& psi, double cell_area, double eps) {
    if (!(eps > 0.0) || !(cell_area > 0.0)) fail(ErrorKind::Precondition, "eps and cell area must be positive");
    const double cap = 1.0 / (eps * eps);
    const double cell_mass = cap * cell_area;
    if (static_cast<double>(psi.size()) * cell_mass < 1.0 * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "region of " << psi.size() << " cells cannot hold a patch of area eps^2 = " << eps * eps;
        fail(ErrorKind::Infeasible, msg.str());
    }
    std::vector<std::size_t> order(psi.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return psi[a] > psi[b]; });

    BathtubResult out;
    out.omega.assign(psi.size(), 0.0);
    double remaining = 1.0;
    std::size_t k = 0;
    while (k < order.size()) {
        const double level = psi[order[k]];
        std::size_t end = k;
        while (end < order.size() && level - psi[order[end]] <= kTieTolerance) ++end;
        const auto group = static_cast<double>(end - k);
        out.mu = level;
        if (group * cell_mass <= remaining) {
            for (std::size_t q = k; q < end; ++q) out.omega[order[q]] = cap;
            remaining -= group * cell_mass;
            out.full_cells += end - k;
            out.fill = 1.0;
            if (remaining <= 1e-15) break;
        } else {
            const double omega = remaining / (group * cell_area);
            for (std::size_t q = k; q < end; ++q) out.omega[order[q]] = omega;
            out.marginal_cells = end - k;
            out.fill = omega / cap;
            remaining = 0.0;
            break;
        }
        k = end;
    }
    return out;
}

double PatchState::mass() const {
    double m = 0.0;
    for (const CellMass& cm : support) m += cm.omega * cell_area;
    return m;
}

double PatchState::omega_psi() const {
    double sum = 0.0;
    std::size_t k = 0;
    for (const CellMass& cm : support) {
        while (k < cells.size() && cells[k] < cm.cell) ++k;
        sum += cm.omega * cell_area * (psi[k] - mu);
    }
    return sum;
}

std::vector<CellMass> initial_disk(const PatchModel& model, Vec2 center, double eps) {
    const std::vector<CellId>& cells = model.candidates();
    std::vector<double> score(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const Vec2 d = model.cell_center(cells[k]) - center;
        score[k] = -dot(d, d);
    }
    const BathtubResult bt = bathtub_threshold(score, model.cell_area(), eps);
    std::vector<CellMass> out;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (bt.omega[k] > 0.0) out.push_back({cells[k], bt.omega[k]});
    }
    return sorted_support(std::move(out));
}

FixedPointResult iterate_patch(PatchModel& model, double eps, const std::vector<CellMass>& initial,
                               const SolveOptions& options) {
    const double cap = 1.0 / (eps * eps);
    const double area = model.cell_area();
    FixedPointResult result;
    IterationDiagnostics& diag = result.diagnostics;
    diag.min_mu = std::numeric_limits<double>::infinity();

    std::vector<CellMass> support = sorted_support(initial);
    std::deque<std::vector<CellMass>> history;
    std::vector<double> green, eta, psi;
    double prev_energy = -std::numeric_limits<double>::infinity();
    double prev_mu = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        BathtubResult bt;
        for (;;) {
            model.evaluate(support, green, eta);
            psi.resize(green.size());
            for (std::size_t k = 0; k < green.size(); ++k) psi[k] = green[k] - eta[k];
            bt = bathtub_threshold(psi, area, eps);
            if (model.certify(support, bt.mu)) break;
        }
        const std::vector<CellId>& cells = model.candidates();

        // Energy and mass of the current iterate.
        double energy = 0.0, mass = 0.0;
        std::size_t k = 0;
        for (const CellMass& cm : support) {
            while (k < cells.size() && cells[k] < cm.cell) ++k;
            if (k == cells.size() || cells[k] != cm.cell) {
                fail(ErrorKind::Precondition, "support left the candidate set");
            }
            const double m = cm.omega * area;
            energy += m * (0.5 * green[k] - eta[k]);
            mass += m;
        }
        diag.max_mass_error = std::max(diag.max_mass_error, std::abs(mass - 1.0));
        diag.max_energy_drop = std::max(diag.max_energy_drop, prev_energy - energy);
        diag.min_mu = std::min(diag.min_mu, bt.mu);
        if (bt.mu < model.mu_floor()) diag.mu_floor_respected = false;
        result.trace.push_back({it, bt.mu, energy, support.size(), mass});

        std::vector<CellMass> fresh;
        for (std::size_t q = 0; q < cells.size(); ++q) {
            if (bt.omega[q] > 0.0) fresh.push_back({cells[q], bt.omega[q]});
        }
        std::vector<CellMass> next = relax(support, fresh, options.relaxation);

        const bool settled = same_support(next, support, cap) && std::abs(bt.mu - prev_mu) < options.mu_tolerance;
        if (settled || it + 1 == options.max_iterations) {
            PatchState& st = result.state;
            st.eps = eps;
            st.cell_area = area;
            st.support = support;
            st.mu = bt.mu;
            st.fill = bt.fill;
            st.energy = energy;
            st.iteration = it;
            st.cells = cells;
            st.psi = psi;
            describe_support(st, model);
            diag.converged = settled;
            // omega = cap on {psi > mu}, zero on {psi < mu}, one shared level in between.
            bool consistent = true;
            double partial_level = std::numeric_limits<double>::quiet_NaN();
            std::size_t s = 0;
            for (std::size_t q = 0; q < cells.size(); ++q) {
                double w = 0.0;
                while (s < support.size() && support[s].cell < cells[q]) ++s;
                if (s < support.size() && support[s].cell == cells[q]) w = support[s].omega;
                if (psi[q] > bt.mu + kTieTolerance && w != cap) consistent = false;
                if (psi[q] < bt.mu - kTieTolerance && w != 0.0) consistent = false;
                if (w > 0.0 && w < cap) {
                    if (std::isnan(partial_level)) partial_level = psi[q];
                    if (std::abs(psi[q] - partial_level) > kTieTolerance) consistent = false;
                }
            }
            diag.self_consistent = consistent;
            return result;
        }
        for (const auto& past : history) {
            if (same_support(next, past, cap)) {
                std::ostringstream msg;
                msg << "support cycle detected at iteration " << it << " (mu " << bt.mu << ", previous mu " << prev_mu
                    << ", support sizes " << support.size() << " and " << next.size() << ")";
                fail(ErrorKind::NonConvergence, msg.str());
            }
        }
        history.push_back(support);
        if (history.size() > options.cycle_window) history.pop_front();
        prev_energy = energy;
        prev_mu = bt.mu;
        support = std::move(next);
    }
    fail(ErrorKind::NonConvergence, "iteration limit must be positive");
}

DenseKernelModel::DenseKernelModel(std::size_t n1, std::size_t n2, double h, Eigen::MatrixXd kernel,
                                   std::vector<double> eta)
    : n1_(n1), n2_(n2), h_(h), kernel_(std::move(kernel)), eta_(std::move(eta)) {
    const std::size_t n = n1 * n2;
    if (static_cast<std::size_t>(kernel_.rows()) != n || static_cast<std::size_t>(kernel_.cols()) != n ||
        eta_.size() != n) {
        fail(ErrorKind::Precondition, "kernel and background must match the cell count");
    }
    if ((kernel_ - kernel_.transpose()).cwiseAbs().maxCoeff() > 0.0) {
        fail(ErrorKind::Precondition, "kernel must be symmetric");
    }
    cells_.resize(n);
    std::iota(cells_.begin(), cells_.end(), CellId{0});
}

Vec2 DenseKernelModel::cell_center(CellId cell) const {
    return {(static_cast<double>(cell / n2_) + 0.5) * h_, (static_cast<double>(cell % n2_) + 0.5) * h_};
}

void DenseKernelModel::evaluate(const std::vector<CellMass>& support, std::vector<double>& green,
                                std::vector<double>& eta) {
    green.assign(cells_.size(), 0.0);
    for (const CellMass& cm : support) {
        const double m = cm.omega * cell_area();
        const auto col = static_cast<Eigen::Index>(cm.cell);
        for (std::size_t k = 0; k < cells_.size(); ++k) green[k] += m * kernel_(static_cast<Eigen::Index>(k), col);
    }
    eta = eta_;
}

double DenseKernelModel::energy(const std::vector<double>& omega) const {
    Eigen::VectorXd m(static_cast<Eigen::Index>(omega.size()));
    for (std::size_t k = 0; k < omega.size(); ++k) m[static_cast<Eigen::Index>(k)] = omega[k] * cell_area();
    double e = 0.5 * m.dot(kernel_ * m);
    for (std::size_t k = 0; k < omega.size(); ++k) e -= m[static_cast<Eigen::Index>(k)] * eta_[k];
    return e;
}

double brute_force_energy(const DenseKernelModel& model, double eps) {
    const std::size_t n = model.candidates().size();
    const double cell_mass = model.cell_area() / (eps * eps);
    const double cells_needed = 1.0 / cell_mass;
    auto full = static_cast<std::size_t>(std::floor(cells_needed + 1e-12));
    double partial = 1.0 - static_cast<double>(full) * cell_mass;
    if (partial < 1e-12) partial = 0.0;
    if (full > 3) fail(ErrorKind::Precondition, "exhaustive search supports at most three saturated cells");
    if (static_cast<double>(n) < cells_needed) fail(ErrorKind::Infeasible, "instance cannot hold unit mass");
    const Eigen::MatrixXd& k = model.kernel();
    std::vector<double> eta;
    {
        std::vector<double> green;
        const_cast<DenseKernelModel&>(model).evaluate({}, green, eta);
    }
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> chosen(full);
    // Energy of the saturated set plus the partial cell p, expanded term by term.
    auto score = [&](std::size_t p) {
        double e = 0.0;
        for (std::size_t a = 0; a < full; ++a) {
            const auto ia = static_cast<Eigen::Index>(chosen[a]);
            e -= cell_mass * eta[chosen[a]];
            for (std::size_t b = 0; b < full; ++b) e += 0.5 * cell_mass * cell_mass * k(ia, static_cast<Eigen::Index>(chosen[b]));
            if (partial > 0.0) e += cell_mass * partial * k(ia, static_cast<Eigen::Index>(p));
        }
        if (partial > 0.0) {
            e += 0.5 * partial * partial * k(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) - partial * eta[p];
        }
        return e;
    };
    auto visit_partial = [&]() {
        if (partial == 0.0) {
            best = std::max(best, score(0));
            return;
        }
        for (std::size_t p = 0; p < n; ++p) {
            if (std::find(chosen.begin(), chosen.end(), p) != chosen.end()) continue;
            best = std::max(best, score(p));
        }
    };
    auto recurse = [&](auto&& self, std::size_t depth, std::size_t from) -> void {
        if (depth == full) {
            visit_partial();
            return;
        }
        for (std::size_t c = from; c < n; ++c) {
            chosen[depth] = c;
            self(self, depth + 1, c + 1);
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

DenseKernelModel make_synthetic_model(std::size_t n, double width, double noise, std::uint64_t seed) {
    if (n == 0 || !(width > 0.0)) fail(ErrorKind::Precondition, "synthetic instance needs cells and a positive width");
    const double h = 1.0 / static_cast<double>(n);
    const std::size_t count = n * n;
    auto center = [&](std::size_t k) {
        return Vec2{(static_cast<double>(k / n) + 0.5) * h, (static_cast<double>(k % n) + 0.5) * h};
    };
    Eigen::MatrixXd kernel(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            const Vec2 d = center(a) - center(b);
            const double v = std::exp(-dot(d, d) / (2.0 * width * width));
            kernel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
            kernel(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> eta(count);
    for (std::size_t k = 0; k < count; ++k) {
        const Vec2 x = center(k);
        eta[k] = 0.3 * x.x1 + 0.2 * x.x2 + noise * unit(rng);
    }
    return DenseKernelModel(n, n, h, std::move(kernel), std::move(eta));
}

CellLattice::CellLattice(double half_width_, double h_) : h(h_), half_width(half_width_) {
    n2 = static_cast<std::int64_t>(cells_across_strip(h_));
    if (!(half_width_ > 0.0)) fail(ErrorKind::Configuration, "window half-width must be positive");
    n1 = static_cast<std::int64_t>(std::floor(2.0 * half_width_ / h_));
}

CellId CellLattice::id(std::int64_t i, std::int64_t j) const {
    return (static_cast<CellId>(i + kColumnOffset) << kRowBits) | static_cast<CellId>(j);
}

std::int64_t CellLattice::column(CellId cell) const {
    return static_cast<std::int64_t>(cell >> kRowBits) - kColumnOffset;
}

std::int64_t CellLattice::row(CellId cell) const {
    return static_cast<std::int64_t>(cell & ((CellId{1} << kRowBits) - 1));
}

std::int64_t CellLattice::column_of(double x) const {
    return static_cast<std::int64_t>(std::llround(x / h + 0.5 * static_cast<double>(n1 - 1)));
}

std::int64_t CellLattice::row_of(double y) const {
    return static_cast<std::int64_t>(std::floor(y / h));
}

struct StripPatchModel::Sums {
    struct Source {
        CellId cell;
        Vec2 x;
        double mass;
        std::optional<Vec2> image;
    };
    std::vector<Source> sources;
    Eigen::VectorXd forward;  // A^{-1} sum m D(y)
    Eigen::VectorXd adjoint;  // A^{-T} sum m I(y)
    double rho_bar = 0.0;
};

StripPatchModel::StripPatchModel(const BackgroundField& background, const RegionSpec& region, double h, double eps,
                                 Vec2 start)
    : background_(background),
      region_(region),
      lattice_(region.half_width, h),
      eps_(eps),
      speed_(background.config().b + background.config().lambda) {
    if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::Configuration, "eps must lie in (0, 1)");
    if (region.kind == RegionKind::Layer && !(speed_ > 0.0)) {
        fail(ErrorKind::Regime, "layer region needs b + lambda > 0");
    }
    min_distance_ = std::max(0.5 * h, background.assembly().collar_width());
    ci_ = lattice_.column_of(start.x1);
    cj_ = lattice_.row_of(start.x2);
    box_half_ = static_cast<std::size_t>(std::ceil((1.5 * eps) / h)) + 4;
    rebuild_box();
}

bool StripPatchModel::point_in_region(Vec2 x) const {
    if (!(x.x2 > 0.0 && x.x2 < kPi) || !(std::abs(x.x1) < region_.half_width)) return false;
    const ObstacleCurve& obs = background_.assembly().obstacle();
    if (obs.contains(x)) return false;
    const double dx = std::max({0.0, obs.min_x1() - x.x1, x.x1 - obs.max_x1()});
    const double dy = std::max({0.0, obs.min_x2() - x.x2, x.x2 - obs.max_x2()});
    const double lower = std::hypot(dx, dy);
    switch (region_.kind) {
        case RegionKind::Window:
            return lower >= min_distance_ || obs.distance(x).distance >= min_distance_;
        case RegionKind::Exterior:
            return lower > region_.delta || obs.distance(x).distance > region_.delta;
        case RegionKind::Layer: {
            const double inner = std::max(region_.theta1 / speed_, min_distance_);
            const double outer = region_.theta2 / speed_;
            if (lower >= outer) return false;
            const double d = obs.distance(x).distance;
            return d > inner && d < outer;
        }
    }
    return false;
}

bool StripPatchModel::in_region(std::int64_t i, std::int64_t j) const {
    if (i < 0 || i >= lattice_.n1 || j < 0 || j >= lattice_.n2) return false;
    return point_in_region({lattice_.x1(i), lattice_.x2(j)});
}

bool StripPatchModel::box_covers_region() const {
    const auto r = static_cast<std::int64_t>(box_half_);
    std::int64_t lo_i = 0, hi_i = lattice_.n1 - 1, lo_j = 0, hi_j = lattice_.n2 - 1;
    if (region_.kind == RegionKind::Layer) {
        const ObstacleCurve& obs = background_.assembly().obstacle();
        const double reach = region_.theta2 / speed_ + lattice_.h;
        lo_i = std::max(lo_i, lattice_.column_of(obs.min_x1() - reach));
        hi_i = std::min(hi_i, lattice_.column_of(obs.max_x1() + reach));
        lo_j = std::max(lo_j, lattice_.row_of(obs.min_x2() - reach));
        hi_j = std::min(hi_j, lattice_.row_of(obs.max_x2() + reach));
    }
    return ci_ - r <= lo_i && ci_ + r >= hi_i && cj_ - r <= lo_j && cj_ + r >= hi_j;
}

void StripPatchModel::rebuild_box() {
    const auto r = static_cast<std::int64_t>(box_half_);
    const std::int64_t i0 = std::max<std::int64_t>(0, ci_ - r), i1 = std::min(lattice_.n1 - 1, ci_ + r);
    const std::int64_t j0 = std::max<std::int64_t>(0, cj_ - r), j1 = std::min(lattice_.n2 - 1, cj_ + r);
    const auto span = static_cast<std::size_t>(std::max<std::int64_t>(0, i1 - i0 + 1)) *
                      static_cast<std::size_t>(std::max<std::int64_t>(0, j1 - j0 + 1));
    if (span > kMaxCandidates) {
        std::ostringstream msg;
        msg << "candidate box of " << span << " cells exceeds the budget of " << kMaxCandidates;
        fail(ErrorKind::SupportExplosion, msg.str());
    }
    candidates_.clear();
    for (std::int64_t i = i0; i <= i1; ++i) {
        for (std::int64_t j = j0; j <= j1; ++j) {
            if (in_region(i, j)) candidates_.push_back(lattice_.id(i, j));
        }
    }
    ring_.clear();
    const GreenAssembly& assembly = background_.assembly();
    auto add_ring = [&](std::int64_t i, std::int64_t j) {
        if (j < 0 || j >= lattice_.n2) return;
        const Vec2 x{lattice_.x1(i), lattice_.x2(j)};
        try {
            assembly.check_outside_collar(x);
        } catch (const Error&) {
            return;
        }
        ring_.push_back(lattice_.id(i, j));
    };
    for (std::int64_t j = cj_ - r - 1; j <= cj_ + r + 1; ++j) {
        add_ring(ci_ - r - 1, j);
        add_ring(ci_ + r + 1, j);
    }
    for (std::int64_t i = ci_ - r; i <= ci_ + r; ++i) {
        add_ring(i, cj_ - r - 1);
        add_ring(i, cj_ + r + 1);
    }
}

StripPatchModel::Target StripPatchModel::make_target(Vec2 x) const {
    const GreenAssembly& assembly = background_.assembly();
    Target t;
    t.x = x;
    t.integrals = assembly.solver().panel_integrals(x);
    t.image = assembly.image_point(x);
    t.data = assembly.correction_data(x, t.image);
    t.rho = t.integrals.dot(assembly.rho().density());
    t.eta = background_.config().b * x.x2 - t.integrals.dot(background_.eta_density());
    t.self = kInvTwoPi * cell_log_average(lattice_.h) - hs_robin(x);
    return t;
}

const StripPatchModel::Target& StripPatchModel::target(CellId cell) const {
    auto it = targets_.find(cell);
    if (it == targets_.end()) it = targets_.emplace(cell, make_target(lattice_.center(cell))).first;
    return it->second;
}

StripPatchModel::Sums StripPatchModel::support_sums(const std::vector<CellMass>& support) const {
    const GreenAssembly& assembly = background_.assembly();
    const auto p = static_cast<Eigen::Index>(assembly.solver().size());
    Sums sums;
    Eigen::VectorXd data_sum = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd integral_sum = Eigen::VectorXd::Zero(p);
    for (const CellMass& cm : support) {
        const Target& t = target(cm.cell);
        const double m = cm.omega * cell_area();
        data_sum += m * t.data;
        integral_sum += m * t.integrals;
        sums.rho_bar += m * t.rho;
        sums.sources.push_back({cm.cell, t.x, m, t.image});
    }
    sums.forward = assembly.solver().solve_dirichlet(data_sum);
    sums.adjoint = assembly.solver().solve_dirichlet_transpose(integral_sum);
    return sums;
}

double StripPatchModel::green_at(const Target& t, const Sums& sums, std::optional<CellId> own) const {
    double direct = 0.0, image_forward = 0.0, image_adjoint = 0.0;
    for (const auto& s : sums.sources) {
        direct += s.mass * ((own && *own == s.cell) ? t.self : gs_fast(s.x, t.x));
        if (s.image) image_forward += s.mass * gs_fast(t.x, *s.image);
        if (t.image) image_adjoint += s.mass * gs_fast(s.x, *t.image);
    }
    // Average of the two representations of the obstacle correction keeps the operator symmetric.
    const double forward = t.integrals.dot(sums.forward) - image_forward;
    const double adjoint = sums.adjoint.dot(t.data) - image_adjoint;
    return direct + 0.5 * (forward + adjoint) + background_.assembly().lambda0() * t.rho * sums.rho_bar;
}

void StripPatchModel::evaluate(const std::vector<CellMass>& support, std::vector<double>& green,
                               std::vector<double>& eta) {
    const Sums sums = support_sums(support);
    green.resize(candidates_.size());
    eta.resize(candidates_.size());
    for (std::size_t k = 0; k < candidates_.size(); ++k) {
        const Target& t = target(candidates_[k]);
        green[k] = green_at(t, sums, candidates_[k]);
        eta[k] = t.eta;
    }
}

bool StripPatchModel::certify(const std::vector<CellMass>& support, double mu) {
    if (box_covers_region()) return true;
    const auto r = static_cast<std::int64_t>(box_half_);
    bool near_edge = false;
    for (const CellMass& cm : support) {
        const std::int64_t i = lattice_.column(cm.cell), j = lattice_.row(cm.cell);
        if (std::abs(i - ci_) >= r - 1) near_edge = true;
        if (j - cj_ <= -(r - 1) && cj_ - r > 0) near_edge = true;
        if (j - cj_ >= r - 1 && cj_ + r < lattice_.n2 - 1) near_edge = true;
    }
    bool ok = !near_edge;
    if (ok) {
        // Outside the box psi is harmonic; its boundary values are the ring samples, zero on the
        // walls and at infinity, and lambda0 rho_bar + lambda on the obstacle.
        const Sums sums = support_sums(support);
        double bound = std::max(0.0, background_.assembly().lambda0() * sums.rho_bar + background_.config().lambda);
        for (CellId c : ring_) {
            const Target& t = target(c);
            bound = std::max(bound, green_at(t, sums, std::nullopt) - t.eta);
        }
        ok = bound < mu;
    }
    if (ok) return true;
    box_half_ = static_cast<std::size_t>(std::ceil(kBoxGrowth * static_cast<double>(box_half_)));
    rebuild_box();
    return false;
}

bool StripPatchModel::touches_boundary(const std::vector<CellMass>& support, double mu) const {
    const GreenAssembly& assembly = background_.assembly();
    const ObstacleCurve& obs = assembly.obstacle();
    std::optional<Sums> sums;
    for (const CellMass& cm : support) {
        const std::int64_t i = lattice_.column(cm.cell), j = lattice_.row(cm.cell);
        const Vec2 inside = lattice_.center(cm.cell);
        for (std::int64_t di = -1; di <= 1; ++di) {
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                if (in_region(i + di, j + dj)) continue;
                // Locate the region boundary between the support cell and its neighbour.
                Vec2 a = inside, b{lattice_.x1(i + di), lattice_.x2(j + dj)};
                for (int k = 0; k < 40; ++k) {
                    const Vec2 m = 0.5 * (a + b);
                    (point_in_region(m) ? a : b) = m;
                }
                if (!sums) sums = support_sums(support);
                double excess;
                if (!(b.x2 > 0.0 && b.x2 < kPi)) {
                    excess = -mu;  // psi vanishes on the walls
                } else if (obs.contains(b) || obs.distance(b).distance < assembly.collar_width()) {
                    excess = assembly.lambda0() * sums->rho_bar + background_.config().lambda - mu;
                } else {
                    const Target t = make_target(b);
                    excess = green_at(t, *sums, std::nullopt) - t.eta - mu;
                }
                if (excess > 0.0) return true;
            }
        }
    }
    return false;
}

double StripPatchModel::mu_floor() const {
    return -background_.config().b * kPi;
}

void StripPatchModel::evaluate_points(const std::vector<CellMass>& support, const std::vector<Vec2>& points,
                                      std::vector<double>& green, std::vector<double>& eta) const {
    const Sums sums = support_sums(support);
    green.resize(points.size());
    eta.resize(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        background_.assembly().check_outside_collar(points[k]);
        const Target t = make_target(points[k]);
        green[k] = green_at(t, sums, std::nullopt);
        eta[k] = t.eta;
    }
}

double StripPatchModel::region_area() const {
    const double hc = std::max(lattice_.h, kPi / 256.0);
    const CellLattice coarse(region_.half_width, hc);
    std::size_t count = 0;
    for (std::int64_t i = 0; i < coarse.n1; ++i) {
        for (std::int64_t j = 0; j < coarse.n2; ++j) {
            if (point_in_region({coarse.x1(i), coarse.x2(j)})) ++count;
        }
    }
    return static_cast<double>(count) * hc * hc;
}

double StripPatchModel::region_inradius() const {
    switch (region_.kind) {
        case RegionKind::Window: return std::min(0.5 * kPi, region_.half_width);
        case RegionKind::Exterior: return std::min(0.5 * kPi, region_.half_width) - region_.delta;
        case RegionKind::Layer: return 0.5 * (region_.theta2 - region_.theta1) / speed_;
    }
    return 0.0;
}

MinimizerRecord region_minimizer(const BackgroundField& background, const RegionSpec& region, double h) {
    const Landscape land = scan(background, region, h);
    const auto best = land.best();
    if (!best) {
        fail(ErrorKind::Region, std::string("no interior landscape minimizer in the ") + to_string(region.kind) +
                                    " region");
    }
    return *best;
}

PatchSolution solve_patch(const BackgroundField& background, const RegionSpec& region, double h, double eps,
                          Vec2 start, const std::vector<Vec2>& minimizers, const SolveOptions& options) {
    if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::Configuration, "eps must lie in (0, 1)");
    PatchSolution sol;
    sol.model = std::make_shared<StripPatchModel>(background, region, h, eps, start);
    const StripPatchModel& model = *sol.model;
    if (model.region_area() < eps * eps) {
        std::ostringstream msg;
        msg << "the " << to_string(region.kind) << " region (area " << model.region_area()
            << ") cannot hold a patch of area eps^2 = " << eps * eps;
        fail(ErrorKind::Infeasible, msg.str());
    }
    if (eps > kInradiusFraction * model.region_inradius()) {
        std::ostringstream msg;
        msg << "eps = " << eps << " exceeds " << kInradiusFraction << " times the region inradius "
            << model.region_inradius();
        fail(ErrorKind::Infeasible, msg.str());
    }
    const std::vector<CellMass> init = initial_disk(model, start, eps);
    FixedPointResult fp = iterate_patch(*sol.model, eps, init, options);
    if (fp.diagnostics.converged && model.touches_boundary(fp.state.support, fp.state.mu)) {
        fail(ErrorKind::BoundaryContact, std::string("converged support touches the boundary of the ") +
                                             to_string(region.kind) + " region");
    }
    sol.state = std::move(fp.state);
    sol.trace = std::move(fp.trace);

    SolveReport& rep = sol.report;
    const PatchState& st = sol.state;
    rep.eps = eps;
    rep.converged = fp.diagnostics.converged;
    rep.iterations = st.iteration + 1;
    rep.mu = st.mu;
    rep.energy = st.energy;
    rep.fill = st.fill;
    rep.diameter = st.diameter;
    rep.centroid = st.centroid;
    rep.minimizer_distance = std::numeric_limits<double>::infinity();
    for (const Vec2& m : minimizers) rep.minimizer_distance = std::min(rep.minimizer_distance, norm(m - st.centroid));
    const double log_inv = std::log(1.0 / eps);
    rep.mu_scaled = st.mu - kInvTwoPi * log_inv;
    rep.energy_scaled = st.energy - kInvFourPi * log_inv;
    rep.omega_psi = st.omega_psi();
    rep.obstacle_distance = background.assembly().obstacle().distance(st.centroid).distance;
    rep.scaled_distance = rep.obstacle_distance * (background.config().b + background.config().lambda);
    rep.support_cells = st.support.size();
    rep.max_mass_error = fp.diagnostics.max_mass_error;
    rep.max_energy_drop = fp.diagnostics.max_energy_drop;
    rep.min_mu = fp.diagnostics.min_mu;
    rep.mu_floor_respected = fp.diagnostics.mu_floor_respected;
    rep.self_consistent = fp.diagnostics.self_consistent;
    return sol;
}

NegativityReport verify_exterior_negativity(const PatchSolution& solution, double mu_override) {
    const StripPatchModel& model = *solution.model;
    const double mu = std::isnan(mu_override) ? solution.state.mu : mu_override;
    const double L = model.region().half_width;
    const double h = model.lattice().h;
    std::vector<Vec2> probes;
    constexpr int kRows = 32;
    for (double offset : {0.0, 1.0, 2.0, 3.0}) {
        for (double side : {-1.0, 1.0}) {
            for (int j = 0; j < kRows; ++j) probes.push_back({side * (L + offset), (j + 0.5) * kPi / kRows});
        }
    }
    const double wall = 0.5 * h;
    for (double x1 = -(L + 3.0); x1 <= L + 3.0 + 1e-12; x1 += 0.5) {
        probes.push_back({x1, wall});
        probes.push_back({x1, kPi - wall});
    }
    // Probes inside the obstacle collar are not part of the frame.
    std::vector<Vec2> admissible;
    const GreenAssembly& assembly = model.background().assembly();
    for (const Vec2& x : probes) {
        try {
            assembly.check_outside_collar(x);
            admissible.push_back(x);
        } catch (const Error&) {
        }
    }
    std::vector<double> green, eta;
    model.evaluate_points(solution.state.support, admissible, green, eta);
    NegativityReport rep;
    rep.max_psi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < admissible.size(); ++k) rep.max_psi = std::max(rep.max_psi, green[k] - eta[k] - mu);
    rep.probes = admissible.size();
    rep.passed = rep.max_psi <= 1e-8;
    return rep;
}

SweepSummary asymptotic_sweep(const BackgroundField& background, const RegionSpec& region, double h,
                              const std::vector<double>& eps_list, Vec2 start, const std::vector<Vec2>& minimizers,
                              const SolveOptions& options) {
    for (std::size_t k = 1; k < eps_list.size(); ++k) {
        if (!(eps_list[k] < eps_list[k - 1])) fail(ErrorKind::Configuration, "eps list must be decreasing");
    }
    SweepSummary out;
    double lo_ratio = std::numeric_limits<double>::infinity(), hi_ratio = 0.0;
    double lo_gap = std::numeric_limits<double>::infinity(), hi_gap = -std::numeric_limits<double>::infinity();
    for (double eps : eps_list) {
        const PatchSolution sol = solve_patch(background, region, h, eps, start, minimizers, options);
        SweepRow row;
        row.eps = eps;
        row.report = sol.report;
        row.negativity = verify_exterior_negativity(sol);
        row.two_energy_minus_mu = 2.0 * sol.report.energy - sol.report.mu;
        row.diameter_ratio = sol.report.diameter / eps;
        if (!out.rows.empty()) {
            out.max_mu_drift = std::max(out.max_mu_drift, std::abs(row.report.mu_scaled - out.rows.back().report.mu_scaled));
        }
        lo_ratio = std::min(lo_ratio, row.diameter_ratio);
        hi_ratio = std::max(hi_ratio, row.diameter_ratio);
        lo_gap = std::min(lo_gap, row.two_energy_minus_mu);
        hi_gap = std::max(hi_gap, row.two_energy_minus_mu);
        out.max_abs_omega_psi = std::max(out.max_abs_omega_psi, std::abs(row.report.omega_psi));
        out.rows.push_back(row);
    }
    if (!out.rows.empty()) {
        out.diameter_ratio_spread = hi_ratio / lo_ratio;
        out.two_energy_minus_mu_variation = hi_gap - lo_gap;
    }
    return out;
}

}  // namespace strip_vortex
