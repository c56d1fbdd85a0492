#include "nplap/eigen_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "nplap/bounds_constants.hpp"
#include "nplap/errors.hpp"

namespace nplap {

void SolverConfig::validate() const {
    if (max_outer < 1 || inner_sweeps < 1) {
        throw DomainError("solver config: iteration limits must be positive");
    }
    if (stall_window < 1 || !(min_relaxation > 0.0 && min_relaxation <= 1.0)) {
        throw DomainError("solver config: need stall_window >= 1 and min_relaxation in (0, 1]");
    }
    if (!(tol_bracket >= 1e-8) || !std::isfinite(tol_bracket)) {
        throw DomainError("solver config: tol_bracket must be at least 1e-8");
    }
}

namespace {

// The direction-frozen linear operator on the inside nodes, with a fixed
// sparsity pattern (all eight neighbours) so the symbolic factorization is reused.
class FrozenSystem {
public:
    FrozenSystem(DomainPtr domain, double p, Mode mode) : domain_(std::move(domain)), p_(p), mode_(mode) {
        const auto& nodes = domain_->inside_nodes();
        const auto n = static_cast<Eigen::Index>(nodes.size());
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(nodes.size() * 9);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const auto row = static_cast<Eigen::Index>(k);
            trip.emplace_back(row, row, 1.0);
            for (int dir = 0; dir < 8; ++dir) {
                const int nb = domain_->neighbor(nodes[k], dir);
                if (domain_->inside(nb)) {
                    trip.emplace_back(row, domain_->inside_index(nb), 0.0);
                }
            }
        }
        matrix_.resize(n, n);
        matrix_.setFromTriplets(trip.begin(), trip.end());
        matrix_.makeCompressed();
        lu_.analyzePattern(matrix_);
    }

    bool isotropic() const { return p_ == 2.0; }

    // Assembles with directions taken from `guide`; returns false if some row is not monotone.
    bool assemble(const ScalarField& guide) {
        const auto& nodes = domain_->inside_nodes();
        const double floor = gradient_floor(guide);
        bool monotone = true;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const int node = nodes[k];
            const Vec2 e = isotropic() ? Vec2{1.0, 0.0} : node_direction(guide, node, p_, mode_, floor);
            const NodeStencil st = direction_stencil(*domain_, node, e, p_);
            monotone = monotone && st.monotone;
            set_row(static_cast<Eigen::Index>(k), node, st);
        }
        lu_.factorize(matrix_);
        if (lu_.info() != Eigen::Success) {
            throw ConvergenceError("sparse factorization failed: " + lu_.lastErrorMessage());
        }
        ++factorizations_;
        return monotone;
    }

    ScalarField solve(const ScalarField& rhs) {
        const auto& nodes = domain_->inside_nodes();
        Eigen::VectorXd b(static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            b[static_cast<Eigen::Index>(k)] = rhs[nodes[k]];
        }
        const Eigen::VectorXd x = lu_.solve(b);
        if (lu_.info() != Eigen::Success) {
            throw ConvergenceError("sparse solve failed");
        }
        std::vector<double> values(domain_->node_count(), 0.0);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            values[static_cast<std::size_t>(nodes[k])] = x[static_cast<Eigen::Index>(k)];
        }
        return ScalarField(domain_, std::move(values));
    }

    int factorizations() const { return factorizations_; }

private:
    void set_row(Eigen::Index row, int node, const NodeStencil& st) {
        matrix_.coeffRef(row, row) = st.center;
        for (int dir = 0; dir < 8; ++dir) {
            const int nb = domain_->neighbor(node, dir);
            if (domain_->inside(nb)) {
                matrix_.coeffRef(row, domain_->inside_index(nb)) = st.weights[static_cast<std::size_t>(dir)];
            }
        }
    }

    DomainPtr domain_;
    double p_;
    Mode mode_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    int factorizations_ = 0;
};

double residual_against(const ScalarField& w, const ScalarField& f, double p, Mode mode) {
    const ScalarField op = apply_operator(w, p, mode);
    double r = 0.0;
    for (int node : w.domain().inside_nodes()) {
        r = std::max(r, std::fabs(op[node] - f[node]));
    }
    return r;
}

void check_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw DomainError("exponent p must exceed 1");
    }
}

// Halves the step when the tracked quantity has not halved over the last
// `window` calls (slow or oscillating fixed-point iteration).
class Damper {
public:
    Damper(int window, double floor) : window_(window), floor_(floor) {}

    void observe(double measure) {
        history_.push_back(measure);
        if (static_cast<int>(history_.size()) > window_) {
            const std::size_t first = history_.size() - 1 - static_cast<std::size_t>(window_);
            // a slow but monotone decrease is ordinary power-iteration behaviour; only
            // a window that also goes up somewhere counts as a stall
            bool rose = false;
            for (std::size_t k = first + 1; k < history_.size(); ++k) {
                rose = rose || history_[k] > history_[k - 1];
            }
            if (measure > 0.5 * history_[first] && rose && theta_ > floor_) {
                theta_ = std::max(0.5 * theta_, floor_);
                history_.clear();
            }
        }
    }

    double theta() const { return theta_; }

private:
    int window_;
    double floor_;
    double theta_ = 1.0;
    std::vector<double> history_;
};

// (1 - theta) u + theta w on the inside nodes.
ScalarField blend(const ScalarField& u, const ScalarField& w, double theta) {
    if (theta == 1.0) {
        return w;
    }
    ScalarField out = u;
    for (int node : u.domain().inside_nodes()) {
        out.set(node, (1.0 - theta) * u[node] + theta * w[node]);
    }
    return out;
}

ScalarField normalized(const ScalarField& f) {
    const double m = f.sup_norm();
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) {
        x /= m;
    }
    return ScalarField(f.domain_ptr(), std::move(v));
}

}  // namespace

ScalarField dirichlet_solve(const ScalarField& f, double p, const SolverConfig& cfg, const ScalarField* guide) {
    check_p(p);
    cfg.validate();
    if (!(f.min_inside() > 0.0)) {
        throw DomainError("dirichlet_solve: right-hand side must be positive inside");
    }
    FrozenSystem system(f.domain_ptr(), p, cfg.mode);
    const double scale = f.sup_norm();
    const double tol = std::max(1e-12, 1e-3 * cfg.tol_bracket) * scale;
    ScalarField current = guide != nullptr ? *guide : f;
    double residual = std::numeric_limits<double>::infinity();
    Damper damper(cfg.stall_window, cfg.min_relaxation);
    for (int sweep = 0; sweep < cfg.inner_sweeps; ++sweep) {
        system.assemble(current);
        if (system.isotropic()) {
            return system.solve(f);
        }
        current = blend(current, system.solve(f), damper.theta());
        residual = residual_against(current, f, p, cfg.mode);
        damper.observe(residual);
        if (residual <= tol) {
            return current;
        }
    }
    std::ostringstream msg;
    msg << "dirichlet_solve: residual " << residual << " after " << cfg.inner_sweeps << " direction updates";
    throw ConvergenceError(msg.str());
}

ScalarField distance_start(const DomainPtr& domain) {
    const auto& shape = domain->shape();
    if (!shape) {
        throw GeometryError("distance_start needs a shape-generated domain");
    }
    return ScalarField::from_function(domain, [&](Vec2 x) { return std::max(-shape->signed_distance(x), 1e-3 * domain->h()); });
}

ScalarField random_positive_start(const DomainPtr& domain, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    ScalarField f(domain);
    for (int node : domain->inside_nodes()) {
        f.set(node, dist(rng));
    }
    return f;
}

EigenPair principal_eigenpair(const DomainPtr& domain, double p, const SolverConfig& cfg,
                              const std::optional<ScalarField>& start) {
    check_p(p);
    cfg.validate();
    ScalarField u = start ? *start : distance_start(domain);
    if (&u.domain() != domain.get()) {
        throw GeometryError("principal_eigenpair: start field lives on another domain");
    }
    if (!(u.min_inside() > 0.0)) {
        throw DomainError("principal_eigenpair: start field must be positive inside");
    }
    u = normalized(u);

    EigenPair pair;
    pair.min_iterate = u.min_inside();
    FrozenSystem system(domain, p, cfg.mode);
    // directions lag one iteration behind: each step solves the problem frozen
    // at the previous iterate, which is exact at the fixed point
    bool assembled = false;
    bool converged = false;
    Damper damper(cfg.stall_window, cfg.min_relaxation);
    for (int k = 1; k <= cfg.max_outer; ++k) {
        if (!assembled || !system.isotropic()) {
            pair.monotone_stencil = system.assemble(u) && pair.monotone_stencil;
            assembled = true;
        }
        const ScalarField w = system.solve(u);
        ++pair.linear_solves;
        double low = std::numeric_limits<double>::infinity();
        double high = 0.0;
        double wmin = std::numeric_limits<double>::infinity();
        for (int node : domain->inside_nodes()) {
            wmin = std::min(wmin, w[node]);
            if (u[node] > 1e-8) {
                const double q = u[node] / w[node];
                low = std::min(low, q);
                high = std::max(high, q);
            }
        }
        if (!(wmin > 0.0)) {
            std::ostringstream msg;
            msg << "principal_eigenpair: iterate lost positivity (min " << wmin << ") at step " << k;
            throw ConvergenceError(msg.str());
        }
        if (!(low > 0.0) || low > high) {
            throw ConvergenceError("principal_eigenpair: Collatz-Wielandt bracket inverted");
        }
        pair.cw_low = low;
        pair.cw_high = high;
        pair.bracket_history.push_back(high - low);
        pair.iterations = k;
        if (high - low <= cfg.tol_bracket * low) {
            u = normalized(w);
            converged = true;
            break;
        }
        u = normalized(blend(u, normalized(w), damper.theta()));
        pair.min_iterate = std::min(pair.min_iterate, u.min_inside());
        damper.observe((high - low) / low);
        pair.relaxation = damper.theta();
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "principal_eigenpair: bracket [" << pair.cw_low << ", " << pair.cw_high << "] still open after "
            << cfg.max_outer << " iterations";
        throw ConvergenceError(msg.str());
    }
    pair.lambda = 0.5 * (pair.cw_low + pair.cw_high);
    const ScalarField op = apply_operator(u, p, cfg.mode);
    for (int node : domain->inside_nodes()) {
        pair.residual = std::max(pair.residual, std::fabs(op[node] - pair.lambda * u[node]));
    }
    pair.field = std::move(u);
    return pair;
}

SimplicityReport verify_simplicity(const DomainPtr& domain, double p, const SolverConfig& cfg, int trials) {
    if (trials < 2) {
        throw DomainError("verify_simplicity: need at least two trials");
    }
    SimplicityReport report;
    report.trials = trials;
    report.hypotheses_met = domain->boundary_loops() == 1;
    if (!report.hypotheses_met) {
        report.flag = "hypotheses not met: boundary is not connected";
    }
    std::vector<ScalarField> fields;
    for (int t = 0; t < trials; ++t) {
        const auto start = random_positive_start(domain, cfg.seed + static_cast<std::uint64_t>(t));
        EigenPair pair = principal_eigenpair(domain, p, cfg, start);
        report.lambdas.push_back(pair.lambda);
        fields.push_back(std::move(pair.field));
    }
    for (std::size_t a = 0; a < fields.size(); ++a) {
        for (std::size_t b = a + 1; b < fields.size(); ++b) {
            const double t = fields[a].sup_norm() / fields[b].sup_norm();
            double d = 0.0;
            for (int node : domain->inside_nodes()) {
                d = std::max(d, std::fabs(fields[a][node] - t * fields[b][node]));
            }
            report.defect = std::max(report.defect, d);
        }
    }
    report.passed = report.defect <= 1e-3;
    return report;
}

double verify_symmetry(const EigenPair& pair, const Symmetry& g) {
    return max_abs_difference(pair.field, apply_symmetry(pair.field, g));
}

HopfReport verify_hopf(const EigenPair& pair) {
    const GridDomain& d = pair.field.domain();
    if (!d.shape()) {
        throw GeometryError("verify_hopf needs boundary normals from an analytic shape");
    }
    const Shape& shape = *d.shape();
    HopfReport report;
    report.per_offset.fill(std::numeric_limits<double>::infinity());
    const std::array<double, 3> offsets{2.0 * d.h(), 4.0 * d.h(), 8.0 * d.h()};
    for (int node : d.boundary_band()) {
        const Vec2 y = d.position(node);
        const Vec2 nu = shape.outer_normal(y);
        const Vec2 foot = y - shape.signed_distance(y) * nu;
        std::array<double, 3> q{};
        bool ok = true;
        for (std::size_t k = 0; k < offsets.size() && ok; ++k) {
            const auto val = pair.field.interpolate(foot - offsets[k] * nu);
            if (!val) {
                ok = false;
                break;
            }
            q[k] = *val / offsets[k];
        }
        if (!ok) {
            ++report.skipped;
            continue;
        }
        ++report.nodes_used;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            report.per_offset[k] = std::min(report.per_offset[k], q[k]);
        }
    }
    if (report.nodes_used == 0) {
        report.kappa = 0.0;
        return report;
    }
    report.kappa = *std::min_element(report.per_offset.begin(), report.per_offset.end());
    const double top = *std::max_element(report.per_offset.begin(), report.per_offset.end());
    report.stable = report.kappa > 0.0 && top <= 2.0 * report.kappa;
    report.passed = report.kappa > 0.0 && report.stable;
    return report;
}

BoundsReport verify_bounds(const EigenPair& pair, const ProblemParams& params,
                           std::optional<double> containing_domain_lambda, double slack) {
    const GeometrySummary geo = geometry_summary(pair.field.domain());
    const SandwichBounds sw = sandwich_bounds(geo.inradius, geo.outradius, params);
    BoundsReport r;
    r.lambda = pair.lambda;
    r.slack = slack;
    r.sandwich_lower = sw.lower;
    r.sandwich_upper = sw.upper;
    r.measure_bound = constant_K(params.n, params.p) * std::pow(geo.measure, -2.0 / params.n);
    r.sandwich_ok = pair.lambda >= (1.0 - slack) * sw.lower && pair.lambda <= (1.0 + slack) * sw.upper;
    r.measure_ok = pair.lambda >= (1.0 - slack) * r.measure_bound;
    r.nested_outer_lambda = containing_domain_lambda;
    if (containing_domain_lambda) {
        r.nested_ok = pair.lambda >= (1.0 - slack) * *containing_domain_lambda;
    }
    r.passed = r.sandwich_ok && r.measure_ok && r.nested_ok;
    return r;
}

FaberKrahnTable faber_krahn_scan(const std::vector<Shape>& shapes, double p, double h, const SolverConfig& cfg) {
    FaberKrahnTable table;
    std::vector<Shape> unique;
    for (const Shape& s : shapes) {
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](const Shape& o) {
            return o.kind == s.kind && o.a == s.a && o.b == s.b && o.center == s.center;
        });
        if (dup) {
            table.warnings.push_back("duplicate shape " + s.name() + " ignored");
            continue;
        }
        unique.push_back(s);
    }
    for (const Shape& s : unique) {
        const DomainPtr domain = make_shape(s, h);
        const EigenPair pair = principal_eigenpair(domain, p, cfg);
        FaberKrahnRow row;
        row.name = s.name();
        row.lambda = pair.lambda;
        row.measure = geometry_summary(*domain).measure;
        row.product = row.lambda * row.measure;
        table.rows.push_back(row);
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const FaberKrahnRow& a, const FaberKrahnRow& b) { return a.product < b.product; });
    return table;
}

}  // namespace nplap
