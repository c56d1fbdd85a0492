#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nplap/discrete_operator.hpp"
#include "nplap/grid_geometry.hpp"
#include "nplap/radial_spectrum.hpp"

namespace nplap {

struct SolverConfig {
    int max_outer = 300;        ///< power iterations
    int inner_sweeps = 40;      ///< direction-update (policy) iterations per Dirichlet solve
    double tol_bracket = 1e-7;  ///< stop when cw_high - cw_low <= tol_bracket * cw_low
    std::uint64_t seed = 1;
    Mode mode = Mode::super;  ///< envelope branch at vanishing discrete gradient
    int stall_window = 6;        ///< iterations without progress before the step is damped
    double min_relaxation = 1.0 / 16.0;

    /// Throws DomainError unless all fields are positive and tol_bracket >= 1e-8.
    void validate() const;
};

struct EigenPair {
    double lambda = 0.0;
    double cw_low = 0.0;
    double cw_high = 0.0;
    ScalarField field;  ///< sup-norm 1, positive inside
    int iterations = 0;
    double residual = 0.0;  ///< max-node |apply_operator(field) - lambda field|
    std::vector<double> bracket_history;  ///< cw_high - cw_low per outer iteration
    double min_iterate = 0.0;             ///< smallest interior value over all iterates
    bool monotone_stencil = true;
    int linear_solves = 0;
    double relaxation = 1.0;  ///< final damping factor of the power step
};

/// Solves -Delta_p^N w = f with w = 0 on the boundary by iterating the
/// direction-frozen linear problem, damped like principal_eigenpair when the
/// residual stalls. `guide` seeds the directions (default: f).
/// Throws ConvergenceError (with the residual) if the iteration stalls.
ScalarField dirichlet_solve(const ScalarField& f, double p, const SolverConfig& cfg,
                            const ScalarField* guide = nullptr);

/// Distance-to-boundary start (positive inside).
ScalarField distance_start(const DomainPtr& domain);
/// Seeded random start with values uniform in [0.05, 1].
ScalarField random_positive_start(const DomainPtr& domain, std::uint64_t seed);

/// Inverse power iteration with Collatz-Wielandt bracketing. Directions are
/// frozen at the current iterate; when the bracket stops shrinking for
/// stall_window steps the update u <- (1 - theta) u + theta w is damped by
/// halving theta (down to min_relaxation). Throws ConvergenceError when the
/// bracket does not close within max_outer.
EigenPair principal_eigenpair(const DomainPtr& domain, double p, const SolverConfig& cfg,
                              const std::optional<ScalarField>& start = std::nullopt);

struct SimplicityReport {
    int trials = 0;
    double defect = 0.0;  ///< max over pairs of ||u - t v||_inf, t = ratio of sup norms
    bool hypotheses_met = true;  ///< connected boundary
    std::string flag;
    std::vector<double> lambdas;
    bool passed = false;  ///< defect <= 1e-3
};

SimplicityReport verify_simplicity(const DomainPtr& domain, double p, const SolverConfig& cfg, int trials);

/// ||field - field o g||_inf. Throws GeometryError if the mask is not invariant.
double verify_symmetry(const EigenPair& pair, const Symmetry& g);

struct HopfReport {
    double kappa = 0.0;               ///< minimum quotient over nodes and offsets
    std::array<double, 3> per_offset{};  ///< minimum for t = 2h, 4h, 8h
    int nodes_used = 0;
    int skipped = 0;
    bool stable = false;  ///< per-offset minima within a factor 2
    bool passed = false;  ///< kappa > 0 and stable
};

/// Inward difference quotients u(y - t nu)/t from the boundary points nearest
/// the boundary-band nodes. Requires a domain generated by an analytic shape.
HopfReport verify_hopf(const EigenPair& pair);

struct BoundsReport {
    double lambda = 0.0;
    double slack = 0.05;
    double sandwich_lower = 0.0;
    double sandwich_upper = 0.0;
    double measure_bound = 0.0;  ///< K_{2,p} |Omega|^{-1}
    std::optional<double> nested_outer_lambda;
    bool sandwich_ok = false;
    bool measure_ok = false;
    bool nested_ok = true;
    bool passed = false;
};

/// Checks lambda against the ball sandwich, the measure bound, and (optionally)
/// the eigenvalue of a domain containing this one; slack is relative.
BoundsReport verify_bounds(const EigenPair& pair, const ProblemParams& params,
                           std::optional<double> containing_domain_lambda = std::nullopt, double slack = 0.05);

struct FaberKrahnRow {
    std::string name;
    double lambda = 0.0;
    double measure = 0.0;
    double product = 0.0;  ///< lambda * measure (n = 2)
};

struct FaberKrahnTable {
    std::vector<FaberKrahnRow> rows;  ///< ascending by product
    std::vector<std::string> warnings;
};

/// Solves every shape at spacing h (duplicates removed with a warning) and
/// sorts by lambda * measure.
FaberKrahnTable faber_krahn_scan(const std::vector<Shape>& shapes, double p, double h, const SolverConfig& cfg);

}  // namespace nplap
