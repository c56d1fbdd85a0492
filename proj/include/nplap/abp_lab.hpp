#pragma once

#include <span>
#include <string>
#include <vector>

#include "nplap/discrete_operator.hpp"
#include "nplap/grid_geometry.hpp"

namespace nplap {

struct SupConvResult {
    double eps = 0.0;
    double rho_eps = 0.0;  ///< 2 sqrt(eps ||u||_inf)
    ScalarField u_eps;     ///< sup-convolution on the inside nodes
    std::vector<int> U_eps;      ///< {u > eps}
    std::vector<int> A_eps;      ///< nodes of U_eps farther than rho_eps from its complement
    std::vector<int> Omega_eps;  ///< {x in A_eps : u_eps(x) > m_eps}
    double m_eps = 0.0;          ///< max of u_eps over the discrete boundary of A_eps
    std::vector<int> argmax_map;  ///< per lattice node: maximizing node, -1 outside the mask
};

/// u_eps(x) = max_y {u(y) - |x - y|^2 / (2 eps)} over inside nodes y. Requires
/// u >= 0 and eps in (0, 1); the search window |x - y| <= rho_eps is then exact.
/// Throws DomainError if A_eps is empty.
SupConvResult sup_convolve(const ScalarField& u, double eps);

/// Smallest second difference of u_eps + |x|^2/(2 eps) along lattice lines
/// (nonnegative up to rounding: the function is a maximum of affine maps).
double semiconvexity_margin(const SupConvResult& s);

/// Values on a node subset of a lattice (full-length storage, NaN off the subset).
struct LatticeFunction {
    DomainPtr lattice;
    std::vector<int> nodes;
    std::vector<double> values;
};

struct EnvelopeResult {
    double sigma = 0.0;
    std::vector<int> domain_star_sigma;  ///< envelope domain nodes
    LatticeFunction gamma;               ///< concave envelope on the envelope domain
    std::vector<int> contact_set;        ///< nodes with v >= gamma - contact_tol
    double contact_tol = 0.0;
    int upper_facets = 0;
};

/// Lattice nodes within sigma of the convex hull of `core` (physical units).
std::vector<int> hull_neighborhood(const GridDomain& lattice, std::span<const int> core, double sigma);

/// Concave envelope of v over the convex hull of its nodes, evaluated at the
/// nodes (upper hull of the points (x, v(x))). contact_tol = 10 h^2 (range of v).
/// Throws GeometryError when the nodes are collinear.
EnvelopeResult concave_envelope(const LatticeFunction& v, double sigma = 0.0);

/// v_eps = log u_eps on Omega_eps and log m_eps elsewhere, on the sigma-neighbourhood
/// of the convex hull of Omega_eps.
LatticeFunction extended_log(const SupConvResult& s, double sigma);

struct ChainCheck {
    int checked = 0;
    int passed = 0;
    double pass_rate = 0.0;
    double max_excess = 0.0;  ///< max over nodes of (lhs - rhs) / (|lhs| + |rhs|), tolerance not applied
};

struct AbpChainReport {
    double h = 0.0;
    double eps = 0.0;
    double sigma = 0.0;
    double p = 0.0;
    double lambda = 0.0;
    double tol_constant = 0.0;  ///< C in tol_h = C h (|lhs| + |rhs|)
    int contact_nodes = 0;
    ChainCheck f1;  ///< det(-H) <= (-Tr H / n)^n
    ChainCheck f2;  ///< -Tr H <= p/((p-1) ^ 1) * F
    ChainCheck f3;  ///< F <= lambda + ((p-1)/p) |xi|^2
    double hessian_psd_rate = 0.0;  ///< contact nodes with -H >= -tol_h
    double area_lhs = 0.0;          ///< sum over checked contact nodes of g(|xi|) det(-H) h^2
    double area_rhs = 0.0;          ///< I_g restricted to the ball inside the gradient image
    double gradient_radius = 0.0;
    bool area_ok = false;           ///< area_lhs >= (1 - 0.05) area_rhs
    double terminal_lhs = 0.0;      ///< I_g
    double terminal_rhs = 0.0;      ///< (p / (n [(p-1) ^ 1]))^n |Omega|
    bool terminal_ok = false;
    std::string note;
};

inline constexpr double kChainTolConstant = 2.0;
inline constexpr double kAreaSlack = 0.05;

/// Replays the lower-bound argument on a positive eigenfunction u (n = 2).
AbpChainReport verify_abp_chain(const ScalarField& u, double p, double lambda, double eps, double sigma,
                                double tol_constant = kChainTolConstant);

std::string abp_report_json(const AbpChainReport& report);

struct GradientProbeReport {
    int probes = 0;
    int matched = 0;
    double fraction = 0.0;
    double cap = 0.0;  ///< largest probe radius
    double max_inner_gradient = 0.0;
};

/// For probe vectors q on `radii` circles up to `cap` (default: half the largest
/// gradient of v on inner nodes) with `sample_directions` angles each, finds the
/// minimizer of -v(y) - q.y over inner nodes and checks |grad v + q| <= h (1 + |D^2 v|)
/// there (|D^2 v| ~ |q|^2 near the boundary for v = log u).
GradientProbeReport gradient_image_probe(const ScalarField& v, int sample_directions, int radii = 5,
                                         double cap = 0.0);

}  // namespace nplap
