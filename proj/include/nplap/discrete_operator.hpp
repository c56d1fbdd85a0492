#pragma once

#include <array>

#include "nplap/grid_geometry.hpp"

namespace nplap {

/// Symmetric 2x2 matrix.
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    double trace() const { return xx + yy; }
    double det() const { return xx * yy - xy * xy; }
    double quad(Vec2 v) const { return xx * v.x * v.x + 2.0 * xy * v.x * v.y + yy * v.y * v.y; }
    /// Ordered eigenvalues (min, max).
    std::array<double, 2> eigenvalues() const;
    /// Unit eigenvector of the smaller (largest = false) or larger eigenvalue.
    Vec2 eigenvector(bool largest) const;
};

enum class Regime { nondegenerate, envelope_lower, envelope_upper };
enum class Mode { sub, super };

struct StencilEval {
    double value = 0.0;  ///< operator value -Delta_p^N u at the node
    Vec2 gradient{};
    double grad_norm = 0.0;
    Regime regime = Regime::nondegenerate;
};

struct Envelopes {
    double lower = 0.0;
    double upper = 0.0;
};

/// F(xi, X) = -((p-2)/p) <X xi, xi>/|xi|^2 - (1/p) Tr X. Throws DomainError for xi = 0.
double evaluate_Fp(Vec2 xi, const Sym2& X, double p);

/// Lower and upper semicontinuous envelopes of F at xi = 0 (lower <= upper).
Envelopes evaluate_envelopes(const Sym2& X, double p);

/// Direction e for which -(1/p) Tr X - ((p-2)/p) <Xe, e> equals the envelope
/// selected by `mode` (sub: lower, super: upper).
Vec2 envelope_direction(const Sym2& X, double p, Mode mode);

/// Linear stencil at one inside node: value = center * u(node) + sum_k weights[k] * u(neighbor k).
/// Neighbours outside the mask carry zero weight (the Dirichlet value is zero).
struct NodeStencil {
    double center = 0.0;
    std::array<double, 8> weights{};
    bool monotone = true;  ///< center >= 0 and every weight <= 0
};

/// Stencil of -sum a_ij d_ij u with a = (1/p) I + ((p-2)/p) e e^T. The mixed
/// derivative is carried by the diagonal pair matching the sign of a_xy, so the
/// stencil is monotone whenever a_xx, a_yy >= |a_xy| (all directions if
/// 1.18 <= p <= 6.82). Near the boundary the second differences use the
/// distance to the boundary crossing (Shortley-Weller).
NodeStencil direction_stencil(const GridDomain& domain, int node, Vec2 e, double p);

/// Central gradient and second differences at an inside node.
struct NodeDerivatives {
    Vec2 gradient{};
    Sym2 hessian{};
};
NodeDerivatives node_derivatives(const ScalarField& u, int node);

/// 1e-10 * (max - min of u over inside nodes) / h.
double gradient_floor(const ScalarField& u);

/// Full evaluation at one inside node.
StencilEval evaluate_node(const ScalarField& u, int node, double p, Mode mode, double floor);

/// The direction used by evaluate_node: the normalized gradient when it exceeds
/// the floor, otherwise the envelope direction of the discrete Hessian.
Vec2 node_direction(const ScalarField& u, int node, double p, Mode mode, double floor);

/// -Delta_p^N u at every inside node (zero outside).
ScalarField apply_operator(const ScalarField& u, double p, Mode mode);

}  // namespace nplap
