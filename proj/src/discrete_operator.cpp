#include "nplap/discrete_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nplap/errors.hpp"

namespace nplap {

std::array<double, 2> Sym2::eigenvalues() const {
    const double mean = 0.5 * (xx + yy);
    const double rad = std::hypot(0.5 * (xx - yy), xy);
    return {mean - rad, mean + rad};
}

Vec2 Sym2::eigenvector(bool largest) const {
    const auto ev = eigenvalues();
    const double mu = largest ? ev[1] : ev[0];
    const Vec2 a{xy, mu - xx};
    const Vec2 b{mu - yy, xy};
    const Vec2 v = a.norm() >= b.norm() ? a : b;
    const double len = v.norm();
    if (len == 0.0) {
        // multiple of the identity: every direction is an eigenvector
        return largest ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    }
    return (1.0 / len) * v;
}

double evaluate_Fp(Vec2 xi, const Sym2& X, double p) {
    const double n2 = xi.dot(xi);
    if (n2 == 0.0) {
        throw DomainError("evaluate_Fp: the gradient argument must be nonzero");
    }
    return -((p - 2.0) / p) * X.quad(xi) / n2 - X.trace() / p;
}

Envelopes evaluate_envelopes(const Sym2& X, double p) {
    const auto ev = X.eigenvalues();
    const double a = -ev[0] / p - (p - 1.0) / p * ev[1];
    const double b = -ev[1] / p - (p - 1.0) / p * ev[0];
    return {std::min(a, b), std::max(a, b)};
}

Vec2 envelope_direction(const Sym2& X, double p, Mode mode) {
    // the envelope value is -(1/p) Tr X - ((p-2)/p) <Xe, e>; the lower one
    // maximizes (p-2)<Xe, e>, the upper one minimizes it
    const bool want_large_quad = (mode == Mode::sub) == (p >= 2.0);
    return X.eigenvector(want_large_quad);
}

namespace {

struct LineWeights {
    double forward = 0.0;
    double backward = 0.0;
    double center = 0.0;
};

// Second difference along a line with forward/backward step lengths hf, hb.
LineWeights second_difference(double hf, double hb) {
    const double s = hf + hb;
    return {2.0 / (hf * s), 2.0 / (hb * s), -2.0 / (hf * hb)};
}

// First difference with the same steps, second order on nonuniform spacing.
LineWeights first_difference(double hf, double hb) {
    const double denom = hf * hb * (hf + hb);
    return {hb * hb / denom, -hf * hf / denom, (hf * hf - hb * hb) / denom};
}

double neighbor_value(const ScalarField& u, int node, int dir) {
    const int nb = u.domain().neighbor(node, dir);
    return u.domain().inside(nb) ? u[nb] : 0.0;
}

double line_second(const ScalarField& u, int node, int fwd, int bwd, double step) {
    const GridDomain& d = u.domain();
    const auto w = second_difference(step * d.boundary_fraction(node, fwd), step * d.boundary_fraction(node, bwd));
    return w.forward * neighbor_value(u, node, fwd) + w.backward * neighbor_value(u, node, bwd) + w.center * u[node];
}

double line_first(const ScalarField& u, int node, int fwd, int bwd, double step) {
    const GridDomain& d = u.domain();
    const auto w = first_difference(step * d.boundary_fraction(node, fwd), step * d.boundary_fraction(node, bwd));
    return w.forward * neighbor_value(u, node, fwd) + w.backward * neighbor_value(u, node, bwd) + w.center * u[node];
}

}  // namespace

NodeStencil direction_stencil(const GridDomain& domain, int node, Vec2 e, double p) {
    const double c = (p - 2.0) / p;
    const double axx = 1.0 / p + c * e.x * e.x;
    const double ayy = 1.0 / p + c * e.y * e.y;
    const double axy = c * e.x * e.y;
    const double b = std::fabs(axy);

    const double h = domain.h();
    const double hd = std::numbers::sqrt2 * h;
    NodeStencil st;
    auto add_line = [&](int fwd, int bwd, double step, double coeff) {
        if (coeff == 0.0) {
            return;
        }
        const auto w =
            second_difference(step * domain.boundary_fraction(node, fwd), step * domain.boundary_fraction(node, bwd));
        // operator is minus the weighted sum of second differences
        st.center -= coeff * w.center;
        if (domain.inside(domain.neighbor(node, fwd))) {
            st.weights[static_cast<std::size_t>(fwd)] -= coeff * w.forward;
        }
        if (domain.inside(domain.neighbor(node, bwd))) {
            st.weights[static_cast<std::size_t>(bwd)] -= coeff * w.backward;
        }
    };
    add_line(0, 1, h, axx - b);
    add_line(2, 3, h, ayy - b);
    if (axy >= 0.0) {
        // along (1,1)/sqrt2 the second derivative is (u_xx + 2u_xy + u_yy)/2
        add_line(4, 5, hd, 2.0 * b);
    } else {
        add_line(6, 7, hd, 2.0 * b);
    }
    st.monotone = st.center >= 0.0 && std::all_of(st.weights.begin(), st.weights.end(), [](double w) {
                      return w <= 0.0;
                  });
    return st;
}

NodeDerivatives node_derivatives(const ScalarField& u, int node) {
    const double h = u.domain().h();
    const double hd = std::numbers::sqrt2 * h;
    NodeDerivatives out;
    out.gradient = {line_first(u, node, 0, 1, h), line_first(u, node, 2, 3, h)};
    out.hessian.xx = line_second(u, node, 0, 1, h);
    out.hessian.yy = line_second(u, node, 2, 3, h);
    out.hessian.xy = 0.5 * (line_second(u, node, 4, 5, hd) - line_second(u, node, 6, 7, hd));
    return out;
}

double gradient_floor(const ScalarField& u) {
    const double range = u.max_inside() - u.min_inside();
    return 1e-10 * range / u.domain().h();
}

Vec2 node_direction(const ScalarField& u, int node, double p, Mode mode, double floor) {
    const NodeDerivatives der = node_derivatives(u, node);
    const double gn = der.gradient.norm();
    if (gn > floor) {
        return (1.0 / gn) * der.gradient;
    }
    return envelope_direction(der.hessian, p, mode);
}

StencilEval evaluate_node(const ScalarField& u, int node, double p, Mode mode, double floor) {
    const NodeDerivatives der = node_derivatives(u, node);
    StencilEval out;
    out.gradient = der.gradient;
    out.grad_norm = der.gradient.norm();
    Vec2 e;
    if (out.grad_norm > floor) {
        out.regime = Regime::nondegenerate;
        e = (1.0 / out.grad_norm) * der.gradient;
    } else {
        out.regime = mode == Mode::sub ? Regime::envelope_lower : Regime::envelope_upper;
        e = envelope_direction(der.hessian, p, mode);
    }
    const GridDomain& d = u.domain();
    const NodeStencil st = direction_stencil(d, node, e, p);
    double value = st.center * u[node];
    for (int dir = 0; dir < 8; ++dir) {
        const double w = st.weights[static_cast<std::size_t>(dir)];
        if (w != 0.0) {
            value += w * u[d.neighbor(node, dir)];
        }
    }
    out.value = value;
    return out;
}

ScalarField apply_operator(const ScalarField& u, double p, Mode mode) {
    if (!(p > 1.0)) {
        throw DomainError("apply_operator: p must exceed 1");
    }
    const double floor = gradient_floor(u);
    ScalarField out(u.domain_ptr());
    for (int node : u.domain().inside_nodes()) {
        out.set(node, evaluate_node(u, node, p, mode, floor).value);
    }
    return out;
}

}  // namespace nplap
