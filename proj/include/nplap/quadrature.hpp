#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace nplap {

namespace detail {

struct GaussLegendre20 {
    std::array<double, 20> nodes{};
    std::array<double, 20> weights{};

    GaussLegendre20() {
        constexpr int n = 20;
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) {
                    break;
                }
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
    }
};

inline const GaussLegendre20& gauss_legendre20() {
    static const GaussLegendre20 rule;
    return rule;
}

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Composite 20-point Gauss-Legendre rule over `panels` equal sub-intervals.
template <class F>
double gauss_legendre_composite(const F& f, double a, double b, int panels) {
    const auto& rule = detail::gauss_legendre20();
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * width;
        const double half = 0.5 * width;
        const double mid = lo + half;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            s += rule.weights[i] * f(mid + half * rule.nodes[i]);
        }
        total += s * half;
    }
    return total;
}

/// Adaptive Simpson quadrature with Richardson correction; `tol` is absolute.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int max_depth = 60) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace nplap
