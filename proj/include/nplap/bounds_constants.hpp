#pragma once

#include <span>
#include <vector>

#include "nplap/radial_spectrum.hpp"

namespace nplap {

/// |B_R| = pi^{n/2} R^n / Gamma(1 + n/2).
double ball_volume(int n, double R);

/// omega_n = H^{n-1}(S^{n-1}) = 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Lower-bound constant of the measure estimate lambda >= K |Omega|^{-2/n}:
/// (n[(p-1) ^ 1])^2 / (p(p-1)) * 4^{-1+1/n} pi^{1+1/n} Gamma((n+1)/2)^{-2/n}.
double constant_K(int n, double p);

/// Ball value of lambda |Omega|^{2/n}: pi (p-1)/p Gamma(1+n/2)^{-2/n} (mu_1^{(-alpha)})^2.
double constant_K_star(int n, double p);

struct ConstantsRow {
    int n = 0;
    double p = 0.0;
    double K = 0.0;
    double K_star = 0.0;
    double ratio = 0.0;
};

ConstantsRow constants_row(int n, double p);

/// Rows of K, K*, and g_n(p) = K*/K over an ascending grid of exponents.
std::vector<ConstantsRow> ratio_curve(int n, std::span<const double> p_grid);

/// `points` log-spaced values spanning [lo, hi] (both ends included).
std::vector<double> log_spaced_grid(double lo, double hi, int points);

/// Closed form of I_g = int_{R^n} (lambda + ((p-1)/p)|xi|^2)^{-n} d xi.
double abp_integral(int n, double p, double lambda);

/// The same integral by adaptive Simpson on omega_n int_0^T rho^{n-1} g(rho) d rho,
/// with T chosen so the neglected tail is below 1e-13 of the total.
double abp_integral_quadrature(int n, double p, double lambda);

/// Restriction of I_g to the ball |xi| <= radius (quadrature).
double abp_integral_ball(int n, double p, double lambda, double radius);

struct SandwichBounds {
    double lower = 0.0;  ///< lambda(B_R), R = outer radius
    double upper = 0.0;  ///< lambda(B_rho), rho = inradius
};

/// lambda(B_R) <= lambda(Omega) <= lambda(B_rho). Requires 0 < rho <= R.
SandwichBounds sandwich_bounds(double inradius, double outradius, const ProblemParams& params);

}  // namespace nplap
