#pragma once

#include <vector>

namespace nplap {

/// Dimension n, exponent p, and the derived Bessel order parameter
/// alpha = (p - n) / (2 (p - 1)). The eigenfunction profile uses J_{-alpha}.
struct ProblemParams {
    int n = 2;
    double p = 2.0;
    double alpha = 0.0;

    /// Validates n >= 1 and p > 1, derives alpha. Throws DomainError.
    static ProblemParams make(int n, double p);

    double bessel_order() const { return -alpha; }
};

/// Radial eigenprofile g on [0, R], normalized by g(0) = 1.
struct RadialProfile {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> slopes;  ///< g'(r)
    double eigenvalue = 0.0;
    double boundary_value = 0.0;  ///< g(R) at the accepted eigenvalue
};

/// lambda(B_R) = ((p-1)/p) (mu_1^{(-alpha)} / R)^2.
double ball_eigenvalue_bessel(const ProblemParams& params, double R);

struct ShootingOptions {
    double start_fraction = 1e-4;  ///< integration starts at r0 = start_fraction * R
    int steps = 20000;             ///< RK4 step is R / steps
    bool bessel_bracket = true;    ///< seed the lambda bracket from the Bessel route
};

/// Shooting solver for  -g'' - ((n-1)/(p-1)) g'/r = (p/(p-1)) lambda g,  g'(0) = 0, g(R) = 0,
/// selecting the first mode (no sign change on [0, R)). Throws ConvergenceError
/// if no bracket is found or |g(R)| > tol at the converged eigenvalue.
RadialProfile ball_eigenvalue_shooting(const ProblemParams& params, double R, double tol,
                                       const ShootingOptions& options = {});

/// r^alpha J_{-alpha}(mu_1 r / R), evaluated through the entire part of J so
/// that r = 0 is regular; exactly 0 at r = R.
double radial_eigenfunction(const ProblemParams& params, double R, double r);

}  // namespace nplap
