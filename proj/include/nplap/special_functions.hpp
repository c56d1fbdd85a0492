#pragma once

#include <optional>
#include <utility>

namespace nplap {

/// Gamma function for real x > 0 (Lanczos, g = 7, nine coefficients).
/// Throws DomainError for x <= 0, non-finite x, or overflow (x > 171).
double gamma(double x);

enum class BesselMethod {
    series,    ///< ascending power series, long double with compensated summation
    integral,  ///< Schlaefli integral representation, composite Gauss-Legendre
};

/// Largest supported Bessel order.
inline constexpr double kMaxBesselOrder = 60.0;

/// Upper end of the supported argument range for order nu.
inline constexpr double bessel_x_max(double nu) { return 2.0 * nu + 40.0; }

/// Absolute accuracy target for J_nu on the supported window.
inline constexpr double kBesselAbsTol = 1e-10;

struct BesselValue {
    double value = 0.0;
    BesselMethod method = BesselMethod::series;
    double error_bound = 0.0;  ///< a-priori rounding bound for the chosen route
};

/// First-zero bookkeeping for one order.
struct BesselSpec {
    double order = 0.0;
    int series_terms = 400;
    std::optional<std::pair<double, double>> zero_bracket;
    BesselMethod method = BesselMethod::series;  ///< route used at the bracket ends
};

/// J_nu(x) with the evaluation route and its error bound.
///
/// The ascending series is used whenever its cancellation bound stays below
/// kBesselAbsTol / 10; otherwise the integral representation takes over.
/// Requires -1 < nu <= kMaxBesselOrder and 0 < x <= bessel_x_max(nu).
BesselValue bessel_j_eval(double nu, double x, int series_terms = 400);

double bessel_j(double nu, double x);

/// Entire part J_nu(x) / (x/2)^nu, finite at x = 0 where it equals 1/Gamma(nu+1).
double bessel_j_scaled(double nu, double x);

/// Locates a sign-change bracket of width <= 1e-12 around the first positive zero.
BesselSpec bracket_first_zero(double nu);

/// Smallest positive zero of J_nu, to absolute tolerance 1e-10.
double first_zero(double nu);

}  // namespace nplap
