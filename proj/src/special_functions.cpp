#include "nplap/special_functions.hpp"

#include <array>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nplap/errors.hpp"
#include "nplap/quadrature.hpp"

namespace nplap {

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

// Lanczos approximation valid for z >= 1.
double lanczos_gamma(double z) {
    const double x = z - 1.0;
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        a += kLanczos[i] / (x + static_cast<double>(i));
    }
    const double t = x + kLanczosG + 0.5;
    const double root_two_pi = std::sqrt(2.0 * std::numbers::pi);
    if (x < 140.0) {
        return root_two_pi * std::pow(t, x + 0.5) * std::exp(-t) * a;
    }
    // split the power to postpone overflow
    const double half = std::pow(t, 0.5 * (x + 0.5));
    return root_two_pi * half * (half * std::exp(-t)) * a;
}

struct SeriesResult {
    long double sum = 0.0L;
    long double abs_sum = 0.0L;
    int terms = 0;
};

// Sum_k (-1)^k (x/2)^{2k} / (k! Gamma(k+nu+1)) with Kahan compensation.
SeriesResult scaled_series(double nu, double x, int max_terms) {
    SeriesResult r;
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L / static_cast<long double>(gamma(nu + 1.0));
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (int k = 0; k < max_terms; ++k) {
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        r.abs_sum += std::fabs(term);
        r.terms = k + 1;
        const long double next =
            -term * q / (static_cast<long double>(k + 1) * (static_cast<long double>(k) + nu + 1.0L));
        // past the peak and negligible
        if (static_cast<long double>(k) > q && std::fabs(next) <= 1e-24L * r.abs_sum) {
            break;
        }
        term = next;
    }
    r.sum = sum;
    return r;
}

double series_error_bound(const SeriesResult& s) {
    return static_cast<double>(s.abs_sum * 8.0L * LDBL_EPSILON * static_cast<long double>(s.terms + 4));
}

// Schlaefli: J_nu(x) = (1/pi) int_0^pi cos(nu t - x sin t) dt
//                      - (sin(nu pi)/pi) int_0^inf exp(-x sinh t - nu t) dt,   x > 0.
double integral_bessel(double nu, double x) {
    const double pi = std::numbers::pi;
    const int panels1 = static_cast<int>(std::ceil((x + std::fabs(nu)) / 2.0)) + 4;
    const double first = gauss_legendre_composite(
        [nu, x](double t) { return std::cos(nu * t - x * std::sin(t)); }, 0.0, pi, panels1);

    double second = 0.0;
    const double s = std::sin(nu * pi);
    if (s != 0.0) {
        auto exponent = [nu, x](double t) { return x * std::sinh(t) + nu * t; };
        double upper = 1.0;
        while (exponent(upper) < 60.0) {
            upper *= 2.0;
        }
        const double width = std::min(0.5, 4.0 / (x + std::fabs(nu) + 1.0));
        const int panels2 = static_cast<int>(std::ceil(upper / width));
        second = gauss_legendre_composite(
            [&exponent](double t) { return std::exp(-exponent(t)); }, 0.0, upper, panels2);
    }
    return first / pi - s / pi * second;
}

void check_window(double nu, double x) {
    if (!(nu > -1.0) || nu > kMaxBesselOrder || !std::isfinite(nu)) {
        std::ostringstream msg;
        msg << "Bessel order " << nu << " outside (-1, " << kMaxBesselOrder << "]";
        throw DomainError(msg.str());
    }
    if (!(x > 0.0) || x > bessel_x_max(nu)) {
        std::ostringstream msg;
        msg << "Bessel argument " << x << " outside (0, " << bessel_x_max(nu) << "] for order " << nu;
        throw DomainError(msg.str());
    }
}

}  // namespace

double gamma(double x) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError("gamma: argument must be positive and finite");
    }
    if (x > 171.0) {
        throw DomainError("gamma: overflow");
    }
    if (x < 1.0) {
        return lanczos_gamma(x + 1.0) / x;
    }
    return lanczos_gamma(x);
}

BesselValue bessel_j_eval(double nu, double x, int series_terms) {
    check_window(nu, x);
    if (series_terms < 20) {
        throw DomainError("bessel_j: series_terms must be at least 20");
    }
    const double scale = std::pow(x / 2.0, nu);
    const SeriesResult s = scaled_series(nu, x, series_terms);
    const double bound = series_error_bound(s) * scale;
    if (bound <= kBesselAbsTol / 10.0 && s.terms < series_terms) {
        return {static_cast<double>(s.sum) * scale, BesselMethod::series, bound};
    }
    // the quadrature route is limited only by O(1) cosine rounding
    return {integral_bessel(nu, x), BesselMethod::integral, 1e-13 * (x + 1.0)};
}

double bessel_j(double nu, double x) { return bessel_j_eval(nu, x).value; }

double bessel_j_scaled(double nu, double x) {
    if (x == 0.0) {
        if (!(nu > -1.0) || nu > kMaxBesselOrder) {
            throw DomainError("bessel_j_scaled: order outside supported window");
        }
        return 1.0 / gamma(nu + 1.0);
    }
    check_window(nu, x);
    const SeriesResult s = scaled_series(nu, x, 400);
    const double scale = std::pow(x / 2.0, nu);
    if (series_error_bound(s) * scale <= kBesselAbsTol / 10.0 && s.terms < 400) {
        return static_cast<double>(s.sum);
    }
    return integral_bessel(nu, x) / scale;
}

BesselSpec bracket_first_zero(double nu) {
    if (!(nu > -1.0) || nu > kMaxBesselOrder) {
        throw DomainError("first_zero: order outside supported window");
    }
    BesselSpec spec;
    spec.order = nu;
    const double step = std::max(0.05, nu / 20.0);
    const double x_limit = bessel_x_max(nu);
    double a = std::max(1e-6, 0.5 * std::sqrt(nu + 1.0));
    double fa = bessel_j(nu, a);
    double b = a;
    double fb = fa;
    bool found = false;
    while (b < x_limit) {
        b = std::min(a + step, x_limit);
        fb = bessel_j(nu, b);
        if ((fa > 0.0) != (fb > 0.0)) {
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!found) {
        std::ostringstream msg;
        msg << "first_zero: no sign change of J_" << nu << " below " << x_limit;
        throw ConvergenceError(msg.str());
    }
    while (b - a > 1e-12) {
        const double mid = 0.5 * (a + b);
        const double fm = bessel_j(nu, mid);
        if (fm == 0.0) {
            a = b = mid;
            break;
        }
        if ((fa > 0.0) == (fm > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    spec.zero_bracket = std::make_pair(a, b);
    spec.method = bessel_j_eval(nu, b).method;
    return spec;
}

double first_zero(double nu) {
    const BesselSpec spec = bracket_first_zero(nu);
    return 0.5 * (spec.zero_bracket->first + spec.zero_bracket->second);
}

}  // namespace nplap
