#include "nplap/bounds_constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nplap/errors.hpp"
#include "nplap/quadrature.hpp"
#include "nplap/special_functions.hpp"

namespace nplap {

namespace {

void check_np(int n, double p) {
    if (n < 1) {
        throw DomainError("dimension n must be at least 1");
    }
    if (!std::isfinite(p) || !(p > 1.0)) {
        throw DomainError("exponent p must exceed 1");
    }
}

}  // namespace

double ball_volume(int n, double R) {
    const double nd = n;
    return std::pow(std::numbers::pi, nd / 2.0) * std::pow(R, nd) / gamma(1.0 + nd / 2.0);
}

double sphere_area(int n) {
    const double nd = n;
    return 2.0 * std::pow(std::numbers::pi, nd / 2.0) / gamma(nd / 2.0);
}

double constant_K(int n, double p) {
    check_np(n, p);
    const double nd = n;
    const double lead = nd * std::min(p - 1.0, 1.0);
    return lead * lead / (p * (p - 1.0)) * std::pow(4.0, -1.0 + 1.0 / nd) *
           std::pow(std::numbers::pi, 1.0 + 1.0 / nd) *
           std::pow(gamma((nd + 1.0) / 2.0), -2.0 / nd);
}

double constant_K_star(int n, double p) {
    check_np(n, p);
    const double nd = n;
    const auto params = ProblemParams::make(n, p);
    const double mu = first_zero(params.bessel_order());
    return std::numbers::pi * (p - 1.0) / p * std::pow(gamma(1.0 + nd / 2.0), -2.0 / nd) * mu * mu;
}

ConstantsRow constants_row(int n, double p) {
    ConstantsRow row;
    row.n = n;
    row.p = p;
    row.K = constant_K(n, p);
    row.K_star = constant_K_star(n, p);
    row.ratio = row.K_star / row.K;
    return row;
}

std::vector<ConstantsRow> ratio_curve(int n, std::span<const double> p_grid) {
    std::vector<ConstantsRow> rows;
    rows.reserve(p_grid.size());
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (i > 0 && !(p_grid[i] > p_grid[i - 1])) {
            throw DomainError("ratio_curve: p grid must be strictly ascending");
        }
        rows.push_back(constants_row(n, p_grid[i]));
    }
    return rows;
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
    if (points < 1 || !(lo > 0.0) || !(hi >= lo)) {
        throw DomainError("log_spaced_grid: need points >= 1 and 0 < lo <= hi");
    }
    if (points == 1) {
        return {lo};
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

double abp_integral(int n, double p, double lambda) {
    check_np(n, p);
    if (!(lambda > 0.0)) {
        throw DomainError("abp_integral: lambda must be positive");
    }
    const double nd = n;
    return std::pow(2.0, 1.0 - nd) * std::pow(std::numbers::pi, (nd + 1.0) / 2.0) *
           std::pow(p / (p - 1.0), nd / 2.0) * std::pow(lambda, -nd / 2.0) / gamma((nd + 1.0) / 2.0);
}

double abp_integral_ball(int n, double p, double lambda, double radius) {
    check_np(n, p);
    if (!(lambda > 0.0) || radius < 0.0) {
        throw DomainError("abp_integral_ball: need lambda > 0 and radius >= 0");
    }
    if (radius == 0.0) {
        return 0.0;
    }
    const double c = (p - 1.0) / p;
    const double nd = n;
    auto radial = [=](double rho) {
        return std::pow(rho, nd - 1.0) * std::pow(lambda + c * rho * rho, -nd);
    };
    // scale of the integrand mass, used to make the tolerance relative
    const double scale = abp_integral(n, p, lambda) / sphere_area(n);
    return sphere_area(n) * adaptive_simpson(radial, 0.0, radius, 1e-15 * scale);
}

double abp_integral_quadrature(int n, double p, double lambda) {
    check_np(n, p);
    if (!(lambda > 0.0)) {
        throw DomainError("abp_integral_quadrature: lambda must be positive");
    }
    const double c = (p - 1.0) / p;
    const double nd = n;
    auto radial = [=](double rho) {
        return std::pow(rho, nd - 1.0) * std::pow(lambda + c * rho * rho, -nd);
    };
    // rough total from the integrand's bulk; the tail int_T^inf rho^{n-1} (c rho^2)^{-n}
    // = c^{-n} T^{-n} / n bounds the neglected mass
    const double bulk_scale = std::sqrt(lambda / c);
    const double bulk = adaptive_simpson(radial, 0.0, bulk_scale, 1e-6 * radial(bulk_scale) * bulk_scale);
    const double tail_target = 1e-13 * bulk;
    const double T = std::pow(std::pow(c, -nd) / (nd * tail_target), 1.0 / nd);
    // integrate piecewise on geometrically growing intervals to keep Simpson's recursion shallow
    double total = 0.0;
    double a = 0.0;
    double b = bulk_scale;
    while (a < T) {
        b = std::min(b, T);
        total += adaptive_simpson(radial, a, b, 1e-16 * bulk);
        a = b;
        b *= 2.0;
    }
    return sphere_area(n) * total;
}

SandwichBounds sandwich_bounds(double inradius, double outradius, const ProblemParams& params) {
    if (!(inradius > 0.0) || !(outradius >= inradius)) {
        throw DomainError("sandwich_bounds: need 0 < inradius <= outradius");
    }
    return {ball_eigenvalue_bessel(params, outradius), ball_eigenvalue_bessel(params, inradius)};
}

}  // namespace nplap
