#include "nplap/radial_spectrum.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nplap/errors.hpp"
#include "nplap/special_functions.hpp"

namespace nplap {

ProblemParams ProblemParams::make(int n, double p) {
    if (n < 1) {
        throw DomainError("dimension n must be at least 1");
    }
    if (!std::isfinite(p) || !(p > 1.0)) {
        throw DomainError("exponent p must exceed 1");
    }
    ProblemParams params;
    params.n = n;
    params.p = p;
    params.alpha = (p - n) / (2.0 * (p - 1.0));
    return params;
}

double ball_eigenvalue_bessel(const ProblemParams& params, double R) {
    if (!(R > 0.0)) {
        throw DomainError("ball radius must be positive");
    }
    const double mu = first_zero(params.bessel_order());
    return (params.p - 1.0) / params.p * (mu / R) * (mu / R);
}

namespace {

struct ShotResult {
    bool crossed = false;  // g <= 0 somewhere before R
    double g_end = 0.0;
};

class RadialShooter {
public:
    RadialShooter(const ProblemParams& params, double R, const ShootingOptions& options)
        : R_(R),
          r0_(options.start_fraction * R),
          damping_(static_cast<double>(params.n - 1) / (params.p - 1.0)) {
        const double nominal = R / options.steps;
        steps_ = static_cast<int>(std::lround((R_ - r0_) / nominal));
        step_ = (R_ - r0_) / steps_;
    }

    // Integrates with Lambda = (p/(p-1)) lambda; optionally records the profile.
    ShotResult shoot(double Lambda, RadialProfile* profile = nullptr) const {
        const double D = 1.0 + damping_;
        double g = 1.0 - Lambda * r0_ * r0_ / (2.0 * D);
        double dg = -Lambda * r0_ / D;
        double r = r0_;
        if (profile != nullptr) {
            profile->radii.assign({0.0, r0_});
            profile->values.assign({1.0, g});
            profile->slopes.assign({0.0, dg});
        }
        auto rhs = [this, Lambda](double rr, double gg, double dd) {
            return -damping_ * dd / rr - Lambda * gg;
        };
        ShotResult result;
        for (int i = 0; i < steps_; ++i) {
            const double h = step_;
            const double k1g = dg;
            const double k1d = rhs(r, g, dg);
            const double k2g = dg + 0.5 * h * k1d;
            const double k2d = rhs(r + 0.5 * h, g + 0.5 * h * k1g, k2g);
            const double k3g = dg + 0.5 * h * k2d;
            const double k3d = rhs(r + 0.5 * h, g + 0.5 * h * k2g, k3g);
            const double k4g = dg + h * k3d;
            const double k4d = rhs(r + h, g + h * k3g, k4g);
            g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
            dg += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            r = (i + 1 == steps_) ? R_ : r0_ + (i + 1) * h;
            if (profile != nullptr) {
                profile->radii.push_back(r);
                profile->values.push_back(g);
                profile->slopes.push_back(dg);
            }
            if (i + 1 < steps_ && g <= 0.0) {
                result.crossed = true;
                if (profile == nullptr) {
                    return result;
                }
            }
        }
        result.g_end = g;
        return result;
    }

    // First-mode guard: too large iff the profile vanishes on (0, R].
    bool too_large(double Lambda) const {
        const ShotResult s = shoot(Lambda);
        return s.crossed || s.g_end <= 0.0;
    }

private:
    double R_;
    double r0_;
    double damping_;
    int steps_ = 0;
    double step_ = 0.0;
};

}  // namespace

RadialProfile ball_eigenvalue_shooting(const ProblemParams& params, double R, double tol,
                                       const ShootingOptions& options) {
    if (!(R > 0.0)) {
        throw DomainError("ball radius must be positive");
    }
    if (!(tol >= 1e-12)) {
        throw DomainError("shooting tolerance must be at least 1e-12");
    }
    const RadialShooter shooter(params, R, options);
    const double to_Lambda = params.p / (params.p - 1.0);

    double lo = 0.0;
    double hi = 0.0;
    bool bracketed = false;
    if (options.bessel_bracket) {
        try {
            const double guess = ball_eigenvalue_bessel(params, R) * to_Lambda;
            lo = 0.5 * guess;
            hi = 2.0 * guess;
            bracketed = !shooter.too_large(lo) && shooter.too_large(hi);
        } catch (const DomainError&) {
            bracketed = false;
        } catch (const ConvergenceError&) {
            bracketed = false;
        }
    }
    if (!bracketed) {
        lo = 1.0;
        int guard = 0;
        while (shooter.too_large(lo) && guard++ < 200) {
            lo *= 0.5;
        }
        hi = 1.0;
        guard = 0;
        while (!shooter.too_large(hi) && guard++ < 200) {
            hi *= 2.0;
        }
        if (shooter.too_large(lo) || !shooter.too_large(hi)) {
            throw ConvergenceError("shooting: could not bracket the first eigenvalue");
        }
    }

    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (shooter.too_large(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    RadialProfile profile;
    const ShotResult final_shot = shooter.shoot(lo, &profile);
    profile.eigenvalue = lo / to_Lambda;
    profile.boundary_value = final_shot.g_end;
    if (std::fabs(final_shot.g_end) > tol) {
        std::ostringstream msg;
        msg << "shooting: |g(R)| = " << std::fabs(final_shot.g_end) << " exceeds tolerance " << tol;
        throw ConvergenceError(msg.str());
    }
    return profile;
}

double radial_eigenfunction(const ProblemParams& params, double R, double r) {
    if (!(R > 0.0) || r < 0.0 || r > R) {
        throw DomainError("radial_eigenfunction: r must lie in [0, R]");
    }
    if (r == R) {
        return 0.0;
    }
    const double nu = params.bessel_order();
    const double c = first_zero(nu) / R;
    return std::pow(c / 2.0, nu) * bessel_j_scaled(nu, c * r);
}

}  // namespace nplap
