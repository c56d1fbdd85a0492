// End-to-end acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nplap/abp_lab.hpp"
#include "nplap/bounds_constants.hpp"
#include "nplap/eigen_solver.hpp"
#include "nplap/errors.hpp"
#include "nplap/radial_spectrum.hpp"
#include "nplap/reporting.hpp"
#include "nplap/special_functions.hpp"

using namespace nplap;

namespace {

constexpr double pi = std::numbers::pi;

// criterion 1
constexpr double kRatioTol = 1e-3;
constexpr double kRatioSeconds = 1.0;
// criterion 2
constexpr int kCurvePoints = 200;
constexpr double kCurveSeconds = 5.0;
// criterion 3
constexpr double kRouteTol = 1e-8;
constexpr double kAnchorTol = 1e-10;
constexpr double kShootTol = 1e-12;
constexpr double kBallSeconds = 10.0;
// criterion 4
constexpr double kFineH = 0.01;
constexpr double kCoarseH = 0.02;
constexpr double kGridTol = 0.02;
constexpr double kHalvingRatio = 1.5;
constexpr double kSolveSeconds = 60.0;
// criteria 5, 6
constexpr double kSlack = 0.05;
constexpr double kDiskRatioTol = 0.03;
// criterion 7
constexpr int kStarts = 3;
constexpr double kDefectTol = 1e-3;
// criterion 8
constexpr double kHopfTol = 0.10;
// criterion 9
constexpr double kIntegralTol = 1e-10;
constexpr double kPassRate = 0.95;
constexpr double kAbpSeconds = 120.0;
// criterion 10
constexpr double kScaleTol = 1e-3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}
std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail += std::string("exception: ") + e.what();
    }
    if (!o.ok) {
        ++failures;
    }
    std::printf("%s [%d] %s (%.1f s): %s\n", o.ok ? "PASS" : "FAIL", id, title, seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
}

struct Solved {
    std::string name;
    Shape shape;
    double p = 0.0;
    double h = 0.0;
    EigenPair pair;
    double seconds = 0.0;
};

// every grid solve of the run, reused by the bound criteria
std::vector<Solved> solved;

const Solved& solve(const Shape& shape, double p, double h) {
    for (const Solved& s : solved) {
        if (s.name == shape.name() && s.p == p && s.h == h) {
            return s;
        }
    }
    const auto t0 = Clock::now();
    EigenPair pair = principal_eigenpair(make_shape(shape, h), p, SolverConfig{});
    solved.push_back({shape.name(), shape, p, h, std::move(pair), seconds_since(t0)});
    return solved.back();
}

double ball_lambda(double p, double R = 1.0) { return ball_eigenvalue_bessel(ProblemParams::make(2, p), R); }

}  // namespace

int main() {
    report(1, "ratio reproduction", [] {
        Outcome o;
        const auto t0 = Clock::now();
        const double g2 = constants_row(2, 2.0).ratio;
        const double g3 = constants_row(3, 2.0).ratio;
        const double t = seconds_since(t0);
        o.require(std::fabs(g2 - 1.446) <= kRatioTol, "g2(2)");
        o.require(std::fabs(g3 - 1.561) <= kRatioTol, "g3(2)");
        o.require(t < kRatioSeconds, "runtime");
        o.note(fmt("g2(2) = %.5f, g3(2) = %.5f", g2, g3));
        return o;
    });

    report(2, "ratio curve minimum at p = 2", [] {
        Outcome o;
        const auto t0 = Clock::now();
        const std::vector<double> grid = linear_grid(1.05, 20.0, kCurvePoints);
        const double nearest = *std::min_element(grid.begin(), grid.end(), [](double a, double b) {
            return std::fabs(a - 2.0) < std::fabs(b - 2.0);
        });
        for (int n : {2, 3}) {
            const auto rows = ratio_curve(n, grid);
            const auto best = std::min_element(rows.begin(), rows.end(),
                                               [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
            o.require(best->p == nearest, "n = " + std::to_string(n) + " minimum location");
            o.note(fmt("n = %.0f: min %.5f at p = %.4f", n, best->ratio, best->p));
        }
        o.require(seconds_since(t0) < kCurveSeconds, "runtime");
        return o;
    });

    report(3, "dual-route ball spectrum", [] {
        Outcome o;
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (int n : {2, 3}) {
            for (double p : {1.2, 1.5, 2.0, 3.0, 5.0, 10.0}) {
                const ProblemParams params = ProblemParams::make(n, p);
                const double bessel = ball_eigenvalue_bessel(params, 1.0);
                const double shoot = ball_eigenvalue_shooting(params, 1.0, kShootTol).eigenvalue;
                worst = std::max(worst, rel(shoot, bessel));
            }
        }
        o.require(worst <= kRouteTol, "shooting vs Bessel");
        const double anchor = ball_eigenvalue_bessel(ProblemParams::make(3, 2.0), 1.0);
        const double zero = first_zero(0.5);
        o.require(std::fabs(anchor - pi * pi / 2.0) <= kAnchorTol, "lambda(B1) = pi^2/2 in R^3");
        o.require(std::fabs(zero - pi) <= kAnchorTol, "first zero of J_1/2 = pi");
        o.require(seconds_since(t0) < kBallSeconds, "runtime");
        o.note(fmt("max relative gap %.2e, anchor error %.1e, zero error %.1e", worst, std::fabs(anchor - pi * pi / 2.0),
                   std::fabs(zero - pi)));
        return o;
    });

    report(4, "grid eigensolver accuracy", [] {
        Outcome o;
        struct Case {
            Shape shape;
            double p;
            double exact;
        };
        const double j01 = first_zero(0.0);
        const std::vector<Case> cases{{Shape::disk(1.0), 2.0, j01 * j01 / 2.0},
                                      {Shape::rectangle(1.0, 1.0), 2.0, pi * pi},
                                      {Shape::disk(1.0), 1.5, ball_lambda(1.5)},
                                      {Shape::disk(1.0), 3.0, ball_lambda(3.0)},
                                      {Shape::disk(1.0), 5.0, ball_lambda(5.0)}};
        for (const Case& c : cases) {
            const Solved& fine = solve(c.shape, c.p, kFineH);
            const Solved& coarse = solve(c.shape, c.p, kCoarseH);
            const double e_fine = rel(fine.pair.lambda, c.exact);
            const double e_coarse = rel(coarse.pair.lambda, c.exact);
            const std::string tag = c.shape.name() + " p=" + format_number(c.p);
            o.require(e_fine <= kGridTol, tag + " accuracy");
            o.require(fine.seconds < kSolveSeconds, tag + " runtime");
            o.require(e_coarse >= kHalvingRatio * e_fine, tag + " h-halving");
            o.note(tag + fmt(": err %.2e -> %.2e (ratio %.2f)", e_coarse, e_fine, e_coarse / e_fine) +
                   fmt(", %.1f s", fine.seconds));
        }
        return o;
    });

    // the remaining grid solves used by the bound and shape criteria
    const std::vector<Shape> primitives{Shape::disk(1.0), Shape::rectangle(1.0, 1.0),
                                        Shape::ellipse(std::sqrt(2.0), std::sqrt(0.5)), Shape::stadium(1.0, 0.75)};

    report(6, "sandwich and monotonicity", [&] {
        Outcome o;
        int checked = 0;
        for (const Shape& s : primitives) {
            for (double p : {1.5, 2.0, 4.0}) {
                const Solved& r = solve(s, p, kCoarseH);
                const BoundsReport b = verify_bounds(r.pair, ProblemParams::make(2, p), std::nullopt, kSlack);
                o.require(b.sandwich_ok, r.name + " p=" + format_number(p) + " sandwich");
                ++checked;
            }
        }
        // inner, outer
        const std::vector<std::pair<Shape, Shape>> nested{
            {Shape::disk(1.0), Shape::rectangle(2.0, 2.0)},
            {Shape::rectangle(1.0, 1.0), Shape::disk(1.0)},
            {Shape::ellipse(std::sqrt(2.0), std::sqrt(0.5)), Shape::disk(std::sqrt(2.0))},
            {Shape::disk(0.75), Shape::stadium(1.0, 0.75)}};
        for (const auto& [inner, outer] : nested) {
            for (double p : {2.0, 4.0}) {
                const Solved& a = solve(inner, p, kCoarseH);
                const Solved& b = solve(outer, p, kCoarseH);
                const BoundsReport r = verify_bounds(a.pair, ProblemParams::make(2, p), b.pair.lambda, kSlack);
                o.require(r.nested_ok, a.name + " in " + b.name + " p=" + format_number(p));
            }
        }
        o.note(std::to_string(checked) + " sandwich checks, " + std::to_string(2 * nested.size()) +
               " nested pairs");
        return o;
    });

    report(7, "simplicity and symmetry", [] {
        Outcome o;
        for (const Shape& s : {Shape::disk(1.0), Shape::rectangle(1.0, 1.0)}) {
            for (double p : {2.0, 3.0}) {
                const SimplicityReport r = verify_simplicity(make_shape(s, kCoarseH), p, SolverConfig{}, kStarts);
                o.require(r.trials >= kStarts && r.defect <= kDefectTol, s.name() + " p=" + format_number(p));
                o.note(s.name() + fmt(" p=%.0f defect %.1e", p, r.defect));
            }
        }
        for (double p : {2.0, 3.0}) {
            const Solved& sq = solve(Shape::rectangle(1.0, 1.0), p, kCoarseH);
            double worst = 0.0;
            for (const Symmetry& g : dihedral_group()) {
                worst = std::max(worst, verify_symmetry(sq.pair, g));
            }
            o.require(worst <= kDefectTol, "D4 defect p=" + format_number(p));
            o.note(fmt("square D4 defect p=%.0f: %.1e", p, worst));
        }
        return o;
    });

    report(8, "Hopf quotient", [] {
        Outcome o;
        for (double p : {2.0, 3.0}) {
            const Solved& d = solve(Shape::disk(1.0), p, kFineH);
            const HopfReport h = verify_hopf(d.pair);
            const RadialProfile prof = ball_eigenvalue_shooting(ProblemParams::make(2, p), 1.0, kShootTol);
            const double ref = std::fabs(prof.slopes.back());
            o.require(h.kappa > 0.0, "kappa > 0");
            o.require(rel(h.kappa, ref) <= kHopfTol, "kappa vs |g'(R)| p=" + format_number(p));
            o.note(fmt("p=%.0f kappa %.4f vs %.4f", p, h.kappa, ref));
        }
        return o;
    });

    report(9, "ABP lab", [] {
        Outcome o;
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (int n : {1, 2, 3}) {
            for (double p : {1.5, 2.0, 4.0}) {
                for (double lambda : {0.5, 2.0, 10.0}) {
                    worst = std::max(worst, rel(abp_integral_quadrature(n, p, lambda), abp_integral(n, p, lambda)));
                }
            }
        }
        o.require(worst <= kIntegralTol, "I_g closed form vs quadrature");
        o.note(fmt("I_g gap %.1e", worst));

        std::vector<AbpChainReport> runs;
        for (double h : {kCoarseH, kFineH}) {
            const Solved& d = solve(Shape::disk(1.0), 2.0, h);
            runs.push_back(verify_abp_chain(d.pair.field, 2.0, d.pair.lambda, 1e-3, 2.0 * h));
        }
        const AbpChainReport& fine = runs[1];
        const AbpChainReport& coarse = runs[0];
        const ChainCheck* fc[] = {&fine.f1, &fine.f2, &fine.f3};
        const ChainCheck* cc[] = {&coarse.f1, &coarse.f2, &coarse.f3};
        for (int k = 0; k < 3; ++k) {
            const std::string tag = "f" + std::to_string(k + 1);
            o.require(fc[k]->checked > 0 && fc[k]->pass_rate >= kPassRate, tag + " pass rate");
            // relative excess beyond exact equality; must not grow when h is halved
            const double vf = std::max(0.0, fc[k]->max_excess);
            const double vc = std::max(0.0, cc[k]->max_excess);
            o.require(vf <= vc, tag + " violation shrinks");
            o.note(tag + fmt(" rate %.3f, excess %.1e -> %.1e", fc[k]->pass_rate, vc, vf));
        }
        o.require(fine.terminal_ok, "terminal bound");
        o.note(fmt("terminal %.4f <= %.4f", fine.terminal_lhs, fine.terminal_rhs));
        o.require(seconds_since(t0) < kAbpSeconds, "runtime");
        return o;
    });

    report(10, "Faber-Krahn evidence", [&] {
        Outcome o;
        for (double p : {1.5, 2.0, 4.0}) {
            const FaberKrahnTable t = faber_krahn_scan(primitives, p, kCoarseH, SolverConfig{});
            o.require(!t.rows.empty() && t.rows.front().name == Shape::disk(1.0).name(),
                      "disk first at p=" + format_number(p));
            o.note(fmt("p=%.1f disk %.4f next %.4f", p, t.rows.front().product, t.rows[1].product));
        }
        for (const Shape& s : {Shape::disk(1.0), Shape::ellipse(std::sqrt(2.0), std::sqrt(0.5))}) {
            for (double p : {2.0, 4.0}) {
                const Solved& a = solve(s, p, kCoarseH);
                const EigenPair b = principal_eigenpair(make_shape(s.scaled(2.0), 2.0 * kCoarseH), p, SolverConfig{});
                const double ma = geometry_summary(a.pair.field.domain()).measure;
                const double mb = geometry_summary(b.field.domain()).measure;
                const double gap = rel(b.lambda * mb, a.pair.lambda * ma);
                o.require(gap <= kScaleTol, s.name() + " scale invariance p=" + format_number(p));
                o.note(fmt("scale gap %.1e", gap));
            }
        }
        return o;
    });

    report(5, "measure bound", [] {
        Outcome o;
        int checked = 0;
        for (const Solved& s : solved) {
            const BoundsReport b = verify_bounds(s.pair, ProblemParams::make(2, s.p), std::nullopt, kSlack);
            o.require(b.measure_ok, s.name + " p=" + format_number(s.p) + " h=" + format_number(s.h));
            ++checked;
        }
        for (double p : {1.5, 2.0, 3.0, 5.0}) {
            const Solved& d = solve(Shape::disk(1.0), p, kFineH);
            const double product = d.pair.lambda * geometry_summary(d.pair.field.domain()).measure;
            const double ratio = product / constant_K(2, p);
            const double g = constants_row(2, p).ratio;
            o.require(rel(ratio, g) <= kDiskRatioTol, "disk ratio p=" + format_number(p));
            o.note(fmt("p=%.1f: %.4f vs g2 %.4f", p, ratio, g));
        }
        o.note(std::to_string(checked) + " solves checked");
        return o;
    });

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
