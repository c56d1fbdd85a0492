// nplap: command-line front end for the normalized p-Laplacian eigenvalue toolkit.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nplap/abp_lab.hpp"
#include "nplap/bounds_constants.hpp"
#include "nplap/eigen_solver.hpp"
#include "nplap/errors.hpp"
#include "nplap/radial_spectrum.hpp"
#include "nplap/reporting.hpp"
#include "nplap/special_functions.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace nplap;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNoConvergence = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    bool quiet = false;
};

class Run {
public:
    Run(const Globals& g, std::string subcommand) : g_(g) { manifest_.subcommand = std::move(subcommand); }

    void param(const std::string& key, const std::string& value) { manifest_.parameters[key] = value; }
    void param(const std::string& key, double value) { manifest_.parameters[key] = format_number(value); }

    void write(const std::string& name, const std::string& text) {
        const fs::path path = write_text_file(g_.out_dir, name, text);
        manifest_.outputs.push_back(path.string());
    }

    void finish() {
        manifest_.parameters["seed"] = std::to_string(g_.seed);
        manifest_.timestamp = utc_timestamp();
        write_text_file(g_.out_dir, "manifest.json", manifest_.to_json());
    }

    std::ostream& out() { return g_.quiet ? null_ : std::cout; }

private:
    Globals g_;
    RunManifest manifest_;
    std::ostringstream null_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

DomainConfig load_domain(const std::string& file, const std::string& inline_json, double h_override) {
    if (file.empty() == inline_json.empty()) {
        throw UsageError("give exactly one of --domain FILE or --domain-json TEXT");
    }
    DomainConfig cfg;
    try {
        cfg = parse_domain_config(file.empty() ? inline_json : read_file(file));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (h_override > 0.0) {
        cfg.h = h_override;
    }
    return cfg;
}

CLI::Validator exceeds_one() {
    return CLI::Validator(
        [](std::string& s) -> std::string {
            try {
                if (std::stod(s) > 1.0) {
                    return {};
                }
            } catch (const std::exception&) {
            }
            return "p must exceed 1";
        },
        "P>1");
}

std::string json_number_text(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

struct BallArgs {
    int n = 2;
    double p = 2.0;
    double R = 1.0;
};

int cmd_ball(const Globals& g, const BallArgs& a) {
    Run run(g, "ball");
    run.param("n", std::to_string(a.n));
    run.param("p", a.p);
    run.param("R", a.R);
    const ProblemParams params = ProblemParams::make(a.n, a.p);
    const double bessel = ball_eigenvalue_bessel(params, a.R);
    const RadialProfile prof = ball_eigenvalue_shooting(params, a.R, 1e-10);
    const double gap = std::fabs(prof.eigenvalue - bessel) / bessel;
    ordered_json j;
    j["n"] = a.n;
    j["p"] = a.p;
    j["R"] = a.R;
    j["alpha"] = params.alpha;
    j["bessel_order"] = params.bessel_order();
    j["bessel_zero"] = first_zero(params.bessel_order());
    j["lambda_bessel"] = bessel;
    j["lambda_shooting"] = prof.eigenvalue;
    j["relative_gap"] = gap;
    j["boundary_slope"] = prof.slopes.back();
    run.write("ball.json", json_number_text(j));
    run.out() << "lambda (Bessel)   = " << format_number(bessel) << "\n"
              << "lambda (shooting) = " << format_number(prof.eigenvalue) << "\n"
              << "relative gap      = " << format_number(gap) << "\n";
    run.finish();
    if (gap > 1e-6) {
        std::cerr << "error: eigenvalue routes disagree by " << gap << " (relative)\n";
        return kExitCheckFailed;
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ConstantsArgs {
    std::vector<int> dims{2, 3};
    double p_min = 1.05;
    double p_max = 20.0;
    int points = 200;
    std::string grid = "linear";
};

int cmd_constants(const Globals& g, const ConstantsArgs& a) {
    Run run(g, "constants");
    std::string dims;
    for (int n : a.dims) {
        dims += (dims.empty() ? "" : ",") + std::to_string(n);
    }
    run.param("n", dims);
    run.param("p_min", a.p_min);
    run.param("p_max", a.p_max);
    run.param("points", std::to_string(a.points));
    run.param("grid", a.grid);
    if (!(a.p_min > 1.0) || a.p_max < a.p_min || a.points < 1) {
        throw UsageError("need 1 < p-min <= p-max and points >= 1");
    }
    const std::vector<double> grid =
        a.grid == "log" ? log_spaced_grid(a.p_min, a.p_max, a.points) : linear_grid(a.p_min, a.p_max, a.points);
    std::vector<ConstantsRow> all;
    std::vector<Series> series;
    bool below_one = false;
    for (int n : a.dims) {
        const auto rows = ratio_curve(n, grid);
        Series s{"g_" + std::to_string(n), {}, {}};
        const ConstantsRow* best = &rows.front();
        for (const ConstantsRow& r : rows) {
            s.x.push_back(r.p);
            s.y.push_back(r.ratio);
            if (r.ratio < best->ratio) {
                best = &r;
            }
            below_one = below_one || r.ratio < 1.0;
        }
        run.out() << "n=" << n << ": min ratio " << format_number(best->ratio) << " at p = " << format_number(best->p)
                  << "\n";
        all.insert(all.end(), rows.begin(), rows.end());
        series.push_back(std::move(s));
    }
    std::ostringstream csv;
    write_constants_csv(csv, all);
    run.write("constants.csv", csv.str());
    run.write("ratio.svg", svg_plot(series, "Ratio K*/K of the eigenvalue constants", "p", "K*/K"));
    run.finish();
    if (below_one) {
        std::cerr << "error: a ratio below 1 was found\n";
        return kExitCheckFailed;
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
    std::string domain_file;
    std::string domain_json;
    std::string outer_file;
    double p = 2.0;
    double h = 0.0;
    double tol = 1e-7;
    int max_outer = 300;
    bool verify_bounds = false;
    int simplicity = 0;
    bool symmetry = false;
    bool hopf = false;
};

int cmd_solve(const Globals& g, const SolveArgs& a) {
    Run run(g, "solve");
    const DomainConfig cfg = load_domain(a.domain_file, a.domain_json, a.h);
    run.param("domain", domain_config_to_json(cfg));
    run.param("p", a.p);
    run.param("h", cfg.h);
    run.param("tol_bracket", a.tol);
    run.param("max_outer", a.max_outer);
    SolverConfig scfg;
    scfg.tol_bracket = a.tol;
    scfg.max_outer = a.max_outer;
    scfg.seed = g.seed;
    const ProblemParams params = ProblemParams::make(2, a.p);

    const DomainPtr domain = make_shape(cfg.shape, cfg.h, cfg.centering);
    const EigenPair pair = principal_eigenpair(domain, a.p, scfg);
    const GeometrySummary geo = geometry_summary(*domain);

    ordered_json j;
    j["domain"] = ordered_json::parse(domain_config_to_json(cfg));
    j["p"] = a.p;
    j["h"] = cfg.h;
    j["eigenpair"] = ordered_json::parse(eigenpair_json(pair));
    j["monotone_stencil"] = pair.monotone_stencil;
    j["geometry"] = {{"measure", geo.measure},
                     {"inradius", geo.inradius},
                     {"outradius", geo.outradius},
                     {"boundary_loops", domain->boundary_loops()}};
    j["lambda_times_measure"] = pair.lambda * geo.measure;
    std::vector<std::string> flags;

    if (a.verify_bounds) {
        std::optional<double> outer;
        if (!a.outer_file.empty()) {
            const DomainConfig ocfg = load_domain(a.outer_file, "", cfg.h);
            const EigenPair opair = principal_eigenpair(make_shape(ocfg.shape, ocfg.h, ocfg.centering), a.p, scfg);
            outer = opair.lambda;
        }
        const BoundsReport b = verify_bounds(pair, params, outer);
        ordered_json jb;
        jb["slack"] = b.slack;
        jb["sandwich_lower"] = b.sandwich_lower;
        jb["sandwich_upper"] = b.sandwich_upper;
        jb["sandwich_ok"] = b.sandwich_ok;
        jb["measure_bound"] = b.measure_bound;
        jb["measure_ok"] = b.measure_ok;
        jb["ratio_to_measure_bound"] = pair.lambda / b.measure_bound;
        if (outer) {
            jb["containing_domain_lambda"] = *outer;
            jb["nested_ok"] = b.nested_ok;
        }
        jb["passed"] = b.passed;
        j["bounds"] = jb;
        if (!b.passed) flags.push_back("bounds");
    }
    if (a.simplicity > 0) {
        const SimplicityReport s = verify_simplicity(domain, a.p, scfg, std::max(2, a.simplicity));
        ordered_json js;
        js["trials"] = s.trials;
        js["defect"] = s.defect;
        js["lambdas"] = s.lambdas;
        js["hypotheses_met"] = s.hypotheses_met;
        if (!s.flag.empty()) js["flag"] = s.flag;
        js["passed"] = s.passed;
        j["simplicity"] = js;
        if (!s.passed) flags.push_back("simplicity");
        if (!s.hypotheses_met) flags.push_back("simplicity hypotheses not met");
    }
    if (a.symmetry) {
        ordered_json js = ordered_json::object();
        bool ok = true;
        for (const Symmetry& sym : dihedral_group()) {
            if (!mask_invariant(*domain, sym)) {
                continue;
            }
            const double defect = verify_symmetry(pair, sym);
            js[sym.name()] = defect;
            ok = ok && defect <= 1e-3;
        }
        j["symmetry"] = {{"defects", js}, {"threshold", 1e-3}, {"passed", ok}};
        if (!ok) flags.push_back("symmetry");
    }
    if (a.hopf) {
        const HopfReport hr = verify_hopf(pair);
        ordered_json jh;
        jh["kappa"] = hr.kappa;
        jh["per_offset"] = hr.per_offset;
        jh["nodes_used"] = hr.nodes_used;
        jh["skipped"] = hr.skipped;
        jh["stable"] = hr.stable;
        jh["passed"] = hr.passed;
        if (cfg.shape.kind == ShapeKind::disk) {
            const RadialProfile prof = ball_eigenvalue_shooting(params, cfg.shape.a, 1e-10);
            jh["radial_reference"] = std::fabs(prof.slopes.back());
        }
        j["hopf"] = jh;
        if (!hr.passed) flags.push_back("hopf");
    }
    j["flags"] = flags;
    run.write("solve.json", json_number_text(j));
    std::ostringstream csv;
    write_field_csv(csv, pair.field);
    run.write("field.csv", csv.str());
    run.out() << "lambda = " << format_number(pair.lambda) << "  bracket [" << format_number(pair.cw_low) << ", "
              << format_number(pair.cw_high) << "]  iterations " << pair.iterations << "\n";
    for (const auto& f : flags) {
        run.out() << "flag: " << f << "\n";
    }
    run.finish();
    return 0;
}

// ---------------------------------------------------------------------------

struct AbpArgs {
    std::string domain_file;
    std::string domain_json;
    double p = 2.0;
    double h = 0.0;
    double eps = 1e-3;
    double sigma = 0.0;
};

int cmd_abp(const Globals& g, const AbpArgs& a) {
    Run run(g, "abp");
    const DomainConfig cfg = load_domain(a.domain_file, a.domain_json, a.h);
    const double sigma = a.sigma > 0.0 ? a.sigma : 2.0 * cfg.h;
    run.param("domain", domain_config_to_json(cfg));
    run.param("p", a.p);
    run.param("h", cfg.h);
    run.param("eps", a.eps);
    run.param("sigma", sigma);
    SolverConfig scfg;
    scfg.seed = g.seed;
    const DomainPtr domain = make_shape(cfg.shape, cfg.h, cfg.centering);
    const EigenPair pair = principal_eigenpair(domain, a.p, scfg);
    const AbpChainReport r = verify_abp_chain(pair.field, a.p, pair.lambda, a.eps, sigma);
    run.write("abp.json", abp_report_json(r) + "\n");
    run.out() << "pass rates f1 " << format_number(r.f1.pass_rate) << "  f2 " << format_number(r.f2.pass_rate)
              << "  f3 " << format_number(r.f3.pass_rate) << "\n"
              << "terminal bound " << format_number(r.terminal_lhs) << " <= " << format_number(r.terminal_rhs)
              << (r.terminal_ok ? "  holds" : "  FAILS") << "\n";
    run.finish();
    return 0;
}

// ---------------------------------------------------------------------------

struct FaberKrahnArgs {
    std::string shapes_file;
    double p = 2.0;
    double h = 0.02;
};

std::vector<Shape> default_shapes() {
    return {Shape::disk(1.0), Shape::rectangle(2.0, 2.0), Shape::ellipse(std::sqrt(2.0), std::sqrt(0.5)),
            Shape::stadium(1.0, 0.75)};
}

std::vector<Shape> load_shapes(const std::string& file) {
    const std::string text = read_file(file);
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw UsageError(std::string("shape list is not valid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("shapes")) {
        j = j["shapes"];
    }
    if (!j.is_array()) {
        throw UsageError("shape list must be a JSON array of domain configs");
    }
    std::vector<Shape> shapes;
    for (const auto& item : j) {
        try {
            shapes.push_back(parse_domain_config(item.dump()).shape);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    return shapes;
}

int cmd_faber_krahn(const Globals& g, const FaberKrahnArgs& a) {
    Run run(g, "faber-krahn");
    run.param("p", a.p);
    run.param("h", a.h);
    run.param("shapes", a.shapes_file.empty() ? "default" : a.shapes_file);
    if (!(a.p > 1.0) || !(a.h > 0.0)) {
        throw UsageError("need p > 1 and h > 0");
    }
    const std::vector<Shape> shapes = a.shapes_file.empty() ? default_shapes() : load_shapes(a.shapes_file);
    SolverConfig scfg;
    scfg.seed = g.seed;
    const FaberKrahnTable table = faber_krahn_scan(shapes, a.p, a.h, scfg);
    for (const auto& w : table.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    std::ostringstream csv;
    write_faber_krahn_csv(csv, table);
    run.write("faber_krahn.csv", csv.str());
    for (const auto& row : table.rows) {
        run.out() << row.name << "  lambda*|Omega| = " << format_number(row.product) << "\n";
    }
    run.out() << "(numerical evidence only)\n";
    run.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normalized p-Laplacian first-eigenvalue toolkit"};
    app.require_subcommand(1);
    // "--h" is the lattice spacing, so help is long-form only
    app.set_help_flag("--help", "Print this help message and exit");
    Globals g;
    app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
    app.add_option("--seed", g.seed, "Seed for randomized starts")->capture_default_str();
    app.add_flag("--quiet", g.quiet, "Suppress console summaries");
    app.set_version_flag("--version", kToolkitVersion);

    BallArgs ball;
    auto* c_ball = app.add_subcommand("ball", "First eigenvalue of a ball by the Bessel and shooting routes");
    c_ball->add_option("--n", ball.n, "Dimension")->check(CLI::Range(1, 50))->capture_default_str();
    c_ball->add_option("--p", ball.p, "Exponent p > 1")->check(exceeds_one())->capture_default_str();
    c_ball->add_option("--R", ball.R, "Radius")->check(CLI::PositiveNumber)->capture_default_str();

    ConstantsArgs cons;
    auto* c_cons = app.add_subcommand("constants", "Tables of K, K* and their ratio over a p grid");
    c_cons->add_option("--n", cons.dims, "Dimensions")->check(CLI::Range(1, 50))->capture_default_str();
    c_cons->add_option("--p-min", cons.p_min)->check(exceeds_one())->capture_default_str();
    c_cons->add_option("--p-max", cons.p_max)->check(exceeds_one())->capture_default_str();
    c_cons->add_option("--points", cons.points)->check(CLI::PositiveNumber)->capture_default_str();
    c_cons->add_option("--grid", cons.grid, "linear or log spacing")
        ->check(CLI::IsMember({"linear", "log"}))
        ->capture_default_str();

    SolveArgs solve;
    auto* c_solve = app.add_subcommand("solve", "Grid eigenpair with optional verification reports");
    c_solve->add_option("--domain", solve.domain_file, "Domain config JSON file");
    c_solve->add_option("--domain-json", solve.domain_json, "Domain config as inline JSON");
    c_solve->add_option("--p", solve.p)->check(exceeds_one())->capture_default_str();
    c_solve->add_option("--h", solve.h, "Lattice spacing (overrides the config)")->check(CLI::PositiveNumber);
    c_solve->add_option("--tol", solve.tol, "Relative bracket tolerance")->check(CLI::Range(1e-8, 1.0))->capture_default_str();
    c_solve->add_option("--max-outer", solve.max_outer, "Power iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
    c_solve->add_flag("--verify-bounds", solve.verify_bounds, "Sandwich, measure and nesting checks");
    c_solve->add_option("--outer-domain", solve.outer_file, "Config of a domain containing this one (nesting check)");
    c_solve->add_option("--simplicity", solve.simplicity, "Number of random starts for the simplicity check")
        ->check(CLI::Range(2, 100));
    c_solve->add_flag("--symmetry", solve.symmetry, "Dihedral symmetry defects");
    c_solve->add_flag("--hopf", solve.hopf, "Inward boundary difference quotients");

    AbpArgs abp;
    auto* c_abp = app.add_subcommand("abp", "Replay of the lower-bound argument on the computed eigenfunction");
    c_abp->add_option("--domain", abp.domain_file, "Domain config JSON file");
    c_abp->add_option("--domain-json", abp.domain_json, "Domain config as inline JSON");
    c_abp->add_option("--p", abp.p)->check(exceeds_one())->capture_default_str();
    c_abp->add_option("--h", abp.h, "Lattice spacing (overrides the config)")->check(CLI::PositiveNumber);
    c_abp->add_option("--eps", abp.eps)->check(CLI::Range(1e-12, 0.999999))->capture_default_str();
    c_abp->add_option("--sigma", abp.sigma, "Envelope neighbourhood (default 2h)")->check(CLI::PositiveNumber);

    FaberKrahnArgs fk;
    auto* c_fk = app.add_subcommand("faber-krahn", "Compare lambda * measure across shapes");
    c_fk->add_option("--shapes", fk.shapes_file, "JSON array of domain configs (default: built-in set)");
    c_fk->add_option("--p", fk.p)->check(exceeds_one())->capture_default_str();
    c_fk->add_option("--h", fk.h)->check(CLI::PositiveNumber)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*c_ball) return cmd_ball(g, ball);
        if (*c_cons) return cmd_constants(g, cons);
        if (*c_solve) return cmd_solve(g, solve);
        if (*c_abp) return cmd_abp(g, abp);
        if (*c_fk) return cmd_faber_krahn(g, fk);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConvergenceError& e) {
        std::cerr << "solver did not converge: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitUsage;
}
