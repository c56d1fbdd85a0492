#include <algorithm>
#include <cmath>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "nplap/abp_lab.hpp"
#include "nplap/bounds_constants.hpp"
#include "nplap/eigen_solver.hpp"
#include "nplap/errors.hpp"

using namespace nplap;

namespace {

LatticeFunction on_inside(const ScalarField& f) {
    LatticeFunction v;
    v.lattice = f.domain_ptr();
    v.nodes = f.domain().inside_nodes();
    v.values.assign(f.domain().node_count(), std::nan(""));
    for (int n : v.nodes) v.values[static_cast<std::size_t>(n)] = f[n];
    return v;
}

// 11 x 11 node block with spacing 0.1 centred at a node
DomainPtr block11() { return make_shape(Shape::rectangle(1.05, 1.05), 0.1, Centering::node); }

}  // namespace

TEST_CASE("sup-convolution of a concave paraboloid") {
    // u = c - |x|^2/2 gives u_eps = c - |x|^2 / (2 (1 + eps)); the objective is a concave
    // quadratic with curvature 1 + 1/eps, so restricting y to the lattice costs at most
    // (1 + 1/eps) h^2 / 4
    const double c = 0.5, eps = 0.1, h = 0.02;
    const double lattice_loss = (1.0 + 1.0 / eps) * h * h / 4.0;
    const DomainPtr d = make_shape(Shape::disk(1.0), h, Centering::node);
    const ScalarField u = ScalarField::from_function(d, [&](Vec2 x) { return c - 0.5 * x.dot(x); });
    const SupConvResult s = sup_convolve(u, eps);
    CHECK(s.rho_eps == doctest::Approx(2.0 * std::sqrt(eps * c)));
    for (int node : d->inside_nodes()) {
        const Vec2 x = d->position(node);
        if (x.norm() * (1.0 + eps) > 1.0 - 2.0 * h) continue;  // maximizer must be an inside node
        const double exact = c - x.dot(x) / (2.0 * (1.0 + eps));
        CHECK(s.u_eps[node] <= exact + 1e-14);
        CHECK(s.u_eps[node] >= exact - lattice_loss);
    }
    int center = -1;
    for (int node : d->inside_nodes())
        if (d->position(node).norm() < 1e-12) center = node;
    REQUIRE(center >= 0);
    CHECK(s.argmax_map[static_cast<std::size_t>(center)] == center);
}

TEST_CASE("sup-convolution sets and monotonicity") {
    const DomainPtr d = make_shape(Shape::disk(1.0), 0.04);
    const EigenPair e = principal_eigenpair(d, 2.0, SolverConfig{});
    const ScalarField& u = e.field;
    const SupConvResult a = sup_convolve(u, 1e-3);
    const SupConvResult b = sup_convolve(u, 4e-3);
    double lip = 0.0;
    for (int node : d->inside_nodes()) {
        CHECK(a.u_eps[node] >= u[node]);
        CHECK(a.u_eps[node] <= b.u_eps[node]);
        const int arg = a.argmax_map[static_cast<std::size_t>(node)];
        CHECK((d->position(arg) - d->position(node)).norm() <= a.rho_eps + 1e-12);
        for (int dir = 0; dir < 4; ++dir) {
            const int nb = d->neighbor(node, dir);
            lip = std::max(lip, std::fabs(u[nb] - u[node]) / d->h());
        }
    }
    CHECK(std::includes(a.U_eps.begin(), a.U_eps.end(), a.A_eps.begin(), a.A_eps.end()));
    CHECK(std::includes(a.A_eps.begin(), a.A_eps.end(), a.Omega_eps.begin(), a.Omega_eps.end()));
    for (int node : a.Omega_eps) CHECK(a.u_eps[node] > a.m_eps);
    CHECK(semiconvexity_margin(a) >= -1e-9);

    const SupConvResult tiny = sup_convolve(u, 1e-4);
    CHECK(max_abs_difference(tiny.u_eps, u) <= tiny.rho_eps * lip + 1e-4);
    CHECK_THROWS_AS(sup_convolve(u, 0.9), DomainError);
    CHECK_THROWS_AS(sup_convolve(u, 0.0), DomainError);
}

TEST_CASE("concave envelope of a concave function") {
    const DomainPtr d = block11();
    REQUIRE(d->inside_nodes().size() == 121);
    const ScalarField f = ScalarField::from_function(d, [](Vec2 x) { return 1.0 - x.dot(x); });
    const EnvelopeResult env = concave_envelope(on_inside(f));
    CHECK(env.contact_set.size() == 121);
    for (int n : d->inside_nodes()) {
        CHECK(env.gamma.values[static_cast<std::size_t>(n)] == doctest::Approx(f[n]).epsilon(1e-10));
    }
}

TEST_CASE("tent over an 11 x 11 block") {
    const DomainPtr d = block11();
    const ScalarField f = ScalarField::from_function(d, [](Vec2 x) { return x.norm() < 1e-9 ? 1.0 : 0.0; });
    const EnvelopeResult env = concave_envelope(on_inside(f));
    for (int n : d->inside_nodes()) {
        const Vec2 x = d->position(n);
        const double cheb = std::max(std::fabs(x.x), std::fabs(x.y)) / 0.1;
        CHECK(env.gamma.values[static_cast<std::size_t>(n)] == doctest::Approx(1.0 - std::round(cheb) / 5.0));
    }
    // peak plus the outer ring
    CHECK(env.contact_set.size() == 41);
    for (int n : env.contact_set) {
        const Vec2 x = d->position(n);
        const double cheb = std::max(std::fabs(x.x), std::fabs(x.y));
        CHECK((cheb < 1e-9 || std::fabs(cheb - 0.5) < 1e-9));
    }
}

TEST_CASE("envelope shift, idempotence and concavity") {
    const DomainPtr d = make_shape(Shape::disk(1.0), 0.05);
    const ScalarField f = ScalarField::from_function(
        d, [](Vec2 x) { return std::sin(3.0 * x.x) * std::cos(2.0 * x.y) + 0.3 * x.x - x.dot(x); });
    const LatticeFunction v = on_inside(f);
    const EnvelopeResult env = concave_envelope(v);
    LatticeFunction shifted = v;
    for (int n : v.nodes) shifted.values[static_cast<std::size_t>(n)] += 2.5;
    const EnvelopeResult env2 = concave_envelope(shifted);
    const EnvelopeResult again = concave_envelope(env.gamma);
    const double h = d->h();
    for (int n : v.nodes) {
        const auto k = static_cast<std::size_t>(n);
        CHECK(env.gamma.values[k] >= v.values[k] - 1e-12);
        CHECK(env2.gamma.values[k] == doctest::Approx(env.gamma.values[k] + 2.5).epsilon(1e-10));
        CHECK(std::fabs(again.gamma.values[k] - env.gamma.values[k]) <= env.contact_tol);
        for (int dir : {0, 2, 4, 6}) {
            const int fwd = d->neighbor(n, dir);
            const int bwd = d->neighbor(n, dir + 1);
            if (d->inside(fwd) && d->inside(bwd)) {
                const double second = env.gamma.values[static_cast<std::size_t>(fwd)] +
                                      env.gamma.values[static_cast<std::size_t>(bwd)] - 2.0 * env.gamma.values[k];
                CHECK(second / (h * h) <= env.contact_tol / (h * h));
            }
        }
    }
    CHECK(again.contact_set.size() == v.nodes.size());
}

TEST_CASE("collinear envelope input is rejected") {
    const DomainPtr d = block11();
    LatticeFunction v;
    v.lattice = d;
    v.values.assign(d->node_count(), std::nan(""));
    for (int i = 0; i < 5; ++i) {
        const int n = d->node(3 + i, 5);
        v.nodes.push_back(n);
        v.values[static_cast<std::size_t>(n)] = double(i);
    }
    CHECK_THROWS_AS(concave_envelope(v), GeometryError);
}

TEST_CASE("abp chain on the disk at p = 2") {
    const DomainPtr d = make_shape(Shape::disk(1.0), 0.02);
    const EigenPair e = principal_eigenpair(d, 2.0, SolverConfig{});
    const AbpChainReport r = verify_abp_chain(e.field, 2.0, e.lambda, 1e-3, 2.0 * d->h());
    CHECK(r.contact_nodes > 0);
    CHECK(r.f1.checked > 0);
    CHECK(r.f1.pass_rate >= 0.95);
    CHECK(r.f2.pass_rate >= 0.95);
    CHECK(r.f3.pass_rate >= 0.95);
    CHECK(r.hessian_psd_rate >= 0.95);
    // equal eigenvalues at the top: AM-GM is close to equality
    CHECK(std::fabs(r.f1.max_excess) <= 1e-3);
    CHECK(r.terminal_ok);
    CHECK(r.terminal_lhs == doctest::Approx(abp_integral(2, 2.0, e.lambda)));
    CHECK(r.terminal_rhs == doctest::Approx(geometry_summary(*d).measure));
    CHECK(r.area_ok);
    CHECK(r.tol_constant == kChainTolConstant);

    const auto j = nlohmann::json::parse(abp_report_json(r));
    for (const char* key : {"pointwise_pass_rates", "terminal_bound_lhs", "terminal_bound_rhs", "h", "eps", "sigma"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["pointwise_pass_rates"]["f3"].get<double>() == r.f3.pass_rate);
}

TEST_CASE("abp chain at p = 3") {
    const DomainPtr d = make_shape(Shape::disk(1.0), 0.02);
    const EigenPair e = principal_eigenpair(d, 3.0, SolverConfig{});
    const AbpChainReport r = verify_abp_chain(e.field, 3.0, e.lambda, 1e-3, 2.0 * d->h());
    CHECK(r.f1.pass_rate >= 0.95);
    CHECK(r.f2.pass_rate >= 0.95);
    CHECK(r.f3.pass_rate >= 0.95);
    CHECK(r.terminal_ok);
}

TEST_CASE("gradient image probe") {
    const DomainPtr d = make_shape(Shape::disk(1.0), 0.02);
    const EigenPair e = principal_eigenpair(d, 2.0, SolverConfig{});
    std::vector<double> logs(d->node_count(), 0.0);
    for (int n : d->inside_nodes()) logs[static_cast<std::size_t>(n)] = std::log(e.field[n]);
    const ScalarField v(d, logs);
    const GradientProbeReport r = gradient_image_probe(v, 16);
    CHECK(r.probes == 1 + 5 * 16);
    CHECK(r.fraction >= 0.9);
    const GradientProbeReport zero = gradient_image_probe(v, 4, 1, 1e-9);
    CHECK(zero.matched == zero.probes);
    // far beyond the representable gradients most probes end up at the boundary
    const GradientProbeReport far = gradient_image_probe(v, 16, 1, 10.0 * r.max_inner_gradient);
    CHECK(far.fraction < 0.5);
}
