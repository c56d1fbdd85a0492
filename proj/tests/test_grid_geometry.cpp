#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "nplap/errors.hpp"
#include "nplap/grid_geometry.hpp"

using namespace nplap;
using std::numbers::pi;

TEST_CASE("shape signed distances") {
    const Shape d = Shape::disk(2.0, {1.0, -1.0});
    CHECK(d.signed_distance({1.0, -1.0}) == doctest::Approx(-2.0));
    CHECK(d.signed_distance({4.0, -1.0}) == doctest::Approx(1.0));
    const Shape r = Shape::rectangle(2.0, 1.0);
    CHECK(r.signed_distance({0.0, 0.0}) == doctest::Approx(-0.5));
    CHECK(r.signed_distance({2.0, 1.5}) == doctest::Approx(std::hypot(1.0, 1.0)));
    const Shape s = Shape::stadium(2.0, 0.5);
    CHECK(s.signed_distance({1.0, 0.0}) == doctest::Approx(-0.5));
    CHECK(s.signed_distance({2.0, 0.0}) == doctest::Approx(0.5));
    const Shape e = Shape::ellipse(2.0, 1.0);
    CHECK(e.signed_distance({0.0, 0.0}) == doctest::Approx(-1.0));
    CHECK(e.signed_distance({3.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(e.signed_distance({0.0, 0.4}) == doctest::Approx(-0.6).epsilon(1e-9));
    const Shape a = Shape::annulus(0.5, 1.0);
    CHECK(a.signed_distance({0.75, 0.0}) == doctest::Approx(-0.25));
    CHECK(a.signed_distance({0.0, 0.0}) == doctest::Approx(0.5));
    const Vec2 n = d.outer_normal({1.0, 1.0});
    CHECK(n.x == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(n.y == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("disk mask measure and radii") {
    const DomainPtr d = make_shape(Shape::disk(1.0), 0.02);
    const GeometrySummary g = geometry_summary(*d);
    CHECK(std::fabs(g.measure - pi) / pi <= 0.01);
    const DomainPtr f = make_shape(Shape::disk(1.0), 0.01);
    const GeometrySummary gf = geometry_summary(*f);
    CHECK(std::fabs(gf.inradius - 1.0) <= 0.02);
    CHECK(std::fabs(gf.outradius - 1.0) <= 0.02);
    CHECK(std::fabs(gf.centroid.x) <= 1e-12);
    CHECK(d->boundary_loops() == 1);
}

TEST_CASE("rectangle measure and radii") {
    const double h = 0.01;
    const DomainPtr sq = make_shape(Shape::rectangle(1.0, 1.0), h);
    CHECK(std::fabs(geometry_summary(*sq).measure - 1.0) <= 4.0 * h);
    const DomainPtr r = make_shape(Shape::rectangle(2.0, 1.0), h);
    const GeometrySummary g = geometry_summary(*r);
    CHECK(std::fabs(g.measure - 2.0) <= 6.0 * h);
    CHECK(std::fabs(g.inradius - 0.5) <= 2.0 * h);
    CHECK(std::fabs(g.outradius - std::sqrt(5.0) / 2.0) <= 2.0 * h);
}

TEST_CASE("geometry converges under refinement") {
    double prev_err = 1.0;
    for (double h : {0.08, 0.04, 0.02, 0.01}) {
        const GeometrySummary g = geometry_summary(*make_shape(Shape::disk(1.0), h));
        const double err = std::fabs(g.outradius - 1.0) + std::fabs(g.inradius - 1.0);
        CHECK(err <= prev_err);
        prev_err = err;
    }
}

TEST_CASE("annulus has two boundary loops") {
    const DomainPtr d = make_shape(Shape::annulus(0.5, 1.0), 0.02);
    CHECK(d->boundary_loops() == 2);
    CHECK(geometry_summary(*d).measure == doctest::Approx(0.75 * pi).epsilon(0.02));
}

TEST_CASE("mask failures") {
    CHECK_THROWS_AS(make_shape(Shape::disk(0.001), 0.1), GeometryError);
    CHECK_THROWS_AS(make_shape(Shape::disk(1.0), -0.1), GeometryError);
    // thin annulus: the ring splits into separate 4-connected pieces
    CHECK_THROWS_AS(make_shape(Shape::annulus(1.0, 1.02), 0.05), GeometryError);
}

TEST_CASE("boundary band and fractions") {
    const DomainPtr d = make_shape(Shape::disk(1.0), 0.05);
    for (int node : d->boundary_band()) {
        CHECK(d->inside(node));
        bool outside_neighbor = false;
        for (int dir = 0; dir < 8; ++dir) {
            const int nb = d->neighbor(node, dir);
            const double f = d->boundary_fraction(node, dir);
            if (!d->inside(nb)) {
                outside_neighbor = true;
                CHECK(f > 0.0);
                CHECK(f <= 1.0);
                // the crossing point lies on the circle
                const Vec2 x = d->position(node);
                const Vec2 y = d->position(nb);
                CHECK(std::fabs(Shape::disk(1.0).signed_distance(x + f * (y - x))) <= 1e-9);
            } else {
                CHECK(f == 1.0);
            }
        }
        CHECK(outside_neighbor);
    }
}

TEST_CASE("distance to complement") {
    const DomainPtr d = make_shape(Shape::rectangle(1.0, 1.0), 0.1);
    std::vector<unsigned char> mask(d->node_count(), 0);
    for (int node : d->inside_nodes()) mask[static_cast<std::size_t>(node)] = 1;
    const auto dist = distance_to_complement(*d, mask);
    double best = 0.0;
    for (int node : d->inside_nodes()) best = std::max(best, dist[static_cast<std::size_t>(node)]);
    // cell-centred 10 x 10 block: nodes at +-0.05 .. +-0.45, first outside ring at +-0.55
    CHECK(best == doctest::Approx(0.5));
}

TEST_CASE("symmetry group actions") {
    const DomainPtr sq = make_shape(Shape::rectangle(1.0, 1.0), 0.05);
    const ScalarField f = ScalarField::from_function(sq, [](Vec2 x) { return x.x + 2.0 * x.y * x.y + 3.0 * x.x * x.y; });
    ScalarField r = f;
    for (int k = 0; k < 4; ++k) {
        r = apply_symmetry(r, Symmetry::rotation(1));
    }
    CHECK(max_abs_difference(r, f) == 0.0);
    CHECK(max_abs_difference(apply_symmetry(f, Symmetry::rotation(1)), f) > 0.1);
    for (const Symmetry& g : dihedral_group()) {
        CHECK(mask_invariant(*sq, g));
        if (g.quarter_turns == 0) {
            const ScalarField twice = apply_symmetry(apply_symmetry(f, g), g);
            CHECK(max_abs_difference(twice, f) == 0.0);
        }
        const ScalarField c = ScalarField::from_function(sq, [](Vec2) { return 0.7; });
        CHECK(max_abs_difference(apply_symmetry(c, g), c) == 0.0);
    }
    const DomainPtr disk = make_shape(Shape::disk(1.0), 0.05);
    CHECK(mask_invariant(*disk, Symmetry::reflect(Symmetry::Reflection::x_axis)));
    const DomainPtr rect = make_shape(Shape::rectangle(2.0, 1.0), 0.05);
    CHECK_FALSE(mask_invariant(*rect, Symmetry::rotation(1)));
    CHECK(mask_invariant(*rect, Symmetry::rotation(2)));
    const ScalarField g = ScalarField::from_function(rect, [](Vec2) { return 1.0; });
    CHECK_THROWS_AS(apply_symmetry(g, Symmetry::rotation(1)), GeometryError);
    CHECK(dihedral_group().size() == 8);
}

TEST_CASE("scalar field validation and interpolation") {
    const DomainPtr d = make_shape(Shape::disk(1.0), 0.05);
    std::vector<double> bad(d->node_count(), 1.0);
    CHECK_THROWS_AS(ScalarField(d, bad), GeometryError);
    const ScalarField lin = ScalarField::from_function(d, [](Vec2 x) { return 2.0 * x.x - x.y + 0.5; });
    const auto v = lin.interpolate({0.123, -0.311});
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(2.0 * 0.123 + 0.311 + 0.5).epsilon(1e-12));
    CHECK_FALSE(lin.interpolate({0.999, 0.0}).has_value());
    CHECK(lin.sup_norm() > 0.0);
}

TEST_CASE("domain config round trip") {
    const DomainConfig c = parse_domain_config(
        R"({"kind":"ellipse","parameters":{"semi_x":2,"semi_y":0.5,"center":[0.1,0.2]},"h":0.02,"centering":"node"})");
    CHECK(c.shape.kind == ShapeKind::ellipse);
    CHECK(c.shape.a == 2.0);
    CHECK(c.shape.b == 0.5);
    CHECK(c.shape.center == Vec2{0.1, 0.2});
    CHECK(c.h == 0.02);
    CHECK(c.centering == Centering::node);
    const DomainConfig back = parse_domain_config(domain_config_to_json(c));
    CHECK(back.shape.kind == c.shape.kind);
    CHECK(back.shape.a == c.shape.a);
    CHECK(back.h == c.h);
    CHECK(parse_domain_config(R"({"kind":"disk","parameters":{"radius":1}})").h == 0.01);
    CHECK_THROWS_AS(parse_domain_config("{not json"), std::invalid_argument);
    CHECK_THROWS_AS(parse_domain_config(R"({"kind":"hexagon","parameters":{}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_domain_config(R"({"kind":"disk","parameters":{"radius":-1}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_domain_config(R"({"kind":"disk","parameters":{}})"), std::invalid_argument);
}

TEST_CASE("field csv") {
    const DomainPtr d = make_shape(Shape::rectangle(0.2, 0.2), 0.1);
    const ScalarField f = ScalarField::from_function(d, [](Vec2 x) { return x.x; });
    std::ostringstream out;
    write_field_csv(out, f);
    const std::string s = out.str();
    CHECK(s.rfind("x,y,value\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + static_cast<long>(d->inside_nodes().size()));
    CHECK(s.find('\r') == std::string::npos);
}
