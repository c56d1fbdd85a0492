#include "nplap/grid_geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nplap/errors.hpp"

namespace nplap {

namespace {

double robust_length(double a, double b) {
    const double m = std::max(std::fabs(a), std::fabs(b));
    if (m == 0.0) {
        return 0.0;
    }
    return m * std::hypot(a / m, b / m);
}

// Root of (r0 z0/(s+r0))^2 + (z1/(s+1))^2 - 1 by bisection.
double ellipse_root(double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = (g < 0.0) ? 0.0 : robust_length(n0, z1) - 1.0;
    double s = 0.0;
    for (int i = 0; i < 200; ++i) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) {
            break;
        }
        const double ratio0 = n0 / (s + r0);
        const double ratio1 = z1 / (s + 1.0);
        const double gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (gs > 0.0) {
            s0 = s;
        } else if (gs < 0.0) {
            s1 = s;
        } else {
            break;
        }
    }
    return s;
}

// Unsigned distance from (y0, y1), y0, y1 >= 0, to the ellipse with semi-axes e0 >= e1.
double ellipse_distance(double e0, double e1, double y0, double y1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) {
                return 0.0;
            }
            const double r0 = (e0 / e1) * (e0 / e1);
            const double sbar = ellipse_root(r0, z0, z1, g);
            const double x0 = r0 * y0 / (sbar + r0);
            const double x1 = y1 / (sbar + 1.0);
            return std::hypot(x0 - y0, x1 - y1);
        }
        return std::fabs(y1 - e1);
    }
    const double numer0 = e0 * y0;
    const double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        const double xde0 = numer0 / denom0;
        const double x0 = e0 * xde0;
        const double x1 = e1 * std::sqrt(1.0 - xde0 * xde0);
        return std::hypot(x0 - y0, x1);
    }
    return std::fabs(y0 - e0);
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be positive");
    }
}

}  // namespace

Shape Shape::disk(double radius, Vec2 center) {
    require_positive(radius, "disk radius");
    return {ShapeKind::disk, center, radius, radius};
}

Shape Shape::ellipse(double semi_x, double semi_y, Vec2 center) {
    require_positive(semi_x, "ellipse semi-axis");
    require_positive(semi_y, "ellipse semi-axis");
    return {ShapeKind::ellipse, center, semi_x, semi_y};
}

Shape Shape::rectangle(double width, double height, Vec2 center) {
    require_positive(width, "rectangle width");
    require_positive(height, "rectangle height");
    return {ShapeKind::rectangle, center, width, height};
}

Shape Shape::stadium(double segment_length, double radius, Vec2 center) {
    if (!(segment_length >= 0.0)) {
        throw std::invalid_argument("stadium segment length must be non-negative");
    }
    require_positive(radius, "stadium radius");
    return {ShapeKind::stadium, center, segment_length, radius};
}

Shape Shape::annulus(double inner_radius, double outer_radius, Vec2 center) {
    require_positive(inner_radius, "annulus inner radius");
    if (!(outer_radius > inner_radius)) {
        throw std::invalid_argument("annulus outer radius must exceed the inner radius");
    }
    return {ShapeKind::annulus, center, inner_radius, outer_radius};
}

double Shape::signed_distance(Vec2 x) const {
    const Vec2 d = x - center;
    switch (kind) {
        case ShapeKind::disk:
            return d.norm() - a;
        case ShapeKind::annulus: {
            const double r = d.norm();
            return std::max(r - b, a - r);
        }
        case ShapeKind::rectangle: {
            const double qx = std::fabs(d.x) - 0.5 * a;
            const double qy = std::fabs(d.y) - 0.5 * b;
            const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
            return outside + std::min(std::max(qx, qy), 0.0);
        }
        case ShapeKind::stadium: {
            const double half = 0.5 * a;
            const double px = std::clamp(d.x, -half, half);
            return std::hypot(d.x - px, d.y) - b;
        }
        case ShapeKind::ellipse: {
            const double ax = std::fabs(d.x);
            const double ay = std::fabs(d.y);
            const double level = (ax / a) * (ax / a) + (ay / b) * (ay / b);
            const double dist = (a >= b) ? ellipse_distance(a, b, ax, ay) : ellipse_distance(b, a, ay, ax);
            return level < 1.0 ? -dist : dist;
        }
    }
    return 0.0;
}

Vec2 Shape::outer_normal(Vec2 x) const {
    const double delta = 1e-7 * std::max(half_extent().x, half_extent().y);
    const double gx = signed_distance({x.x + delta, x.y}) - signed_distance({x.x - delta, x.y});
    const double gy = signed_distance({x.x, x.y + delta}) - signed_distance({x.x, x.y - delta});
    const double len = std::hypot(gx, gy);
    if (len == 0.0) {
        return {0.0, 0.0};
    }
    return {gx / len, gy / len};
}

Vec2 Shape::half_extent() const {
    switch (kind) {
        case ShapeKind::disk:
            return {a, a};
        case ShapeKind::annulus:
            return {b, b};
        case ShapeKind::rectangle:
            return {0.5 * a, 0.5 * b};
        case ShapeKind::stadium:
            return {0.5 * a + b, b};
        case ShapeKind::ellipse:
            return {a, b};
    }
    return {a, b};
}

double Shape::area() const {
    const double pi = std::numbers::pi;
    switch (kind) {
        case ShapeKind::disk:
            return pi * a * a;
        case ShapeKind::annulus:
            return pi * (b * b - a * a);
        case ShapeKind::rectangle:
            return a * b;
        case ShapeKind::stadium:
            return 2.0 * a * b + pi * b * b;
        case ShapeKind::ellipse:
            return pi * a * b;
    }
    return 0.0;
}

Shape Shape::scaled(double factor) const {
    require_positive(factor, "scale factor");
    Shape s = *this;
    s.a *= factor;
    s.b *= factor;
    return s;
}

std::string Shape::name() const {
    std::ostringstream out;
    out << to_string(kind);
    switch (kind) {
        case ShapeKind::disk:
            out << "(r=" << a << ")";
            break;
        case ShapeKind::ellipse:
            out << "(a=" << a << ",b=" << b << ")";
            break;
        case ShapeKind::rectangle:
            out << "(" << a << "x" << b << ")";
            break;
        case ShapeKind::stadium:
            out << "(L=" << a << ",r=" << b << ")";
            break;
        case ShapeKind::annulus:
            out << "(" << a << "," << b << ")";
            break;
    }
    return out.str();
}

std::string_view to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::disk:
            return "disk";
        case ShapeKind::ellipse:
            return "ellipse";
        case ShapeKind::rectangle:
            return "rectangle";
        case ShapeKind::stadium:
            return "stadium";
        case ShapeKind::annulus:
            return "annulus";
    }
    return "unknown";
}

ShapeKind shape_kind_from_string(std::string_view name) {
    if (name == "disk") return ShapeKind::disk;
    if (name == "ellipse") return ShapeKind::ellipse;
    if (name == "rectangle") return ShapeKind::rectangle;
    if (name == "stadium") return ShapeKind::stadium;
    if (name == "annulus") return ShapeKind::annulus;
    throw std::invalid_argument("unknown shape kind: " + std::string(name));
}

// ---------------------------------------------------------------------------

Vec2 GridDomain::position(int node) const { return position(column(node), row(node)); }

int GridDomain::neighbor(int node, int direction) const {
    const auto& d = kLatticeDirections[static_cast<std::size_t>(direction)];
    return node + d[0] + d[1] * nx_;
}

double GridDomain::boundary_fraction(int node, int direction) const {
    const int k = inside_index(node);
    if (k < 0) {
        throw GeometryError("boundary_fraction: node is not inside the mask");
    }
    return fractions_[static_cast<std::size_t>(k)][static_cast<std::size_t>(direction)];
}

GridDomain GridDomain::from_shape(const Shape& shape, double h, Centering centering) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw GeometryError("lattice spacing h must be positive");
    }
    GridDomain d;
    d.shape_ = shape;
    d.h_ = h;
    const Vec2 ext = shape.half_extent();
    auto count = [&](double half) {
        const int k = static_cast<int>(std::ceil(half / h)) + 1;
        return centering == Centering::cell ? 2 * k : 2 * k + 1;
    };
    d.nx_ = count(ext.x);
    d.ny_ = count(ext.y);
    d.origin_ = {shape.center.x - 0.5 * (d.nx_ - 1) * h, shape.center.y - 0.5 * (d.ny_ - 1) * h};
    d.inside_.assign(static_cast<std::size_t>(d.nx_) * d.ny_, 0);
    for (int j = 1; j + 1 < d.ny_; ++j) {
        for (int i = 1; i + 1 < d.nx_; ++i) {
            if (shape.contains(d.position(i, j))) {
                d.inside_[static_cast<std::size_t>(d.node(i, j))] = 1;
            }
        }
    }
    d.finalize();

    d.fractions_.assign(d.inside_nodes_.size(), std::array<double, 8>{1, 1, 1, 1, 1, 1, 1, 1});
    for (std::size_t k = 0; k < d.inside_nodes_.size(); ++k) {
        const int node = d.inside_nodes_[k];
        const Vec2 from = d.position(node);
        for (int dir = 0; dir < 8; ++dir) {
            const int nb = d.neighbor(node, dir);
            if (d.inside(nb)) {
                continue;
            }
            const Vec2 to = d.position(nb);
            double lo = 0.0;
            double hi = 1.0;
            if (shape.signed_distance(to) > 0.0) {
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (shape.signed_distance(from + mid * (to - from)) < 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            d.fractions_[k][static_cast<std::size_t>(dir)] = std::max(hi, 1e-6);
        }
    }
    return d;
}

void GridDomain::finalize() {
    const std::size_t total = inside_.size();
    inside_nodes_.clear();
    inside_index_.assign(total, -1);
    for (std::size_t n = 0; n < total; ++n) {
        if (inside_[n] != 0) {
            inside_index_[n] = static_cast<int>(inside_nodes_.size());
            inside_nodes_.push_back(static_cast<int>(n));
        }
    }
    if (inside_nodes_.empty()) {
        throw GeometryError("empty mask: no lattice node lies inside the shape");
    }

    // 4-connectivity of the inside set
    std::vector<unsigned char> seen(total, 0);
    std::deque<int> queue{inside_nodes_.front()};
    seen[static_cast<std::size_t>(inside_nodes_.front())] = 1;
    std::size_t reached = 0;
    while (!queue.empty()) {
        const int n = queue.front();
        queue.pop_front();
        ++reached;
        for (int dir = 0; dir < 4; ++dir) {
            const int nb = neighbor(n, dir);
            if (inside(nb) && seen[static_cast<std::size_t>(nb)] == 0) {
                seen[static_cast<std::size_t>(nb)] = 1;
                queue.push_back(nb);
            }
        }
    }
    if (reached != inside_nodes_.size()) {
        throw GeometryError("disconnected mask: inside nodes form several 4-connected components");
    }

    // boundary loops = 8-connected components of the complement
    boundary_loops_ = 0;
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t start = 0; start < total; ++start) {
        if (inside_[start] != 0 || seen[start] != 0) {
            continue;
        }
        ++boundary_loops_;
        queue.assign(1, static_cast<int>(start));
        seen[start] = 1;
        while (!queue.empty()) {
            const int n = queue.front();
            queue.pop_front();
            const int i = column(n);
            const int j = row(n);
            for (const auto& dd : kLatticeDirections) {
                const int ii = i + dd[0];
                const int jj = j + dd[1];
                if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) {
                    continue;
                }
                const auto nb = static_cast<std::size_t>(node(ii, jj));
                if (inside_[nb] == 0 && seen[nb] == 0) {
                    seen[nb] = 1;
                    queue.push_back(static_cast<int>(nb));
                }
            }
        }
    }

    band_.clear();
    for (int n : inside_nodes_) {
        for (int dir = 0; dir < 8; ++dir) {
            if (!inside(neighbor(n, dir))) {
                band_.push_back(n);
                break;
            }
        }
    }
}

DomainPtr make_shape(const Shape& shape, double h, Centering centering) {
    return std::make_shared<const GridDomain>(GridDomain::from_shape(shape, h, centering));
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(DomainPtr domain) : domain_(std::move(domain)) {
    if (!domain_) {
        throw GeometryError("ScalarField requires a domain");
    }
    values_.assign(domain_->node_count(), 0.0);
}

ScalarField::ScalarField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (!domain_) {
        throw GeometryError("ScalarField requires a domain");
    }
    if (values_.size() != domain_->node_count()) {
        throw GeometryError("ScalarField: value count does not match the lattice");
    }
    for (std::size_t n = 0; n < values_.size(); ++n) {
        if (!std::isfinite(values_[n])) {
            throw GeometryError("ScalarField: non-finite value");
        }
        if (!domain_->inside(static_cast<int>(n)) && values_[n] != 0.0) {
            throw GeometryError("ScalarField: nonzero value outside the mask");
        }
    }
}

double ScalarField::sup_norm() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::fabs(v));
    }
    return m;
}

double ScalarField::min_inside() const {
    double m = std::numeric_limits<double>::infinity();
    for (int n : domain_->inside_nodes()) {
        m = std::min(m, (*this)[n]);
    }
    return m;
}

double ScalarField::max_inside() const {
    double m = -std::numeric_limits<double>::infinity();
    for (int n : domain_->inside_nodes()) {
        m = std::max(m, (*this)[n]);
    }
    return m;
}

std::optional<double> ScalarField::interpolate(Vec2 x) const {
    const GridDomain& d = *domain_;
    const double fx = (x.x - d.origin().x) / d.h();
    const double fy = (x.y - d.origin().y) / d.h();
    const int i = static_cast<int>(std::floor(fx));
    const int j = static_cast<int>(std::floor(fy));
    if (i < 0 || j < 0 || i + 1 >= d.nx() || j + 1 >= d.ny()) {
        return std::nullopt;
    }
    const int n00 = d.node(i, j);
    const int n10 = d.node(i + 1, j);
    const int n01 = d.node(i, j + 1);
    const int n11 = d.node(i + 1, j + 1);
    if (!d.inside(n00) || !d.inside(n10) || !d.inside(n01) || !d.inside(n11)) {
        return std::nullopt;
    }
    const double s = fx - i;
    const double t = fy - j;
    return (1 - s) * (1 - t) * (*this)[n00] + s * (1 - t) * (*this)[n10] + (1 - s) * t * (*this)[n01] +
           s * t * (*this)[n11];
}

double max_abs_difference(const ScalarField& a, const ScalarField& b) {
    if (&a.domain() != &b.domain()) {
        throw GeometryError("fields live on different domains");
    }
    double m = 0.0;
    for (std::size_t n = 0; n < a.values().size(); ++n) {
        m = std::max(m, std::fabs(a.values()[n] - b.values()[n]));
    }
    return m;
}

// ---------------------------------------------------------------------------

namespace {

// 1-D squared distance transform of sampled function f (Felzenszwalb-Huttenlocher).
void distance_transform_1d(std::span<const double> f, std::span<double> out) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    const double inf = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[static_cast<std::size_t>(q)] == inf) {
            continue;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        double s = 0.0;
        while (true) {
            const int r = v[static_cast<std::size_t>(k)];
            s = ((f[static_cast<std::size_t>(q)] + q * q) - (f[static_cast<std::size_t>(r)] + r * r)) /
                (2.0 * (q - r));
            if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
                --k;
            } else {
                break;
            }
        }
        if (s <= z[static_cast<std::size_t>(k)]) {
            v[static_cast<std::size_t>(k)] = q;
            z[static_cast<std::size_t>(k) + 1] = inf;
            continue;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = inf;
    }
    if (k < 0) {
        std::fill(out.begin(), out.end(), inf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(j) + 1] < q) {
            ++j;
        }
        const int r = v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(q)] = (q - r) * (q - r) + f[static_cast<std::size_t>(r)];
    }
}

struct Circle {
    Vec2 c{};
    double r2 = -1.0;
    bool covers(Vec2 p) const {
        const Vec2 d = p - c;
        return d.dot(d) <= r2 * (1.0 + 1e-12) + 1e-24;
    }
};

Circle circle2(Vec2 a, Vec2 b) {
    const Vec2 c = 0.5 * (a + b);
    const Vec2 d = a - c;
    return {c, d.dot(d)};
}

Circle circle3(Vec2 a, Vec2 b, Vec2 c) {
    const double bx = b.x - a.x;
    const double by = b.y - a.y;
    const double cx = c.x - a.x;
    const double cy = c.y - a.y;
    const double det = 2.0 * (bx * cy - by * cx);
    if (std::fabs(det) < 1e-300) {
        // collinear: the widest pair
        Circle best = circle2(a, b);
        for (const Circle& cand : {circle2(a, c), circle2(b, c)}) {
            if (cand.r2 > best.r2) {
                best = cand;
            }
        }
        return best;
    }
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    const Vec2 center{a.x + (cy * b2 - by * c2) / det, a.y + (bx * c2 - cx * b2) / det};
    const Vec2 d = a - center;
    return {center, d.dot(d)};
}

// Welzl's algorithm in its iterative move-to-front form on shuffled input.
Circle smallest_enclosing_circle(std::vector<Vec2> pts) {
    std::mt19937 rng(20181125u);
    std::shuffle(pts.begin(), pts.end(), rng);
    Circle c{pts[0], 0.0};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (c.covers(pts[i])) {
            continue;
        }
        c = {pts[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (c.covers(pts[j])) {
                continue;
            }
            c = circle2(pts[i], pts[j]);
            for (std::size_t k = 0; k < j; ++k) {
                if (!c.covers(pts[k])) {
                    c = circle3(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    return c;
}

}  // namespace

std::vector<double> distance_to_complement(const GridDomain& domain, std::span<const unsigned char> mask) {
    if (mask.size() != domain.node_count()) {
        throw GeometryError("distance_to_complement: mask size does not match the lattice");
    }
    // two-pass exact Euclidean distance transform in lattice units
    const int nx = domain.nx();
    const int ny = domain.ny();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> grid(domain.node_count());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        grid[n] = mask[n] != 0 ? inf : 0.0;
    }
    std::vector<double> line_in(static_cast<std::size_t>(ny));
    std::vector<double> line_out(static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            line_in[static_cast<std::size_t>(j)] = grid[static_cast<std::size_t>(domain.node(i, j))];
        }
        distance_transform_1d(line_in, line_out);
        for (int j = 0; j < ny; ++j) {
            grid[static_cast<std::size_t>(domain.node(i, j))] = line_out[static_cast<std::size_t>(j)];
        }
    }
    line_in.resize(static_cast<std::size_t>(nx));
    line_out.resize(static_cast<std::size_t>(nx));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            line_in[static_cast<std::size_t>(i)] = grid[static_cast<std::size_t>(domain.node(i, j))];
        }
        distance_transform_1d(line_in, line_out);
        for (int i = 0; i < nx; ++i) {
            grid[static_cast<std::size_t>(domain.node(i, j))] = std::sqrt(line_out[static_cast<std::size_t>(i)]) * domain.h();
        }
    }
    return grid;
}

GeometrySummary geometry_summary(const GridDomain& domain) {
    GeometrySummary s;
    const double h = domain.h();
    const auto& nodes = domain.inside_nodes();
    s.measure = static_cast<double>(nodes.size()) * h * h;

    Vec2 sum{};
    std::vector<Vec2> pts;
    pts.reserve(nodes.size());
    for (int n : nodes) {
        const Vec2 x = domain.position(n);
        pts.push_back(x);
        sum = sum + x;
    }
    s.centroid = (1.0 / static_cast<double>(nodes.size())) * sum;

    std::vector<unsigned char> mask(domain.node_count());
    for (std::size_t n = 0; n < mask.size(); ++n) {
        mask[n] = domain.inside(static_cast<int>(n)) ? 1 : 0;
    }
    const std::vector<double> dist = distance_to_complement(domain, mask);
    s.inradius = *std::max_element(dist.begin(), dist.end());

    const Circle c = smallest_enclosing_circle(std::move(pts));
    s.outradius = std::sqrt(c.r2);
    s.enclosing_center = c.c;
    return s;
}

// ---------------------------------------------------------------------------

std::string Symmetry::name() const {
    std::string out = "rot" + std::to_string(90 * ((quarter_turns % 4 + 4) % 4));
    switch (reflection) {
        case Reflection::none:
            break;
        case Reflection::x_axis:
            out += "+reflect_x";
            break;
        case Reflection::y_axis:
            out += "+reflect_y";
            break;
        case Reflection::diagonal:
            out += "+reflect_diag";
            break;
        case Reflection::antidiagonal:
            out += "+reflect_antidiag";
            break;
    }
    return out;
}

std::vector<Symmetry> dihedral_group() {
    std::vector<Symmetry> group;
    for (int k = 0; k < 4; ++k) {
        group.push_back(Symmetry::rotation(k));
    }
    group.push_back(Symmetry::reflect(Symmetry::Reflection::x_axis));
    group.push_back(Symmetry::reflect(Symmetry::Reflection::y_axis));
    group.push_back(Symmetry::reflect(Symmetry::Reflection::diagonal));
    group.push_back(Symmetry::reflect(Symmetry::Reflection::antidiagonal));
    return group;
}

namespace {

bool needs_square_lattice(const Symmetry& g) {
    return (g.quarter_turns % 2 != 0) || g.reflection == Symmetry::Reflection::diagonal ||
           g.reflection == Symmetry::Reflection::antidiagonal;
}

// Image node of (i, j) under g, using doubled offsets from the lattice center.
int symmetry_image(const GridDomain& d, const Symmetry& g, int node) {
    int u = 2 * d.column(node) - (d.nx() - 1);
    int v = 2 * d.row(node) - (d.ny() - 1);
    switch (g.reflection) {
        case Symmetry::Reflection::none:
            break;
        case Symmetry::Reflection::x_axis:
            v = -v;
            break;
        case Symmetry::Reflection::y_axis:
            u = -u;
            break;
        case Symmetry::Reflection::diagonal:
            std::swap(u, v);
            break;
        case Symmetry::Reflection::antidiagonal: {
            const int t = u;
            u = -v;
            v = -t;
            break;
        }
    }
    const int turns = (g.quarter_turns % 4 + 4) % 4;
    for (int k = 0; k < turns; ++k) {
        const int t = u;
        u = -v;
        v = t;
    }
    return d.node((u + d.nx() - 1) / 2, (v + d.ny() - 1) / 2);
}

}  // namespace

bool mask_invariant(const GridDomain& domain, const Symmetry& g) {
    if (needs_square_lattice(g) && domain.nx() != domain.ny()) {
        return false;
    }
    for (std::size_t n = 0; n < domain.node_count(); ++n) {
        const int node = static_cast<int>(n);
        if (domain.inside(node) != domain.inside(symmetry_image(domain, g, node))) {
            return false;
        }
    }
    return true;
}

ScalarField apply_symmetry(const ScalarField& f, const Symmetry& g) {
    const GridDomain& d = f.domain();
    if (!mask_invariant(d, g)) {
        throw GeometryError("apply_symmetry: mask is not invariant under " + g.name());
    }
    std::vector<double> out(d.node_count(), 0.0);
    for (int n : d.inside_nodes()) {
        out[static_cast<std::size_t>(n)] = f[symmetry_image(d, g, n)];
    }
    return ScalarField(f.domain_ptr(), std::move(out));
}

// ---------------------------------------------------------------------------

DomainConfig parse_domain_config(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("domain config is not valid JSON: ") + e.what());
    }
    try {
        if (!j.is_object()) {
            throw std::invalid_argument("domain config must be a JSON object");
        }
        DomainConfig cfg;
        const ShapeKind kind = shape_kind_from_string(j.at("kind").get<std::string>());
        const nlohmann::json params = j.value("parameters", nlohmann::json::object());
        Vec2 center{};
        if (params.contains("center")) {
            const auto c = params.at("center").get<std::vector<double>>();
            if (c.size() != 2) {
                throw std::invalid_argument("center must have two coordinates");
            }
            center = {c[0], c[1]};
        }
        switch (kind) {
            case ShapeKind::disk:
                cfg.shape = Shape::disk(params.at("radius").get<double>(), center);
                break;
            case ShapeKind::ellipse:
                cfg.shape = Shape::ellipse(params.at("semi_x").get<double>(), params.at("semi_y").get<double>(),
                                           center);
                break;
            case ShapeKind::rectangle:
                cfg.shape = Shape::rectangle(params.at("width").get<double>(), params.at("height").get<double>(),
                                             center);
                break;
            case ShapeKind::stadium:
                cfg.shape =
                    Shape::stadium(params.at("length").get<double>(), params.at("radius").get<double>(), center);
                break;
            case ShapeKind::annulus:
                cfg.shape = Shape::annulus(params.at("inner_radius").get<double>(),
                                           params.at("outer_radius").get<double>(), center);
                break;
        }
        cfg.h = j.value("h", 0.01);
        if (!(cfg.h > 0.0)) {
            throw std::invalid_argument("h must be positive");
        }
        const std::string centering = j.value("centering", std::string("cell"));
        if (centering == "cell") {
            cfg.centering = Centering::cell;
        } else if (centering == "node") {
            cfg.centering = Centering::node;
        } else {
            throw std::invalid_argument("centering must be \"cell\" or \"node\"");
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed domain config: ") + e.what());
    }
}

std::string domain_config_to_json(const DomainConfig& config) {
    nlohmann::ordered_json j;
    const Shape& s = config.shape;
    j["kind"] = std::string(to_string(s.kind));
    nlohmann::ordered_json params;
    switch (s.kind) {
        case ShapeKind::disk:
            params["radius"] = s.a;
            break;
        case ShapeKind::ellipse:
            params["semi_x"] = s.a;
            params["semi_y"] = s.b;
            break;
        case ShapeKind::rectangle:
            params["width"] = s.a;
            params["height"] = s.b;
            break;
        case ShapeKind::stadium:
            params["length"] = s.a;
            params["radius"] = s.b;
            break;
        case ShapeKind::annulus:
            params["inner_radius"] = s.a;
            params["outer_radius"] = s.b;
            break;
    }
    params["center"] = {s.center.x, s.center.y};
    j["parameters"] = params;
    j["h"] = config.h;
    j["centering"] = config.centering == Centering::cell ? "cell" : "node";
    return j.dump();
}

void write_field_csv(std::ostream& out, const ScalarField& field) {
    out << "x,y,value\n";
    char buf[128];
    for (int n : field.domain().inside_nodes()) {
        const Vec2 x = field.domain().position(n);
        std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g\n", x.x, x.y, field[n]);
        out << buf;
    }
}

}  // namespace nplap
