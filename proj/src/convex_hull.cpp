#include "nplap/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "nplap/errors.hpp"

namespace nplap {

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

}  // namespace

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Vec2& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) {
            --k;
        }
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double polygon_signed_distance(std::span<const Vec2> poly, Vec2 x) {
    if (poly.empty()) {
        throw GeometryError("polygon_signed_distance: empty polygon");
    }
    double dmin = std::numeric_limits<double>::infinity();
    bool inside = poly.size() >= 3;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % poly.size()];
        const Vec2 ab = b - a;
        const double len2 = ab.dot(ab);
        const double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        dmin = std::min(dmin, (x - (a + t * ab)).norm());
        if (cross(a, b, x) < 0.0) {
            inside = false;
        }
    }
    return inside ? -dmin : dmin;
}

namespace {

struct Face {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  // neighbour across edge v[k] -> v[k+1]
    std::array<double, 3> n{};
    double d = 0.0;
    bool alive = true;
    std::vector<int> outside;
};

class QuickHull {
public:
    explicit QuickHull(std::span<const Point3> pts) : pts_(pts) {
        double scale = 0.0;
        for (const Point3& p : pts_) {
            scale = std::max({scale, std::fabs(p.x), std::fabs(p.y), std::fabs(p.z)});
        }
        eps_ = 1e-11 * std::max(scale, 1.0);
    }

    std::vector<HullFacet> run() {
        build_simplex();
        std::vector<int> work;
        for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
            work.push_back(f);
        }
        while (!work.empty()) {
            const int f = work.back();
            work.pop_back();
            if (!faces_[static_cast<std::size_t>(f)].alive || faces_[static_cast<std::size_t>(f)].outside.empty()) {
                continue;
            }
            add_point(f, work);
        }
        std::vector<HullFacet> out;
        for (const Face& face : faces_) {
            if (face.alive) {
                out.push_back({face.v, face.n, face.d});
            }
        }
        return out;
    }

private:
    double dist(const Face& f, int p) const {
        const Point3& q = pts_[static_cast<std::size_t>(p)];
        return f.n[0] * q.x + f.n[1] * q.y + f.n[2] * q.z - f.d;
    }

    bool set_plane(Face& f) const {
        const Point3& a = pts_[static_cast<std::size_t>(f.v[0])];
        const Point3& b = pts_[static_cast<std::size_t>(f.v[1])];
        const Point3& c = pts_[static_cast<std::size_t>(f.v[2])];
        const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
        const double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
        double nx = uy * vz - uz * vy;
        double ny = uz * vx - ux * vz;
        double nz = ux * vy - uy * vx;
        const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (len == 0.0) {
            return false;
        }
        nx /= len;
        ny /= len;
        nz /= len;
        f.n = {nx, ny, nz};
        f.d = nx * a.x + ny * a.y + nz * a.z;
        return true;
    }

    int make_face(int a, int b, int c) {
        Face f;
        f.v = {a, b, c};
        if (!set_plane(f)) {
            throw GeometryError("convex_hull_3d: zero-area facet");
        }
        faces_.push_back(std::move(f));
        return static_cast<int>(faces_.size()) - 1;
    }

    void build_simplex() {
        const int n = static_cast<int>(pts_.size());
        if (n < 4) {
            throw GeometryError("convex_hull_3d: need at least four points");
        }
        auto coord = [&](int i, int axis) {
            const Point3& p = pts_[static_cast<std::size_t>(i)];
            return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
        };
        // widest axis-extreme pair
        int i0 = 0, i1 = 0;
        double best = -1.0;
        for (int axis = 0; axis < 3; ++axis) {
            int lo = 0, hi = 0;
            for (int i = 1; i < n; ++i) {
                if (coord(i, axis) < coord(lo, axis)) lo = i;
                if (coord(i, axis) > coord(hi, axis)) hi = i;
            }
            const double span = coord(hi, axis) - coord(lo, axis);
            if (span > best) {
                best = span;
                i0 = lo;
                i1 = hi;
            }
        }
        if (best <= eps_) {
            throw GeometryError("convex_hull_3d: degenerate hull (all points coincide)");
        }
        const Point3& a = pts_[static_cast<std::size_t>(i0)];
        const Point3& b = pts_[static_cast<std::size_t>(i1)];
        const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
        int i2 = -1;
        best = 0.0;
        for (int i = 0; i < n; ++i) {
            const Point3& p = pts_[static_cast<std::size_t>(i)];
            const double px = p.x - a.x, py = p.y - a.y, pz = p.z - a.z;
            const double cx = py * dz - pz * dy, cy = pz * dx - px * dz, cz = px * dy - py * dx;
            const double d2 = cx * cx + cy * cy + cz * cz;
            if (d2 > best) {
                best = d2;
                i2 = i;
            }
        }
        const double line_len = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (i2 < 0 || std::sqrt(best) / line_len <= eps_) {
            throw GeometryError("convex_hull_3d: degenerate hull (points are collinear)");
        }
        Face base;
        base.v = {i0, i1, i2};
        set_plane(base);
        int i3 = -1;
        best = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = std::fabs(dist(base, i));
            if (d > best) {
                best = d;
                i3 = i;
            }
        }
        if (i3 < 0 || best <= eps_) {
            throw GeometryError("convex_hull_3d: degenerate hull (points are coplanar)");
        }
        if (dist(base, i3) > 0.0) {
            std::swap(i1, i2);
        }
        // base (i0, i1, i2) now faces away from i3
        const int f0 = make_face(i0, i1, i2);
        const int f1 = make_face(i0, i3, i1);
        const int f2 = make_face(i1, i3, i2);
        const int f3 = make_face(i2, i3, i0);
        link_all({f0, f1, f2, f3});

        for (int i = 0; i < n; ++i) {
            if (i == i0 || i == i1 || i == i2 || i == i3) {
                continue;
            }
            assign(i, {f0, f1, f2, f3});
        }
    }

    static std::uint64_t edge_key(int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
    }

    void link_all(const std::vector<int>& ids) {
        std::unordered_map<std::uint64_t, std::pair<int, int>> edges;
        for (int f : ids) {
            for (int k = 0; k < 3; ++k) {
                const Face& face = faces_[static_cast<std::size_t>(f)];
                edges[edge_key(face.v[static_cast<std::size_t>(k)], face.v[static_cast<std::size_t>((k + 1) % 3)])] = {f, k};
            }
        }
        for (int f : ids) {
            Face& face = faces_[static_cast<std::size_t>(f)];
            for (int k = 0; k < 3; ++k) {
                const auto it = edges.find(edge_key(face.v[static_cast<std::size_t>((k + 1) % 3)], face.v[static_cast<std::size_t>(k)]));
                if (it == edges.end()) {
                    throw GeometryError("convex_hull_3d: open initial simplex");
                }
                face.nb[static_cast<std::size_t>(k)] = it->second.first;
            }
        }
    }

    void assign(int point, const std::vector<int>& candidates) {
        int best_face = -1;
        double best = eps_;
        for (int f : candidates) {
            const double d = dist(faces_[static_cast<std::size_t>(f)], point);
            if (d > best) {
                best = d;
                best_face = f;
            }
        }
        if (best_face >= 0) {
            faces_[static_cast<std::size_t>(best_face)].outside.push_back(point);
        }
    }

    struct HorizonEdge {
        int a;
        int b;
        int other;  // face beyond the edge (not visible)
    };

    void add_point(int start, std::vector<int>& work) {
        Face& sf = faces_[static_cast<std::size_t>(start)];
        int eye = sf.outside.front();
        double far = dist(sf, eye);
        for (int p : sf.outside) {
            const double d = dist(sf, p);
            if (d > far) {
                far = d;
                eye = p;
            }
        }

        // visible region by depth-first search; horizon edges collected in traversal order
        std::vector<int> visible;
        std::vector<HorizonEdge> horizon;
        std::vector<int> stack{start};
        visited_.resize(faces_.size(), 0);
        ++stamp_;
        if (stamp_ == 0) {
            std::fill(visited_.begin(), visited_.end(), 0);
            stamp_ = 1;
        }
        visited_[static_cast<std::size_t>(start)] = stamp_;
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            visible.push_back(f);
            const Face& face = faces_[static_cast<std::size_t>(f)];
            for (int k = 0; k < 3; ++k) {
                const int g = face.nb[static_cast<std::size_t>(k)];
                if (visited_[static_cast<std::size_t>(g)] == stamp_) {
                    continue;
                }
                if (dist(faces_[static_cast<std::size_t>(g)], eye) > eps_) {
                    visited_[static_cast<std::size_t>(g)] = stamp_;
                    stack.push_back(g);
                }
            }
        }
        for (int f : visible) {
            const Face& face = faces_[static_cast<std::size_t>(f)];
            for (int k = 0; k < 3; ++k) {
                const int g = face.nb[static_cast<std::size_t>(k)];
                if (visited_[static_cast<std::size_t>(g)] != stamp_) {
                    horizon.push_back({face.v[static_cast<std::size_t>(k)], face.v[static_cast<std::size_t>((k + 1) % 3)], g});
                }
            }
        }

        // order the horizon into a loop
        std::unordered_map<int, std::size_t> by_start;
        for (std::size_t i = 0; i < horizon.size(); ++i) {
            if (!by_start.emplace(horizon[i].a, i).second) {
                throw GeometryError("convex_hull_3d: non-manifold horizon");
            }
        }
        std::vector<HorizonEdge> loop;
        loop.reserve(horizon.size());
        std::size_t cur = 0;
        for (std::size_t step = 0; step < horizon.size(); ++step) {
            loop.push_back(horizon[cur]);
            const auto it = by_start.find(horizon[cur].b);
            if (it == by_start.end()) {
                throw GeometryError("convex_hull_3d: open horizon");
            }
            cur = it->second;
        }
        if (cur != 0) {
            throw GeometryError("convex_hull_3d: horizon is not a single loop");
        }

        std::vector<int> orphans;
        for (int f : visible) {
            Face& face = faces_[static_cast<std::size_t>(f)];
            face.alive = false;
            for (int p : face.outside) {
                if (p != eye) {
                    orphans.push_back(p);
                }
            }
            face.outside.clear();
            face.outside.shrink_to_fit();
        }

        std::vector<int> created;
        created.reserve(loop.size());
        for (const HorizonEdge& e : loop) {
            const int nf = make_face(e.a, e.b, eye);
            created.push_back(nf);
            Face& other = faces_[static_cast<std::size_t>(e.other)];
            for (int k = 0; k < 3; ++k) {
                if (other.v[static_cast<std::size_t>(k)] == e.b && other.v[static_cast<std::size_t>((k + 1) % 3)] == e.a) {
                    other.nb[static_cast<std::size_t>(k)] = nf;
                }
            }
            faces_[static_cast<std::size_t>(nf)].nb[0] = e.other;
        }
        const std::size_t m = created.size();
        for (std::size_t i = 0; i < m; ++i) {
            Face& face = faces_[static_cast<std::size_t>(created[i])];
            face.nb[1] = created[(i + 1) % m];      // edge b -> eye
            face.nb[2] = created[(i + m - 1) % m];  // edge eye -> a
        }
        for (int p : orphans) {
            assign(p, created);
        }
        for (int f : created) {
            if (!faces_[static_cast<std::size_t>(f)].outside.empty()) {
                work.push_back(f);
            }
        }
    }

    std::span<const Point3> pts_;
    double eps_ = 0.0;
    std::vector<Face> faces_;
    std::vector<unsigned> visited_;
    unsigned stamp_ = 0;
};

}  // namespace

std::vector<HullFacet> convex_hull_3d(std::span<const Point3> points) { return QuickHull(points).run(); }

}  // namespace nplap
