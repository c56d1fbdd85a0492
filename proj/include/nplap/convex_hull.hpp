#pragma once

#include <array>
#include <span>
#include <vector>

#include "nplap/grid_geometry.hpp"

namespace nplap {

/// Convex hull of planar points (Andrew's monotone chain), counterclockwise,
/// collinear points dropped. Fewer than three vertices means a degenerate hull.
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> points);

/// Signed distance to a counterclockwise convex polygon (negative inside).
double polygon_signed_distance(std::span<const Vec2> polygon, Vec2 x);

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Facet of a 3-D convex hull: vertex indices counterclockwise seen from
/// outside, unit outer normal and offset (normal . x = offset on the facet).
struct HullFacet {
    std::array<int, 3> vertices{};
    std::array<double, 3> normal{};
    double offset = 0.0;
};

/// Quickhull in 3-D. Throws GeometryError if the points are coplanar or collinear
/// (within a tolerance relative to the coordinate scale).
std::vector<HullFacet> convex_hull_3d(std::span<const Point3> points);

}  // namespace nplap
