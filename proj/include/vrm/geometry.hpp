#pragma once

#include <vector>

#include "vrm/common.hpp"

namespace vrm {

/// Simple polygon, vertices in order (either orientation unless noted).
using Polygon = std::vector<Vec2>;

double signed_area(const Polygon& poly);
bool is_convex(const Polygon& poly);
/// No two non-adjacent edges touch; at least three vertices.
bool is_simple(const Polygon& poly);
/// Returns the polygon with counter-clockwise orientation.
Polygon counter_clockwise(Polygon poly);

/// Even-odd rule; points exactly on the boundary may land on either side.
bool point_in_polygon(Vec2 p, const Polygon& poly);

/// Closed segments [a,b] and [c,d] share at least one point.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Exact (up to floating point) test for a shared point, containment included.
bool polygons_intersect(const Polygon& a, const Polygon& b);

/// Euclidean distance between two polygons as closed regions; 0 when they intersect.
double polygon_distance(const Polygon& a, const Polygon& b);

/// Sutherland-Hodgman: clips `subject` against a convex `clip` region.
/// Result may be empty.
Polygon clip_to_convex(const Polygon& subject, const Polygon& clip);

/// Inward offset of a convex polygon by `margin`: the set of points whose
/// distance to the complement is at least `margin`. Empty when nothing remains.
Polygon erode_convex(const Polygon& poly, double margin);

/// Length of the shortest translation separating two convex polygons, found
/// over the edge normals of both. 0 when they do not overlap.
double penetration_depth(const Polygon& a, const Polygon& b);

}  // namespace vrm
