#include "vrm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vrm {

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Keeps the part of `poly` on the left of the directed line a->b (inclusive).
Polygon clip_half_plane(const Polygon& poly, Vec2 a, Vec2 b) {
  Polygon out;
  if (poly.empty()) return out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 cur = poly[i];
    const Vec2 nxt = poly[(i + 1) % n];
    const double dc = orient(a, b, cur);
    const double dn = orient(a, b, nxt);
    if (dc >= 0.0) out.push_back(cur);
    if ((dc >= 0.0) != (dn >= 0.0)) {
      const double t = dc / (dc - dn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

}  // namespace

double signed_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

bool is_convex(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int dir = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int s = sign(orient(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]));
    if (s == 0) continue;
    if (dir == 0) dir = s;
    else if (s != dir) return false;
  }
  return dir != 0;
}

bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (const Vec2& v : poly) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) return false;
  }
  if (std::abs(signed_area(poly)) <= 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

Polygon counter_clockwise(Polygon poly) {
  if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

bool point_in_polygon(Vec2 p, const Polygon& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = sign(orient(a, b, c));
  const int o2 = sign(orient(a, b, d));
  const int o3 = sign(orient(c, d, a));
  const int o4 = sign(orient(c, d, b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool polygons_intersect(const Polygon& a, const Polygon& b) {
  if (a.empty() || b.empty()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 a0 = a[i];
    const Vec2 a1 = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segments_intersect(a0, a1, b[j], b[(j + 1) % b.size()])) return true;
    }
  }
  // No boundary crossing: either disjoint or one contains the other.
  return point_in_polygon(a.front(), b) || point_in_polygon(b.front(), a);
}

double polygon_distance(const Polygon& a, const Polygon& b) {
  if (polygons_intersect(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, segment_distance(a[i], a[(i + 1) % a.size()], b[j],
                                             b[(j + 1) % b.size()]));
    }
  }
  return best;
}

Polygon clip_to_convex(const Polygon& subject, const Polygon& clip) {
  const Polygon region = counter_clockwise(clip);
  Polygon out = subject;
  for (std::size_t i = 0; i < region.size() && !out.empty(); ++i) {
    out = clip_half_plane(out, region[i], region[(i + 1) % region.size()]);
  }
  return out;
}

Polygon erode_convex(const Polygon& poly, double margin) {
  const Polygon ccw = counter_clockwise(poly);
  Polygon out = ccw;
  for (std::size_t i = 0; i < ccw.size() && !out.empty(); ++i) {
    const Vec2 a = ccw[i];
    const Vec2 b = ccw[(i + 1) % ccw.size()];
    const Vec2 dir = b - a;
    const double len = norm(dir);
    if (len == 0.0) continue;
    const Vec2 inward{-dir.y / len, dir.x / len};
    out = clip_half_plane(out, a + margin * inward, b + margin * inward);
  }
  if (out.size() < 3 || std::abs(signed_area(out)) <= 1e-12) return {};
  return out;
}

double penetration_depth(const Polygon& a, const Polygon& b) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto axes_of = [&](const Polygon& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 dir = poly[(i + 1) % poly.size()] - poly[i];
      const double len = norm(dir);
      if (len == 0.0) continue;
      const Vec2 axis{-dir.y / len, dir.x / len};
      double a_lo = std::numeric_limits<double>::infinity(), a_hi = -a_lo;
      double b_lo = a_lo, b_hi = -a_lo;
      for (const Vec2 p : a) {
        const double t = p.x * axis.x + p.y * axis.y;
        a_lo = std::min(a_lo, t);
        a_hi = std::max(a_hi, t);
      }
      for (const Vec2 p : b) {
        const double t = p.x * axis.x + p.y * axis.y;
        b_lo = std::min(b_lo, t);
        b_hi = std::max(b_hi, t);
      }
      best = std::min(best, std::max(0.0, std::min(a_hi - b_lo, b_hi - a_lo)));
    }
  };
  axes_of(a);
  axes_of(b);
  return std::isfinite(best) ? best : 0.0;
}

}  // namespace vrm
