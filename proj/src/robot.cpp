#include "vrm/robot.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace vrm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

Polygon rectangle(Vec2 start, double angle, double length, double width) {
  const Vec2 d{std::cos(angle), std::sin(angle)};
  const Vec2 n{-d.y, d.x};
  const Vec2 half = 0.5 * width * n;
  const Vec2 end = start + length * d;
  return {start - half, end - half, end + half, start + half};
}

}  // namespace

Topology full_circle_topology(std::size_t dof) {
  return Topology(dof, Coordinate{JointKind::Revolute, std::nullopt});
}

Topology topology(const RobotSpec& spec) {
  return std::visit(
      Overloaded{
          [](const ArmSpec& arm) {
            Topology t = full_circle_topology(arm.link_lengths.size());
            for (std::size_t i = 0; i < arm.joint_limits.size() && i < t.size(); ++i) {
              t[i].limits = arm.joint_limits[i];
            }
            return t;
          },
          [](const MobileSpec& mobile) {
            return Topology{{JointKind::Prismatic, mobile.x_range},
                            {JointKind::Prismatic, mobile.y_range}};
          }},
      spec);
}

std::size_t dof(const RobotSpec& spec) {
  return std::visit(Overloaded{[](const ArmSpec& a) { return a.link_lengths.size(); },
                               [](const MobileSpec&) { return std::size_t{2}; }},
                    spec);
}

std::size_t link_count(const RobotSpec& spec) {
  return std::visit(Overloaded{[](const ArmSpec& a) { return a.link_lengths.size(); },
                               [](const MobileSpec&) { return std::size_t{1}; }},
                    spec);
}

std::vector<Rgb> link_colors(const RobotSpec& spec) {
  return std::visit(Overloaded{[](const ArmSpec& a) { return a.link_colors; },
                               [](const MobileSpec& m) { return std::vector<Rgb>{m.color}; }},
                    spec);
}

double robot_height(const RobotSpec& spec) {
  return std::visit([](const auto& s) { return s.height; }, spec);
}

void validate(const RobotSpec& spec, Rgb background) {
  std::visit(
      Overloaded{
          [&](const ArmSpec& arm) {
            const std::size_t d = arm.link_lengths.size();
            if (d == 0) invalid("arm needs at least one link");
            if (arm.link_widths.size() != d || arm.link_colors.size() != d) {
              invalid("arm link lengths, widths and colors must have equal counts");
            }
            if (!arm.joint_limits.empty() && arm.joint_limits.size() != d) {
              invalid("joint limits must be absent or given for every joint");
            }
            for (std::size_t i = 0; i < d; ++i) {
              if (!(arm.link_lengths[i] > 0.0) || !(arm.link_widths[i] > 0.0)) {
                invalid("link lengths and widths must be strictly positive");
              }
              if (arm.link_colors[i] == background) invalid("link color equals background");
              for (std::size_t j = 0; j < i; ++j) {
                if (arm.link_colors[i] == arm.link_colors[j]) invalid("link colors must be distinct");
              }
            }
            for (const auto& lim : arm.joint_limits) {
              if (lim && !(lim->hi > lim->lo && lim->width() <= kTwoPi)) {
                invalid("joint limit must satisfy lo < hi <= lo + 2pi");
              }
            }
          },
          [&](const MobileSpec& mobile) {
            if (!is_simple(mobile.body)) invalid("mobile body must be a simple polygon");
            if (!(mobile.x_range.hi > mobile.x_range.lo) ||
                !(mobile.y_range.hi > mobile.y_range.lo)) {
              invalid("mobile ranges must be non-empty");
            }
            if (mobile.color == background) invalid("robot color equals background");
          }},
      spec);
}

double wrap_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double coordinate_delta(const Coordinate& coord, double from, double to) {
  if (coord.kind == JointKind::Prismatic) return to - from;
  if (coord.limits) {
    return wrap_angle(to - coord.limits->lo) - wrap_angle(from - coord.limits->lo);
  }
  double d = wrap_angle(to - from);
  if (d > kPi) d -= kTwoPi;
  return d;
}

Configuration normalized(const Configuration& q, const Topology& topo) {
  std::vector<double> v = q.values();
  for (std::size_t i = 0; i < v.size() && i < topo.size(); ++i) {
    if (topo[i].kind == JointKind::Revolute) v[i] = wrap_angle(v[i]);
  }
  return Configuration(std::move(v));
}

bool is_valid(const Configuration& q, const RobotSpec& spec) {
  const Topology topo = topology(spec);
  if (q.size() != topo.size()) return false;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!std::isfinite(q[i])) return false;
    const Coordinate& c = topo[i];
    if (!c.limits) continue;
    if (c.kind == JointKind::Prismatic) {
      if (q[i] < c.limits->lo || q[i] > c.limits->hi) return false;
    } else if (wrap_angle(q[i] - c.limits->lo) >= c.limits->width()) {
      return false;
    }
  }
  return true;
}

std::vector<Vec2> joint_positions(const Configuration& q, const ArmSpec& arm) {
  if (q.size() != arm.link_lengths.size()) {
    throw Error(ErrorCode::DimensionMismatch, "configuration dimension does not match the arm");
  }
  std::vector<Vec2> points{arm.base};
  double angle = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    angle += q[i];
    points.push_back(points.back() +
                     arm.link_lengths[i] * Vec2{std::cos(angle), std::sin(angle)});
  }
  return points;
}

std::vector<LinkPolygon> forward_kinematics(const Configuration& q, const RobotSpec& spec) {
  if (q.size() != dof(spec)) {
    throw Error(ErrorCode::DimensionMismatch, "configuration dimension does not match the robot");
  }
  return std::visit(
      Overloaded{
          [&](const ArmSpec& arm) {
            std::vector<LinkPolygon> links;
            links.reserve(q.size());
            Vec2 start = arm.base;
            double angle = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
              angle += q[i];
              links.push_back({i, rectangle(start, angle, arm.link_lengths[i], arm.link_widths[i])});
              start = start + arm.link_lengths[i] * Vec2{std::cos(angle), std::sin(angle)};
            }
            return links;
          },
          [&](const MobileSpec& mobile) {
            Polygon body = counter_clockwise(mobile.body);
            for (Vec2& v : body) v = v + Vec2{q[0], q[1]};
            return std::vector<LinkPolygon>{{0, std::move(body)}};
          }},
      spec);
}

std::vector<Configuration> sample_configurations(std::size_t n, const RobotSpec& spec,
                                                 std::uint64_t seed) {
  const Topology topo = topology(spec);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Configuration> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> v(topo.size());
    for (std::size_t i = 0; i < topo.size(); ++i) {
      const Coordinate& c = topo[i];
      const double u = unit(rng);
      if (c.limits) {
        v[i] = c.limits->lo + u * c.limits->width();
      } else {
        v[i] = u * kTwoPi;
      }
      if (c.kind == JointKind::Revolute) v[i] = wrap_angle(v[i]);
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

std::vector<Configuration> interpolate_configurations(const Configuration& from,
                                                      const Configuration& to, double epsilon,
                                                      const Topology& topo) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (from.size() != to.size() || from.size() != topo.size()) {
    throw Error(ErrorCode::DimensionMismatch, "configuration dimensions differ");
  }
  std::vector<double> delta(from.size());
  std::size_t steps = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    delta[i] = coordinate_delta(topo[i], from[i], to[i]);
    const double ratio = std::abs(delta[i]) / epsilon;
    steps = std::max(steps, static_cast<std::size_t>(std::ceil(ratio - 1e-9)));
  }
  std::vector<Configuration> out;
  out.reserve(steps + 1);
  out.push_back(normalized(from, topo));
  for (std::size_t s = 1; s < steps; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(steps);
    std::vector<double> v(from.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = from[i] + t * delta[i];
    out.push_back(normalized(Configuration(std::move(v)), topo));
  }
  if (steps > 0) {
    // Land exactly on the target rather than on from + delta.
    std::vector<double> v(from.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = from[i] + delta[i];
    Configuration last = normalized(Configuration(std::move(v)), topo);
    const Configuration target = normalized(to, topo);
    bool same_point = true;
    for (std::size_t i = 0; i < last.size(); ++i) {
      if (std::abs(coordinate_delta(topo[i], last[i], target[i])) > 1e-9) same_point = false;
    }
    out.push_back(same_point ? target : last);
  }
  return out;
}

std::vector<Configuration> interpolate_configurations(const Configuration& from,
                                                      const Configuration& to, double epsilon) {
  return interpolate_configurations(from, to, epsilon, full_circle_topology(from.size()));
}

bool geometric_collision(const Configuration& q, const RobotSpec& spec,
                         const ObstacleSet& obstacles) {
  if (obstacles.empty()) return false;
  for (const LinkPolygon& link : forward_kinematics(q, spec)) {
    for (const Obstacle& obs : obstacles) {
      if (polygons_intersect(link.vertices, obs.polygon)) return true;
    }
  }
  return false;
}

ContactClass classify_contact(const Configuration& q, const RobotSpec& spec,
                              const ObstacleSet& obstacles, double guard) {
  bool touching = false;
  double clearance = std::numeric_limits<double>::infinity();
  for (const LinkPolygon& link : forward_kinematics(q, spec)) {
    for (const Obstacle& obs : obstacles) {
      if (!polygons_intersect(link.vertices, obs.polygon)) {
        clearance = std::min(clearance, polygon_distance(link.vertices, obs.polygon));
        continue;
      }
      touching = true;
      if (!is_convex(obs.polygon)) continue;
      if (penetration_depth(link.vertices, obs.polygon) > guard) return ContactClass::Colliding;
    }
  }
  if (!touching && clearance > guard) return ContactClass::Free;
  return ContactClass::NearContact;
}

}  // namespace vrm
