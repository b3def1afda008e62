#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "vrm/common.hpp"
#include "vrm/geometry.hpp"

namespace vrm {

/// Planar serial arm of rectangular links. Link i is a rectangle of length
/// `link_lengths[i]` and width `link_widths[i]` centered on its axis, starting
/// at the distal end of link i-1 (or `base`), rotated by the cumulative joint
/// angle. Empty `joint_limits` means every joint turns fully (S^1).
struct ArmSpec {
  std::vector<double> link_lengths;
  std::vector<double> link_widths;
  Vec2 base;
  std::vector<std::optional<Interval>> joint_limits;
  std::vector<Rgb> link_colors;
  /// Prism height above the floor; only perspective cameras see it.
  double height = 0.5;
};

/// Rigid body translating in the plane; configuration is (x, y).
struct MobileSpec {
  Polygon body;  // body frame
  Interval x_range;
  Interval y_range;
  Rgb color;
  std::vector<Vec2> markers;  // body frame tracked points
  double height = 0.5;
};

using RobotSpec = std::variant<ArmSpec, MobileSpec>;

enum class JointKind { Revolute, Prismatic };

struct Coordinate {
  JointKind kind = JointKind::Revolute;
  std::optional<Interval> limits;
};

/// Per-coordinate topology of the configuration space.
using Topology = std::vector<Coordinate>;

Topology full_circle_topology(std::size_t dof);
Topology topology(const RobotSpec& spec);

std::size_t dof(const RobotSpec& spec);
std::size_t link_count(const RobotSpec& spec);
std::vector<Rgb> link_colors(const RobotSpec& spec);
double robot_height(const RobotSpec& spec);

/// Throws Error(InvalidArgument) when the robot description is inconsistent or out of range.
void validate(const RobotSpec& spec, Rgb background);

class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<double> values_;
};

/// Reduces an angle to [0, 2*pi).
double wrap_angle(double radians);

/// Signed displacement from `from` to `to` along the shortest admissible path
/// of one coordinate. For a full circle the result lies in (-pi, pi]; an exact
/// half turn resolves counter-clockwise (+pi).
double coordinate_delta(const Coordinate& coord, double from, double to);

/// Reduces revolute coordinates to [0, 2*pi).
Configuration normalized(const Configuration& q, const Topology& topo);
bool is_valid(const Configuration& q, const RobotSpec& spec);

struct LinkPolygon {
  std::size_t link = 0;
  Polygon vertices;  // counter-clockwise
};

/// Workspace polygons of every link, in link order.
std::vector<LinkPolygon> forward_kinematics(const Configuration& q, const RobotSpec& spec);

/// Joint positions of an arm: base, then the distal end of every link.
std::vector<Vec2> joint_positions(const Configuration& q, const ArmSpec& arm);

/// Uniform over each coordinate's admissible interval; deterministic in `seed`.
std::vector<Configuration> sample_configurations(std::size_t n, const RobotSpec& spec,
                                                 std::uint64_t seed);

/// Straight interpolation along per-coordinate shortest paths; endpoints
/// included, every coordinate moves at most `epsilon` per step.
std::vector<Configuration> interpolate_configurations(const Configuration& from,
                                                      const Configuration& to, double epsilon,
                                                      const Topology& topo);
/// Full-circle revolute joints.
std::vector<Configuration> interpolate_configurations(const Configuration& from,
                                                      const Configuration& to, double epsilon);

struct Obstacle {
  Polygon polygon;
  Rgb color;
  double height = 1.0;
};

using ObstacleSet = std::vector<Obstacle>;

/// Exact polygon test: true iff some link shares a point with some obstacle.
bool geometric_collision(const Configuration& q, const RobotSpec& spec,
                         const ObstacleSet& obstacles);

/// Ground truth with a safety band around contact.
enum class ContactClass {
  Free,         // clearance greater than the guard
  Colliding,    // separating some link from an obstacle takes a move over `guard`
  NearContact,  // neither; too close to call at raster resolution
};

/// Deep-overlap detection needs convex obstacles; a colliding non-convex
/// obstacle reports NearContact unless another pair is deep.
ContactClass classify_contact(const Configuration& q, const RobotSpec& spec,
                              const ObstacleSet& obstacles, double guard);

}  // namespace vrm
