#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vrm/robot.hpp"

using namespace vrm;

namespace {

// Corners of every link by composing rotations by hand.
std::vector<std::vector<Vec2>> fk_oracle(const std::vector<double>& q, const ArmSpec& arm) {
  std::vector<std::vector<Vec2>> out;
  Vec2 p = arm.base;
  double angle = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    angle += q[i];
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    const Vec2 n{-dir.y, dir.x};
    const Vec2 end = p + arm.link_lengths[i] * dir;
    const double h = arm.link_widths[i] / 2;
    out.push_back({p - h * n, end - h * n, end + h * n, p + h * n});
    p = end;
  }
  return out;
}

bool same_point_set(const Polygon& a, const std::vector<Vec2>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (Vec2 v : b) {
    if (std::none_of(a.begin(), a.end(), [&](Vec2 w) { return distance(v, w) <= tol; })) return false;
  }
  return true;
}

Vec2 distal_midpoint(const Configuration& q, const ArmSpec& arm) { return joint_positions(q, arm).back(); }

// Point-in-polygon sampling: true if any of `samples` random points of a link lies in an obstacle.
bool sampled_collision(const Configuration& q, const ArmSpec& arm, const ObstacleSet& obs, int samples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto links = fk_oracle(q.values(), arm);
  for (const auto& c : links) {
    for (int s = 0; s < samples; ++s) {
      const double a = u(rng), b = u(rng);
      const Vec2 p = c[0] + a * (c[1] - c[0]) + b * (c[3] - c[0]);
      for (const Obstacle& o : obs) {
        if (point_in_polygon(p, o.polygon)) return true;
      }
    }
  }
  return false;
}

const ArmSpec& arm_of(const Scene& s) { return std::get<ArmSpec>(s.robot); }

}  // namespace

TEST_CASE("forward kinematics of a straight and bent two-link chain") {
  const Scene s = test::two_link_scene(1.0, 1.0, 0.1);
  const ArmSpec& arm = arm_of(s);
  auto close = [](Vec2 a, Vec2 b) { return distance(a, b) < 1e-12; };
  CHECK(close(distal_midpoint(Configuration({0.0, 0.0}), arm), {2.0, 0.0}));
  CHECK(close(distal_midpoint(Configuration({kPi / 2, 0.0}), arm), {0.0, 2.0}));
  CHECK(close(distal_midpoint(Configuration({kPi / 2, kPi / 2}), arm), {-1.0, 1.0}));
}

TEST_CASE("link polygons match a hand-composed transform") {
  ArmSpec arm;
  arm.link_lengths = {1.8, 1.5, 1.2};
  arm.link_widths = {0.3, 0.4, 0.5};
  arm.base = {0.25, -0.5};
  arm.link_colors = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const RobotSpec spec = arm;
  for (const Configuration& q : sample_configurations(200, spec, 11)) {
    const auto links = forward_kinematics(q, spec);
    const auto oracle = fk_oracle(q.values(), arm);
    REQUIRE(links.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(links[i].link == i);
      CHECK(same_point_set(links[i].vertices, oracle[i], 1e-9));
      CHECK(signed_area(links[i].vertices) > 0.0);
    }
  }
}

TEST_CASE("forward kinematics is 2pi-periodic in every joint") {
  const RobotSpec spec = presets::arm3().robot;
  for (const Configuration& q : sample_configurations(50, spec, 3)) {
    const auto base = forward_kinematics(q, spec);
    for (std::size_t j = 0; j < q.size(); ++j) {
      Configuration shifted = q;
      shifted[j] += kTwoPi;
      const auto moved = forward_kinematics(shifted, spec);
      for (std::size_t l = 0; l < base.size(); ++l) {
        CHECK(same_point_set(moved[l].vertices, base[l].vertices, 1e-9));
      }
    }
  }
}

TEST_CASE("mobile robot kinematics is a rigid translation of the body") {
  const Scene s = presets::mobile();
  const MobileSpec& m = std::get<MobileSpec>(s.robot);
  const Configuration q({1.25, -2.5});
  const auto links = forward_kinematics(q, s.robot);
  REQUIRE(links.size() == 1);
  std::vector<Vec2> expected;
  for (Vec2 v : m.body) expected.push_back(v + Vec2{1.25, -2.5});
  CHECK(same_point_set(links[0].vertices, expected, 1e-12));
}

TEST_CASE("sampling is deterministic and uniform") {
  const RobotSpec spec = presets::arm2().robot;
  CHECK(sample_configurations(1, spec, 42) == sample_configurations(1, spec, 42));
  CHECK(sample_configurations(0, spec, 42).empty());

  const auto qs = sample_configurations(20000, spec, 5);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (const auto& q : qs) {
      CHECK(q[j] >= 0.0);
      CHECK(q[j] < kTwoPi);
      mean += q[j];
    }
    mean /= qs.size();
    // Uniform on [0, 2pi): sigma of the mean is 2pi / sqrt(12 n).
    const double sigma = kTwoPi / std::sqrt(12.0 * qs.size());
    CHECK(std::abs(mean - kPi) < 3 * sigma);
  }
}

TEST_CASE("interpolation follows the short arc") {
  const double deg = degrees_to_radians(1.0);
  SUBCASE("equal endpoints give one configuration") {
    const Configuration q({0.3, 1.2});
    const auto path = interpolate_configurations(q, q, deg);
    REQUIRE(path.size() == 1);
    CHECK(path[0] == q);
  }
  SUBCASE("wrap from 350 to 10 degrees") {
    const auto path = interpolate_configurations(Configuration({degrees_to_radians(350)}),
                                                 Configuration({degrees_to_radians(10)}), deg);
    REQUIRE(path.size() == 21);
    for (std::size_t i = 0; i < path.size(); ++i) {
      const double expected = std::fmod(350.0 + static_cast<double>(i), 360.0);
      CHECK(test::circular_distance(path[i][0], degrees_to_radians(expected)) < 1e-9);
    }
  }
  SUBCASE("two degrees in one joint") {
    const auto path = interpolate_configurations(Configuration({0.0, 0.0}),
                                                 Configuration({0.0, degrees_to_radians(2)}), deg);
    CHECK(path.size() == 3);
  }
  SUBCASE("exact half turn goes counter-clockwise") {
    const auto path = interpolate_configurations(Configuration({0.0}), Configuration({kPi}), deg);
    REQUIRE(path.size() > 2);
    CHECK(path[1][0] > 0.0);
  }
}

TEST_CASE("interpolation steps are bounded and sweep the circular distance") {
  const RobotSpec spec = presets::arm3().robot;
  const auto qs = sample_configurations(60, spec, 9);
  for (const double eps_deg : {4.0, 1.0, 0.5}) {
    const double eps = degrees_to_radians(eps_deg);
    for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
      const auto path = interpolate_configurations(qs[i], qs[i + 1], eps);
      REQUIRE(path.size() >= 2);
      CHECK(test::circular_distance(path.front()[0], qs[i][0]) < 1e-12);
      CHECK(test::circular_distance(path.back()[2], qs[i + 1][2]) < 1e-9);
      for (std::size_t j = 0; j < 3; ++j) {
        double swept = 0.0;
        for (std::size_t s = 0; s + 1 < path.size(); ++s) {
          const double step = test::circular_distance(path[s][j], path[s + 1][j]);
          CHECK(step <= eps + 1e-12);
          swept += step;
        }
        CHECK(swept == doctest::Approx(test::circular_distance(qs[i][j], qs[i + 1][j])).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("geometric collision examples") {
  const Scene s = test::two_link_scene(1.0, 1.0, 0.1);
  const RobotSpec& spec = s.robot;
  SUBCASE("no obstacles") {
    for (const auto& q : sample_configurations(100, spec, 1)) CHECK_FALSE(geometric_collision(q, spec, {}));
  }
  SUBCASE("obstacle around the base") {
    const ObstacleSet obs{test::obstacle(test::square({0, 0}, 0.2))};
    for (const auto& q : sample_configurations(100, spec, 2)) CHECK(geometric_collision(q, spec, obs));
  }
  SUBCASE("small square at the reach") {
    const ObstacleSet obs{test::obstacle(test::square({2.0, 0.0}, 0.05))};
    const Configuration straight({0.0, 0.0}), folded({kPi, 0.0});
    CHECK(geometric_collision(straight, spec, obs));
    CHECK_FALSE(geometric_collision(folded, spec, obs));
    CHECK(sampled_collision(straight, arm_of(s), obs, 1000));
    CHECK_FALSE(sampled_collision(folded, arm_of(s), obs, 1000));
  }
}

TEST_CASE("geometric collision agrees with point sampling and ignores obstacle order") {
  Scene s = presets::arm3();
  const RobotSpec& spec = s.robot;
  ObstacleSet reversed(s.obstacles.rbegin(), s.obstacles.rend());
  std::size_t disagreements = 0, hits = 0;
  for (const auto& q : sample_configurations(400, spec, 17)) {
    const bool exact = geometric_collision(q, spec, s.obstacles);
    CHECK(exact == geometric_collision(q, spec, reversed));
    hits += exact;
    // Sampling can miss a grazing overlap but never invents one.
    const bool sampled = sampled_collision(q, arm_of(s), s.obstacles, 2000);
    if (sampled) CHECK(exact);
    disagreements += exact != sampled;
  }
  CHECK(hits > 20);
  CHECK(disagreements * 10 < hits);
}

TEST_CASE("contact classification uses clearance and penetration depth") {
  const Scene s = test::one_link_scene(2.0, 0.2);
  const RobotSpec& spec = s.robot;
  const double guard = 0.2;
  const Configuration q({0.0});  // link spans x in [0, 2], y in [-0.1, 0.1]
  auto cls = [&](const Polygon& p) { return classify_contact(q, spec, {test::obstacle(p)}, guard); };
  CHECK(cls(test::square({3.0, 0.0}, 0.5)) == ContactClass::Free);            // clearance 0.5
  CHECK(cls(test::square({2.6, 0.0}, 0.5)) == ContactClass::NearContact);     // clearance 0.1
  CHECK(cls(test::square({2.4, 0.0}, 0.5)) == ContactClass::NearContact);     // depth 0.1
  CHECK(cls(test::square({1.0, 0.0}, 0.5)) == ContactClass::Colliding);       // crosses the link
  CHECK(cls(test::square({2.2, 0.0}, 0.5)) == ContactClass::Colliding);       // depth 0.3
}

TEST_CASE("penetration depth of boxes") {
  const Polygon a = test::square({0, 0}, 1.0);
  CHECK(penetration_depth(a, test::square({3, 0}, 1.0)) == 0.0);
  CHECK(penetration_depth(a, test::square({1.5, 0.2}, 1.0)) == doctest::Approx(0.5));
  CHECK(penetration_depth(a, test::square({0, 0}, 0.25)) == doctest::Approx(1.25));
}
