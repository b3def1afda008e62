#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "vrm/experiment.hpp"
#include "vrm/features.hpp"
#include "vrm/metrics.hpp"

using namespace vrm;

namespace {

std::vector<NodeFeatures> arm3_features(std::size_t n, std::uint64_t seed) {
  const Scene s = presets::arm3();
  const auto ex = make_extractor(s, all_metrics(), visual_planners(), s.seed, 500);
  return sample_features(s, n, seed, ex);
}

}  // namespace

TEST_CASE("image L2 examples") {
  const ImageBuffer a(10, 10);
  ImageBuffer b = a;
  CHECK(image_l2({a, {}}, {a, {}}) == 0.0);
  b.data()[17] = 255;
  CHECK(image_l2({a, {}}, {b, {}}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(image_l2({a, {}}, {ImageBuffer(5, 5), {}}), Error);
}

TEST_CASE("background deltas give the full-image distance") {
  const Scene s = presets::arm3();
  const FeatureExtractor ex(s);
  const auto qs = sample_configurations(30, s.robot, 13);
  for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
    const RobotImage a = render_robot(qs[i], s), b = render_robot(qs[i + 1], s);
    CHECK(delta_l2(ex.extract(a, qs[i]), ex.extract(b, qs[i + 1])) == doctest::Approx(image_l2(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("random projections are linear and unit-column") {
  const RandomProjector rp(300, 50, 99);
  CHECK(rp.scale() == doctest::Approx(std::sqrt(300.0 / 50.0)));
  for (std::size_t j = 0; j < 50; ++j) CHECK(rp.direction(j).norm() == doctest::Approx(1.0).epsilon(1e-5));
  ImageBuffer zero(10, 10);
  CHECK(rp.project(zero).norm() == 0.0f);

  std::vector<std::uint32_t> comps{3, 40, 41, 299};
  std::vector<float> vals{0.5f, -1.0f, 0.25f, 2.0f}, doubled;
  for (float v : vals) doubled.push_back(2 * v);
  const Eigen::VectorXf x = rp.project_sparse(comps, vals);
  CHECK((rp.project_sparse(comps, doubled) - 2 * x).norm() < 1e-5f);
  CHECK(RandomProjector(300, 50, 99).project_sparse(comps, vals) == x);
}

TEST_CASE("random projection of a dense image matches the sparse delta path") {
  const Scene s = presets::arm3();
  auto rp = std::make_shared<RandomProjector>(30000, 200, 5);
  const FeatureExtractor ex(s, {}, rp);
  const auto qs = sample_configurations(5, s.robot, 2);
  const ImageBuffer bg = render_background(s);
  for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
    const RobotImage a = render_robot(qs[i], s), b = render_robot(qs[i + 1], s);
    const NodeFeatures fa = ex.extract(a, qs[i]), fb = ex.extract(b, qs[i + 1]);
    // Projection is linear, so differences agree whichever origin is used.
    const Eigen::VectorXf dense = rp->project(a.pixels) - rp->project(b.pixels);
    CHECK((dense - (fa.projection - fb.projection)).norm() < 1e-3f * (1 + dense.norm()));
  }
}

TEST_CASE("joint geodesic examples") {
  const Configuration a({0.3, 1.0});
  CHECK(joint_geodesic(a, a) == 0.0);
  const Configuration p({degrees_to_radians(350), degrees_to_radians(10)});
  const Configuration q({degrees_to_radians(10), degrees_to_radians(350)});
  CHECK(joint_geodesic(p, q) == doctest::Approx(degrees_to_radians(40)));
}

TEST_CASE("tracked points") {
  const Scene s = presets::mobile();
  const Configuration q({0.5, 0.5});
  const TrackedPointSet a = tracked_points(q, s);
  CHECK(itp_l2(a, a) == 0.0);
  // (3, 4) px: 10 px per unit, image rows grow downward.
  const TrackedPointSet b = tracked_points(Configuration({0.8, 0.1}), s);
  REQUIRE(a.points.size() == 2);
  CHECK(itp_l2(a, b) == doctest::Approx(std::sqrt(2.0) * 5.0));

  const Scene arm = presets::arm3();
  CHECK(tracked_points(Configuration({0, 0, 0}), arm).points.size() == 9);
  CHECK_THROWS_AS(itp_l2(a, tracked_points(Configuration({0, 0, 0}), arm)), Error);
}

TEST_CASE("marker trajectories are continuous in the interpolation step") {
  const Scene s = presets::arm3();
  const auto qs = sample_configurations(10, s.robot, 31);
  for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
    double previous = 1e300;
    for (double eps_deg : {4.0, 2.0, 1.0}) {
      const auto path = interpolate_configurations(qs[i], qs[i + 1], degrees_to_radians(eps_deg));
      double worst = 0.0;
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        worst = std::max(worst, itp_l2(tracked_points(path[k], s), tracked_points(path[k + 1], s)));
      }
      CHECK(worst < previous);
      previous = worst;
    }
  }
}

TEST_CASE("Hausdorff examples and metric properties") {
  const std::vector<Vec2> a{{0, 0}}, b{{3, 4}}, c{{0, 0}, {10, 0}};
  CHECK(hausdorff(a, a) == 0.0);
  CHECK(hausdorff(a, b) == 5.0);
  CHECK(hausdorff(c, a) == 10.0);
  CHECK(hausdorff(a, c) == 10.0);
  CHECK_THROWS_AS(hausdorff({}, a), Error);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 100);
  auto random_set = [&] {
    std::vector<Vec2> s(1 + rng() % 12);
    for (Vec2& p : s) p = {u(rng), u(rng)};
    return s;
  };
  for (int t = 0; t < 500; ++t) {
    const auto x = random_set(), y = random_set(), z = random_set();
    CHECK(hausdorff(x, x) == 0.0);
    CHECK(hausdorff(x, y) == hausdorff(y, x));
    CHECK(hausdorff(x, z) <= hausdorff(x, y) + hausdorff(y, z) + 1e-9);
  }
}

TEST_CASE("per-link Hausdorff") {
  LinkFeatureSet a{{{{10, 10}, {20, 12}}, {{40, 40}}}};
  CHECK(st_hausdorff(a, a, 141.0) == 0.0);
  LinkFeatureSet b = a;
  for (Vec2& p : b.links[1]) p = p + Vec2{3, 4};
  CHECK(st_hausdorff(a, b, 141.0) == doctest::Approx(5.0));
  LinkFeatureSet c = a;
  c.links[0].clear();
  CHECK(st_hausdorff(a, c, 141.0) == 141.0);
  LinkFeatureSet d = c;
  CHECK(st_hausdorff(c, d, 141.0) == 0.0);
}

TEST_CASE("Shi-Tomasi on simple images") {
  GrayImage flat{32, 32, std::vector<float>(32 * 32, 0.6f)};
  CHECK(shi_tomasi(flat).empty());

  GrayImage rect{40, 40, std::vector<float>(40 * 40, 0.0f)};
  for (int r = 10; r < 25; ++r)
    for (int c = 8; c < 30; ++c) rect.values[r * 40 + c] = 1.0f;
  const auto corners = shi_tomasi(rect);
  CHECK(corners.size() >= 4);
  const std::vector<Vec2> truth{{8, 10}, {29, 10}, {8, 24}, {29, 24}};
  for (Vec2 f : corners) {
    const double d = std::min({distance(f, truth[0]), distance(f, truth[1]), distance(f, truth[2]), distance(f, truth[3])});
    CHECK(d <= 2.0);
  }
  CHECK(oracle::matched_within(truth, corners, 2.0));
}

TEST_CASE("Shi-Tomasi corners follow a 90 degree rotation") {
  GrayImage img{40, 40, std::vector<float>(40 * 40, 0.0f)}, rot = img;
  for (int r = 12; r < 20; ++r)
    for (int c = 6; c < 30; ++c) img.values[r * 40 + c] = 1.0f;
  // (r, c) -> (c, 39 - r)
  for (int r = 0; r < 40; ++r)
    for (int c = 0; c < 40; ++c) rot.values[c * 40 + (39 - r)] = img.values[r * 40 + c];
  std::vector<Vec2> mapped;
  for (Vec2 p : shi_tomasi(img)) mapped.push_back({39 - p.y, p.x});
  const auto found = shi_tomasi(rot);
  CHECK(found.size() == mapped.size());
  CHECK(oracle::matched_within(mapped, found, 2.0));
  CHECK(oracle::matched_within(found, mapped, 2.0));
}

TEST_CASE("Shi-Tomasi matches a brute-force eigenvalue oracle") {
  std::mt19937_64 rng(2024);
  const ShiTomasiParams params;
  for (int i = 0; i < 20; ++i) {
    const GrayImage g = oracle::synthetic_shapes(rng);
    const auto lib = min_eigenvalue_map(g, params.window);
    const auto ref = oracle::eigen_map_oracle(g, params.window);
    double worst = 0.0;
    for (std::size_t k = 0; k < lib.size(); ++k) worst = std::max(worst, std::abs(lib[k] - ref[k]));
    CHECK(worst < 1e-9);
    const auto found = shi_tomasi(g, params);
    const auto expected = oracle::detect_oracle(g, params);
    CHECK(oracle::matched_within(found, expected, params.min_distance));
    CHECK(oracle::matched_within(expected, found, params.min_distance));
  }
}

TEST_CASE("link features segment by color") {
  const Scene s = presets::arm3();
  const RobotImage img = render_robot(Configuration({0.2, 1.0, -0.7}), s);
  const auto colors = link_colors(s.robot);
  const LinkFeatureSet f = link_features(img.pixels, colors);
  REQUIRE(f.links.size() == 3);
  for (const auto& link : f.links) {
    CHECK(!link.empty());
    CHECK(link.size() <= 25);
  }
}

TEST_CASE("every metric satisfies the metric axioms on random triples") {
  const auto nodes = arm3_features(200, 77);
  const Scene s = presets::arm3();
  for (MetricId id : all_metrics()) {
    CAPTURE(to_string(id));
    const auto m = make_metric(id, topology(s.robot), image_diagonal({100, 100}));
    const std::size_t violations = oracle::metric_axiom_violations(*m, nodes, 1000, 8);
    CHECK(violations == 0);
  }
}

TEST_CASE("pairwise evaluators agree with the metric") {
  const auto nodes = arm3_features(60, 5);
  const Scene s = presets::arm3();
  for (MetricId id : all_metrics()) {
    CAPTURE(to_string(id));
    const auto m = make_metric(id, topology(s.robot), image_diagonal({100, 100}));
    auto ev = m->evaluator(nodes);
    const double tol = ev->exact() ? 1e-9 : 1e-3;
    for (std::size_t i = 0; i < nodes.size(); i += 7) {
      std::vector<double> row(nodes.size() - i - 1);
      ev->upper_row(i, row);
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        const double d = m->distance(nodes[i], nodes[j]);
        CHECK(std::abs(row[j - i - 1] - d) <= tol * (1 + d));
      }
    }
  }
}

TEST_CASE("metrics reject nodes without their representation") {
  const Scene s = presets::arm3();
  FeatureOptions bare;
  bare.markers = false;
  bare.link_features = false;
  const NodeFeatures f = FeatureExtractor(s, bare).extract(render_robot(Configuration({0, 0, 0}), s), std::nullopt);
  for (MetricId id : {MetricId::RandomProjectionL2, MetricId::JointGeodesic, MetricId::TrackedPointsL2,
                      MetricId::ShiTomasiHausdorff}) {
    const auto m = make_metric(id, topology(s.robot), 141.0);
    try {
      m->require(f);
      FAIL("accepted a node without its representation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedMetric);
    }
  }
  CHECK_NOTHROW(make_metric(MetricId::ImageL2, topology(s.robot), 141.0)->require(f));
  CHECK(parse_metric("st-h") == MetricId::ShiTomasiHausdorff);
  CHECK_THROWS_AS(parse_metric("cosine"), Error);
}
