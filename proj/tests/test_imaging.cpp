#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "vrm/render.hpp"

using namespace vrm;

namespace {

double boundary_distance(Vec2 p, const Polygon& poly) {
  double best = 1e300;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

Polygon to_pixels(const Polygon& world, const Camera& cam) {
  Polygon out;
  for (Vec2 v : world) out.push_back(cam.project(v));
  return out;
}

ForegroundImage fg_with(int rows, int cols, std::initializer_list<std::size_t> pixels, Rgb c = {10, 20, 30}) {
  ImageBuffer img(rows, cols);
  for (std::size_t p : pixels) img.set_pixel(p, c);
  return {img};
}

}  // namespace

TEST_CASE("rendered foreground is exactly the link pixels") {
  const Scene s = presets::arm3();
  const ImageBuffer bg = render_background(s);
  const Camera& cam = s.cameras[0];
  for (const auto& q : sample_configurations(50, s.robot, 4)) {
    const RobotImage img = render_robot(q, s);
    const auto fg = test::foreground_support(img, bg);
    const std::set<std::uint32_t> painted(fg.begin(), fg.end());
    const auto links = forward_kinematics(q, s.robot);
    for (int r = 0; r < cam.rows; ++r) {
      for (int c = 0; c < cam.cols; ++c) {
        const Vec2 center{c + 0.5, r + 0.5};
        bool inside = false, ambiguous = false;
        for (const auto& l : links) {
          const Polygon px = to_pixels(l.vertices, cam);
          if (boundary_distance(center, px) < 1e-9) ambiguous = true;
          else if (point_in_polygon(center, px)) inside = true;
        }
        if (ambiguous && !inside) continue;
        CHECK(painted.count(static_cast<std::uint32_t>(r * cam.cols + c)) == (inside ? 1u : 0u));
      }
    }
  }
}

TEST_CASE("renders are deterministic and link colors follow painter order") {
  const Scene s = presets::arm3();
  const Configuration q({0.4, 2.0, -1.0});
  CHECK(render_robot(q, s).pixels == render_robot(q, s).pixels);
  // Folded arm: link 3 crosses link 1 and is drawn on top.
  const Configuration folded({0.0, kPi * 0.9, kPi * 0.2});
  const RobotImage img = render_robot(folded, s);
  const auto colors = link_colors(s.robot);
  std::size_t last = 0;
  for (std::size_t i = 0; i < img.pixels.pixel_count(); ++i) {
    if (img.pixels.pixel(i) == colors[2]) ++last;
  }
  CHECK(last > 0);
}

TEST_CASE("one-link unit arm covers about ten pixels") {
  const Scene s = test::one_link_scene(1.0, 0.1);
  const auto fg = test::foreground_support(render_robot(Configuration({0.0}), s), render_background(s));
  CHECK(static_cast<double>(fg.size()) == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("background subtraction") {
  const Scene s = presets::arm3();
  const ImageBuffer bg = render_background(s);
  SUBCASE("background alone gives an empty foreground") {
    CHECK(support(background_subtract({bg, std::nullopt}, bg).pixels).empty());
  }
  SUBCASE("support equals painted pixels") {
    for (const auto& q : sample_configurations(30, s.robot, 8)) {
      const RobotImage img = render_robot(q, s);
      CHECK(support(background_subtract(img, bg).pixels) == test::foreground_support(img, bg));
      CHECK(robot_coverage(q, s) == test::foreground_support(img, bg));
    }
  }
  SUBCASE("zero threshold keeps injected noise") {
    ImageBuffer noisy = bg;
    std::mt19937_64 rng(3);
    std::set<std::size_t> flipped;
    while (flipped.size() < bg.pixel_count() / 100) flipped.insert(rng() % bg.pixel_count());
    for (std::size_t p : flipped) {
      const Rgb c = noisy.pixel(p);
      const int delta = (rng() & 1) ? 127 : -127;
      noisy.set_pixel(p, {static_cast<std::uint8_t>(c.r + delta), c.g, c.b});
    }
    const auto kept = support(background_subtract({noisy, std::nullopt}, bg, 0.0).pixels);
    CHECK(kept.size() == flipped.size());
    CHECK(std::equal(kept.begin(), kept.end(), flipped.begin()));
  }
}

TEST_CASE("hadamard overlap") {
  const ForegroundImage a = fg_with(10, 10, {3, 4, 5});
  CHECK_FALSE(hadamard_overlap(a, {ImageBuffer(10, 10)}));
  CHECK(hadamard_overlap(a, {a.pixels}));
  CHECK_FALSE(hadamard_overlap(a, {fg_with(10, 10, {6, 7}).pixels}));
  CHECK(overlap_count(a.pixels, fg_with(10, 10, {5, 6}).pixels) == 1);
}

TEST_CASE("zero image overlap implies a collision-free pose") {
  // Corner obstacle kept away from the base so both outcomes occur.
  Scene s = presets::arm3();
  s.obstacles = {test::obstacle({{2.5, 2.5}, {4.5, 2.5}, {4.5, 4.5}, {2.5, 4.5}})};
  const ImageBuffer bg = render_background(s);
  const ObstacleImage b = obstacle_image(s);
  const double guard = 2 * s.cameras[0].pixel_size();
  std::size_t overlapping = 0, tested = 0;
  for (const auto& q : sample_configurations(500, s.robot, 21)) {
    const bool overlap = hadamard_overlap(background_subtract(render_robot(q, s), bg), b);
    overlapping += overlap;
    const ContactClass c = classify_contact(q, s.robot, s.obstacles, guard);
    if (c == ContactClass::NearContact) continue;
    ++tested;
    if (!overlap) CHECK(c == ContactClass::Free);
  }
  CHECK(overlapping > 0);
  CHECK(tested > 400);
}

TEST_CASE("superimpose is a pixelwise max semilattice") {
  std::mt19937_64 rng(12);
  auto random_fg = [&] {
    ImageBuffer img(8, 8);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      if (rng() % 4 == 0) img.set_pixel(i, {std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())});
    }
    return ForegroundImage{img};
  };
  for (int trial = 0; trial < 50; ++trial) {
    const ForegroundImage a = random_fg(), b = random_fg(), c = random_fg();
    auto sup = [](std::initializer_list<ForegroundImage> xs) {
      std::vector<ForegroundImage> v(xs);
      return superimpose(v).pixels;
    };
    CHECK(sup({a}) == a.pixels);
    CHECK(sup({a, a}) == a.pixels);
    CHECK(sup({a, b}) == sup({b, a}));
    CHECK(sup({ForegroundImage{sup({a, b})}, c}) == sup({a, ForegroundImage{sup({b, c})}}));
  }
  const ForegroundImage x = fg_with(8, 8, {1, 2}), y = fg_with(8, 8, {10, 11, 12});
  std::vector<ForegroundImage> xy{x, y};
  CHECK(support(superimpose(xy).pixels).size() == 5);
}

TEST_CASE("stitching and the multi-view rule") {
  const ImageBuffer v1(100, 100), v2(100, 100);
  std::vector<RobotImage> one{{v1, std::nullopt}};
  CHECK(stitch_views(one).pixels == v1);
  std::vector<RobotImage> two{{v1, std::nullopt}, {v2, std::nullopt}};
  const RobotImage stitched = stitch_views(two);
  CHECK(stitched.pixels.size() == 60000);
  CHECK(stitched.pixels.view_count() == 2);

  const ForegroundImage f = fg_with(10, 10, {5});
  const ObstacleImage hit{fg_with(10, 10, {5}).pixels}, miss{fg_with(10, 10, {50}).pixels};
  std::vector<ForegroundImage> f1{f};
  std::vector<ObstacleImage> b1{hit};
  CHECK(multi_view_free(f1, b1) == !hadamard_overlap(f, hit));
  std::vector<ForegroundImage> f2{f, f};
  std::vector<ObstacleImage> first_only{hit, miss}, both{hit, hit};
  CHECK(multi_view_free(f2, first_only));
  CHECK_FALSE(multi_view_free(f2, both));
  // Adding a view never turns free into not free.
  std::vector<ForegroundImage> f3{f, f, f};
  std::vector<ObstacleImage> b3{hit, miss, hit};
  CHECK(multi_view_free(f3, b3));

  // Stitched supports follow the same rule.
  std::vector<RobotImage> masks{{hit.pixels, std::nullopt}, {miss.pixels, std::nullopt}};
  const OccupancyMask mask(stitch_views(masks).pixels);
  const std::vector<std::uint32_t> in_both{5, 105};
  CHECK_FALSE(support_collides(in_both, mask));
  const std::vector<std::uint32_t> in_second{150};
  CHECK(support_collides(in_second, OccupancyMask(stitch_views(masks).pixels)) == false);
  std::vector<RobotImage> hits{{hit.pixels, std::nullopt}, {hit.pixels, std::nullopt}};
  CHECK(support_collides(in_both, OccupancyMask(stitch_views(hits).pixels)));
}

TEST_CASE("integer lines plot both endpoints") {
  std::vector<std::uint32_t> out;
  rasterize_line({0.5, 0.5}, {4.5, 2.5}, {10, 10}, out);
  CHECK(std::find(out.begin(), out.end(), 0u) != out.end());
  CHECK(std::find(out.begin(), out.end(), 24u) != out.end());
  CHECK(out.size() == 5);
  out.clear();
  rasterize_line({3.2, 3.7}, {3.9, 3.1}, {10, 10}, out);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == 33u);
}

TEST_CASE("PNG round trip") {
  const Scene s = presets::arm3();
  const RobotImage img = render_robot(Configuration({1.0, 2.0, 3.0}), s);
  const auto path = std::filesystem::temp_directory_path() / "vrm_png_roundtrip.png";
  write_png(path, img.pixels);
  CHECK(read_png(path) == img.pixels);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_png(path), Error);
}

TEST_CASE("camera validation") {
  Camera c = Camera::orthographic_window({-5, -5}, {5, 5}, 100, 100);
  CHECK_NOTHROW(c.validate());
  CHECK(c.pixel_size() == doctest::Approx(0.1));
  const Vec2 p = c.project({0, 0});
  CHECK(p.x == doctest::Approx(50));
  CHECK(p.y == doctest::Approx(50));
  c.affine = {1, 2, 0, 2, 4, 0};
  CHECK_THROWS_AS(c.validate(), Error);
  Camera small = Camera::orthographic_window({-1, -1}, {1, 1}, 4, 4);
  CHECK_THROWS_AS(small.validate(), Error);
}

TEST_CASE("perspective footprints contain the orthographic ones") {
  Scene ortho = presets::arm3();
  Scene persp = ortho;
  // Same floor scale at the center: 10 px per unit.
  persp.cameras = {Camera::perspective({0, 0}, 20.0, 200.0, 100, 100)};
  for (const auto& q : sample_configurations(20, ortho.robot, 6)) {
    const auto a = robot_coverage(q, ortho);
    const auto b = robot_coverage(q, persp);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}
