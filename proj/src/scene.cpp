#include "vrm/scene.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace vrm {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

Vec2 to_vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) parse_error("expected [x, y], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

json from_vec2(Vec2 v) { return json::array({v.x, v.y}); }

Rgb to_rgb(const json& j) {
  if (!j.is_array() || j.size() != 3) parse_error("expected [r, g, b], got " + j.dump());
  const auto channel = [&](std::size_t i) {
    const int v = j[i].get<int>();
    if (v < 0 || v > 255) parse_error("color channel out of range: " + j.dump());
    return static_cast<std::uint8_t>(v);
  };
  return {channel(0), channel(1), channel(2)};
}

json from_rgb(Rgb c) { return json::array({c.r, c.g, c.b}); }

Polygon to_polygon(const json& j) {
  Polygon poly;
  for (const json& v : j) poly.push_back(to_vec2(v));
  return poly;
}

json from_polygon(const Polygon& poly) {
  json arr = json::array();
  for (Vec2 v : poly) arr.push_back(from_vec2(v));
  return arr;
}

Interval to_interval(const json& j) {
  const Vec2 v = to_vec2(j);
  return {v.x, v.y};
}

RobotSpec robot_from_json(const json& j) {
  const std::string type = j.value("type", "arm");
  if (type == "arm") {
    ArmSpec arm;
    arm.base = to_vec2(j.value("base", json::array({0.0, 0.0})));
    arm.height = j.value("height", 0.5);
    bool any_limits = false;
    std::vector<std::optional<Interval>> limits;
    for (const json& link : j.at("links")) {
      arm.link_lengths.push_back(link.at("length").get<double>());
      arm.link_widths.push_back(link.at("width").get<double>());
      arm.link_colors.push_back(to_rgb(link.at("color")));
      if (link.contains("limits")) {
        limits.push_back(to_interval(link["limits"]));
        any_limits = true;
      } else {
        limits.emplace_back();
      }
    }
    if (any_limits) arm.joint_limits = std::move(limits);
    return arm;
  }
  if (type == "mobile") {
    MobileSpec m;
    m.body = to_polygon(j.at("body"));
    m.x_range = to_interval(j.at("x_range"));
    m.y_range = to_interval(j.at("y_range"));
    m.color = to_rgb(j.at("color"));
    m.height = j.value("height", 0.5);
    if (j.contains("markers")) {
      for (const json& p : j["markers"]) m.markers.push_back(to_vec2(p));
    }
    return m;
  }
  parse_error("unknown robot type '" + type + "'");
}

json robot_to_json(const RobotSpec& spec) {
  if (const auto* arm = std::get_if<ArmSpec>(&spec)) {
    json links = json::array();
    for (std::size_t i = 0; i < arm->link_lengths.size(); ++i) {
      json link{{"length", arm->link_lengths[i]},
                {"width", arm->link_widths[i]},
                {"color", from_rgb(arm->link_colors[i])}};
      if (i < arm->joint_limits.size() && arm->joint_limits[i]) {
        link["limits"] = json::array({arm->joint_limits[i]->lo, arm->joint_limits[i]->hi});
      }
      links.push_back(link);
    }
    return {{"type", "arm"}, {"base", from_vec2(arm->base)}, {"height", arm->height},
            {"links", links}};
  }
  const auto& m = std::get<MobileSpec>(spec);
  json markers = json::array();
  for (Vec2 p : m.markers) markers.push_back(from_vec2(p));
  return {{"type", "mobile"},
          {"body", from_polygon(m.body)},
          {"x_range", json::array({m.x_range.lo, m.x_range.hi})},
          {"y_range", json::array({m.y_range.lo, m.y_range.hi})},
          {"color", from_rgb(m.color)},
          {"height", m.height},
          {"markers", markers}};
}

Camera camera_from_json(const json& j, int rows, int cols) {
  const std::string mode = j.value("mode", "orthographic");
  if (mode == "orthographic") {
    if (j.contains("affine")) {
      Camera cam;
      cam.rows = rows;
      cam.cols = cols;
      const auto a = j["affine"].get<std::vector<double>>();
      if (a.size() != 6) parse_error("affine needs 6 numbers");
      std::copy(a.begin(), a.end(), cam.affine.begin());
      return cam;
    }
    const json& window = j.at("window");
    return Camera::orthographic_window(to_vec2(window.at(0)), to_vec2(window.at(1)), rows, cols);
  }
  if (mode == "perspective") {
    return Camera::perspective(to_vec2(j.at("center")), j.at("height").get<double>(),
                               j.at("focal").get<double>(), rows, cols);
  }
  parse_error("unknown camera mode '" + mode + "'");
}

json camera_to_json(const Camera& cam) {
  if (cam.mode == CameraMode::Orthographic) {
    return {{"mode", "orthographic"},
            {"affine", std::vector<double>(cam.affine.begin(), cam.affine.end())}};
  }
  return {{"mode", "perspective"},
          {"center", from_vec2(cam.center)},
          {"height", cam.height},
          {"focal", cam.focal}};
}

}  // namespace

void Scene::validate() const {
  vrm::validate(robot, background);
  if (cameras.empty()) throw Error(ErrorCode::InvalidArgument, "scene needs at least one camera");
  for (const Camera& cam : cameras) cam.validate();
  const std::vector<Rgb> robot_colors = link_colors(robot);
  for (const Obstacle& obs : obstacles) {
    if (!is_simple(obs.polygon)) throw Error(ErrorCode::InvalidArgument, "obstacle polygon is not simple");
    if (obs.color == background) throw Error(ErrorCode::InvalidArgument, "obstacle color equals background");
    for (Rgb c : robot_colors) {
      if (c == obs.color) throw Error(ErrorCode::InvalidArgument, "obstacle color equals a link color");
    }
  }
}

Scene scene_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    parse_error(std::string("scene is not valid JSON: ") + e.what());
  }
  try {
    Scene s;
    s.name = j.value("name", "");
    s.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("background")) s.background = to_rgb(j["background"]);
    const json image = j.value("image", json{{"rows", 100}, {"cols", 100}});
    const int rows = image.value("rows", 100);
    const int cols = image.value("cols", 100);
    s.robot = robot_from_json(j.at("robot"));
    for (const json& o : j.value("obstacles", json::array())) {
      s.obstacles.push_back({to_polygon(o.at("polygon")), to_rgb(o.at("color")),
                             o.value("height", 1.0)});
    }
    if (j.contains("cameras")) {
      for (const json& c : j["cameras"]) s.cameras.push_back(camera_from_json(c, rows, cols));
    } else {
      s.cameras.push_back(Camera::orthographic_window({-5, -5}, {5, 5}, rows, cols));
    }
    s.gold_epsilon = degrees_to_radians(j.value("gold_epsilon_deg", 1.0));
    s.validate();
    return s;
  } catch (const json::exception& e) {
    parse_error(std::string("malformed scene: ") + e.what());
  }
}

std::string scene_to_json(const Scene& scene) {
  json obstacles = json::array();
  for (const Obstacle& o : scene.obstacles) {
    obstacles.push_back(
        {{"polygon", from_polygon(o.polygon)}, {"color", from_rgb(o.color)}, {"height", o.height}});
  }
  json cameras = json::array();
  for (const Camera& c : scene.cameras) cameras.push_back(camera_to_json(c));
  const Camera& first = scene.cameras.front();
  json j{{"name", scene.name},
         {"seed", scene.seed},
         {"background", from_rgb(scene.background)},
         {"image", {{"rows", first.rows}, {"cols", first.cols}}},
         {"cameras", cameras},
         {"robot", robot_to_json(scene.robot)},
         {"obstacles", obstacles},
         {"gold_epsilon_deg", scene.gold_epsilon * 180.0 / kPi}};
  return j.dump(2) + "\n";
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scene file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scene_from_json(buffer.str());
}

void save_scene(const std::filesystem::path& path, const Scene& scene) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write scene file " + path.string());
  out << scene_to_json(scene);
}

namespace presets {

namespace {

Obstacle box(double x0, double y0, double x1, double y1, Rgb color) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, color, 1.0};
}

}  // namespace

Scene arm3() {
  Scene s;
  s.name = "arm3";
  s.seed = 20160516;
  ArmSpec arm;
  arm.link_lengths = {1.8, 1.5, 1.2};
  arm.link_widths = {0.3, 0.3, 0.3};
  arm.link_colors = {{200, 40, 40}, {40, 150, 60}, {40, 70, 200}};
  s.robot = arm;
  s.obstacles = {box(2.4, 0.8, 3.4, 2.2, {90, 90, 90}), box(-3.4, -1.6, -2.2, -0.4, {120, 100, 80}),
                 box(-0.7, -3.8, 0.9, -2.8, {70, 90, 110})};
  s.cameras = {Camera::orthographic_window({-5, -5}, {5, 5}, 100, 100)};
  return s;
}

Scene arm2() {
  Scene s;
  s.name = "arm2";
  s.seed = 20160517;
  ArmSpec arm;
  arm.link_lengths = {2.4, 2.0};
  arm.link_widths = {0.6, 0.6};
  arm.link_colors = {{200, 40, 40}, {40, 70, 200}};
  s.robot = arm;
  s.obstacles = {box(2.6, -0.6, 3.4, 3.8, {90, 90, 90})};
  s.cameras = {Camera::orthographic_window({-5, -5}, {5, 5}, 100, 100)};
  return s;
}

Scene mobile() {
  Scene s;
  s.name = "mobile";
  s.seed = 20160518;
  MobileSpec m;
  m.body = {{-0.8, -0.8}, {0.8, -0.8}, {0.8, 0.8}, {-0.8, 0.8}};
  m.x_range = {-4.0, 4.0};
  m.y_range = {-4.0, 4.0};
  m.color = {200, 40, 40};
  m.markers = {{0.0, 0.0}, {0.8, 0.8}};
  s.robot = m;
  s.obstacles = {box(-2.0, 0.5, -0.5, 3.5, {90, 90, 90}), box(1.0, -3.0, 2.5, -1.0, {70, 90, 110})};
  s.cameras = {Camera::orthographic_window({-5, -5}, {5, 5}, 100, 100)};
  return s;
}

Scene by_name(const std::string& name) {
  if (name == "arm3") return arm3();
  if (name == "arm2") return arm2();
  if (name == "mobile") return mobile();
  throw Error(ErrorCode::InvalidArgument, "unknown scene preset '" + name + "'");
}

}  // namespace presets

}  // namespace vrm
