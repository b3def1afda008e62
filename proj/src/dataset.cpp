#include "vrm/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vrm/render.hpp"

namespace vrm {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestHeader = "# vrm-dataset v1";
constexpr const char* kFeatureHeader = "# vrm-features v1";

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, " %.17g", v);
  out << buf;
}

template <class T>
T take(std::istream& in) {
  T v{};
  if (!(in >> v)) throw Error(ErrorCode::Parse, "truncated feature cache line");
  return v;
}

void expect(std::istream& in, const char* word) {
  if (take<std::string>(in) != word) throw Error(ErrorCode::Parse, std::string("feature cache: expected ") + word);
}

std::string node_stem(NodeId i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

ImageBuffer stitched(const std::vector<ImageBuffer>& views) {
  if (views.size() == 1) return views.front();
  std::vector<RobotImage> parts;
  for (const ImageBuffer& v : views) parts.push_back({v, std::nullopt});
  return stitch_views(parts).pixels;
}

}  // namespace

std::vector<std::string> write_views(const fs::path& dir, const std::string& stem, const ImageBuffer& image) {
  std::vector<std::string> names;
  for (std::size_t v = 0; v < image.view_count(); ++v) {
    std::string name = image.view_count() == 1 ? stem + ".png" : stem + "_v" + std::to_string(v) + ".png";
    write_png(dir / name, image.view_count() == 1 ? image : image.view(v));
    names.push_back(std::move(name));
  }
  return names;
}

ImageBuffer read_views(const fs::path& dir, const std::vector<std::string>& files) {
  if (files.empty()) throw Error(ErrorCode::Parse, "record lists no image files");
  std::vector<ImageBuffer> views;
  for (const std::string& f : files) views.push_back(read_png(dir / f));
  return stitched(views);
}

Dataset generate_dataset(const Scene& scene, std::size_t n, std::uint64_t seed, const fs::path& out_dir) {
  scene.validate();
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  fs::create_directories(out_dir / "foreground", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create dataset directory " + out_dir.string() + ": " + ec.message());

  Dataset ds;
  ds.root = out_dir;
  ds.scene = scene;
  ds.seed = seed;
  save_scene(out_dir / "scene.json", scene);
  const ImageBuffer background = render_background(scene);
  write_views(out_dir, "background", background);
  write_views(out_dir, "obstacle_scene", render_obstacle_scene(scene));
  write_views(out_dir, "obstacles", obstacle_image(scene).pixels);

  FeatureOptions cached;
  cached.link_features = scene.cameras.size() == 1;
  const FeatureExtractor extractor(scene, cached);
  std::vector<NodeFeatures> features;

  const std::vector<Configuration> poses = sample_configurations(n, scene.robot, seed);
  for (NodeId i = 0; i < n; ++i) {
    const RobotImage img = render_robot(poses[i], scene);
    NodeFeatures f = extractor.extract(img, poses[i]);
    features.push_back({});
    features.back().markers = std::move(f.markers);
    features.back().link_features = std::move(f.link_features);
    DatasetRecord rec;
    rec.node = i;
    rec.images = write_views(out_dir / "images", node_stem(i), img.pixels);
    for (std::string& s : rec.images) s = "images/" + s;
    rec.foregrounds = write_views(out_dir / "foreground", node_stem(i), background_subtract(img, background).pixels);
    for (std::string& s : rec.foregrounds) s = "foreground/" + s;
    rec.config = poses[i];
    ds.records.push_back(std::move(rec));
  }

  std::ofstream manifest(out_dir / "manifest.txt");
  if (!manifest) throw Error(ErrorCode::Io, "cannot write manifest in " + out_dir.string());
  manifest << kManifestHeader << " n=" << n << " seed=" << seed << " views=" << scene.cameras.size() << '\n';
  for (const DatasetRecord& r : ds.records) {
    manifest << r.node << ' ' << join(r.images, ';') << ' ' << join(r.foregrounds, ';');
    for (double q : r.config) {
      char buf[40];
      std::snprintf(buf, sizeof buf, " %.17g", q);
      manifest << buf;
    }
    manifest << '\n';
  }
  if (!manifest) throw Error(ErrorCode::Io, "failed writing manifest");

  std::ofstream cache(out_dir / "features.txt");
  write_feature_cache(cache, features);
  if (!cache) throw Error(ErrorCode::Io, "failed writing feature cache");
  return ds;
}

void write_feature_cache(std::ostream& out, std::span<const NodeFeatures> features) {
  out << kFeatureHeader << " n=" << features.size() << '\n';
  for (std::size_t i = 0; i < features.size(); ++i) {
    const NodeFeatures& f = features[i];
    out << i << " markers " << f.markers.points.size();
    for (std::size_t j = 0; j < f.markers.points.size(); ++j) {
      put(out, f.markers.points[j].x);
      put(out, f.markers.points[j].y);
      out << ' ' << (j < f.markers.views.size() ? f.markers.views[j] : 0u);
    }
    out << " links " << f.link_features.links.size();
    for (const std::vector<Vec2>& link : f.link_features.links) {
      out << ' ' << link.size();
      for (const Vec2 p : link) {
        put(out, p.x);
        put(out, p.y);
      }
    }
    out << '\n';
  }
}

std::vector<CachedFeatures> read_feature_cache(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kFeatureHeader, 0) != 0) {
    throw Error(ErrorCode::Parse, "feature cache header missing");
  }
  std::vector<CachedFeatures> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    if (take<std::size_t>(fields) != out.size()) throw Error(ErrorCode::Parse, "feature cache node ids must be consecutive");
    CachedFeatures c;
    expect(fields, "markers");
    const auto m = take<std::size_t>(fields);
    for (std::size_t j = 0; j < m; ++j) {
      const double x = take<double>(fields);
      const double y = take<double>(fields);
      c.markers.points.push_back({x, y});
      c.markers.views.push_back(take<std::uint32_t>(fields));
    }
    expect(fields, "links");
    c.link_features.links.resize(take<std::size_t>(fields));
    for (std::vector<Vec2>& link : c.link_features.links) {
      const auto count = take<std::size_t>(fields);
      for (std::size_t j = 0; j < count; ++j) {
        const double x = take<double>(fields);
        link.push_back({x, take<double>(fields)});
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CachedFeatures> load_feature_cache(const Dataset& dataset) {
  std::ifstream in(dataset.root / "features.txt");
  if (!in) return {};
  return read_feature_cache(in);
}

Dataset load_dataset(const fs::path& root) {
  Dataset ds;
  ds.root = root;
  ds.scene = load_scene(root / "scene.json");
  std::ifstream in(root / "manifest.txt");
  if (!in) throw Error(ErrorCode::Io, "cannot read " + (root / "manifest.txt").string());
  std::string line;
  if (!std::getline(in, line) || line.rfind(kManifestHeader, 0) != 0) {
    throw Error(ErrorCode::Parse, "manifest header missing");
  }
  if (auto pos = line.find("seed="); pos != std::string::npos) {
    ds.seed = std::stoull(line.substr(pos + 5));
  }
  const std::size_t d = dof(ds.scene.robot);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    DatasetRecord rec;
    std::string images, foregrounds;
    if (!(fields >> rec.node >> images >> foregrounds)) throw Error(ErrorCode::Parse, "bad manifest line: " + line);
    rec.images = split(images, ';');
    rec.foregrounds = split(foregrounds, ';');
    std::vector<double> q;
    double v;
    while (fields >> v) q.push_back(v);
    if (q.size() != d) throw Error(ErrorCode::Parse, "manifest configuration has wrong dimension: " + line);
    rec.config = Configuration(std::move(q));
    if (rec.node != ds.records.size()) throw Error(ErrorCode::Parse, "manifest node ids must be consecutive");
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

RobotImage Dataset::image(NodeId node) const {
  const DatasetRecord& r = records.at(node);
  return {read_views(root, r.images), r.config};
}

ImageBuffer Dataset::background() const {
  std::vector<std::string> files;
  if (scene.cameras.size() == 1) {
    files.push_back("background.png");
  } else {
    for (std::size_t v = 0; v < scene.cameras.size(); ++v) files.push_back("background_v" + std::to_string(v) + ".png");
  }
  return read_views(root, files);
}

ObstacleImage Dataset::obstacles() const {
  std::vector<std::string> files;
  if (scene.cameras.size() == 1) {
    files.push_back("obstacles.png");
  } else {
    for (std::size_t v = 0; v < scene.cameras.size(); ++v) files.push_back("obstacles_v" + std::to_string(v) + ".png");
  }
  return {read_views(root, files)};
}

ImageBuffer image_of(const NodeFeatures& f, const ImageBuffer& background) {
  ImageBuffer out = background;
  auto data = out.data();
  for (std::size_t i = 0; i < f.delta_components.size(); ++i) {
    data[f.delta_components[i]] = static_cast<std::uint8_t>(int{data[f.delta_components[i]]} + f.delta_values[i]);
  }
  return out;
}

std::vector<NodeFeatures> extract_all(const Dataset& dataset, const FeatureExtractor& extractor) {
  std::vector<NodeFeatures> out;
  out.reserve(dataset.size());
  for (NodeId i = 0; i < dataset.size(); ++i) {
    const RobotImage img = dataset.image(i);
    out.push_back(extractor.extract(img, img.source));
  }
  return out;
}

}  // namespace vrm
