#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vrm/features.hpp"
#include "vrm/image.hpp"
#include "vrm/scene.hpp"

namespace vrm {

/// One manifest line: node id, per-view image and foreground files (relative
/// to the dataset root) and the diagnostic configuration.
struct DatasetRecord {
  NodeId node = 0;
  std::vector<std::string> images;
  std::vector<std::string> foregrounds;
  Configuration config;
};

struct Dataset {
  std::filesystem::path root;
  Scene scene;
  std::uint64_t seed = 0;
  std::vector<DatasetRecord> records;

  std::size_t size() const { return records.size(); }
  /// Stitched image of a node, read from disk.
  RobotImage image(NodeId node) const;
  ImageBuffer background() const;
  ObstacleImage obstacles() const;
};

/// Plain-text point lists kept next to the manifest, one line per node:
/// "<node> markers <m> (x y view)* links <L> (<c> (x y)*)*".
struct CachedFeatures {
  TrackedPointSet markers;
  LinkFeatureSet link_features;
};

void write_feature_cache(std::ostream& out, std::span<const NodeFeatures> features);
std::vector<CachedFeatures> read_feature_cache(std::istream& in);
/// Contents of <root>/features.txt; empty when the file is absent.
std::vector<CachedFeatures> load_feature_cache(const Dataset& dataset);

/// Layout: scene.json, manifest.txt, features.txt, background.png, obstacle_scene.png,
/// obstacles.png, images/NNNNNN[_vK].png, foreground/NNNNNN[_vK].png.
/// Poses come from sample_configurations(n, robot, seed).
Dataset generate_dataset(const Scene& scene, std::size_t n, std::uint64_t seed,
                         const std::filesystem::path& out_dir);

Dataset load_dataset(const std::filesystem::path& root);

/// Writes each view of `image` as <stem>.png (one view) or <stem>_vK.png.
std::vector<std::string> write_views(const std::filesystem::path& dir, const std::string& stem,
                                     const ImageBuffer& image);
/// Reads and stitches view files written by write_views.
ImageBuffer read_views(const std::filesystem::path& dir, const std::vector<std::string>& files);

/// Robot image of a node rebuilt from its background delta.
ImageBuffer image_of(const NodeFeatures& f, const ImageBuffer& background);

/// Features of every record, in node order.
std::vector<NodeFeatures> extract_all(const Dataset& dataset, const FeatureExtractor& extractor);

}  // namespace vrm
