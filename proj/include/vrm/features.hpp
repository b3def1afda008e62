#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vrm/image.hpp"
#include "vrm/metrics.hpp"
#include "vrm/scene.hpp"

namespace vrm {

/// Everything the roadmap and the local planners know about one node. The
/// configuration is carried for the joint-angle metric and for diagnostics.
struct NodeFeatures {
  SparseImage foreground;
  /// Image minus background, per channel component, where non-zero.
  std::vector<std::uint32_t> delta_components;
  std::vector<std::int16_t> delta_values;
  std::int64_t delta_sq = 0;
  Eigen::VectorXf projection;
  TrackedPointSet markers;
  LinkFeatureSet link_features;
  std::optional<Configuration> config;
};

struct FeatureOptions {
  bool markers = true;
  bool link_features = true;
  ShiTomasiParams shi_tomasi;
};

/// Turns rendered images into NodeFeatures for one scene.
class FeatureExtractor {
 public:
  FeatureExtractor(const Scene& scene, FeatureOptions options = {},
                   std::shared_ptr<const RandomProjector> projector = nullptr);

  /// `config` feeds the ideal markers and the joint-angle representation; pass
  /// nullopt for images of unknown pose.
  NodeFeatures extract(const RobotImage& image, const std::optional<Configuration>& config) const;
  NodeFeatures extract(const Configuration& q) const;

  const Scene& scene() const { return scene_; }
  const ImageBuffer& background() const { return background_; }
  const std::shared_ptr<const RandomProjector>& projector() const { return projector_; }

 private:
  Scene scene_;
  FeatureOptions options_;
  std::shared_ptr<const RandomProjector> projector_;
  ImageBuffer background_;
};

/// Computes d(i, j) for j > i over a fixed node list.
class PairwiseEvaluator {
 public:
  virtual ~PairwiseEvaluator() = default;
  /// out[j - i - 1] = d(i, j) for every j in (i, n).
  virtual void upper_row(std::size_t i, std::span<double> out) = 0;
  /// False when rows are fast approximations; callers then re-rank candidates
  /// with Metric::distance.
  virtual bool exact() const { return true; }
};

class Metric {
 public:
  virtual ~Metric() = default;
  virtual MetricId id() const = 0;
  virtual double distance(const NodeFeatures& a, const NodeFeatures& b) const = 0;
  /// Throws Error(UnsupportedMetric) when `f` lacks this metric's representation.
  virtual void require(const NodeFeatures& f) const = 0;
  virtual std::unique_ptr<PairwiseEvaluator> evaluator(std::span<const NodeFeatures> nodes) const;
};

/// `empty_penalty` is used by the Hausdorff metric; `topo` by the joint metric.
std::unique_ptr<Metric> make_metric(MetricId id, const Topology& topo, double empty_penalty);

/// Exact image L2 from background deltas (same value as image_l2 on the
/// full images when both share the background).
double delta_l2(const NodeFeatures& a, const NodeFeatures& b);

}  // namespace vrm
