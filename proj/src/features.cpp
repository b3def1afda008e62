#include "vrm/features.hpp"

#include <algorithm>

#include "vrm/render.hpp"

namespace vrm {

namespace {

[[noreturn]] void missing(MetricId id, const char* what) {
  throw Error(ErrorCode::UnsupportedMetric, to_string(id) + " needs " + what);
}

class DefaultEvaluator final : public PairwiseEvaluator {
 public:
  DefaultEvaluator(const Metric& metric, std::span<const NodeFeatures> nodes)
      : metric_(metric), nodes_(nodes) {}

  void upper_row(std::size_t i, std::span<double> out) override {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      out[j - i - 1] = metric_.distance(nodes_[i], nodes_[j]);
    }
  }

 private:
  const Metric& metric_;
  std::span<const NodeFeatures> nodes_;
};

// Inverted index over delta components: d^2 = |a|^2 + |b|^2 - 2 a.b, all in
// integers, so rows are exact.
class ImageL2Evaluator final : public PairwiseEvaluator {
 public:
  explicit ImageL2Evaluator(std::span<const NodeFeatures> nodes) : nodes_(nodes), acc_(nodes.size()) {
    std::uint32_t max_component = 0;
    for (const NodeFeatures& f : nodes) {
      if (!f.delta_components.empty()) max_component = std::max(max_component, f.delta_components.back());
    }
    postings_.resize(static_cast<std::size_t>(max_component) + 1);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const NodeFeatures& f = nodes[j];
      for (std::size_t k = 0; k < f.delta_components.size(); ++k) {
        postings_[f.delta_components[k]].push_back({static_cast<std::uint32_t>(j), f.delta_values[k]});
      }
    }
  }

  void upper_row(std::size_t i, std::span<double> out) override {
    const std::size_t n = nodes_.size();
    std::fill(acc_.begin() + static_cast<std::ptrdiff_t>(i + 1), acc_.end(), 0);
    const NodeFeatures& a = nodes_[i];
    for (std::size_t k = 0; k < a.delta_components.size(); ++k) {
      const auto& list = postings_[a.delta_components[k]];
      const std::int64_t v = a.delta_values[k];
      auto it = std::upper_bound(list.begin(), list.end(), static_cast<std::uint32_t>(i),
                                 [](std::uint32_t id, const Posting& p) { return id < p.node; });
      for (; it != list.end(); ++it) acc_[it->node] += v * it->value;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::int64_t sq = a.delta_sq + nodes_[j].delta_sq - 2 * acc_[j];
      out[j - i - 1] = std::sqrt(static_cast<double>(sq)) / 255.0;
    }
  }

 private:
  struct Posting {
    std::uint32_t node;
    std::int16_t value;
  };
  std::span<const NodeFeatures> nodes_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<std::int64_t> acc_;
};

// Gram-matrix tiles in float; approximate, so the caller re-ranks.
class ProjectionEvaluator final : public PairwiseEvaluator {
 public:
  explicit ProjectionEvaluator(std::span<const NodeFeatures> nodes) {
    const Eigen::Index k = nodes.empty() ? 0 : nodes.front().projection.size();
    data_.resize(k, static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      data_.col(static_cast<Eigen::Index>(j)) = nodes[j].projection;
    }
    sq_ = data_.colwise().squaredNorm().transpose();
  }

  void upper_row(std::size_t i, std::span<double> out) override {
    const Eigen::Index n = data_.cols();
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    if (row < tile_start_ || row >= tile_start_ + tile_.rows()) {
      tile_start_ = row;
      const Eigen::Index b = std::min<Eigen::Index>(kTile, n - row);
      tile_.noalias() = data_.middleCols(row, b).transpose() * data_.middleCols(row, n - row);
    }
    const Eigen::Index r = row - tile_start_;
    for (Eigen::Index j = row + 1; j < n; ++j) {
      const double sq = static_cast<double>(sq_(row)) + sq_(j) - 2.0 * tile_(r, j - tile_start_);
      out[static_cast<std::size_t>(j - row - 1)] = std::sqrt(std::max(0.0, sq));
    }
  }

  bool exact() const override { return false; }

 private:
  static constexpr Eigen::Index kTile = 128;
  Eigen::MatrixXf data_;
  Eigen::VectorXf sq_;
  Eigen::MatrixXf tile_;
  Eigen::Index tile_start_ = -1;
};

class ImageL2Metric final : public Metric {
 public:
  MetricId id() const override { return MetricId::ImageL2; }
  double distance(const NodeFeatures& a, const NodeFeatures& b) const override { return delta_l2(a, b); }
  void require(const NodeFeatures&) const override {}
  std::unique_ptr<PairwiseEvaluator> evaluator(std::span<const NodeFeatures> nodes) const override {
    return std::make_unique<ImageL2Evaluator>(nodes);
  }
};

class ProjectionMetric final : public Metric {
 public:
  MetricId id() const override { return MetricId::RandomProjectionL2; }
  double distance(const NodeFeatures& a, const NodeFeatures& b) const override {
    return rp_l2(a.projection, b.projection);
  }
  void require(const NodeFeatures& f) const override {
    if (f.projection.size() == 0) missing(id(), "random projections");
  }
  std::unique_ptr<PairwiseEvaluator> evaluator(std::span<const NodeFeatures> nodes) const override {
    return std::make_unique<ProjectionEvaluator>(nodes);
  }
};

class JointMetric final : public Metric {
 public:
  explicit JointMetric(Topology topo) : topo_(std::move(topo)) {}
  MetricId id() const override { return MetricId::JointGeodesic; }
  double distance(const NodeFeatures& a, const NodeFeatures& b) const override {
    return joint_geodesic(*a.config, *b.config, topo_);
  }
  void require(const NodeFeatures& f) const override {
    if (!f.config) missing(id(), "the joint configuration");
  }

 private:
  Topology topo_;
};

class TrackedPointsMetric final : public Metric {
 public:
  MetricId id() const override { return MetricId::TrackedPointsL2; }
  double distance(const NodeFeatures& a, const NodeFeatures& b) const override {
    return itp_l2(a.markers, b.markers);
  }
  void require(const NodeFeatures& f) const override {
    if (f.markers.points.empty()) missing(id(), "tracked markers");
  }
};

class HausdorffMetric final : public Metric {
 public:
  explicit HausdorffMetric(double penalty) : penalty_(penalty) {}
  MetricId id() const override { return MetricId::ShiTomasiHausdorff; }
  double distance(const NodeFeatures& a, const NodeFeatures& b) const override {
    return st_hausdorff(a.link_features, b.link_features, penalty_);
  }
  void require(const NodeFeatures& f) const override {
    if (f.link_features.links.empty()) missing(id(), "per-link Shi-Tomasi features");
  }

 private:
  double penalty_;
};

}  // namespace

FeatureExtractor::FeatureExtractor(const Scene& scene, FeatureOptions options,
                                   std::shared_ptr<const RandomProjector> projector)
    : scene_(scene),
      options_(options),
      projector_(std::move(projector)),
      background_(render_background(scene)) {
  if (projector_ && projector_->input_dim() != background_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "projector input does not match the scene raster");
  }
}

NodeFeatures FeatureExtractor::extract(const RobotImage& image,
                                       const std::optional<Configuration>& config) const {
  if (!image.pixels.same_geometry(background_)) {
    throw Error(ErrorCode::GeometryMismatch, "image raster does not match the scene");
  }
  NodeFeatures f;
  f.foreground = SparseImage::from(background_subtract(image, background_).pixels);
  const auto img = image.pixels.data();
  const auto bg = background_.data();
  for (std::size_t i = 0; i < img.size(); ++i) {
    const int d = int{img[i]} - int{bg[i]};
    if (d != 0) {
      f.delta_components.push_back(static_cast<std::uint32_t>(i));
      f.delta_values.push_back(static_cast<std::int16_t>(d));
      f.delta_sq += std::int64_t{d} * d;
    }
  }
  if (projector_) {
    std::vector<float> values(f.delta_values.size());
    std::transform(f.delta_values.begin(), f.delta_values.end(), values.begin(),
                   [](std::int16_t v) { return v / 255.0f; });
    f.projection = projector_->project_sparse(f.delta_components, values);
  }
  if (options_.markers && config) f.markers = tracked_points(*config, scene_);
  if (options_.link_features && image.pixels.view_count() == 1) {
    const std::vector<Rgb> colors = link_colors(scene_.robot);
    f.link_features = link_features(image.pixels, colors, options_.shi_tomasi);
  }
  f.config = config;
  return f;
}

NodeFeatures FeatureExtractor::extract(const Configuration& q) const {
  return extract(render_robot(q, scene_), q);
}

std::unique_ptr<PairwiseEvaluator> Metric::evaluator(std::span<const NodeFeatures> nodes) const {
  return std::make_unique<DefaultEvaluator>(*this, nodes);
}

std::unique_ptr<Metric> make_metric(MetricId id, const Topology& topo, double empty_penalty) {
  switch (id) {
    case MetricId::ImageL2: return std::make_unique<ImageL2Metric>();
    case MetricId::RandomProjectionL2: return std::make_unique<ProjectionMetric>();
    case MetricId::JointGeodesic: return std::make_unique<JointMetric>(topo);
    case MetricId::TrackedPointsL2: return std::make_unique<TrackedPointsMetric>();
    case MetricId::ShiTomasiHausdorff: return std::make_unique<HausdorffMetric>(empty_penalty);
  }
  throw Error(ErrorCode::UnsupportedMetric, "unknown metric");
}

double delta_l2(const NodeFeatures& a, const NodeFeatures& b) {
  std::int64_t sum = 0;
  std::size_t i = 0, j = 0;
  const auto& ca = a.delta_components;
  const auto& cb = b.delta_components;
  while (i < ca.size() || j < cb.size()) {
    std::int64_t d;
    if (j == cb.size() || (i < ca.size() && ca[i] < cb[j])) {
      d = a.delta_values[i++];
    } else if (i == ca.size() || cb[j] < ca[i]) {
      d = -std::int64_t{b.delta_values[j++]};
    } else {
      d = std::int64_t{a.delta_values[i++]} - b.delta_values[j++];
    }
    sum += d * d;
  }
  return std::sqrt(static_cast<double>(sum)) / 255.0;
}

}  // namespace vrm
