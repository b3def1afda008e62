#include "vrm/metrics.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace vrm {

namespace {

const std::vector<std::pair<MetricId, std::string>>& metric_names() {
  static const std::vector<std::pair<MetricId, std::string>> names{
      {MetricId::ImageL2, "img-l2"},
      {MetricId::RandomProjectionL2, "rp-l2"},
      {MetricId::JointGeodesic, "theta-g"},
      {MetricId::TrackedPointsL2, "itp-l2"},
      {MetricId::ShiTomasiHausdorff, "st-h"},
  };
  return names;
}

// Squared distance from `p` to its nearest point of `set`.
double nearest_sq(Vec2 p, std::span<const Vec2> set) {
  double best = std::numeric_limits<double>::infinity();
  for (Vec2 q : set) {
    const Vec2 d = p - q;
    best = std::min(best, d.x * d.x + d.y * d.y);
  }
  return best;
}

double directed_sq(std::span<const Vec2> from, std::span<const Vec2> to) {
  double worst = 0.0;
  for (Vec2 p : from) worst = std::max(worst, nearest_sq(p, to));
  return worst;
}

}  // namespace

const std::vector<MetricId>& all_metrics() {
  static const std::vector<MetricId> ids{MetricId::ImageL2, MetricId::RandomProjectionL2,
                                         MetricId::JointGeodesic, MetricId::TrackedPointsL2,
                                         MetricId::ShiTomasiHausdorff};
  return ids;
}

std::string to_string(MetricId id) {
  for (const auto& [m, name] : metric_names()) {
    if (m == id) return name;
  }
  return "unknown";
}

MetricId parse_metric(const std::string& name) {
  for (const auto& [m, n] : metric_names()) {
    if (n == name) return m;
  }
  throw Error(ErrorCode::UnsupportedMetric, "unknown metric '" + name + "'");
}

double image_l2(const RobotImage& a, const RobotImage& b) {
  if (!a.pixels.same_geometry(b.pixels)) {
    throw Error(ErrorCode::GeometryMismatch, "image_l2 needs equal raster geometry");
  }
  // Integer accumulation keeps the distance exact and order independent.
  std::int64_t sum = 0;
  const auto da = a.pixels.data();
  const auto db = b.pixels.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const std::int64_t d = std::int64_t{da[i]} - std::int64_t{db[i]};
    sum += d * d;
  }
  return std::sqrt(static_cast<double>(sum)) / 255.0;
}

RandomProjector::RandomProjector(std::size_t input_dim, std::size_t target_dim,
                                 std::uint64_t seed)
    : directions_(static_cast<Eigen::Index>(input_dim), static_cast<Eigen::Index>(target_dim)),
      seed_(seed) {
  if (input_dim == 0 || target_dim == 0) {
    throw Error(ErrorCode::InvalidArgument, "random projector dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> col_sq(target_dim, 0.0);
  for (Eigen::Index i = 0; i < directions_.rows(); ++i) {
    for (Eigen::Index j = 0; j < directions_.cols(); ++j) {
      const double g = gauss(rng);
      directions_(i, j) = static_cast<float>(g);
      col_sq[static_cast<std::size_t>(j)] += g * g;
    }
  }
  Eigen::RowVectorXf inv(directions_.cols());
  for (Eigen::Index j = 0; j < directions_.cols(); ++j) {
    inv(j) = static_cast<float>(1.0 / std::sqrt(col_sq[static_cast<std::size_t>(j)]));
  }
  directions_.array().rowwise() *= inv.array();
  scale_ = std::sqrt(static_cast<double>(input_dim) / static_cast<double>(target_dim));
}

Eigen::VectorXf RandomProjector::direction(std::size_t j) const {
  return directions_.col(static_cast<Eigen::Index>(j));
}

Eigen::VectorXf RandomProjector::project(const ImageBuffer& x) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "image dimension does not match the projector");
  }
  Eigen::VectorXf out = Eigen::VectorXf::Zero(directions_.cols());
  const auto data = x.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] == 0) continue;
    out += (data[i] / 255.0f) * directions_.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return out * static_cast<float>(scale_);
}

Eigen::VectorXf RandomProjector::project_sparse(std::span<const std::uint32_t> components,
                                                std::span<const float> values) const {
  if (components.size() != values.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sparse vector index/value counts differ");
  }
  Eigen::VectorXf out = Eigen::VectorXf::Zero(directions_.cols());
  for (std::size_t k = 0; k < components.size(); ++k) {
    if (components[k] >= input_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "sparse component outside the projector input");
    }
    out += values[k] * directions_.row(static_cast<Eigen::Index>(components[k])).transpose();
  }
  return out * static_cast<float>(scale_);
}

Eigen::VectorXf project(const RobotImage& x, const RandomProjector& rp) {
  return rp.project(x.pixels);
}

double rp_l2(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "projection sizes differ");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a(i)) - static_cast<double>(b(i));
    sum += d * d;
  }
  return std::sqrt(sum);
}

double joint_geodesic(const Configuration& a, const Configuration& b, const Topology& topo) {
  if (a.size() != b.size() || a.size() != topo.size()) {
    throw Error(ErrorCode::DimensionMismatch, "configuration dimensions differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(coordinate_delta(topo[i], a[i], b[i]));
  return sum;
}

double joint_geodesic(const Configuration& a, const Configuration& b) {
  return joint_geodesic(a, b, full_circle_topology(a.size()));
}

TrackedPointSet tracked_points(const Configuration& q, const RobotSpec& spec,
                               const Camera& camera) {
  TrackedPointSet out;
  const double z = robot_height(spec);
  if (const auto* arm = std::get_if<ArmSpec>(&spec)) {
    const std::vector<Vec2> joints = joint_positions(q, *arm);
    for (std::size_t i = 0; i + 1 < joints.size(); ++i) {
      out.points.push_back(camera.project(joints[i], z));
      out.points.push_back(camera.project(0.5 * (joints[i] + joints[i + 1]), z));
      out.points.push_back(camera.project(joints[i + 1], z));
    }
  } else {
    const auto& mobile = std::get<MobileSpec>(spec);
    if (q.size() != 2) throw Error(ErrorCode::DimensionMismatch, "mobile configuration is (x, y)");
    for (Vec2 m : mobile.markers) out.points.push_back(camera.project(m + Vec2{q[0], q[1]}, z));
  }
  out.views.assign(out.points.size(), 0);
  return out;
}

TrackedPointSet tracked_points(const Configuration& q, const Scene& scene) {
  TrackedPointSet out;
  for (std::size_t v = 0; v < scene.cameras.size(); ++v) {
    const TrackedPointSet view = tracked_points(q, scene.robot, scene.cameras[v]);
    out.points.insert(out.points.end(), view.points.begin(), view.points.end());
    out.views.insert(out.views.end(), view.points.size(), static_cast<std::uint32_t>(v));
  }
  return out;
}

double itp_l2(const TrackedPointSet& a, const TrackedPointSet& b) {
  if (a.points.size() != b.points.size()) {
    throw Error(ErrorCode::DimensionMismatch, "tracked point counts differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const Vec2 d = a.points[i] - b.points[i];
    sum += d.x * d.x + d.y * d.y;
  }
  return std::sqrt(sum);
}

double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptyInput, "Hausdorff distance needs non-empty point sets");
  }
  return std::sqrt(std::max(directed_sq(a, b), directed_sq(b, a)));
}

double st_hausdorff(const LinkFeatureSet& a, const LinkFeatureSet& b, double empty_penalty) {
  if (a.links.size() != b.links.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature sets have different link counts");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.links.size(); ++i) {
    const bool ea = a.links[i].empty();
    const bool eb = b.links[i].empty();
    if (ea && eb) continue;
    sum += (ea || eb) ? empty_penalty : hausdorff(a.links[i], b.links[i]);
  }
  return sum;
}

double image_diagonal(const ViewGeometry& view) {
  return std::hypot(static_cast<double>(view.rows), static_cast<double>(view.cols));
}

}  // namespace vrm
