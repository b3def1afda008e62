#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vrm/camera.hpp"
#include "vrm/image.hpp"
#include "vrm/robot.hpp"
#include "vrm/scene.hpp"

namespace vrm {

/// Configuration-space representations and their distances.
enum class MetricId {
  ImageL2,                // raw RGB vectors, L2
  RandomProjectionL2,     // Gaussian random projections, L2
  JointGeodesic,          // joint angles, sum of circular distances
  TrackedPointsL2,        // ideal tracked markers, L2 on concatenated coordinates
  ShiTomasiHausdorff,     // per-link Shi-Tomasi corners, sum of Hausdorff distances
};

const std::vector<MetricId>& all_metrics();
std::string to_string(MetricId id);
MetricId parse_metric(const std::string& name);

/// Euclidean distance between pixel vectors (intensities in [0,1]).
double image_l2(const RobotImage& a, const RobotImage& b);

/// p x k matrix of Gaussian directions normalized to unit length. Outputs are
/// scaled by sqrt(p / k) so projected distances estimate image distances.
class RandomProjector {
 public:
  RandomProjector(std::size_t input_dim, std::size_t target_dim, std::uint64_t seed);

  std::size_t input_dim() const { return static_cast<std::size_t>(directions_.rows()); }
  std::size_t target_dim() const { return static_cast<std::size_t>(directions_.cols()); }
  std::uint64_t seed() const { return seed_; }
  /// Column j as a unit vector (without the output scale).
  Eigen::VectorXf direction(std::size_t j) const;

  /// Projection of a full p-vector of intensities.
  Eigen::VectorXf project(const ImageBuffer& x) const;
  /// Projection of a sparse vector given as (component index, value) pairs.
  Eigen::VectorXf project_sparse(std::span<const std::uint32_t> components,
                                 std::span<const float> values) const;
  double scale() const { return scale_; }

 private:
  // Row-major so one input component is a contiguous row.
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> directions_;
  double scale_ = 1.0;
  std::uint64_t seed_ = 0;
};

Eigen::VectorXf project(const RobotImage& x, const RandomProjector& rp);
double rp_l2(const Eigen::VectorXf& a, const Eigen::VectorXf& b);

/// Sum over coordinates of the shortest admissible distance.
double joint_geodesic(const Configuration& a, const Configuration& b, const Topology& topo);
/// Full-circle joints.
double joint_geodesic(const Configuration& a, const Configuration& b);

/// Fixed markers in image coordinates; index order is the correspondence.
struct TrackedPointSet {
  std::vector<Vec2> points;
  /// View index of each point (all zero for one camera).
  std::vector<std::uint32_t> views;
};

/// Marker layout: per arm link its proximal end, midpoint and distal end on
/// the link axis; for a mobile body the body-frame markers. Occluded
/// markers are still reported.
TrackedPointSet tracked_points(const Configuration& q, const RobotSpec& spec, const Camera& camera);
/// Markers seen by every scene camera, concatenated view by view.
TrackedPointSet tracked_points(const Configuration& q, const Scene& scene);
double itp_l2(const TrackedPointSet& a, const TrackedPointSet& b);

/// Single-channel float image.
struct GrayImage {
  int rows = 0;
  int cols = 0;
  std::vector<float> values;

  float at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/// Mean of the three channels, in [0,1].
GrayImage to_gray(const ImageBuffer& single_view);
/// 1 where the pixel has exactly `color`, else 0.
GrayImage color_mask(const ImageBuffer& single_view, Rgb color);

struct ShiTomasiParams {
  int window = 3;            // box window for the structure tensor
  double quality = 0.05;     // fraction of the strongest response
  double min_distance = 3.0; // suppression radius in pixels
  std::size_t max_features = 25;
};

/// Minimum eigenvalue of the windowed structure tensor of Sobel gradients,
/// replicate border. Row-major, same size as the input.
std::vector<double> min_eigenvalue_map(const GrayImage& image, int window);

/// Pixels (x = column, y = row) whose response exceeds quality * max, taken
/// strongest first (ties by raster order), each at least `min_distance` from
/// every accepted one; at most `max_features`.
std::vector<Vec2> shi_tomasi(const GrayImage& image, const ShiTomasiParams& params = {});
/// Detector on a single-link foreground, via its gray levels.
std::vector<Vec2> shi_tomasi(const ForegroundImage& link_fg, const ShiTomasiParams& params = {});

struct LinkFeatureSet {
  std::vector<std::vector<Vec2>> links;
};

/// Segments each link by its color and detects corners per link.
LinkFeatureSet link_features(const ImageBuffer& single_view, std::span<const Rgb> link_colors,
                             const ShiTomasiParams& params = {});

/// Symmetric Hausdorff distance; throws Error(EmptyInput) if either set is empty.
double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);

/// Sum over links of Hausdorff distances. An empty link against a non-empty one
/// costs `empty_penalty` (the image diagonal); two empty links cost 0.
double st_hausdorff(const LinkFeatureSet& a, const LinkFeatureSet& b, double empty_penalty);

double image_diagonal(const ViewGeometry& view);

}  // namespace vrm
