#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "vrm/roadmap.hpp"
#include "vrm/scene.hpp"

namespace vrm {

/// Image minus background over its non-zero components, intensity units.
struct SparseDelta {
  std::vector<std::uint32_t> components;
  std::vector<double> values;
};

SparseDelta delta_of(const NodeFeatures& f);

/// PCA chart of a small image set. Every member is zero outside the union of
/// member supports, so mean and basis are stored on `components` only; all
/// other rows of the p x d basis are zero.
struct LocalChart {
  NodeId u = 0;
  NodeId v = 0;
  std::vector<NodeId> members;
  std::vector<std::uint32_t> components;
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;        // components.size() x d, orthonormal columns
  Eigen::MatrixXd coords;       // d x m, member coordinates
  Eigen::VectorXd eigenvalues;  // member covariance spectrum, descending
  bool degenerate = false;      // all members identical
  bool rank_deficient = false;  // fewer than d non-zero directions; padded

  std::size_t dim() const { return static_cast<std::size_t>(basis.cols()); }
  /// mean + W y on the chart components.
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& y) const;
  /// W^T (x - mean) for a sparse image delta.
  Eigen::VectorXd project(const SparseDelta& x) const;
  /// Pixels whose reconstructed max-channel magnitude exceeds `tau`.
  std::vector<std::uint32_t> foreground(const Eigen::VectorXd& reconstruction, double tau) const;
};

/// PCA of the members to dimension d. Basis columns have their largest
/// magnitude entry positive (first such entry on ties). Throws InvalidArgument
/// for fewer than two members.
LocalChart build_chart(std::span<const SparseDelta> members, std::size_t d);

/// Members of the chart of edge (u, v): the common neighbours of u and v in
/// the roadmap before obstacle pruning, together with u and v, ascending.
std::vector<NodeId> chart_members(const PrunedRoadmap& graph, NodeId u, NodeId v);
LocalChart build_chart(const PrunedRoadmap& graph, NodeId u, NodeId v, std::size_t d);

struct LtsParams {
  std::size_t steps = 10;   // uniform interior alpha grid
  double tau = 0.1;         // foreground threshold on the reconstruction
};

PlannerCertificate lts_check(NodeId u, NodeId v, const LocalChart& chart, const OccupancyMask& b,
                             const LtsParams& params = {});
/// Unsafe iff the superimposed member foregrounds overlap b.
PlannerCertificate lts_superimpose_check(NodeId u, NodeId v, std::span<const NodeFeatures* const> members,
                                         const OccupancyMask& b);
/// Joins corresponding markers with 1-px lines; unsafe iff the joins overlap b.
PlannerCertificate itp_check(NodeId u, NodeId v, const TrackedPointSet& tp_u, const TrackedPointSet& tp_v,
                             const std::vector<ViewGeometry>& views, const OccupancyMask& b);
/// Joins each feature to its nearest feature on the same link of the other
/// pose, both directions.
PlannerCertificate jnst_check(NodeId u, NodeId v, const LinkFeatureSet& f_u, const LinkFeatureSet& f_v,
                              ViewGeometry view, const OccupancyMask& b);

/// Renders every joint-space interpolant at the scene's epsilon and applies
/// the node overlap test. Evaluation only.
class GoldStandard {
 public:
  GoldStandard(const Scene& scene, const ObstacleImage& b);

  PlannerCertificate check(const Configuration& q_u, const Configuration& q_v, NodeId u = 0,
                           NodeId v = 0) const;
  bool node_free(const Configuration& q) const;
  const Scene& scene() const { return scene_; }

 private:
  Scene scene_;
  Topology topo_;
  OccupancyMask mask_;
};

/// Planner objects for the roadmap. `dof` is the chart dimension for LTS.
std::unique_ptr<EdgePlanner> make_planner(PlannerId id, std::size_t dof, LtsParams lts = {});

/// Gold standard as an EdgePlanner, reading diagnostic configurations.
std::unique_ptr<EdgePlanner> make_gold_planner(const GoldStandard& gold);

}  // namespace vrm
