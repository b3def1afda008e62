#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vrm/features.hpp"
#include "vrm/image.hpp"

namespace vrm {

inline constexpr std::size_t kDefaultNeighbours = 8;

struct Neighbour {
  NodeId node = 0;
  double weight = 0.0;
};

struct Edge {
  NodeId a = 0;  // a < b
  NodeId b = 0;
  double weight = 0.0;
};

using NodeStore = std::shared_ptr<const std::vector<NodeFeatures>>;

/// Symmetrized k-NN graph. Immutable once built.
class VisualRoadmap {
 public:
  VisualRoadmap(NodeStore nodes, MetricId metric, std::size_t k,
                std::vector<std::vector<Neighbour>> knn);

  std::size_t size() const { return nodes_->size(); }
  const NodeFeatures& node(NodeId i) const { return (*nodes_)[i]; }
  const NodeStore& nodes() const { return nodes_; }
  MetricId metric() const { return metric_; }
  std::size_t k() const { return k_; }
  /// The k nearest nodes of i, nearest first (ties by id).
  const std::vector<Neighbour>& nearest(NodeId i) const { return knn_[i]; }
  /// Symmetrized adjacency, ascending node id.
  const std::vector<Neighbour>& adjacent(NodeId i) const { return adjacency_[i]; }
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;
  bool connected() const;

 private:
  NodeStore nodes_;
  MetricId metric_;
  std::size_t k_;
  std::vector<std::vector<Neighbour>> knn_;
  std::vector<std::vector<Neighbour>> adjacency_;
};

/// Exact k nearest neighbours of every node, then symmetrized. Approximate
/// evaluators keep extra candidates which are re-ranked with exact distances.
VisualRoadmap build_graph(NodeStore nodes, const Metric& metric, std::size_t k = kDefaultNeighbours);

enum class PlannerId { None, Lts, LtsSuperimpose, Itp, Jnst, GoldStandard };

const std::vector<PlannerId>& visual_planners();
std::string to_string(PlannerId id);
PlannerId parse_planner(const std::string& name);

struct PlannerCertificate {
  PlannerId planner = PlannerId::None;
  NodeId u = 0;
  NodeId v = 0;
  /// Interpolation parameters (LTS, gold standard) in check order.
  std::vector<double> parameters;
  /// Join segments in pixel coordinates (ITP, JNST).
  std::vector<std::pair<Vec2, Vec2>> joins;
  bool safe = true;
  /// Overlap pixel count of the worst check image.
  std::size_t worst_overlap = 0;
  /// Degenerate or rank-deficient chart, unmatched features, and so on.
  std::string note;
};

void write_certificate(std::ostream& out, const PlannerCertificate& cert);

class PrunedRoadmap;

/// Edge validator. Implementations never modify the graph.
class EdgePlanner {
 public:
  virtual ~EdgePlanner() = default;
  virtual PlannerId id() const = 0;
  /// Throws Error(UnsupportedMetric) when `f` lacks what the planner needs.
  virtual void require(const NodeFeatures& f) const = 0;
  virtual PlannerCertificate check(const PrunedRoadmap& graph, NodeId u, NodeId v,
                                   const OccupancyMask& obstacle) const = 0;
};

struct NodeRemoval {
  NodeId node = 0;
  std::string reason;
};

struct EdgeRemoval {
  NodeId a = 0;
  NodeId b = 0;
  std::string reason;
};

/// A roadmap after obstacle pruning; node ids keep their meaning, query nodes
/// are appended after the roadmap's nodes.
class PrunedRoadmap {
 public:
  explicit PrunedRoadmap(const VisualRoadmap& base);

  const VisualRoadmap& base() const { return *base_; }
  std::size_t size() const { return alive_.size(); }
  const NodeFeatures& node(NodeId i) const;
  bool alive(NodeId i) const { return alive_[i] != 0; }
  std::size_t alive_count() const;
  const std::vector<Neighbour>& adjacent(NodeId i) const { return adjacency_[i]; }
  std::optional<double> edge_weight(NodeId a, NodeId b) const;
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  const std::vector<NodeRemoval>& removed_nodes() const { return removed_nodes_; }
  const std::vector<EdgeRemoval>& removed_edges() const { return removed_edges_; }
  const PlannerCertificate* certificate(NodeId a, NodeId b) const;
  const std::map<std::pair<NodeId, NodeId>, PlannerCertificate>& certificates() const {
    return certificates_;
  }

  /// Work counters: node overlap tests in obstacle pruning and distance
  /// evaluations in query insertion.
  std::size_t overlap_tests() const { return overlap_tests_; }
  std::size_t query_distance_computations() const { return query_distances_; }

 private:
  friend PrunedRoadmap prune_obstacle_nodes(const VisualRoadmap&, const ObstacleImage&);
  friend PrunedRoadmap prune_unsafe_edges(const PrunedRoadmap&, const EdgePlanner&, const ObstacleImage&);
  friend struct QueryInserter;

  void remove_edge(NodeId a, NodeId b, std::string reason);

  std::shared_ptr<const VisualRoadmap> base_;
  std::vector<std::uint8_t> alive_;
  std::vector<std::vector<Neighbour>> adjacency_;
  std::vector<NodeFeatures> queries_;
  std::vector<NodeRemoval> removed_nodes_;
  std::vector<EdgeRemoval> removed_edges_;
  std::map<std::pair<NodeId, NodeId>, PlannerCertificate> certificates_;
  std::size_t overlap_tests_ = 0;
  std::size_t query_distances_ = 0;
};

/// Removes nodes whose foreground overlaps the obstacle (in every view when
/// views are stitched). One overlap test per node.
PrunedRoadmap prune_obstacle_nodes(const VisualRoadmap& graph, const ObstacleImage& b);

/// Runs `planner` on every edge; unsafe edges are removed, certificates kept.
PrunedRoadmap prune_unsafe_edges(const PrunedRoadmap& graph, const EdgePlanner& planner,
                                 const ObstacleImage& b);

struct QueryNodes {
  NodeId s = 0;
  NodeId t = 0;
};

/// Adds s and t, each joined to its k nearest surviving nodes by edges that
/// pass `planner`. Exactly one distance evaluation per surviving node per
/// query. Throws QueryInCollision or IsolatedQuery.
std::pair<PrunedRoadmap, QueryNodes> insert_query(const PrunedRoadmap& graph, const NodeFeatures& s,
                                                  const NodeFeatures& t, const Metric& metric,
                                                  const EdgePlanner& planner, const ObstacleImage& b,
                                                  std::size_t k = kDefaultNeighbours);

struct PathResult {
  bool found = false;
  std::vector<NodeId> nodes;
  double weight = 0.0;
  std::vector<PlannerCertificate> certificates;
  /// Nodes settled by the search; at most the node count.
  std::size_t settled = 0;
  /// Heap pops including stale entries.
  std::size_t heap_pops = 0;
};

/// Dijkstra with a lazy-deletion binary heap. An unreachable target gives
/// found = false.
PathResult shortest_path(const PrunedRoadmap& graph, NodeId s, NodeId t);

/// Adjacency-list form used by the search and by its brute-force oracle.
PathResult shortest_path(const std::vector<std::vector<Neighbour>>& adjacency, NodeId s, NodeId t);

struct ScreeResult {
  /// Mean residual variance for d' = 1..d_max.
  std::vector<double> residual;
  /// Nodes whose neighbourhood had zero variance (left out of the mean).
  std::vector<NodeId> degenerate;
};

struct ScreeOptions {
  std::size_t k = kDefaultNeighbours;
  std::size_t d_max = 6;
  /// Gaussian blur (pixels) applied to the deltas before PCA; 0 for none.
  double smoothing_sigma = 0.0;
};

/// Local PCA over each node and its k nearest neighbours by image L2.
ScreeResult intrinsic_dimension(std::span<const NodeFeatures> nodes, const ScreeOptions& options);

struct InverseKinematicsResult {
  std::vector<NodeId> neighbours;  // nearest first
  std::vector<double> weights;     // affine, sum to 1
  ImageBuffer reconstruction;
  double nearest_distance = 0.0;
  double residual = 0.0;           // |x - reconstruction|
  double diameter = 0.0;           // of the neighbours together with x
  bool out_of_manifold = false;
};

/// Nearest surviving nodes of `x`, its coordinates on their local chart and
/// the chart reconstruction. The warning threshold is the 99th percentile of
/// the roadmap's nearest-neighbour distances.
InverseKinematicsResult inverse_kinematics(const NodeFeatures& x, const PrunedRoadmap& graph,
                                           const ImageBuffer& background, std::size_t chart_dim,
                                           std::size_t k = kDefaultNeighbours);

/// Text persistence: "i j weight" per line.
void write_edge_list(std::ostream& out, const PrunedRoadmap& graph);
void write_prune_log(std::ostream& out, const PrunedRoadmap& graph);
void write_certificate_log(std::ostream& out, const PrunedRoadmap& graph);

}  // namespace vrm
