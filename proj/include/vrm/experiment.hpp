#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vrm/dataset.hpp"
#include "vrm/features.hpp"
#include "vrm/planners.hpp"
#include "vrm/roadmap.hpp"
#include "vrm/scene.hpp"

namespace vrm {

inline constexpr std::size_t kDefaultProjectionDim = 2000;

/// Seed of the random projector, derived from the root seed.
std::uint64_t projector_seed(std::uint64_t root_seed);

struct ExperimentSpec {
  Scene scene;
  std::vector<std::size_t> densities{500, 1000, 2000, 5000};
  std::vector<MetricId> metrics = all_metrics();
  std::vector<PlannerId> planners = visual_planners();
  std::size_t k = kDefaultNeighbours;
  std::uint64_t seed = 1;
  std::size_t projection_dim = kDefaultProjectionDim;

  /// Throws InvalidArgument when densities are not ascending or empty.
  void validate() const;
};

struct CellResult {
  std::size_t density = 0;
  MetricId metric = MetricId::ImageL2;
  PlannerId planner = PlannerId::None;
  std::size_t edges_total = 0;   // edges after node pruning
  std::size_t edges_pruned = 0;  // removed by the planner
  std::size_t bad_edges = 0;     // surviving edges the gold standard rejects
  double bad_pct = 0.0;          // 100 * bad_edges / edges_total
  double wall_time = 0.0;        // seconds: graph build, node and edge pruning
  std::size_t nodes_alive = 0;
  bool connected = true;
  std::string status = "ok";
};

struct ExperimentReport {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  double epsilon_deg = 0.0;
  std::vector<CellResult> cells;

  const CellResult* find(std::size_t density, MetricId metric, PlannerId planner) const;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Nodes are prefixes of one pose pool, so every density shares its first
/// samples with the next; the gold-standard audit is cached per pose pair.
ExperimentReport run_benchmark(const ExperimentSpec& spec, const ProgressFn& progress = {});

/// CSV with a "# root_seed=... k=... epsilon_deg=..." first line.
void write_csv(std::ostream& out, const ExperimentReport& report);

/// Features for a scene's sampled poses, rendered in memory.
std::vector<NodeFeatures> sample_features(const Scene& scene, std::size_t n, std::uint64_t seed,
                                          const FeatureExtractor& extractor);

/// Feature extractor with what `metrics` and `planners` need.
FeatureExtractor make_extractor(const Scene& scene, const std::vector<MetricId>& metrics,
                                const std::vector<PlannerId>& planners, std::uint64_t root_seed,
                                std::size_t projection_dim = kDefaultProjectionDim);

/// Graph built, obstacle nodes removed and edges checked by `planner`.
struct PreparedRoadmap {
  std::unique_ptr<Metric> metric;
  std::unique_ptr<EdgePlanner> planner;
  std::shared_ptr<VisualRoadmap> graph;
  PrunedRoadmap pruned;
};

PreparedRoadmap prepare_roadmap(NodeStore nodes, const Scene& scene, MetricId metric, PlannerId planner,
                                const ObstacleImage& b, std::size_t k = kDefaultNeighbours);

struct PlanOutcome {
  enum class Status { Path, NoPath, Rejected };
  Status status = Status::NoPath;
  std::string message;
  PathResult path;
  QueryNodes query;
  /// Gold-standard verdict per path edge when both endpoint poses are known.
  std::vector<PlannerCertificate> audit;
  bool audited = false;
  std::size_t audit_failures = 0;
  std::size_t distance_computations = 0;
};

/// Inserts s and t, searches and audits. Identical s and t images give the
/// single-node path. Collision and isolation errors become Rejected.
PlanOutcome plan_query(const PreparedRoadmap& roadmap, const NodeFeatures& s, const NodeFeatures& t,
                       const ObstacleImage& b, const GoldStandard* gold, std::size_t k = kDefaultNeighbours);

/// Path images side by side (views stacked) as one PNG.
ImageBuffer filmstrip(const std::vector<ImageBuffer>& frames);

void write_scree_csv(std::ostream& out, const ScreeResult& scree);

}  // namespace vrm
