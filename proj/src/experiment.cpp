#include "vrm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include "vrm/render.hpp"

namespace vrm {

namespace {

bool contains(const std::vector<MetricId>& v, MetricId id) { return std::find(v.begin(), v.end(), id) != v.end(); }
bool contains(const std::vector<PlannerId>& v, PlannerId id) { return std::find(v.begin(), v.end(), id) != v.end(); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool same_image(const NodeFeatures& a, const NodeFeatures& b) {
  return a.foreground.views == b.foreground.views && a.delta_components == b.delta_components &&
         a.delta_values == b.delta_values;
}

}  // namespace

std::uint64_t projector_seed(std::uint64_t root_seed) { return root_seed ^ 0x9E3779B97F4A7C15ULL; }

void ExperimentSpec::validate() const {
  if (densities.empty()) throw Error(ErrorCode::InvalidArgument, "no densities given");
  for (std::size_t i = 1; i < densities.size(); ++i) {
    if (densities[i] <= densities[i - 1]) throw Error(ErrorCode::InvalidArgument, "densities must be ascending");
  }
  if (metrics.empty() || planners.empty()) throw Error(ErrorCode::InvalidArgument, "no metrics or planners given");
  if (contains(planners, PlannerId::GoldStandard)) {
    throw Error(ErrorCode::InvalidArgument, "the gold standard is the auditor, not a benchmark planner");
  }
  scene.validate();
}

const CellResult* ExperimentReport::find(std::size_t density, MetricId metric, PlannerId planner) const {
  for (const CellResult& c : cells) {
    if (c.density == density && c.metric == metric && c.planner == planner) return &c;
  }
  return nullptr;
}

FeatureExtractor make_extractor(const Scene& scene, const std::vector<MetricId>& metrics,
                                const std::vector<PlannerId>& planners, std::uint64_t root_seed,
                                std::size_t projection_dim) {
  FeatureOptions options;
  options.markers = contains(metrics, MetricId::TrackedPointsL2) || contains(planners, PlannerId::Itp);
  options.link_features = scene.cameras.size() == 1 &&
                          (contains(metrics, MetricId::ShiTomasiHausdorff) || contains(planners, PlannerId::Jnst));
  std::shared_ptr<const RandomProjector> projector;
  if (contains(metrics, MetricId::RandomProjectionL2)) {
    const std::size_t p = render_background(scene).size();
    projector = std::make_shared<RandomProjector>(p, projection_dim, projector_seed(root_seed));
  }
  return FeatureExtractor(scene, options, std::move(projector));
}

std::vector<NodeFeatures> sample_features(const Scene& scene, std::size_t n, std::uint64_t seed,
                                          const FeatureExtractor& extractor) {
  std::vector<NodeFeatures> out;
  out.reserve(n);
  for (const Configuration& q : sample_configurations(n, scene.robot, seed)) out.push_back(extractor.extract(q));
  return out;
}

ExperimentReport run_benchmark(const ExperimentSpec& spec, const ProgressFn& progress) {
  spec.validate();
  const auto say = [&](const std::string& s) {
    if (progress) progress(s);
  };
  ExperimentReport report;
  report.seed = spec.seed;
  report.k = spec.k;
  report.epsilon_deg = spec.scene.gold_epsilon * 180.0 / kPi;

  const std::size_t pool_size = spec.densities.back();
  const FeatureExtractor extractor =
      make_extractor(spec.scene, spec.metrics, spec.planners, spec.seed, spec.projection_dim);
  say("rendering " + std::to_string(pool_size) + " poses");
  const std::vector<NodeFeatures> pool = sample_features(spec.scene, pool_size, spec.seed, extractor);

  const ObstacleImage b = obstacle_image(spec.scene);
  const GoldStandard gold(spec.scene, b);
  std::unordered_map<std::uint64_t, bool> audit_cache;
  const auto edge_bad = [&](NodeId a, NodeId c) {
    const std::uint64_t key = static_cast<std::uint64_t>(std::min(a, c)) * pool_size + std::max(a, c);
    auto it = audit_cache.find(key);
    if (it != audit_cache.end()) return it->second;
    const bool bad = !gold.check(*pool[a].config, *pool[c].config, a, c).safe;
    audit_cache.emplace(key, bad);
    return bad;
  };

  const Topology topo = topology(spec.scene.robot);
  const double diagonal = image_diagonal(spec.scene.cameras.empty() ? ViewGeometry{}
                                                                    : ViewGeometry{spec.scene.cameras[0].rows,
                                                                                   spec.scene.cameras[0].cols});
  const std::size_t d = dof(spec.scene.robot);

  for (std::size_t density : spec.densities) {
    auto store = std::make_shared<const std::vector<NodeFeatures>>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(density));
    for (MetricId metric_id : spec.metrics) {
      const auto fail_all = [&](const std::string& why) {
        for (PlannerId p : spec.planners) {
          CellResult c;
          c.density = density;
          c.metric = metric_id;
          c.planner = p;
          c.status = "failed: " + why;
          report.cells.push_back(c);
        }
      };
      std::optional<VisualRoadmap> graph;
      std::optional<PrunedRoadmap> free_graph;
      double base_time = 0.0;
      try {
        const auto start = std::chrono::steady_clock::now();
        const auto metric = make_metric(metric_id, topo, diagonal);
        graph.emplace(build_graph(store, *metric, spec.k));
        free_graph.emplace(prune_obstacle_nodes(*graph, b));
        base_time = seconds_since(start);
      } catch (const std::exception& e) {
        fail_all(e.what());
        say("n=" + std::to_string(density) + " " + to_string(metric_id) + " failed: " + e.what());
        continue;
      }
      const std::size_t total = free_graph->edge_count();
      for (PlannerId planner_id : spec.planners) {
        CellResult cell;
        cell.density = density;
        cell.metric = metric_id;
        cell.planner = planner_id;
        cell.nodes_alive = free_graph->alive_count();
        cell.connected = graph->connected();
        cell.edges_total = total;
        try {
          const auto start = std::chrono::steady_clock::now();
          const auto planner = make_planner(planner_id, d);
          const PrunedRoadmap checked = planner_id == PlannerId::None
                                            ? *free_graph
                                            : prune_unsafe_edges(*free_graph, *planner, b);
          cell.wall_time = base_time + seconds_since(start);
          const std::vector<Edge> kept = checked.edges();
          cell.edges_pruned = total - kept.size();
          for (const Edge& e : kept) cell.bad_edges += edge_bad(e.a, e.b) ? 1 : 0;
          cell.bad_pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(cell.bad_edges) / static_cast<double>(total);
        } catch (const std::exception& e) {
          cell.status = std::string("failed: ") + e.what();
        }
        char line[160];
        std::snprintf(line, sizeof line, "n=%zu %s %s bad=%zu/%zu (%.3f%%)", density, to_string(metric_id).c_str(),
                      to_string(planner_id).c_str(), cell.bad_edges, cell.edges_total, cell.bad_pct);
        say(line);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << "# root_seed=" << report.seed << " k=" << report.k << " epsilon_deg=" << report.epsilon_deg << '\n';
  out << "density,metric,planner,edges_total,edges_pruned,bad_pct,wall_time,bad_edges,status\n";
  for (const CellResult& c : report.cells) {
    char pct[32], secs[32];
    std::snprintf(pct, sizeof pct, "%.4f", c.bad_pct);
    std::snprintf(secs, sizeof secs, "%.3f", c.wall_time);
    out << c.density << ',' << to_string(c.metric) << ',' << to_string(c.planner) << ',' << c.edges_total << ','
        << c.edges_pruned << ',' << pct << ',' << secs << ',' << c.bad_edges << ',' << csv_field(c.status) << '\n';
  }
}

PreparedRoadmap prepare_roadmap(NodeStore nodes, const Scene& scene, MetricId metric, PlannerId planner,
                                const ObstacleImage& b, std::size_t k) {
  const double diagonal = image_diagonal({scene.cameras.at(0).rows, scene.cameras.at(0).cols});
  auto m = make_metric(metric, topology(scene.robot), diagonal);
  auto p = make_planner(planner, dof(scene.robot));
  auto graph = std::make_shared<VisualRoadmap>(build_graph(std::move(nodes), *m, k));
  PrunedRoadmap free_graph = prune_obstacle_nodes(*graph, b);
  PrunedRoadmap checked = planner == PlannerId::None ? free_graph : prune_unsafe_edges(free_graph, *p, b);
  return PreparedRoadmap{std::move(m), std::move(p), std::move(graph), std::move(checked)};
}

PlanOutcome plan_query(const PreparedRoadmap& roadmap, const NodeFeatures& s, const NodeFeatures& t,
                       const ObstacleImage& b, const GoldStandard* gold, std::size_t k) {
  PlanOutcome out;
  std::optional<std::pair<PrunedRoadmap, QueryNodes>> inserted;
  try {
    inserted.emplace(insert_query(roadmap.pruned, s, t, *roadmap.metric, *roadmap.planner, b, k));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::QueryInCollision && e.code() != ErrorCode::IsolatedQuery) throw;
    out.status = PlanOutcome::Status::Rejected;
    out.message = e.what();
    return out;
  }
  const PrunedRoadmap& g = inserted->first;
  out.query = inserted->second;
  out.distance_computations = g.query_distance_computations();
  if (same_image(s, t)) {
    out.path.found = true;
    out.path.nodes = {out.query.s};
    out.path.settled = 1;
    out.path.heap_pops = 1;
  } else {
    out.path = shortest_path(g, out.query.s, out.query.t);
  }
  if (!out.path.found) {
    out.status = PlanOutcome::Status::NoPath;
    out.message = "goal unreachable in the pruned roadmap";
    return out;
  }
  out.status = PlanOutcome::Status::Path;
  if (gold) {
    out.audited = true;
    for (std::size_t i = 0; i < out.path.nodes.size(); ++i) {
      const NodeFeatures& f = g.node(out.path.nodes[i]);
      if (!f.config) {
        out.audited = false;
        break;
      }
    }
    if (out.audited) {
      const auto& nodes = out.path.nodes;
      if (nodes.size() == 1) {
        PlannerCertificate c = gold->check(*g.node(nodes[0]).config, *g.node(nodes[0]).config, nodes[0], nodes[0]);
        out.audit_failures += c.safe ? 0 : 1;
        out.audit.push_back(std::move(c));
      }
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        PlannerCertificate c = gold->check(*g.node(nodes[i]).config, *g.node(nodes[i + 1]).config, nodes[i], nodes[i + 1]);
        out.audit_failures += c.safe ? 0 : 1;
        out.audit.push_back(std::move(c));
      }
    }
  }
  return out;
}

ImageBuffer filmstrip(const std::vector<ImageBuffer>& frames) {
  if (frames.empty()) throw Error(ErrorCode::EmptyInput, "filmstrip needs at least one frame");
  constexpr int kGap = 2;
  int frame_rows = 0, frame_cols = 0;
  for (const ViewGeometry& v : frames.front().views()) {
    frame_rows += v.rows;
    frame_cols = std::max(frame_cols, v.cols);
  }
  const int n = static_cast<int>(frames.size());
  ImageBuffer out(frame_rows, n * frame_cols + (n - 1) * kGap);
  for (int f = 0; f < n; ++f) {
    if (frames[static_cast<std::size_t>(f)].views() != frames.front().views()) {
      throw Error(ErrorCode::GeometryMismatch, "filmstrip frames differ in geometry");
    }
    int row0 = 0;
    for (std::size_t v = 0; v < frames[static_cast<std::size_t>(f)].view_count(); ++v) {
      const ImageBuffer view = frames[static_cast<std::size_t>(f)].view(v);
      for (int r = 0; r < view.rows(); ++r) {
        for (int c = 0; c < view.cols(); ++c) {
          const std::size_t dst = static_cast<std::size_t>(row0 + r) * out.cols() + f * (frame_cols + kGap) + c;
          out.set_pixel(dst, view.pixel(static_cast<std::size_t>(r) * view.cols() + c));
        }
      }
      row0 += view.rows();
    }
  }
  return out;
}

void write_scree_csv(std::ostream& out, const ScreeResult& scree) {
  out << "dimension,residual_variance\n";
  for (std::size_t d = 0; d < scree.residual.size(); ++d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", scree.residual[d]);
    out << d + 1 << ',' << buf << '\n';
  }
}

}  // namespace vrm
