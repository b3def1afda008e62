// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "vrm/experiment.hpp"

using namespace vrm;

namespace {

// Tolerances.
constexpr std::size_t kConservativePoses = 5000;
constexpr double kGuardPixels = 2.0;
constexpr double kConservativeSeconds = 5 * 60;
constexpr std::size_t kTableDensity = 2000;
constexpr double kMetricRatio = 1.0 / 5.0;
constexpr double kJnstOverItp = 2.0;
constexpr double kBenchmarkSeconds = 30 * 60;
constexpr double kInversionTolerance = 0.20;
constexpr std::size_t kScreeImages = 2000;
constexpr double kScreeResidual = 0.1;
constexpr double kElbowRatio = 3.0;
constexpr std::size_t kProjectionDim = 2000;
constexpr std::size_t kProjectionPairs = 200;
constexpr double kPairRelativeError = 0.20;
constexpr double kPairFraction = 0.99;
constexpr double kNeighbourOverlap = 0.70;
constexpr std::size_t kQueries = 20;
constexpr double kQueryFailureFraction = 0.10;
constexpr std::size_t kOracleGraphs = 100;
constexpr int kAxiomTriples = 1000;
constexpr int kShiTomasiImages = 20;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Verdict {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

void report(const Verdict& v) {
  std::cout << "criterion " << v.id << " " << (v.pass ? "PASS" : "FAIL") << "  " << v.name << ": " << v.detail
            << std::endl;
}

class CountingMetric : public Metric {
 public:
  explicit CountingMetric(const Metric& inner) : inner_(inner) {}
  MetricId id() const override { return inner_.id(); }
  double distance(const NodeFeatures& a, const NodeFeatures& b) const override {
    ++calls;
    return inner_.distance(a, b);
  }
  void require(const NodeFeatures& f) const override { inner_.require(f); }
  mutable std::size_t calls = 0;

 private:
  const Metric& inner_;
};

// Shared state: the standard scene and its 2000-node pool with every representation.
struct Standard {
  Scene scene = presets::arm3();
  ObstacleImage b = obstacle_image(scene);
  ImageBuffer background = render_background(scene);
  FeatureExtractor extractor =
      make_extractor(scene, all_metrics(), visual_planners(), scene.seed, kProjectionDim);
  NodeStore nodes;

  Standard() {
    nodes = std::make_shared<const std::vector<NodeFeatures>>(
        sample_features(scene, kTableDensity, scene.seed, extractor));
  }
  std::unique_ptr<Metric> metric(MetricId id) const {
    return make_metric(id, topology(scene.robot), image_diagonal({scene.cameras[0].rows, scene.cameras[0].cols}));
  }
  bool visually_free(const Configuration& q) const {
    return !hadamard_overlap(background_subtract(render_robot(q, scene), background), b);
  }
};

Verdict conservativeness() {
  const auto t0 = Clock::now();
  const Scene s = presets::arm3();
  const ObstacleImage b = obstacle_image(s);
  const ImageBuffer bg = render_background(s);
  const double guard = kGuardPixels * s.cameras[0].pixel_size();
  std::size_t near = 0, colliding = 0, violations = 0;
  for (const Configuration& q : sample_configurations(kConservativePoses, s.robot, s.seed)) {
    const ContactClass c = classify_contact(q, s.robot, s.obstacles, guard);
    if (c == ContactClass::NearContact) {
      ++near;
      continue;
    }
    const bool overlap = hadamard_overlap(background_subtract(render_robot(q, s), bg), b);
    const bool collision = geometric_collision(q, s.robot, s.obstacles);
    colliding += collision;
    if (!overlap && collision) ++violations;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << kConservativePoses << " poses, " << near << " near contact excluded, " << colliding
    << " colliding, violations " << violations << ", " << fmt("%.1f", secs) << " s";
  return {1, "conservativeness", violations == 0 && secs < kConservativeSeconds, d.str()};
}

double cell_pct(const ExperimentReport& r, std::size_t density, MetricId m, PlannerId p) {
  const CellResult* c = r.find(density, m, p);
  if (!c || c->status != "ok") return std::numeric_limits<double>::quiet_NaN();
  return c->bad_pct;
}

Verdict table_ordering(const ExperimentReport& r, double secs) {
  std::ostringstream d;
  bool pass = secs < kBenchmarkSeconds;
  const double img = cell_pct(r, kTableDensity, MetricId::ImageL2, PlannerId::None);
  d << "(a) img-l2 " << fmt("%.3f", img) << "%";
  bool a = true;
  for (MetricId m : {MetricId::JointGeodesic, MetricId::TrackedPointsL2, MetricId::ShiTomasiHausdorff}) {
    const double v = cell_pct(r, kTableDensity, m, PlannerId::None);
    const bool ok = v <= kMetricRatio * img;
    a = a && ok;
    d << ", " << to_string(m) << " " << fmt("%.3f", v) << "% (ratio " << fmt("%.2f", v / img) << (ok ? "" : " over")
      << ")";
  }
  bool b = true;
  std::string b_fail;
  for (MetricId m : all_metrics()) {
    const double none = cell_pct(r, kTableDensity, m, PlannerId::None);
    for (PlannerId p : {PlannerId::Lts, PlannerId::Itp, PlannerId::Jnst}) {
      const double v = cell_pct(r, kTableDensity, m, p);
      if (!(v <= none)) {
        b = false;
        b_fail += " " + to_string(m) + "/" + to_string(p);
      }
    }
  }
  d << "; (b) planners <= none " << (b ? "yes" : "no:" + b_fail);
  const double itp = cell_pct(r, kTableDensity, MetricId::ShiTomasiHausdorff, PlannerId::Itp);
  const double jnst = cell_pct(r, kTableDensity, MetricId::ShiTomasiHausdorff, PlannerId::Jnst);
  const bool c = jnst <= kJnstOverItp * itp;
  d << "; (c) st-h jnst " << fmt("%.3f", jnst) << "% vs itp " << fmt("%.3f", itp) << "% " << (c ? "yes" : "no");
  d << "; benchmark " << fmt("%.0f", secs) << " s";
  pass = pass && a && b && c;
  return {2, "bad-edge ordering at 2000 nodes", pass, d.str()};
}

Verdict density_trend(const ExperimentReport& r, const std::vector<std::size_t>& densities) {
  std::ostringstream d;
  bool pass = true;
  for (MetricId m : all_metrics()) {
    std::vector<double> seq;
    for (std::size_t n : densities) seq.push_back(cell_pct(r, n, m, PlannerId::None));
    std::size_t inversions = 0;
    bool small = true;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      if (seq[i + 1] > seq[i]) {
        ++inversions;
        if (!(seq[i] > 0.0) || (seq[i + 1] - seq[i]) / seq[i] >= kInversionTolerance) small = false;
      }
      if (std::isnan(seq[i]) || std::isnan(seq[i + 1])) small = false;
    }
    const bool ok = inversions == 0 || (inversions == 1 && small);
    pass = pass && ok;
    d << (d.tellp() > 0 ? "; " : "") << to_string(m);
    for (double v : seq) d << " " << fmt("%.2f", v);
    if (!ok) d << " (not monotone)";
  }
  return {3, "density monotonicity", pass, d.str()};
}

bool scree_ok(const Scene& s, std::ostringstream& d) {
  FeatureOptions opts;
  opts.markers = false;
  opts.link_features = false;
  const FeatureExtractor ex(s, opts);
  const auto nodes = sample_features(s, kScreeImages, s.seed, ex);
  const ScreeResult r = intrinsic_dimension(nodes, {kDefaultNeighbours, 3, 0.0});
  const double drop2 = r.residual[0] - r.residual[1];
  const double drop3 = r.residual[1] - r.residual[2];
  const bool ok = r.residual[1] < kScreeResidual && drop2 >= kElbowRatio * drop3;
  d << s.name << " residual " << fmt("%.3f", r.residual[0]) << "/" << fmt("%.3f", r.residual[1]) << "/"
    << fmt("%.3f", r.residual[2]) << " elbow ratio " << fmt("%.2f", drop3 > 0 ? drop2 / drop3 : 0.0);
  return ok;
}

Verdict scree() {
  std::ostringstream d;
  const bool arm = scree_ok(presets::arm2(), d);
  d << "; ";
  const bool mobile = scree_ok(presets::mobile(), d);
  return {4, "manifold dimensionality", arm && mobile, d.str()};
}

Verdict projection_fidelity(const Standard& st) {
  const auto& nodes = *st.nodes;
  std::mt19937_64 rng(st.scene.seed);
  std::size_t within = 0, pairs = 0;
  while (pairs < kProjectionPairs) {
    const std::size_t i = rng() % nodes.size(), j = rng() % nodes.size();
    const double exact = delta_l2(nodes[i], nodes[j]);
    if (i == j || exact == 0.0) continue;
    ++pairs;
    if (std::abs(rp_l2(nodes[i].projection, nodes[j].projection) - exact) <= kPairRelativeError * exact) ++within;
  }
  const auto img = build_graph(st.nodes, *st.metric(MetricId::ImageL2));
  const auto rp = build_graph(st.nodes, *st.metric(MetricId::RandomProjectionL2));
  double overlap = 0.0;
  for (NodeId i = 0; i < nodes.size(); ++i) {
    std::set<NodeId> a;
    for (const Neighbour& n : img.nearest(i)) a.insert(n.node);
    std::size_t shared = 0;
    for (const Neighbour& n : rp.nearest(i)) shared += a.count(n.node);
    overlap += static_cast<double>(shared) / kDefaultNeighbours;
  }
  overlap /= static_cast<double>(nodes.size());
  const double frac = static_cast<double>(within) / pairs;
  std::ostringstream d;
  d << "k=" << kProjectionDim << ", " << within << "/" << pairs << " pairs within 20% (" << fmt("%.1f", 100 * frac)
    << "%), mean 8-NN overlap " << fmt("%.1f", 100 * overlap) << "%";
  return {5, "random-projection fidelity", frac >= kPairFraction && overlap >= kNeighbourOverlap, d.str()};
}

std::vector<std::pair<Configuration, Configuration>> free_queries(const Standard& st) {
  const GoldStandard gold(st.scene, st.b);
  std::vector<std::pair<Configuration, Configuration>> out;
  const auto qs = sample_configurations(400, st.scene.robot, st.scene.seed + 1);
  std::vector<Configuration> free;
  for (const auto& q : qs) {
    if (st.visually_free(q) && gold.node_free(q)) free.push_back(q);
  }
  for (std::size_t i = 0; out.size() < kQueries && i + 1 < free.size(); i += 2) out.push_back({free[i], free[i + 1]});
  return out;
}

Verdict path_soundness(const Standard& st) {
  const GoldStandard gold(st.scene, st.b);
  const auto queries = free_queries(st);
  std::ostringstream d;
  d << queries.size() << " queries;";
  bool pass = queries.size() >= kQueries;
  for (MetricId m : all_metrics()) {
    for (PlannerId p : visual_planners()) {
      const PreparedRoadmap rm = prepare_roadmap(st.nodes, st.scene, m, p, st.b);
      std::size_t paths = 0, failures = 0, rejected = 0;
      for (const auto& [s, t] : queries) {
        const PlanOutcome out = plan_query(rm, st.extractor.extract(s), st.extractor.extract(t), st.b, &gold);
        if (out.status == PlanOutcome::Status::Rejected) ++rejected;
        if (out.status != PlanOutcome::Status::Path) continue;
        ++paths;
        if (!out.audited || out.audit_failures > 0) ++failures;
      }
      const bool strict = m == MetricId::ShiTomasiHausdorff && (p == PlannerId::Itp || p == PlannerId::Jnst);
      const bool ok = strict ? failures == 0 : failures <= kQueryFailureFraction * queries.size();
      // Without a local planner no edge is checked; reported, not judged.
      if (p != PlannerId::None) pass = pass && ok;
      d << " " << to_string(m) << "/" << to_string(p) << " " << failures << "/" << paths;
      if (rejected) d << " (" << rejected << " rejected)";
      if (!ok) d << (p == PlannerId::None ? " [none, not judged]" : " [over]");
    }
  }
  return {6, "path soundness (failures/paths)", pass, d.str()};
}

Verdict oracle_equivalences(const Standard& st) {
  std::ostringstream d;
  // Shortest paths on random 10-node graphs.
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> w(0.1, 5.0);
  std::size_t path_mismatch = 0;
  for (std::size_t g = 0; g < kOracleGraphs; ++g) {
    std::vector<std::vector<Neighbour>> adj(10);
    for (NodeId a = 0; a < 10; ++a) {
      for (NodeId b = a + 1; b < 10; ++b) {
        if (rng() % 100 < 25) {
          const double x = w(rng);
          adj[a].push_back({b, x});
          adj[b].push_back({a, x});
        }
      }
    }
    const NodeId s = rng() % 10, t = rng() % 10;
    const PathResult r = shortest_path(adj, s, t);
    const double best = oracle::exhaustive_best(adj, s, t);
    const bool ok = std::isfinite(best) ? (r.found && std::abs(r.weight - best) <= 1e-9 * (1 + best)) : !r.found;
    path_mismatch += !ok;
  }
  d << "shortest-path mismatches " << path_mismatch << "/" << kOracleGraphs;

  // Pruned set against per-node renders.
  const auto graph = build_graph(st.nodes, *st.metric(MetricId::ImageL2));
  const auto pruned = prune_obstacle_nodes(graph, st.b);
  std::set<NodeId> removed, expected;
  for (const auto& r : pruned.removed_nodes()) removed.insert(r.node);
  for (NodeId i = 0; i < graph.size(); ++i) {
    if (!st.visually_free(*graph.node(i).config)) expected.insert(i);
  }
  const bool prune_ok = removed == expected;
  d << "; pruned set " << (prune_ok ? "equal" : "differs") << " (" << removed.size() << " nodes)";

  // Metric axioms.
  const std::vector<NodeFeatures> sample(st.nodes->begin(), st.nodes->begin() + 400);
  std::size_t axiom = 0;
  for (MetricId m : all_metrics()) axiom += oracle::metric_axiom_violations(*st.metric(m), sample, kAxiomTriples, 7);
  d << "; metric axiom violations " << axiom;

  // Shi-Tomasi against the eigenvalue-map oracle.
  std::mt19937_64 img_rng(2024);
  const ShiTomasiParams params;
  int st_mismatch = 0;
  for (int i = 0; i < kShiTomasiImages; ++i) {
    const GrayImage g = oracle::synthetic_shapes(img_rng);
    const auto found = shi_tomasi(g, params);
    const auto expected_pts = oracle::detect_oracle(g, params);
    if (!oracle::matched_within(found, expected_pts, params.min_distance) ||
        !oracle::matched_within(expected_pts, found, params.min_distance)) {
      ++st_mismatch;
    }
  }
  d << "; shi-tomasi mismatches " << st_mismatch << "/" << kShiTomasiImages;
  const bool pass = path_mismatch == 0 && prune_ok && axiom == 0 && st_mismatch == 0;
  return {7, "oracle equivalences", pass, d.str()};
}

Verdict complexity(const Standard& st) {
  const auto metric = st.metric(MetricId::ImageL2);
  const auto graph = build_graph(st.nodes, *metric);
  const auto pruned = prune_obstacle_nodes(graph, st.b);
  const bool prune_ok = pruned.overlap_tests() == graph.size();
  const auto planner = make_planner(PlannerId::None, dof(st.scene.robot));
  std::size_t insert_bad = 0, search_bad = 0, ran = 0, max_settled = 0;
  for (const auto& [s, t] : free_queries(st)) {
    CountingMetric counting(*metric);
    try {
      auto [g, q] = insert_query(pruned, st.extractor.extract(s), st.extractor.extract(t), counting, *planner, st.b);
      ++ran;
      const std::size_t expected = 2 * pruned.alive_count();
      if (counting.calls != expected || g.query_distance_computations() != expected) ++insert_bad;
      const PathResult r = shortest_path(g, q.s, q.t);
      max_settled = std::max(max_settled, r.settled);
      if (r.settled > g.size()) ++search_bad;
    } catch (const Error&) {
      // Isolated queries leave nothing to count.
    }
  }
  std::ostringstream d;
  d << "overlap tests " << pruned.overlap_tests() << " for n=" << graph.size() << "; " << ran
    << " insertions, distance counts off 2n' in " << insert_bad << "; max settled " << max_settled
    << ", over n in " << search_bad;
  return {8, "complexity accounting", prune_ok && ran > 0 && insert_bad == 0 && search_bad == 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string csv_path;
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  app.add_option("--csv", csv_path, "Write the benchmark CSV here");
  CLI11_PARSE(app, argc, argv);
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  std::vector<Verdict> verdicts;
  auto run = [&](Verdict v) {
    report(v);
    verdicts.push_back(std::move(v));
  };

  if (wanted(1)) run(conservativeness());

  if (wanted(2) || wanted(3)) {
    ExperimentSpec spec;
    spec.scene = presets::arm3();
    spec.seed = spec.scene.seed;
    const auto t0 = Clock::now();
    const ExperimentReport r = run_benchmark(spec, [](const std::string& msg) { std::cerr << msg << '\n'; });
    const double secs = seconds_since(t0);
    if (!csv_path.empty()) {
      std::ofstream out(csv_path);
      write_csv(out, r);
    }
    if (wanted(2)) run(table_ordering(r, secs));
    if (wanted(3)) run(density_trend(r, spec.densities));
  }

  if (wanted(4)) run(scree());

  if (wanted(5) || wanted(6) || wanted(7) || wanted(8)) {
    const Standard st;
    if (wanted(5)) run(projection_fidelity(st));
    if (wanted(6)) run(path_soundness(st));
    if (wanted(7)) run(oracle_equivalences(st));
    if (wanted(8)) run(complexity(st));
  }

  std::size_t failed = 0;
  for (const Verdict& v : verdicts) failed += !v.pass;
  std::cout << verdicts.size() - failed << "/" << verdicts.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
