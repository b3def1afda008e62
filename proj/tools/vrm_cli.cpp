#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vrm/dataset.hpp"
#include "vrm/experiment.hpp"
#include "vrm/render.hpp"

namespace fs = std::filesystem;
using namespace vrm;

namespace {

Scene scene_arg(const std::string& s) {
  if (fs::exists(s)) return load_scene(s);
  return presets::by_name(s);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Configuration parse_config(const std::string& s, std::size_t d) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) v.push_back(std::stod(item));
  if (v.size() != d) throw Error(ErrorCode::DimensionMismatch, "configuration needs " + std::to_string(d) + " values");
  return Configuration(std::move(v));
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void log(const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); }

struct GenerateArgs {
  std::string scene = "arm3";
  std::size_t n = 2000;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct PlanArgs {
  std::string dataset;
  std::string metric = "st-h";
  std::string planner = "jnst";
  std::size_t k = kDefaultNeighbours;
  std::string obstacles;
  std::string start, goal;
  std::string start_config, goal_config;
  std::string out = "plan_out";
};

struct BenchmarkArgs {
  std::string scene = "arm3";
  std::string densities = "500,1000,2000,5000";
  std::string metrics = "img-l2,rp-l2,theta-g,itp-l2,st-h";
  std::string planners = "none,lts,itp,jnst";
  std::size_t k = kDefaultNeighbours;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon_deg;
  std::size_t projection_dim = kDefaultProjectionDim;
  std::string out = "benchmark.csv";
};

struct ScreeArgs {
  std::string dataset;
  std::string scene;
  std::size_t n = 2000;
  std::optional<std::uint64_t> seed;
  std::size_t k = kDefaultNeighbours;
  std::size_t d_max = 6;
  double sigma = 0.0;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const Scene scene = scene_arg(a.scene);
  const Dataset ds = generate_dataset(scene, a.n, a.seed.value_or(scene.seed), a.out);
  log("wrote " + std::to_string(ds.size()) + " poses to " + a.out);
  return 0;
}

int run_plan(const PlanArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const Scene& scene = ds.scene;
  const MetricId metric = parse_metric(a.metric);
  const PlannerId planner = parse_planner(a.planner);
  const FeatureExtractor extractor = make_extractor(scene, {metric}, {planner}, ds.seed);
  const ImageBuffer background = extractor.background();
  const ObstacleImage b = a.obstacles.empty() ? ds.obstacles() : ObstacleImage{read_png(a.obstacles)};

  const auto query = [&](const std::string& image, const std::string& config, const char* what) {
    if (!config.empty()) {
      const Configuration q = parse_config(config, dof(scene.robot));
      const RobotImage img = render_robot(q, scene);
      return extractor.extract(img, q);
    }
    if (image.empty()) throw Error(ErrorCode::InvalidArgument, std::string("give a ") + what + " image or configuration");
    return extractor.extract(RobotImage{read_png(image), std::nullopt}, std::nullopt);
  };
  const NodeFeatures s = query(a.start, a.start_config, "start");
  const NodeFeatures t = query(a.goal, a.goal_config, "goal");

  log("extracting features of " + std::to_string(ds.size()) + " images");
  auto store = std::make_shared<const std::vector<NodeFeatures>>(extract_all(ds, extractor));
  const PreparedRoadmap roadmap = prepare_roadmap(store, scene, metric, planner, b, a.k);
  const GoldStandard gold(scene, b);
  const PlanOutcome outcome = plan_query(roadmap, s, t, b, &gold, a.k);

  const fs::path out(a.out);
  fs::create_directories(out);
  {
    std::ofstream edges = open_out(out / "edges.txt");
    write_edge_list(edges, roadmap.pruned);
    std::ofstream prune = open_out(out / "prune_log.txt");
    write_prune_log(prune, roadmap.pruned);
    std::ofstream certs = open_out(out / "certificates.txt");
    write_certificate_log(certs, roadmap.pruned);
  }
  std::ofstream report = open_out(out / "report.txt");
  report << "metric " << a.metric << "\nplanner " << a.planner << "\nk " << a.k << '\n';
  if (outcome.status == PlanOutcome::Status::Rejected) {
    report << "status rejected\nreason " << outcome.message << '\n';
    log("rejected: " + outcome.message);
    return 2;
  }
  if (outcome.status == PlanOutcome::Status::NoPath) {
    report << "status no-path\n";
    log("no path found (reported)");
    return 0;
  }
  const std::size_t base = roadmap.pruned.size();
  std::ofstream files = open_out(out / "path.txt");
  std::vector<ImageBuffer> frames;
  for (NodeId id : outcome.path.nodes) {
    if (id < base) {
      files << (ds.root / ds.records[id].images.front()).string() << '\n';
    } else {
      const std::string stem = id == outcome.query.s ? "start" : "goal";
      files << (out / (stem + ".png")).string() << '\n';
      write_views(out, stem, image_of(id == outcome.query.s ? s : t, background));
    }
    frames.push_back(image_of(id < base ? roadmap.pruned.node(id) : (id == outcome.query.s ? s : t), background));
  }
  write_png(out / "filmstrip.png", filmstrip(frames));
  std::ofstream path_certs = open_out(out / "path_certificates.txt");
  for (const PlannerCertificate& c : outcome.path.certificates) write_certificate(path_certs, c);
  for (const PlannerCertificate& c : outcome.audit) write_certificate(path_certs, c);
  report << "status path\nnodes " << outcome.path.nodes.size() << "\nweight " << outcome.path.weight
         << "\naudited " << (outcome.audited ? "yes" : "no") << "\naudit_failures " << outcome.audit_failures << '\n';
  log("path of " + std::to_string(outcome.path.nodes.size()) + " nodes; gold-standard failures: " +
      (outcome.audited ? std::to_string(outcome.audit_failures) : std::string("not audited")));
  return 0;
}

int run_benchmark_cmd(const BenchmarkArgs& a) {
  ExperimentSpec spec;
  spec.scene = scene_arg(a.scene);
  if (a.epsilon_deg) spec.scene.gold_epsilon = degrees_to_radians(*a.epsilon_deg);
  spec.densities.clear();
  for (const std::string& d : split_list(a.densities)) spec.densities.push_back(std::stoul(d));
  spec.metrics.clear();
  for (const std::string& m : split_list(a.metrics)) spec.metrics.push_back(parse_metric(m));
  spec.planners.clear();
  for (const std::string& p : split_list(a.planners)) spec.planners.push_back(parse_planner(p));
  spec.k = a.k;
  spec.seed = a.seed.value_or(spec.scene.seed);
  spec.projection_dim = a.projection_dim;
  const ExperimentReport report = run_benchmark(spec, log);
  std::ofstream out = open_out(a.out);
  write_csv(out, report);
  return 0;
}

int run_scree(const ScreeArgs& a) {
  std::vector<NodeFeatures> nodes;
  FeatureOptions options;
  options.markers = false;
  options.link_features = false;
  if (!a.dataset.empty()) {
    const Dataset ds = load_dataset(a.dataset);
    nodes = extract_all(ds, FeatureExtractor(ds.scene, options));
  } else {
    const Scene scene = scene_arg(a.scene.empty() ? "arm2" : a.scene);
    nodes = sample_features(scene, a.n, a.seed.value_or(scene.seed), FeatureExtractor(scene, options));
  }
  ScreeOptions so;
  so.k = a.k;
  so.d_max = a.d_max;
  so.smoothing_sigma = a.sigma;
  const ScreeResult scree = intrinsic_dimension(nodes, so);
  if (!scree.degenerate.empty()) log(std::to_string(scree.degenerate.size()) + " degenerate neighbourhoods");
  if (a.out.empty()) {
    write_scree_csv(std::cout, scree);
  } else {
    std::ofstream out = open_out(a.out);
    write_scree_csv(out, scree);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual roadmap planner for simulated planar robots"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Render a dataset of sampled poses");
  g->add_option("--scene", gen.scene, "Scene file or preset (arm3, arm2, mobile)");
  g->add_option("-n,--nodes", gen.n, "Number of poses");
  g->add_option("--seed", gen.seed, "Sampling seed (default: scene seed)");
  g->add_option("--out", gen.out, "Output directory")->required();

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Plan between two images over a dataset roadmap");
  p->add_option("--dataset", plan.dataset, "Dataset directory")->required();
  p->add_option("--metric", plan.metric, "img-l2, rp-l2, theta-g, itp-l2 or st-h");
  p->add_option("--planner", plan.planner, "none, lts, lts-superimpose, itp or jnst");
  p->add_option("-k", plan.k, "Neighbourhood size");
  p->add_option("--obstacles", plan.obstacles, "Obstacle image (default: the dataset's)");
  p->add_option("--start", plan.start, "Start image (PNG)");
  p->add_option("--goal", plan.goal, "Goal image (PNG)");
  p->add_option("--start-config", plan.start_config, "Start pose, comma separated (rendered; enables the audit)");
  p->add_option("--goal-config", plan.goal_config, "Goal pose, comma separated");
  p->add_option("--out", plan.out, "Output directory");

  BenchmarkArgs bench;
  auto* b = app.add_subcommand("benchmark", "Bad-edge sweep over densities, metrics and planners");
  b->add_option("--scene", bench.scene, "Scene file or preset");
  b->add_option("--densities", bench.densities, "Ascending node counts, comma separated");
  b->add_option("--metrics", bench.metrics, "Metrics, comma separated");
  b->add_option("--planners", bench.planners, "Planners, comma separated");
  b->add_option("-k", bench.k, "Neighbourhood size");
  b->add_option("--seed", bench.seed, "Root seed (default: scene seed)");
  b->add_option("--epsilon", bench.epsilon_deg, "Gold-standard resolution in degrees");
  b->add_option("--projections", bench.projection_dim, "Random projection dimension");
  b->add_option("--out", bench.out, "CSV output path");

  ScreeArgs scree;
  auto* s = app.add_subcommand("scree", "Local-PCA residual variance per dimension");
  s->add_option("--dataset", scree.dataset, "Dataset directory");
  s->add_option("--scene", scree.scene, "Scene file or preset when no dataset is given");
  s->add_option("-n,--nodes", scree.n, "Poses to sample when no dataset is given");
  s->add_option("--seed", scree.seed, "Sampling seed");
  s->add_option("-k", scree.k, "Neighbourhood size");
  s->add_option("--dmax", scree.d_max, "Largest dimension");
  s->add_option("--sigma", scree.sigma, "Gaussian blur in pixels before PCA (diagnostic)");
  s->add_option("--out", scree.out, "CSV output path (default: stdout)");

  std::string preset_name, preset_out;
  auto* sc = app.add_subcommand("scene", "Write a preset scene as JSON");
  sc->add_option("preset", preset_name, "arm3, arm2 or mobile")->required();
  sc->add_option("--out", preset_out, "Output path (default: stdout)");

  std::string render_scene, render_config, render_out;
  auto* r = app.add_subcommand("render", "Render one pose of a scene to PNG");
  r->add_option("--scene", render_scene, "Scene file or preset")->required();
  r->add_option("--config", render_config, "Pose, comma separated")->required();
  r->add_option("--out", render_out, "Output PNG")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*g) return run_generate(gen);
    if (*p) return run_plan(plan);
    if (*b) return run_benchmark_cmd(bench);
    if (*s) return run_scree(scree);
    if (*sc) {
      const std::string json = scene_to_json(presets::by_name(preset_name));
      if (preset_out.empty()) {
        std::cout << json << '\n';
      } else {
        open_out(preset_out) << json << '\n';
      }
      return 0;
    }
    if (*r) {
      const Scene scene = scene_arg(render_scene);
      const RobotImage robot = render_robot(parse_config(render_config, dof(scene.robot)), scene);
      // Robot over the obstacle scene, as a camera would see it.
      const ImageBuffer background = render_background(scene);
      ImageBuffer frame = render_obstacle_scene(scene);
      for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
        if (robot.pixels.pixel(i) != background.pixel(i)) frame.set_pixel(i, robot.pixels.pixel(i));
      }
      write_views(fs::path(render_out).parent_path(), fs::path(render_out).stem().string(), frame);
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
