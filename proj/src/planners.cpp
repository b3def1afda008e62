#include "vrm/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "vrm/render.hpp"

namespace vrm {

namespace {

std::vector<std::uint32_t> union_components(std::span<const SparseDelta> members) {
  std::vector<std::uint32_t> out;
  for (const SparseDelta& m : members) {
    std::vector<std::uint32_t> merged;
    merged.reserve(out.size() + m.components.size());
    std::set_union(out.begin(), out.end(), m.components.begin(), m.components.end(),
                   std::back_inserter(merged));
    out.swap(merged);
  }
  return out;
}

// Values of `x` on the sorted component list `comps` (zero where absent).
Eigen::VectorXd restrict_to(const SparseDelta& x, const std::vector<std::uint32_t>& comps) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(comps.size()));
  std::size_t j = 0;
  for (std::size_t i = 0; i < x.components.size(); ++i) {
    while (j < comps.size() && comps[j] < x.components[i]) ++j;
    if (j < comps.size() && comps[j] == x.components[i]) out(static_cast<Eigen::Index>(j)) = x.values[i];
  }
  return out;
}

void apply_sign_convention(Eigen::MatrixXd& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < basis.rows(); ++r) {
      if (std::abs(basis(r, c)) > std::abs(basis(best, c))) best = r;
    }
    if (basis.rows() > 0 && basis(best, c) < 0.0) basis.col(c) *= -1.0;
  }
}

void offset_pixels(std::vector<std::uint32_t>& pixels, std::size_t from, std::size_t offset) {
  for (std::size_t i = from; i < pixels.size(); ++i) pixels[i] += static_cast<std::uint32_t>(offset);
}

void score(PlannerCertificate& cert, std::vector<std::uint32_t>& pixels, const OccupancyMask& b) {
  std::sort(pixels.begin(), pixels.end());
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
  cert.worst_overlap = support_overlap(pixels, b);
  cert.safe = !support_collides(pixels, b);
}

PlannerCertificate make_cert(PlannerId id, NodeId u, NodeId v) {
  PlannerCertificate c;
  c.planner = id;
  c.u = std::min(u, v);
  c.v = std::max(u, v);
  return c;
}

class NonePlanner final : public EdgePlanner {
 public:
  PlannerId id() const override { return PlannerId::None; }
  void require(const NodeFeatures&) const override {}
  PlannerCertificate check(const PrunedRoadmap&, NodeId u, NodeId v, const OccupancyMask&) const override {
    PlannerCertificate c = make_cert(PlannerId::None, u, v);
    c.note = "unchecked";
    return c;
  }
};

class LtsPlanner final : public EdgePlanner {
 public:
  LtsPlanner(std::size_t dof, LtsParams params) : dof_(dof), params_(params) {}
  PlannerId id() const override { return PlannerId::Lts; }
  void require(const NodeFeatures&) const override {}
  PlannerCertificate check(const PrunedRoadmap& g, NodeId u, NodeId v, const OccupancyMask& b) const override {
    return lts_check(u, v, build_chart(g, u, v, dof_), b, params_);
  }

 private:
  std::size_t dof_;
  LtsParams params_;
};

class SuperimposePlanner final : public EdgePlanner {
 public:
  PlannerId id() const override { return PlannerId::LtsSuperimpose; }
  void require(const NodeFeatures&) const override {}
  PlannerCertificate check(const PrunedRoadmap& g, NodeId u, NodeId v, const OccupancyMask& b) const override {
    std::vector<const NodeFeatures*> members;
    for (NodeId id : chart_members(g, u, v)) members.push_back(&g.node(id));
    return lts_superimpose_check(u, v, members, b);
  }
};

class ItpPlanner final : public EdgePlanner {
 public:
  PlannerId id() const override { return PlannerId::Itp; }
  void require(const NodeFeatures& f) const override {
    if (f.markers.points.empty()) throw Error(ErrorCode::UnsupportedMetric, "itp needs tracked markers");
  }
  PlannerCertificate check(const PrunedRoadmap& g, NodeId u, NodeId v, const OccupancyMask& b) const override {
    const NodeFeatures& fu = g.node(u);
    return itp_check(u, v, fu.markers, g.node(v).markers, fu.foreground.views, b);
  }
};

class JnstPlanner final : public EdgePlanner {
 public:
  PlannerId id() const override { return PlannerId::Jnst; }
  void require(const NodeFeatures& f) const override {
    if (f.foreground.views.size() != 1 || f.link_features.links.empty()) {
      throw Error(ErrorCode::UnsupportedMetric, "jnst needs per-link features of a single view");
    }
  }
  PlannerCertificate check(const PrunedRoadmap& g, NodeId u, NodeId v, const OccupancyMask& b) const override {
    const NodeFeatures& fu = g.node(u);
    return jnst_check(u, v, fu.link_features, g.node(v).link_features, fu.foreground.views.front(), b);
  }
};

class GoldPlanner final : public EdgePlanner {
 public:
  explicit GoldPlanner(const GoldStandard& gold) : gold_(gold) {}
  PlannerId id() const override { return PlannerId::GoldStandard; }
  void require(const NodeFeatures& f) const override {
    if (!f.config) throw Error(ErrorCode::InvalidArgument, "gold standard needs diagnostic configurations");
  }
  PlannerCertificate check(const PrunedRoadmap& g, NodeId u, NodeId v, const OccupancyMask&) const override {
    require(g.node(u));
    require(g.node(v));
    return gold_.check(*g.node(u).config, *g.node(v).config, u, v);
  }

 private:
  const GoldStandard& gold_;
};

}  // namespace

SparseDelta delta_of(const NodeFeatures& f) {
  SparseDelta d;
  d.components = f.delta_components;
  d.values.resize(f.delta_values.size());
  std::transform(f.delta_values.begin(), f.delta_values.end(), d.values.begin(),
                 [](std::int16_t v) { return v / 255.0; });
  return d;
}

Eigen::VectorXd LocalChart::reconstruct(const Eigen::VectorXd& y) const {
  if (basis.cols() == 0) return mean;
  return mean + basis * y;
}

Eigen::VectorXd LocalChart::project(const SparseDelta& x) const {
  return basis.transpose() * (restrict_to(x, components) - mean);
}

std::vector<std::uint32_t> LocalChart::foreground(const Eigen::VectorXd& reconstruction, double tau) const {
  std::vector<std::uint32_t> pixels;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const std::uint32_t pixel = components[i] / 3;
    if (std::abs(reconstruction(static_cast<Eigen::Index>(i))) > tau &&
        (pixels.empty() || pixels.back() != pixel)) {
      pixels.push_back(pixel);
    }
  }
  return pixels;
}

LocalChart build_chart(std::span<const SparseDelta> members, std::size_t d) {
  if (members.size() < 2) throw Error(ErrorCode::InvalidArgument, "a chart needs at least two images");
  LocalChart chart;
  chart.components = union_components(members);
  const Eigen::Index m = static_cast<Eigen::Index>(members.size());
  const Eigen::Index s = static_cast<Eigen::Index>(chart.components.size());

  Eigen::MatrixXd data(m, s);
  for (Eigen::Index i = 0; i < m; ++i) {
    data.row(i) = restrict_to(members[static_cast<std::size_t>(i)], chart.components).transpose();
  }
  chart.mean = data.colwise().mean().transpose();
  data.rowwise() -= chart.mean.transpose();

  // Eigenvectors of the m x m Gram matrix give the principal directions.
  const Eigen::MatrixXd gram = data * data.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd lambda = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vecs = eig.eigenvectors().rowwise().reverse();
  chart.eigenvalues = lambda / static_cast<double>(m);

  const double top = lambda.size() > 0 ? lambda(0) : 0.0;
  chart.degenerate = !(top > 1e-12);
  const double tol = std::max(1e-12, 1e-9 * top);
  Eigen::Index rank = 0;
  while (rank < lambda.size() && rank < static_cast<Eigen::Index>(d) && lambda(rank) > tol) ++rank;

  chart.basis.resize(s, rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    chart.basis.col(j) = data.transpose() * vecs.col(j) / std::sqrt(lambda(j));
  }
  if (rank < static_cast<Eigen::Index>(d)) {
    chart.rank_deficient = true;
    // Orthonormal completion from unit vectors on the support.
    for (Eigen::Index c = 0; c < s && chart.basis.cols() < static_cast<Eigen::Index>(d); ++c) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(s, c);
      if (chart.basis.cols() > 0) e -= chart.basis * (chart.basis.transpose() * e);
      const double len = e.norm();
      if (len > 0.5) {
        chart.basis.conservativeResize(Eigen::NoChange, chart.basis.cols() + 1);
        chart.basis.col(chart.basis.cols() - 1) = e / len;
      }
    }
  }
  apply_sign_convention(chart.basis);
  chart.coords = chart.basis.transpose() * data.transpose();
  return chart;
}

std::vector<NodeId> chart_members(const PrunedRoadmap& graph, NodeId u, NodeId v) {
  std::vector<NodeId> out{u, v};
  // Neighbourhoods before obstacle pruning: a chart of free images alone could
  // never reach the obstacle. Query nodes only have their current edges.
  const auto neighbours = [&](NodeId id) -> const std::vector<Neighbour>& {
    return id < graph.base().size() ? graph.base().adjacent(id) : graph.adjacent(id);
  };
  const auto& nu = neighbours(u);
  const auto& nv = neighbours(v);
  std::size_t i = 0, j = 0;
  while (i < nu.size() && j < nv.size()) {
    if (nu[i].node < nv[j].node) {
      ++i;
    } else if (nv[j].node < nu[i].node) {
      ++j;
    } else {
      out.push_back(nu[i].node);
      ++i;
      ++j;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LocalChart build_chart(const PrunedRoadmap& graph, NodeId u, NodeId v, std::size_t d) {
  const std::vector<NodeId> ids = chart_members(graph, u, v);
  std::vector<SparseDelta> deltas;
  deltas.reserve(ids.size());
  for (NodeId id : ids) deltas.push_back(delta_of(graph.node(id)));
  if (deltas.size() == 1) deltas.push_back(deltas.front());
  LocalChart chart = build_chart(deltas, d);
  chart.u = u;
  chart.v = v;
  chart.members = ids;
  return chart;
}

PlannerCertificate lts_check(NodeId u, NodeId v, const LocalChart& chart, const OccupancyMask& b,
                             const LtsParams& params) {
  if (params.steps < 1) throw Error(ErrorCode::InvalidArgument, "lts needs at least one alpha");
  PlannerCertificate cert = make_cert(PlannerId::Lts, u, v);
  if (chart.degenerate) {
    // Every member is the same image; the chart collapses to that image.
    cert.note = "degenerate";
    std::vector<std::uint32_t> pixels = chart.foreground(chart.mean, params.tau);
    score(cert, pixels, b);
    return cert;
  }
  if (chart.rank_deficient) cert.note = "rank-deficient";
  const auto column = [&](NodeId id) {
    auto it = std::find(chart.members.begin(), chart.members.end(), id);
    if (it == chart.members.end()) throw Error(ErrorCode::InvalidArgument, "edge endpoint is not a chart member");
    return static_cast<Eigen::Index>(it - chart.members.begin());
  };
  const Eigen::VectorXd yu = chart.coords.col(column(u));
  const Eigen::VectorXd yv = chart.coords.col(column(v));
  for (std::size_t i = 1; i <= params.steps; ++i) {
    const double alpha = static_cast<double>(i) / static_cast<double>(params.steps + 1);
    cert.parameters.push_back(alpha);
    const Eigen::VectorXd y = alpha * yu + (1.0 - alpha) * yv;
    const std::vector<std::uint32_t> pixels = chart.foreground(chart.reconstruct(y), params.tau);
    cert.worst_overlap = std::max(cert.worst_overlap, support_overlap(pixels, b));
    if (support_collides(pixels, b)) cert.safe = false;
  }
  return cert;
}

PlannerCertificate lts_superimpose_check(NodeId u, NodeId v, std::span<const NodeFeatures* const> members,
                                         const OccupancyMask& b) {
  PlannerCertificate cert = make_cert(PlannerId::LtsSuperimpose, u, v);
  std::vector<std::uint32_t> pixels;
  for (const NodeFeatures* f : members) {
    pixels.insert(pixels.end(), f->foreground.pixels.begin(), f->foreground.pixels.end());
  }
  score(cert, pixels, b);
  return cert;
}

PlannerCertificate itp_check(NodeId u, NodeId v, const TrackedPointSet& tp_u, const TrackedPointSet& tp_v,
                             const std::vector<ViewGeometry>& views, const OccupancyMask& b) {
  if (tp_u.points.size() != tp_v.points.size() || tp_u.views != tp_v.views) {
    throw Error(ErrorCode::DimensionMismatch, "tracked marker sets do not correspond");
  }
  std::vector<std::size_t> offsets{0};
  for (const ViewGeometry& view : views) offsets.push_back(offsets.back() + view.pixels());
  PlannerCertificate cert = make_cert(PlannerId::Itp, u, v);
  std::vector<std::uint32_t> pixels;
  for (std::size_t i = 0; i < tp_u.points.size(); ++i) {
    const std::size_t view = tp_u.views.empty() ? 0 : tp_u.views[i];
    if (view >= views.size()) throw Error(ErrorCode::DimensionMismatch, "marker view out of range");
    const std::size_t from = pixels.size();
    rasterize_line(tp_u.points[i], tp_v.points[i], views[view], pixels);
    offset_pixels(pixels, from, offsets[view]);
    cert.joins.emplace_back(tp_u.points[i], tp_v.points[i]);
  }
  score(cert, pixels, b);
  return cert;
}

PlannerCertificate jnst_check(NodeId u, NodeId v, const LinkFeatureSet& f_u, const LinkFeatureSet& f_v,
                              ViewGeometry view, const OccupancyMask& b) {
  if (f_u.links.size() != f_v.links.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature sets have different link counts");
  }
  PlannerCertificate cert = make_cert(PlannerId::Jnst, u, v);
  std::vector<std::uint32_t> pixels;
  const auto join = [&](std::span<const Vec2> from, std::span<const Vec2> to) {
    for (Vec2 p : from) {
      std::size_t best = 0;
      double best_sq = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < to.size(); ++j) {
        const Vec2 d = p - to[j];
        const double sq = d.x * d.x + d.y * d.y;
        if (sq < best_sq) {
          best_sq = sq;
          best = j;
        }
      }
      rasterize_line(p, to[best], view, pixels);
      cert.joins.emplace_back(p, to[best]);
    }
  };
  bool unmatched = false;
  for (std::size_t link = 0; link < f_u.links.size(); ++link) {
    const auto& a = f_u.links[link];
    const auto& c = f_v.links[link];
    if (a.empty() != c.empty()) {
      unmatched = true;
      cert.note += (cert.note.empty() ? "" : ",") + std::string("unmatched-link-") + std::to_string(link);
      continue;
    }
    join(a, c);
    join(c, a);
  }
  score(cert, pixels, b);
  if (unmatched) cert.safe = false;
  return cert;
}

GoldStandard::GoldStandard(const Scene& scene, const ObstacleImage& b)
    : scene_(scene), topo_(topology(scene.robot)), mask_(b.pixels) {
  if (!(scene.gold_epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "gold epsilon must be positive");
}

bool GoldStandard::node_free(const Configuration& q) const {
  return !support_collides(robot_coverage(q, scene_), mask_);
}

PlannerCertificate GoldStandard::check(const Configuration& q_u, const Configuration& q_v, NodeId u,
                                       NodeId v) const {
  PlannerCertificate cert = make_cert(PlannerId::GoldStandard, u, v);
  const std::vector<Configuration> poses = interpolate_configurations(q_u, q_v, scene_.gold_epsilon, topo_);
  const double steps = static_cast<double>(std::max<std::size_t>(1, poses.size() - 1));
  for (std::size_t i = 0; i < poses.size(); ++i) {
    cert.parameters.push_back(static_cast<double>(i) / steps);
    const std::vector<std::uint32_t> pixels = robot_coverage(poses[i], scene_);
    cert.worst_overlap = std::max(cert.worst_overlap, support_overlap(pixels, mask_));
    if (support_collides(pixels, mask_)) cert.safe = false;
  }
  return cert;
}

std::unique_ptr<EdgePlanner> make_planner(PlannerId id, std::size_t dof, LtsParams lts) {
  switch (id) {
    case PlannerId::None: return std::make_unique<NonePlanner>();
    case PlannerId::Lts: return std::make_unique<LtsPlanner>(dof, lts);
    case PlannerId::LtsSuperimpose: return std::make_unique<SuperimposePlanner>();
    case PlannerId::Itp: return std::make_unique<ItpPlanner>();
    case PlannerId::Jnst: return std::make_unique<JnstPlanner>();
    case PlannerId::GoldStandard: break;
  }
  throw Error(ErrorCode::InvalidArgument, "the gold standard needs a scene; use make_gold_planner");
}

std::unique_ptr<EdgePlanner> make_gold_planner(const GoldStandard& gold) {
  return std::make_unique<GoldPlanner>(gold);
}

}  // namespace vrm
