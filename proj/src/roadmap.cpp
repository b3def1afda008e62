#include "vrm/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "vrm/planners.hpp"
#include "vrm/render.hpp"

namespace vrm {

namespace {

// Ordering of candidates: distance, then node id.
bool closer(const Neighbour& a, const Neighbour& b) {
  return a.weight < b.weight || (a.weight == b.weight && a.node < b.node);
}

// Bounded max-heap keeping the `cap` closest candidates.
class Candidates {
 public:
  explicit Candidates(std::size_t cap) : cap_(cap) { heap_.reserve(cap + 1); }

  void offer(Neighbour n) {
    if (heap_.size() < cap_) {
      heap_.push_back(n);
      std::push_heap(heap_.begin(), heap_.end(), closer);
    } else if (closer(n, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), closer);
      heap_.back() = n;
      std::push_heap(heap_.begin(), heap_.end(), closer);
    }
  }

  std::vector<Neighbour> sorted() const {
    std::vector<Neighbour> out = heap_;
    std::sort(out.begin(), out.end(), closer);
    return out;
  }

 private:
  std::size_t cap_;
  std::vector<Neighbour> heap_;
};

void add_undirected(std::vector<std::vector<Neighbour>>& adj, NodeId a, NodeId b, double w) {
  adj[a].push_back({b, w});
  adj[b].push_back({a, w});
}

void sort_adjacency(std::vector<Neighbour>& list) {
  std::sort(list.begin(), list.end(), [](const Neighbour& x, const Neighbour& y) { return x.node < y.node; });
  list.erase(std::unique(list.begin(), list.end(),
                         [](const Neighbour& x, const Neighbour& y) { return x.node == y.node; }),
             list.end());
}

std::vector<Edge> collect_edges(const std::vector<std::vector<Neighbour>>& adj) {
  std::vector<Edge> out;
  for (NodeId a = 0; a < adj.size(); ++a) {
    for (const Neighbour& n : adj[a]) {
      if (a < n.node) out.push_back({a, n.node, n.weight});
    }
  }
  return out;
}

void check_raster(const NodeFeatures& f, const ImageBuffer& b) {
  if (f.foreground.views != b.views()) {
    throw Error(ErrorCode::GeometryMismatch, "obstacle raster does not match the dataset");
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[static_cast<std::size_t>(i + radius)];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable blur of one delta image, per view and channel; zero padding.
SparseDelta blurred(const NodeFeatures& f, const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::size_t total = 0;
  for (const ViewGeometry& v : f.foreground.views) total += v.pixels();
  std::vector<double> dense(3 * total, 0.0);
  for (std::size_t i = 0; i < f.delta_components.size(); ++i) {
    dense[f.delta_components[i]] = f.delta_values[i] / 255.0;
  }
  std::vector<double> tmp(dense.size(), 0.0);
  std::size_t offset = 0;
  for (const ViewGeometry& view : f.foreground.views) {
    const auto at = [&](std::vector<double>& buf, int r, int c, int ch) -> double& {
      return buf[3 * (offset + static_cast<std::size_t>(r) * view.cols + c) + ch];
    };
    for (int r = 0; r < view.rows; ++r) {
      for (int c = 0; c < view.cols; ++c) {
        for (int ch = 0; ch < 3; ++ch) {
          double s = 0.0;
          for (int d = -radius; d <= radius; ++d) {
            if (c + d >= 0 && c + d < view.cols) s += kernel[d + radius] * at(dense, r, c + d, ch);
          }
          at(tmp, r, c, ch) = s;
        }
      }
    }
    for (int r = 0; r < view.rows; ++r) {
      for (int c = 0; c < view.cols; ++c) {
        for (int ch = 0; ch < 3; ++ch) {
          double s = 0.0;
          for (int d = -radius; d <= radius; ++d) {
            if (r + d >= 0 && r + d < view.rows) s += kernel[d + radius] * at(tmp, r + d, c, ch);
          }
          at(dense, r, c, ch) = s;
        }
      }
    }
    offset += view.pixels();
  }
  SparseDelta out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (std::abs(dense[i]) > 1e-9) {
      out.components.push_back(static_cast<std::uint32_t>(i));
      out.values.push_back(dense[i]);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

VisualRoadmap::VisualRoadmap(NodeStore nodes, MetricId metric, std::size_t k,
                             std::vector<std::vector<Neighbour>> knn)
    : nodes_(std::move(nodes)), metric_(metric), k_(k), knn_(std::move(knn)) {
  adjacency_.resize(knn_.size());
  for (NodeId i = 0; i < knn_.size(); ++i) {
    for (const Neighbour& n : knn_[i]) add_undirected(adjacency_, i, n.node, n.weight);
  }
  for (auto& list : adjacency_) sort_adjacency(list);
}

std::vector<Edge> VisualRoadmap::edges() const { return collect_edges(adjacency_); }

std::size_t VisualRoadmap::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

bool VisualRoadmap::connected() const {
  if (adjacency_.empty()) return true;
  std::vector<bool> seen(adjacency_.size(), false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const NodeId a = stack.back();
    stack.pop_back();
    for (const Neighbour& n : adjacency_[a]) {
      if (!seen[n.node]) {
        seen[n.node] = true;
        ++count;
        stack.push_back(n.node);
      }
    }
  }
  return count == adjacency_.size();
}

VisualRoadmap build_graph(NodeStore nodes, const Metric& metric, std::size_t k) {
  const std::size_t n = nodes->size();
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (n < k + 1) {
    throw Error(ErrorCode::InsufficientNodes,
                "need at least k+1 = " + std::to_string(k + 1) + " nodes, got " + std::to_string(n));
  }
  for (const NodeFeatures& f : *nodes) metric.require(f);

  std::unique_ptr<PairwiseEvaluator> eval = metric.evaluator(*nodes);
  const bool exact = eval->exact();
  const std::size_t cap = std::min(n - 1, exact ? k : 3 * k);
  std::vector<Candidates> best(n, Candidates(cap));
  std::vector<double> row(n);
  for (NodeId i = 0; i + 1 < n; ++i) {
    const std::span<double> out(row.data(), n - i - 1);
    eval->upper_row(i, out);
    for (NodeId j = i + 1; j < n; ++j) {
      const double d = out[j - i - 1];
      best[i].offer({j, d});
      best[j].offer({i, d});
    }
  }

  std::vector<std::vector<Neighbour>> knn(n);
  for (NodeId i = 0; i < n; ++i) {
    std::vector<Neighbour> list = best[i].sorted();
    if (!exact) {
      for (Neighbour& c : list) c.weight = metric.distance((*nodes)[i], (*nodes)[c.node]);
      std::sort(list.begin(), list.end(), closer);
    }
    list.resize(k);
    knn[i] = std::move(list);
  }
  return VisualRoadmap(std::move(nodes), metric.id(), k, std::move(knn));
}

// ---------------------------------------------------------------------------

const std::vector<PlannerId>& visual_planners() {
  static const std::vector<PlannerId> ids{PlannerId::None, PlannerId::Lts, PlannerId::Itp, PlannerId::Jnst};
  return ids;
}

std::string to_string(PlannerId id) {
  switch (id) {
    case PlannerId::None: return "none";
    case PlannerId::Lts: return "lts";
    case PlannerId::LtsSuperimpose: return "lts-superimpose";
    case PlannerId::Itp: return "itp";
    case PlannerId::Jnst: return "jnst";
    case PlannerId::GoldStandard: return "gold";
  }
  return "unknown";
}

PlannerId parse_planner(const std::string& name) {
  for (PlannerId id : {PlannerId::None, PlannerId::Lts, PlannerId::LtsSuperimpose, PlannerId::Itp,
                       PlannerId::Jnst, PlannerId::GoldStandard}) {
    if (to_string(id) == name) return id;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown planner '" + name + "'");
}

void write_certificate(std::ostream& out, const PlannerCertificate& cert) {
  out << to_string(cert.planner) << ' ' << cert.u << ' ' << cert.v << ' '
      << (cert.safe ? "safe" : "unsafe") << ' ' << cert.worst_overlap;
  if (!cert.parameters.empty()) {
    out << " alpha=";
    for (std::size_t i = 0; i < cert.parameters.size(); ++i) {
      out << (i ? "," : "") << cert.parameters[i];
    }
  }
  if (!cert.joins.empty()) out << " joins=" << cert.joins.size();
  if (!cert.note.empty()) out << " note=" << cert.note;
  out << '\n';
}

// ---------------------------------------------------------------------------

PrunedRoadmap::PrunedRoadmap(const VisualRoadmap& base)
    : base_(std::make_shared<VisualRoadmap>(base)), alive_(base.size(), 1) {
  adjacency_.resize(base.size());
  for (NodeId i = 0; i < base.size(); ++i) adjacency_[i] = base.adjacent(i);
}

const NodeFeatures& PrunedRoadmap::node(NodeId i) const {
  return i < base_->size() ? base_->node(i) : queries_[i - base_->size()];
}

std::size_t PrunedRoadmap::alive_count() const {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), 1));
}

std::optional<double> PrunedRoadmap::edge_weight(NodeId a, NodeId b) const {
  const auto& list = adjacency_[a];
  auto it = std::lower_bound(list.begin(), list.end(), b,
                             [](const Neighbour& n, NodeId id) { return n.node < id; });
  if (it == list.end() || it->node != b) return std::nullopt;
  return it->weight;
}

std::vector<Edge> PrunedRoadmap::edges() const { return collect_edges(adjacency_); }

std::size_t PrunedRoadmap::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

const PlannerCertificate* PrunedRoadmap::certificate(NodeId a, NodeId b) const {
  auto it = certificates_.find({std::min(a, b), std::max(a, b)});
  return it == certificates_.end() ? nullptr : &it->second;
}

void PrunedRoadmap::remove_edge(NodeId a, NodeId b, std::string reason) {
  const auto drop = [](std::vector<Neighbour>& list, NodeId id) {
    list.erase(std::remove_if(list.begin(), list.end(), [id](const Neighbour& n) { return n.node == id; }),
               list.end());
  };
  drop(adjacency_[a], b);
  drop(adjacency_[b], a);
  removed_edges_.push_back({std::min(a, b), std::max(a, b), std::move(reason)});
}

PrunedRoadmap prune_obstacle_nodes(const VisualRoadmap& graph, const ObstacleImage& b) {
  PrunedRoadmap out(graph);
  const OccupancyMask mask(b.pixels);
  for (NodeId i = 0; i < graph.size(); ++i) {
    const NodeFeatures& f = graph.node(i);
    check_raster(f, b.pixels);
    ++out.overlap_tests_;
    if (!mask.empty() && support_collides(f.foreground.pixels, mask)) {
      out.alive_[i] = 0;
      out.removed_nodes_.push_back({i, "overlap " + std::to_string(support_overlap(f.foreground.pixels, mask))});
    }
  }
  for (NodeId i = 0; i < graph.size(); ++i) {
    auto& list = out.adjacency_[i];
    if (!out.alive_[i]) {
      list.clear();
      continue;
    }
    list.erase(std::remove_if(list.begin(), list.end(), [&](const Neighbour& n) { return !out.alive_[n.node]; }),
               list.end());
  }
  return out;
}

PrunedRoadmap prune_unsafe_edges(const PrunedRoadmap& graph, const EdgePlanner& planner,
                                 const ObstacleImage& b) {
  PrunedRoadmap out = graph;
  const OccupancyMask mask(b.pixels);
  const std::vector<Edge> edges = graph.edges();
  for (const Edge& e : edges) {
    planner.require(graph.node(e.a));
    planner.require(graph.node(e.b));
  }
  for (const Edge& e : edges) {
    // Checks read the input graph, so results do not depend on edge order.
    PlannerCertificate cert = planner.check(graph, e.a, e.b, mask);
    if (!cert.safe) out.remove_edge(e.a, e.b, to_string(planner.id()) + " unsafe");
    out.certificates_[{e.a, e.b}] = std::move(cert);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct QueryInserter {
  static NodeId add(PrunedRoadmap& g, const NodeFeatures& q, const Metric& metric,
                    const EdgePlanner& planner, const OccupancyMask& mask, std::size_t k,
                    const std::vector<NodeId>& candidates, const char* label) {
    const NodeId id = g.size();
    std::vector<Neighbour> dist;
    dist.reserve(candidates.size());
    for (NodeId c : candidates) {
      dist.push_back({c, metric.distance(q, g.node(c))});
      ++g.query_distances_;
    }
    const std::size_t keep = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(keep), dist.end(), closer);
    dist.resize(keep);

    g.queries_.push_back(q);
    g.alive_.push_back(1);
    g.adjacency_.emplace_back();
    std::size_t accepted = 0;
    for (const Neighbour& n : dist) {
      add_undirected(g.adjacency_, id, n.node, n.weight);
      sort_adjacency(g.adjacency_[n.node]);
      sort_adjacency(g.adjacency_[id]);
      PlannerCertificate cert = planner.check(g, n.node, id, mask);
      if (cert.safe) {
        ++accepted;
      } else {
        g.remove_edge(n.node, id, to_string(planner.id()) + " unsafe");
      }
      g.certificates_[{n.node, id}] = std::move(cert);
    }
    if (accepted == 0) {
      throw Error(ErrorCode::IsolatedQuery, std::string(label) + " has no safe edge to the roadmap");
    }
    return id;
  }
};

std::pair<PrunedRoadmap, QueryNodes> insert_query(const PrunedRoadmap& graph, const NodeFeatures& s,
                                                  const NodeFeatures& t, const Metric& metric,
                                                  const EdgePlanner& planner, const ObstacleImage& b,
                                                  std::size_t k) {
  const OccupancyMask mask(b.pixels);
  for (const auto& [f, label] : {std::pair{&s, "start"}, std::pair{&t, "goal"}}) {
    check_raster(*f, b.pixels);
    metric.require(*f);
    planner.require(*f);
    if (support_collides(f->foreground.pixels, mask)) {
      throw Error(ErrorCode::QueryInCollision, std::string(label) + " pose overlaps the obstacle image");
    }
  }
  std::vector<NodeId> candidates;
  for (NodeId i = 0; i < graph.size(); ++i) {
    if (graph.alive(i)) candidates.push_back(i);
  }
  PrunedRoadmap out = graph;
  QueryNodes ids;
  ids.s = QueryInserter::add(out, s, metric, planner, mask, k, candidates, "start");
  ids.t = QueryInserter::add(out, t, metric, planner, mask, k, candidates, "goal");
  return {std::move(out), ids};
}

// ---------------------------------------------------------------------------

PathResult shortest_path(const std::vector<std::vector<Neighbour>>& adjacency, NodeId s, NodeId t) {
  const std::size_t n = adjacency.size();
  if (s >= n || t >= n) throw Error(ErrorCode::InvalidArgument, "query node out of range");
  PathResult result;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<NodeId> parent(n, n);
  std::vector<bool> settled(n, false);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[s] = 0.0;
  heap.push({0.0, s});
  while (!heap.empty()) {
    const auto [d, a] = heap.top();
    heap.pop();
    ++result.heap_pops;
    if (settled[a]) continue;
    settled[a] = true;
    ++result.settled;
    if (a == t) break;
    for (const Neighbour& nb : adjacency[a]) {
      const double nd = d + nb.weight;
      if (!settled[nb.node] && nd < dist[nb.node]) {
        dist[nb.node] = nd;
        parent[nb.node] = a;
        heap.push({nd, nb.node});
      }
    }
  }
  if (!settled[t]) return result;
  result.found = true;
  result.weight = dist[t];
  for (NodeId v = t; v != s; v = parent[v]) result.nodes.push_back(v);
  result.nodes.push_back(s);
  std::reverse(result.nodes.begin(), result.nodes.end());
  return result;
}

PathResult shortest_path(const PrunedRoadmap& graph, NodeId s, NodeId t) {
  if (s >= graph.size() || t >= graph.size() || !graph.alive(s) || !graph.alive(t)) {
    throw Error(ErrorCode::InvalidArgument, "query node is not in the roadmap");
  }
  std::vector<std::vector<Neighbour>> adjacency(graph.size());
  for (NodeId i = 0; i < graph.size(); ++i) adjacency[i] = graph.adjacent(i);
  PathResult result = shortest_path(adjacency, s, t);
  for (std::size_t i = 0; i + 1 < result.nodes.size(); ++i) {
    if (const PlannerCertificate* c = graph.certificate(result.nodes[i], result.nodes[i + 1])) {
      result.certificates.push_back(*c);
    } else {
      PlannerCertificate unchecked;
      unchecked.u = std::min(result.nodes[i], result.nodes[i + 1]);
      unchecked.v = std::max(result.nodes[i], result.nodes[i + 1]);
      unchecked.note = "unchecked";
      result.certificates.push_back(unchecked);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

ScreeResult intrinsic_dimension(std::span<const NodeFeatures> nodes, const ScreeOptions& options) {
  if (nodes.size() < options.k + 1) {
    throw Error(ErrorCode::InsufficientNodes, "scree needs at least k+1 images");
  }
  if (options.d_max == 0) throw Error(ErrorCode::InvalidArgument, "d_max must be positive");
  auto store = std::make_shared<std::vector<NodeFeatures>>(nodes.begin(), nodes.end());
  const auto metric = make_metric(MetricId::ImageL2, {}, 0.0);
  const VisualRoadmap graph = build_graph(store, *metric, options.k);

  std::vector<SparseDelta> deltas;
  deltas.reserve(nodes.size());
  if (options.smoothing_sigma > 0.0) {
    const std::vector<double> kernel = gaussian_kernel(options.smoothing_sigma);
    for (const NodeFeatures& f : nodes) deltas.push_back(blurred(f, kernel));
  } else {
    for (const NodeFeatures& f : nodes) deltas.push_back(delta_of(f));
  }

  ScreeResult result;
  result.residual.assign(options.d_max, 0.0);
  std::size_t used = 0;
  for (NodeId i = 0; i < nodes.size(); ++i) {
    std::vector<SparseDelta> members{deltas[i]};
    for (const Neighbour& n : graph.nearest(i)) members.push_back(deltas[n.node]);
    const LocalChart chart = build_chart(members, 1);
    const double total = chart.eigenvalues.sum();
    if (chart.degenerate || !(total > 0.0)) {
      result.degenerate.push_back(i);
      continue;
    }
    double captured = 0.0;
    for (std::size_t d = 0; d < options.d_max; ++d) {
      if (static_cast<Eigen::Index>(d) < chart.eigenvalues.size()) captured += chart.eigenvalues(static_cast<Eigen::Index>(d));
      result.residual[d] += std::max(0.0, 1.0 - captured / total);
    }
    ++used;
  }
  if (used > 0) {
    for (double& r : result.residual) r /= static_cast<double>(used);
  }
  return result;
}

// ---------------------------------------------------------------------------

InverseKinematicsResult inverse_kinematics(const NodeFeatures& x, const PrunedRoadmap& graph,
                                           const ImageBuffer& background, std::size_t chart_dim,
                                           std::size_t k) {
  if (x.foreground.views != background.views()) {
    throw Error(ErrorCode::GeometryMismatch, "query raster does not match the dataset");
  }
  std::vector<Neighbour> dist;
  std::vector<double> nn;
  for (NodeId i = 0; i < graph.size(); ++i) {
    if (!graph.alive(i)) continue;
    dist.push_back({i, delta_l2(x, graph.node(i))});
    double nearest = std::numeric_limits<double>::infinity();
    for (const Neighbour& n : graph.adjacent(i)) nearest = std::min(nearest, n.weight);
    if (std::isfinite(nearest)) nn.push_back(nearest);
  }
  if (dist.empty()) throw Error(ErrorCode::InsufficientNodes, "roadmap has no surviving nodes");
  const std::size_t keep = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(keep), dist.end(), closer);
  dist.resize(keep);

  InverseKinematicsResult out;
  for (const Neighbour& n : dist) out.neighbours.push_back(n.node);
  out.nearest_distance = dist.front().weight;
  if (!nn.empty()) {
    std::sort(nn.begin(), nn.end());
    const std::size_t idx = std::min(nn.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * nn.size())) - 1);
    out.out_of_manifold = out.nearest_distance > nn[idx];
  }

  const SparseDelta xd = delta_of(x);
  std::vector<SparseDelta> members;
  for (NodeId id : out.neighbours) members.push_back(delta_of(graph.node(id)));
  for (std::size_t i = 0; i < members.size(); ++i) {
    out.diameter = std::max(out.diameter, dist[i].weight);
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      out.diameter = std::max(out.diameter, delta_l2(graph.node(out.neighbours[i]), graph.node(out.neighbours[j])));
    }
  }

  ImageBuffer recon = background;
  if (out.nearest_distance == 0.0) {
    out.weights.assign(keep, 0.0);
    out.weights.front() = 1.0;
    const auto src = x.delta_components;
    auto data = recon.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      data[src[i]] = static_cast<std::uint8_t>(int{data[src[i]]} + x.delta_values[i]);
    }
    out.reconstruction = std::move(recon);
    return out;
  }

  Eigen::VectorXd xhat;
  std::vector<std::uint32_t> comps;
  if (members.size() == 1) {
    out.weights = {1.0};
    comps = members.front().components;
    xhat = Eigen::Map<const Eigen::VectorXd>(members.front().values.data(),
                                              static_cast<Eigen::Index>(members.front().values.size()));
  } else {
    const LocalChart chart = build_chart(members, chart_dim);
    const Eigen::VectorXd y = chart.project(xd);
    xhat = chart.reconstruct(y);
    comps = chart.components;
    // Minimum-norm affine weights: Y w = y, sum(w) = 1.
    const Eigen::Index m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd a(chart.coords.rows() + 1, m);
    a.topRows(chart.coords.rows()) = chart.coords;
    a.row(chart.coords.rows()).setOnes();
    Eigen::VectorXd rhs(chart.coords.rows() + 1);
    rhs.head(chart.coords.rows()) = y;
    rhs(chart.coords.rows()) = 1.0;
    const Eigen::VectorXd w = a.completeOrthogonalDecomposition().solve(rhs);
    out.weights.assign(w.data(), w.data() + w.size());
  }

  // Residual over the union of the chart and query supports.
  double sq = 0.0;
  std::size_t i = 0, j = 0;
  while (i < comps.size() || j < xd.components.size()) {
    double diff;
    if (j == xd.components.size() || (i < comps.size() && comps[i] < xd.components[j])) {
      diff = -xhat(static_cast<Eigen::Index>(i++));
    } else if (i == comps.size() || xd.components[j] < comps[i]) {
      diff = xd.values[j++];
    } else {
      diff = xd.values[j++] - xhat(static_cast<Eigen::Index>(i++));
    }
    sq += diff * diff;
  }
  out.residual = std::sqrt(sq);

  auto data = recon.data();
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const double v = data[comps[c]] + 255.0 * xhat(static_cast<Eigen::Index>(c));
    data[comps[c]] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  out.reconstruction = std::move(recon);
  return out;
}

// ---------------------------------------------------------------------------

void write_edge_list(std::ostream& out, const PrunedRoadmap& graph) {
  out.precision(17);
  for (const Edge& e : graph.edges()) out << e.a << ' ' << e.b << ' ' << e.weight << '\n';
}

void write_prune_log(std::ostream& out, const PrunedRoadmap& graph) {
  for (const NodeRemoval& r : graph.removed_nodes()) out << "node " << r.node << ' ' << r.reason << '\n';
  for (const EdgeRemoval& r : graph.removed_edges()) {
    out << "edge " << r.a << ' ' << r.b << ' ' << r.reason << '\n';
  }
}

void write_certificate_log(std::ostream& out, const PrunedRoadmap& graph) {
  for (const auto& [key, cert] : graph.certificates()) write_certificate(out, cert);
}

}  // namespace vrm
