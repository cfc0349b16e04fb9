#pragma once

// Vector data -> weighted graphs -> (reduced) graph Laplacians.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "quac/error.hpp"
#include "quac/linalg.hpp"

namespace quac {

// ---------------------------------------------------------------------------
// PointCloud
// ---------------------------------------------------------------------------

/// Points stored row-wise with stable ids that survive subsampling.
class PointCloud {
 public:
  PointCloud() = default;

  explicit PointCloud(Matrix points) : points_(std::move(points)) {
    ids_.resize(static_cast<std::size_t>(points_.rows()));
    std::iota(ids_.begin(), ids_.end(), VertexId{0});
    build_index();
  }

  PointCloud(Matrix points, std::vector<VertexId> ids)
      : points_(std::move(points)), ids_(std::move(ids)) {
    if (static_cast<Eigen::Index>(ids_.size()) != points_.rows())
      throw InputError("PointCloud: ids and points differ in length");
    build_index();
  }

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  Eigen::Index dim() const { return points_.cols(); }

  const Matrix& points() const { return points_; }
  const std::vector<VertexId>& ids() const { return ids_; }
  VertexId id(std::size_t i) const { return ids_[i]; }
  auto point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }

  bool contains(VertexId id) const { return index_.count(id) != 0; }

  std::size_t index_of(VertexId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw InputError("PointCloud: unknown id " + std::to_string(id));
    return it->second;
  }

  auto point_by_id(VertexId id) const { return point(index_of(id)); }

  /// Rows `indices` (in the given order), ids preserved.
  PointCloud select(const std::vector<std::size_t>& indices) const {
    Matrix pts(static_cast<Eigen::Index>(indices.size()), dim());
    std::vector<VertexId> ids;
    ids.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
      pts.row(static_cast<Eigen::Index>(r)) = point(indices[r]);
      ids.push_back(ids_[indices[r]]);
    }
    return PointCloud(std::move(pts), std::move(ids));
  }

 private:
  void build_index() {
    if (!ids_.empty() && points_.cols() < 1)
      throw InputError("PointCloud: points must have dimension >= 1");
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (!index_.emplace(ids_[i], i).second)
        throw InputError("PointCloud: duplicate id " + std::to_string(ids_[i]));
  }

  Matrix points_;
  std::vector<VertexId> ids_;
  std::unordered_map<VertexId, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// WeightedGraph
// ---------------------------------------------------------------------------

struct Edge {
  std::size_t u;
  std::size_t v;
  double weight;
};

/// Undirected graph with symmetric, strictly positive edge weights. Vertices
/// are addressed by position; `vertex_ids` maps positions to data ids.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  explicit WeightedGraph(std::size_t n) : adjacency_(n), ids_(n) {
    std::iota(ids_.begin(), ids_.end(), VertexId{0});
    build_index();
  }

  explicit WeightedGraph(std::vector<VertexId> vertex_ids)
      : adjacency_(vertex_ids.size()), ids_(std::move(vertex_ids)) {
    build_index();
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<VertexId>& vertex_ids() const { return ids_; }
  VertexId vertex_id(std::size_t u) const { return ids_[u]; }

  std::size_t index_of(VertexId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw InputError("WeightedGraph: unknown vertex id " + std::to_string(id));
    return it->second;
  }

  /// Sets w(u,v) = w(v,u) = weight. A zero weight removes the edge.
  void set_edge(std::size_t u, std::size_t v, double weight) {
    if (u >= size() || v >= size()) throw InputError("WeightedGraph: vertex out of range");
    if (u == v) throw InputError("WeightedGraph: self-loops are not allowed");
    if (!(weight >= 0.0) || !std::isfinite(weight))
      throw InputError("WeightedGraph: edge weights must be finite and nonnegative");
    if (weight == 0.0) {
      adjacency_[u].erase(v);
      adjacency_[v].erase(u);
      return;
    }
    adjacency_[u][v] = weight;
    adjacency_[v][u] = weight;
  }

  double weight(std::size_t u, std::size_t v) const {
    auto it = adjacency_[u].find(v);
    return it == adjacency_[u].end() ? 0.0 : it->second;
  }

  const std::map<std::size_t, double>& neighbors(std::size_t u) const { return adjacency_[u]; }

  double degree(std::size_t u) const {
    double d = 0.0;
    for (const auto& [v, w] : adjacency_[u]) d += w;
    return d;
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nb : adjacency_) twice += nb.size();
    return twice / 2;
  }

  /// Edges with u < v, ordered lexicographically.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t u = 0; u < size(); ++u)
      for (const auto& [v, w] : adjacency_[u])
        if (u < v) out.push_back({u, v, w});
    return out;
  }

  /// Subgraph induced on `keep` (positions, kept in the given order).
  WeightedGraph induced(const std::vector<std::size_t>& keep) const {
    std::vector<VertexId> ids;
    ids.reserve(keep.size());
    std::unordered_map<std::size_t, std::size_t> remap;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      ids.push_back(ids_.at(keep[i]));
      remap.emplace(keep[i], i);
    }
    WeightedGraph sub(std::move(ids));
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (const auto& [v, w] : adjacency_[keep[i]]) {
        auto it = remap.find(v);
        if (it != remap.end() && i < it->second) sub.set_edge(i, it->second, w);
      }
    return sub;
  }

 private:
  void build_index() {
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (!index_.emplace(ids_[i], i).second)
        throw InputError("WeightedGraph: duplicate vertex id " + std::to_string(ids_[i]));
  }

  std::vector<std::map<std::size_t, double>> adjacency_;
  std::vector<VertexId> ids_;
  std::unordered_map<VertexId, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// LaplacianMatrix / MarkSet
// ---------------------------------------------------------------------------

/// Dense symmetric L(G) + W with row/column -> vertex id mapping.
class LaplacianMatrix {
 public:
  LaplacianMatrix() = default;

  LaplacianMatrix(Matrix entries, std::vector<VertexId> vertex_ids)
      : entries_(std::move(entries)), ids_(std::move(vertex_ids)) {
    if (entries_.rows() != entries_.cols())
      throw InputError("LaplacianMatrix: matrix must be square");
    if (static_cast<Eigen::Index>(ids_.size()) != entries_.rows())
      throw InputError("LaplacianMatrix: vertex_ids size mismatch");
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (!index_.emplace(ids_[i], i).second)
        throw InputError("LaplacianMatrix: duplicate vertex id");
  }

  std::size_t size() const { return ids_.size(); }
  const Matrix& entries() const { return entries_; }
  const std::vector<VertexId>& vertex_ids() const { return ids_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  bool contains(VertexId id) const { return index_.count(id) != 0; }

  std::size_t index_of(VertexId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw InputError("LaplacianMatrix: unknown vertex id " + std::to_string(id));
    return it->second;
  }

 private:
  Matrix entries_;
  std::vector<VertexId> ids_;
  std::unordered_map<VertexId, std::size_t> index_;
};

/// Vertex ids carrying the Dirichlet boundary condition.
class MarkSet {
 public:
  MarkSet() = default;
  MarkSet(std::initializer_list<VertexId> ids) : marks_(ids) {}
  template <class It>
  MarkSet(It first, It last) : marks_(first, last) {}
  explicit MarkSet(const std::vector<VertexId>& ids) : marks_(ids.begin(), ids.end()) {}

  bool contains(VertexId id) const { return marks_.count(id) != 0; }
  std::size_t size() const { return marks_.size(); }
  bool empty() const { return marks_.empty(); }
  void insert(VertexId id) { marks_.insert(id); }
  auto begin() const { return marks_.begin(); }
  auto end() const { return marks_.end(); }

  /// Throws unless every mark is a vertex of `L` and one vertex stays unmarked.
  void validate_for(const LaplacianMatrix& L) const {
    for (VertexId m : marks_)
      if (!L.contains(m))
        throw InputError("MarkSet: mark " + std::to_string(m) + " is not a vertex");
    if (marks_.size() >= L.size())
      throw InputError("MarkSet: at least one vertex must remain unmarked");
  }

 private:
  std::set<VertexId> marks_;
};

/// Marked rows/columns are deleted (the Dirichlet restriction).
struct DeleteMarked {};
/// Marked diagonal entries get a large weight instead; dimension is kept.
struct PenalizeMarked {
  double weight = 1e6;
};
using MarkingMode = std::variant<DeleteMarked, PenalizeMarked>;

using VertexWeights = std::map<VertexId, double>;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Unit-weight edge between every pair with ||x_u - x_v|| < eps (strict).
inline WeightedGraph build_epsilon_graph(const PointCloud& cloud, double eps) {
  if (!(eps > 0.0)) throw ParameterError("build_epsilon_graph: eps must be positive");
  if (cloud.empty()) throw InputError("build_epsilon_graph: empty point cloud");
  WeightedGraph g(cloud.ids());
  const double eps2 = eps * eps;
  const Matrix& x = cloud.points();
  for (Eigen::Index u = 0; u < x.rows(); ++u)
    for (Eigen::Index v = u + 1; v < x.rows(); ++v)
      if ((x.row(u) - x.row(v)).squaredNorm() < eps2)
        g.set_edge(static_cast<std::size_t>(u), static_cast<std::size_t>(v), 1.0);
  return g;
}

/// L(G) + W: diagonal d_u + W(u), off-diagonal -w(u,v). Missing weights are 0.
inline LaplacianMatrix graph_laplacian(const WeightedGraph& g,
                                       const VertexWeights& vertex_weights = {}) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix L = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    L(u, v) -= e.weight;
    L(v, u) -= e.weight;
    L(u, u) += e.weight;
    L(v, v) += e.weight;
  }
  for (const auto& [id, w] : vertex_weights) {
    const auto u = static_cast<Eigen::Index>(g.index_of(id));
    L(u, u) += w;
  }
  return LaplacianMatrix(std::move(L), g.vertex_ids());
}

inline LaplacianMatrix reduced_laplacian(const LaplacianMatrix& L, const MarkSet& marks,
                                         const MarkingMode& mode = DeleteMarked{}) {
  marks.validate_for(L);
  if (const auto* penalty = std::get_if<PenalizeMarked>(&mode)) {
    if (!(penalty->weight > 0.0))
      throw ParameterError("reduced_laplacian: penalty weight must be positive");
    Matrix m = L.entries();
    for (VertexId id : marks) {
      const auto i = static_cast<Eigen::Index>(L.index_of(id));
      m(i, i) += penalty->weight;
    }
    return LaplacianMatrix(std::move(m), L.vertex_ids());
  }
  std::vector<Eigen::Index> keep;
  std::vector<VertexId> ids;
  for (std::size_t i = 0; i < L.size(); ++i)
    if (!marks.contains(L.vertex_ids()[i])) {
      keep.push_back(static_cast<Eigen::Index>(i));
      ids.push_back(L.vertex_ids()[i]);
    }
  const auto r = static_cast<Eigen::Index>(keep.size());
  Matrix m(r, r);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b) m(a, b) = L.entries()(keep[a], keep[b]);
  return LaplacianMatrix(std::move(m), std::move(ids));
}

namespace detail {

template <class NeighborFn>
std::vector<std::vector<std::size_t>> components_by_index(std::size_t n, NeighborFn&& neighbors) {
  std::vector<int> seen(n, 0);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::queue<std::size_t> frontier;
    frontier.push(s);
    seen[s] = 1;
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      comp.push_back(u);
      neighbors(u, [&](std::size_t v) {
        if (!seen[v]) {
          seen[v] = 1;
          frontier.push(v);
        }
      });
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

inline std::vector<std::vector<std::size_t>> component_indices(const WeightedGraph& g) {
  return components_by_index(g.size(), [&](std::size_t u, auto&& visit) {
    for (const auto& [v, w] : g.neighbors(u)) visit(v);
  });
}

}  // namespace detail

/// Maximal connected subgraphs as vertex-id lists, ordered by first vertex.
inline std::vector<std::vector<VertexId>> connected_components(const WeightedGraph& g) {
  std::vector<std::vector<VertexId>> out;
  for (const auto& comp : detail::component_indices(g)) {
    std::vector<VertexId> ids;
    ids.reserve(comp.size());
    for (std::size_t u : comp) ids.push_back(g.vertex_id(u));
    out.push_back(std::move(ids));
  }
  return out;
}

/// Components of the graph underlying a Laplacian (nonzero off-diagonals).
inline std::vector<std::vector<VertexId>> connected_components(const LaplacianMatrix& L) {
  const Matrix& m = L.entries();
  auto comps = detail::components_by_index(L.size(), [&](std::size_t u, auto&& visit) {
    for (Eigen::Index v = 0; v < m.cols(); ++v)
      if (static_cast<std::size_t>(v) != u && m(static_cast<Eigen::Index>(u), v) != 0.0)
        visit(static_cast<std::size_t>(v));
  });
  std::vector<std::vector<VertexId>> out;
  for (const auto& comp : comps) {
    std::vector<VertexId> ids;
    for (std::size_t u : comp) ids.push_back(L.vertex_ids()[u]);
    out.push_back(std::move(ids));
  }
  return out;
}

/// Drops vertices in components smaller than max(2, ceil(fraction * n)).
inline WeightedGraph remove_outliers(const WeightedGraph& g, double min_component_fraction) {
  if (!(min_component_fraction > 0.0 && min_component_fraction < 1.0))
    throw ParameterError("remove_outliers: fraction must lie in (0, 1)");
  const auto threshold = std::max<std::size_t>(
      2, static_cast<std::size_t>(
             std::ceil(min_component_fraction * static_cast<double>(g.size()) - 1e-12)));
  std::vector<std::size_t> keep;
  for (const auto& comp : detail::component_indices(g))
    if (comp.size() >= threshold) keep.insert(keep.end(), comp.begin(), comp.end());
  if (keep.empty()) throw InputError("remove_outliers: every vertex would be removed");
  std::sort(keep.begin(), keep.end());
  return g.induced(keep);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const WeightedGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, e.weight});
  return {{"n", g.size()}, {"edges", std::move(edges)}, {"vertex_ids", g.vertex_ids()}};
}

inline WeightedGraph graph_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw InputError("graph JSON: expected an object");
    const auto n = doc.at("n").get<std::size_t>();
    std::vector<VertexId> ids;
    if (doc.contains("vertex_ids")) {
      ids = doc.at("vertex_ids").get<std::vector<VertexId>>();
    } else {
      ids.resize(n);
      std::iota(ids.begin(), ids.end(), VertexId{0});
    }
    if (ids.size() != n) throw InputError("graph JSON: vertex_ids length differs from n");
    WeightedGraph g(std::move(ids));
    for (const auto& e : doc.at("edges"))
      g.set_edge(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>());
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
}

/// Laplacians use the graph document plus `vertex_weights` (row sums) when
/// any are nonzero.
inline nlohmann::json to_json(const LaplacianMatrix& L) {
  const Matrix& m = L.entries();
  nlohmann::json edges = nlohmann::json::array();
  nlohmann::json weights = nlohmann::json::array();
  bool any_weight = false;
  for (Eigen::Index u = 0; u < m.rows(); ++u) {
    for (Eigen::Index v = u + 1; v < m.cols(); ++v)
      if (m(u, v) != 0.0) edges.push_back({u, v, -m(u, v)});
    const double w = m.row(u).sum();
    any_weight = any_weight || std::abs(w) > 0.0;
    weights.push_back(w);
  }
  nlohmann::json doc = {{"n", L.size()}, {"edges", std::move(edges)}, {"vertex_ids", L.vertex_ids()}};
  if (any_weight) doc["vertex_weights"] = std::move(weights);
  return doc;
}

inline LaplacianMatrix laplacian_from_json(const nlohmann::json& doc) {
  WeightedGraph g = graph_from_json(doc);
  VertexWeights w;
  if (doc.contains("vertex_weights")) {
    const auto values = doc.at("vertex_weights").get<std::vector<double>>();
    if (values.size() != g.size()) throw InputError("Laplacian JSON: vertex_weights length");
    for (std::size_t i = 0; i < values.size(); ++i) w[g.vertex_id(i)] = values[i];
  }
  return graph_laplacian(g, w);
}

/// Dense CSV dump (one row per line, full precision).
inline void write_matrix_csv(std::ostream& os, const Matrix& m) {
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
}

}  // namespace quac
