#pragma once

#include <vector>

#include "quac/quac.hpp"

namespace support {

using namespace quac;

inline WeightedGraph path_graph(std::size_t n) {
  WeightedGraph g(n);
  for (std::size_t i = 0; i + 1 < n; ++i) g.set_edge(i, i + 1, 1.0);
  return g;
}

inline WeightedGraph complete_graph(std::size_t n) {
  WeightedGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.set_edge(i, j, 1.0);
  return g;
}

/// Disjoint union of cliques with consecutive vertex ids.
inline WeightedGraph cliques(const std::vector<std::size_t>& sizes) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  WeightedGraph g(n);
  std::size_t base = 0;
  for (auto s : sizes) {
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = i + 1; j < s; ++j) g.set_edge(base + i, base + j, 1.0);
    base += s;
  }
  return g;
}

/// Erdos-Renyi graph; `edges` receives the pairs actually inserted.
inline WeightedGraph random_graph(std::size_t n, double p, Rng& rng,
                                  std::vector<std::pair<int, int>>* edges = nullptr) {
  WeightedGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < p) {
        g.set_edge(i, j, 1.0);
        if (edges) edges->emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
  return g;
}

inline PointCloud cloud_1d(const std::vector<double>& xs) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = xs[i];
  return PointCloud(m);
}

inline PointCloud cloud_2d(const std::vector<std::array<double, 2>>& pts) {
  Matrix m(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = pts[i][0];
    m(static_cast<Eigen::Index>(i), 1) = pts[i][1];
  }
  return PointCloud(m);
}

/// Fig. 1 Grover graph: 8 data vertices plus dummy 8 joined to all but `m`.
inline WeightedGraph grover_graph(std::size_t m) {
  WeightedGraph g(9);
  for (std::size_t i = 0; i < 8; ++i)
    if (i != m) g.set_edge(i, 8, 1.0);
  return g;
}

}  // namespace support

namespace support {

/// Generalized Grover instance: a mark-free target component plus marked
/// components in which every unmarked vertex touches exactly one mark.
struct GroverInstance {
  quac::WeightedGraph graph;
  quac::MarkSet marks;
  std::size_t n_reduced = 0;
  std::size_t n_target = 0;
};

/// Target is a clique (so its nonzero Laplacian eigenvalues are >= 1);
/// other components are random graphs with one or two marks covering them.
inline GroverInstance random_grover_instance(quac::Rng& rng, std::size_t max_vertices = 32) {
  using namespace quac;
  const std::size_t target = 1 + uniform_index(rng, 6);
  const std::size_t groups = 1 + uniform_index(rng, 3);
  std::vector<std::size_t> sizes;
  std::size_t total = target;
  for (std::size_t c = 0; c < groups; ++c) {
    const std::size_t s = 1 + uniform_index(rng, 6);
    if (total + s + 2 > max_vertices) break;
    sizes.push_back(s);
    total += s + 2;
  }
  if (sizes.empty()) sizes.push_back(1), total += 3;
  GroverInstance inst;
  inst.graph = WeightedGraph(total);
  for (std::size_t i = 0; i < target; ++i)
    for (std::size_t j = i + 1; j < target; ++j) inst.graph.set_edge(i, j, 1.0);
  std::size_t base = target;
  std::size_t marked = 0;
  for (std::size_t s : sizes) {
    const bool two_marks = s >= 2 && uniform01(rng) < 0.5;
    const std::size_t m0 = base + s, m1 = base + s + 1;
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = i + 1; j < s; ++j)
        if (uniform01(rng) < 0.5) inst.graph.set_edge(base + i, base + j, 1.0);
    for (std::size_t i = 0; i < s; ++i) inst.graph.set_edge(base + i, two_marks && i % 2 ? m1 : m0, 1.0);
    inst.marks.insert(static_cast<VertexId>(m0));
    ++marked;
    if (two_marks) {
      inst.marks.insert(static_cast<VertexId>(m1));
      ++marked;
    } else {
      // keep the spare vertex attached through the mark so the component stays marked
      inst.graph.set_edge(m1, m0, 1.0);
      inst.marks.insert(static_cast<VertexId>(m1));
      ++marked;
    }
    base += s + 2;
  }
  inst.n_target = target;
  inst.n_reduced = total - marked;
  return inst;
}

}  // namespace support
