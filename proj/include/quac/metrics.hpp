#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "quac/error.hpp"
#include "quac/graph.hpp"
#include "quac/linalg.hpp"

namespace quac {

using Labels = std::vector<int>;

struct ScatterReport {
  Matrix S_W;            // sum over clusters of (x - mu)(x - mu)^T
  double inertia = 0.0;  // trace(S_W)
  double det_criterion = 0.0;
};

namespace detail {

inline void check_labels(const PointCloud& X, const Labels& labels) {
  if (labels.size() != X.size()) throw InputError("metrics: label count differs from point count");
  for (int l : labels)
    if (l < 0) throw InputError("metrics: negative label");
}

inline int label_count(const Labels& labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  return k;
}

}  // namespace detail

/// Per-cluster means; row j is the mean of points labeled j (zero if empty).
inline Matrix cluster_means(const PointCloud& X, const Labels& labels, int k = -1) {
  detail::check_labels(X, labels);
  if (k < 0) k = detail::label_count(labels);
  Matrix mu = Matrix::Zero(k, X.dim());
  std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (labels[i] >= k) throw InputError("metrics: label outside [0, k)");
    mu.row(labels[i]) += X.point(i);
    ++count[static_cast<std::size_t>(labels[i])];
  }
  for (int j = 0; j < k; ++j)
    if (count[static_cast<std::size_t>(j)]) mu.row(j) /= static_cast<double>(count[static_cast<std::size_t>(j)]);
  return mu;
}

/// Empty clusters contribute nothing. Centroids default to the cluster means.
inline ScatterReport within_cluster_scatter(const PointCloud& X, const Labels& labels,
                                            const std::optional<Matrix>& centroids = std::nullopt) {
  detail::check_labels(X, labels);
  const Matrix mu = centroids ? *centroids : cluster_means(X, labels);
  if (mu.cols() != X.dim()) throw InputError("metrics: centroid dimension mismatch");
  ScatterReport r;
  r.S_W = Matrix::Zero(X.dim(), X.dim());
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (labels[i] >= mu.rows()) throw InputError("metrics: label without a centroid");
    const Vector d = (X.point(i) - mu.row(labels[i])).transpose();
    r.S_W.noalias() += d * d.transpose();
  }
  r.inertia = r.S_W.trace();
  r.det_criterion = std::max(0.0, r.S_W.determinant());
  return r;
}

inline double inertia(const PointCloud& X, const Labels& labels,
                      const std::optional<Matrix>& centroids = std::nullopt) {
  detail::check_labels(X, labels);
  const Matrix mu = centroids ? *centroids : cluster_means(X, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (labels[i] >= mu.rows()) throw InputError("metrics: label without a centroid");
    total += (X.point(i) - mu.row(labels[i])).squaredNorm();
  }
  return total;
}

/// Hubert-Arabie adjusted Rand index from the contingency table.
/// Two partitions that are both all-singletons or both one block score 1.
inline double adjusted_rand_index(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) throw InputError("adjusted_rand_index: length mismatch");
  const std::size_t n = a.size();
  auto choose2 = [](double x) { return 0.5 * x * (x - 1.0); };
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : cells) index += choose2(c);
  for (const auto& [key, c] : rows) sum_a += choose2(c);
  for (const auto& [key, c] : cols) sum_b += choose2(c);
  const double total = choose2(static_cast<double>(n));
  const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

inline constexpr double kSuccessTolerance = 1e-12;

inline bool success_indicator(const Labels& predicted, const Labels& truth) {
  return std::abs(adjusted_rand_index(predicted, truth) - 1.0) <= kSuccessTolerance;
}

}  // namespace quac
