#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "quac/error.hpp"
#include "quac/graph.hpp"
#include "quac/metrics.hpp"
#include "quac/qci.hpp"
#include "quac/random.hpp"
#include "quac/spectral.hpp"

namespace quac {

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

struct KMeansConfig {
  int k = 2;
  int max_iterations = 300;
  double centroid_tolerance = 1e-6;  // max absolute coordinate movement
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1) throw ParameterError("KMeansConfig: k must be >= 1");
    if (max_iterations < 1) throw ParameterError("KMeansConfig: max_iterations must be >= 1");
    if (!(centroid_tolerance >= 0.0))
      throw ParameterError("KMeansConfig: centroid_tolerance must be nonnegative");
  }
};

struct ClusteringResult {
  Labels labels;
  Matrix centroids;  // k x d
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> inertia_history;  // after each iteration
};

namespace detail {

/// Nearest centroid, ties toward the lowest index.
inline int nearest_centroid(const Eigen::RowVectorXd& x, const Matrix& centroids, double* dist2) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
    const double d = (x - centroids.row(j)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

inline Labels assign(const PointCloud& X, const Matrix& centroids) {
  Labels labels(X.size());
  for (std::size_t i = 0; i < X.size(); ++i)
    labels[i] = nearest_centroid(X.point(i), centroids, nullptr);
  return labels;
}

/// Gives each empty cluster the point farthest from its current centroid.
inline void reseed_empty(const PointCloud& X, Labels& labels, const Matrix& centroids) {
  const auto k = static_cast<int>(centroids.rows());
  std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++count[static_cast<std::size_t>(l)];
  for (int j = 0; j < k; ++j) {
    if (count[static_cast<std::size_t>(j)]) continue;
    const Matrix mu = cluster_means(X, labels, k);
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (count[static_cast<std::size_t>(labels[i])] <= 1) continue;
      const double d = (X.point(i) - mu.row(labels[i])).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far_d < 0.0) continue;  // every cluster is a singleton already
    --count[static_cast<std::size_t>(labels[far])];
    labels[far] = j;
    ++count[static_cast<std::size_t>(j)];
  }
}

}  // namespace detail

/// Lloyd iteration from `seeds` (k x d). Stops when centroids move by at most
/// the tolerance and the labels are a fixed point of the returned centroids.
inline ClusteringResult kmeans(const PointCloud& X, const Matrix& seeds, const KMeansConfig& cfg) {
  cfg.validate();
  if (seeds.rows() != cfg.k) throw InputError("kmeans: seed count differs from k");
  if (seeds.cols() != X.dim()) throw InputError("kmeans: seed dimension mismatch");
  if (static_cast<std::size_t>(cfg.k) > X.size()) throw InputError("kmeans: k exceeds point count");

  ClusteringResult r;
  r.centroids = seeds;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    r.labels = detail::assign(X, r.centroids);
    detail::reseed_empty(X, r.labels, r.centroids);
    Matrix next = cluster_means(X, r.labels, cfg.k);
    const double moved = (next - r.centroids).cwiseAbs().maxCoeff();
    r.centroids = std::move(next);
    r.inertia_history.push_back(inertia(X, r.labels, r.centroids));
    r.iterations_used = iter;
    if (moved <= cfg.centroid_tolerance && detail::assign(X, r.centroids) == r.labels) {
      r.converged = true;
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

enum class KppWeighting { Squared, Linear };

/// First seed uniform; later seeds drawn with weight D^2 (or D) to the
/// nearest chosen seed. All-zero weights fall back to a uniform draw.
inline Matrix kpp_seed(const PointCloud& X, int k, Rng& rng,
                       KppWeighting weighting = KppWeighting::Squared) {
  if (k < 1) throw ParameterError("kpp_seed: k must be >= 1");
  if (static_cast<std::size_t>(k) > X.size()) throw InputError("kpp_seed: k exceeds point count");
  Matrix seeds(k, X.dim());
  std::size_t pick = uniform_index(rng, X.size());
  seeds.row(0) = X.point(pick);
  std::vector<double> d2(X.size(), std::numeric_limits<double>::infinity());
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      d2[i] = std::min(d2[i], (X.point(i) - seeds.row(j - 1)).squaredNorm());
      total += weighting == KppWeighting::Squared ? d2[i] : std::sqrt(d2[i]);
    }
    if (total > 0.0) {
      const double u = uniform01(rng) * total;
      double acc = 0.0;
      pick = X.size() - 1;
      for (std::size_t i = 0; i < X.size(); ++i) {
        const double w = weighting == KppWeighting::Squared ? d2[i] : std::sqrt(d2[i]);
        acc += w;
        if (u < acc && w > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_index(rng, X.size());
    }
    seeds.row(j) = X.point(pick);
  }
  return seeds;
}

/// k distinct points, uniformly without replacement.
inline Matrix random_seed(const PointCloud& X, int k, Rng& rng) {
  if (k < 1) throw ParameterError("random_seed: k must be >= 1");
  if (static_cast<std::size_t>(k) > X.size()) throw InputError("random_seed: k exceeds point count");
  std::vector<std::size_t> idx(X.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Matrix seeds(k, X.dim());
  for (int j = 0; j < k; ++j) {
    const std::size_t r = static_cast<std::size_t>(j) + uniform_index(rng, idx.size() - static_cast<std::size_t>(j));
    std::swap(idx[static_cast<std::size_t>(j)], idx[r]);
    seeds.row(j) = X.point(idx[static_cast<std::size_t>(j)]);
  }
  return seeds;
}

struct QuacSampling {
  double subsample_fraction = 0.10;
  int samples_per_cluster = 0;  // 0: twenty times the subsample size

  int resolve_m(std::size_t subsample_size) const {
    if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0))
      throw ParameterError("QuacSampling: subsample_fraction must lie in (0, 1]");
    if (samples_per_cluster < 0) throw ParameterError("QuacSampling: m must be >= 1");
    return samples_per_cluster ? samples_per_cluster : static_cast<int>(20 * subsample_size);
  }
};

namespace detail {

/// Outcome distributions memoized by mark set; one evolution per distinct set.
class QciCache {
 public:
  QciCache(const LaplacianMatrix& L, const QciConfig& cfg) : L_(L), cfg_(cfg) {}

  const OutcomeDistribution& get(const std::vector<VertexId>& marks) {
    std::vector<VertexId> key(marks);
    std::sort(key.begin(), key.end());
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, qci_distribution(L_, MarkSet(key), cfg_)).first;
    return it->second;
  }
  std::size_t evolutions() const { return cache_.size(); }

 private:
  const LaplacianMatrix& L_;
  const QciConfig& cfg_;
  std::map<std::vector<VertexId>, OutcomeDistribution> cache_;
};

/// v_1 uniform over the graph, v_{i+1} = QCI(L, {v_1..v_i}).
inline std::vector<VertexId> qci_representatives(const LaplacianMatrix& L, int k, QciCache& cache,
                                                 Rng& rng) {
  if (static_cast<std::size_t>(k) > L.size())
    throw InputError("qci representatives: k exceeds the graph size");
  std::vector<VertexId> reps{L.vertex_ids()[uniform_index(rng, L.size())]};
  for (int i = 1; i < k; ++i) reps.push_back(cache.get(reps).sample(rng));
  return reps;
}

inline std::vector<VertexId> all_but(const std::vector<VertexId>& reps, std::size_t skip) {
  std::vector<VertexId> out;
  for (std::size_t n = 0; n < reps.size(); ++n)
    if (n != skip) out.push_back(reps[n]);
  return out;
}

}  // namespace detail

struct QMeansSeeds {
  Matrix seeds;                      // k x d
  std::vector<VertexId> representatives;
  std::size_t evolutions = 0;
};

/// c_i = mean of m QCI draws with every representative but the i-th marked.
/// `L` is built on a subsample of X; its vertex ids index X.
inline QMeansSeeds qmeans_seed(const PointCloud& X, const LaplacianMatrix& L, int k, int m,
                               const QciConfig& cfg, Rng& rng) {
  if (k < 2) throw ParameterError("qmeans_seed: k must be >= 2");
  if (m < 1) throw ParameterError("qmeans_seed: m must be >= 1");
  for (VertexId id : L.vertex_ids())
    if (!X.contains(id)) throw InputError("qmeans_seed: Laplacian vertex missing from the data");
  detail::QciCache cache(L, cfg);
  QMeansSeeds out;
  out.representatives = detail::qci_representatives(L, k, cache, rng);
  out.seeds = Matrix::Zero(k, X.dim());
  for (int i = 0; i < k; ++i) {
    const OutcomeDistribution& dist =
        cache.get(detail::all_but(out.representatives, static_cast<std::size_t>(i)));
    for (int j = 0; j < m; ++j) out.seeds.row(i) += X.point_by_id(dist.sample(rng));
    out.seeds.row(i) /= static_cast<double>(m);
  }
  out.evolutions = cache.evolutions();
  return out;
}

// ---------------------------------------------------------------------------
// Nearest-neighbor labeling
// ---------------------------------------------------------------------------

/// Majority vote of the l nearest labeled points (distance ties toward the
/// lower index); label ties broken uniformly at random.
inline int l_nearest_neighbor_classify(const Matrix& labeled_points, const Labels& labels,
                                       const Eigen::RowVectorXd& query, int l, Rng& rng) {
  if (labeled_points.rows() == 0) throw InputError("l-nn: empty labeled set");
  if (static_cast<std::size_t>(labeled_points.rows()) != labels.size())
    throw InputError("l-nn: label count differs from point count");
  if (l < 1) throw ParameterError("l-nn: l must be >= 1");
  if (l > labeled_points.rows()) throw ParameterError("l-nn: l exceeds the labeled set");
  std::vector<std::pair<double, std::size_t>> d(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    d[i] = {(labeled_points.row(static_cast<Eigen::Index>(i)) - query).squaredNorm(), i};
  std::partial_sort(d.begin(), d.begin() + l, d.end());
  std::map<int, int> votes;
  for (int i = 0; i < l; ++i) ++votes[labels[d[static_cast<std::size_t>(i)].second]];
  int top = 0;
  for (const auto& [label, v] : votes) top = std::max(top, v);
  std::vector<int> tied;
  for (const auto& [label, v] : votes)
    if (v == top) tied.push_back(label);
  return tied.size() == 1 ? tied.front() : tied[uniform_index(rng, tied.size())];
}

/// Labels every point of X: points whose ids appear in `known` keep that
/// label, the rest get the l-nn vote over the known points.
inline Labels extend_labels(const PointCloud& X, const std::map<VertexId, int>& known, int l,
                            Rng& rng) {
  if (known.empty()) throw InputError("extend_labels: no labeled points");
  Matrix pts(static_cast<Eigen::Index>(known.size()), X.dim());
  Labels lab;
  Eigen::Index r = 0;
  for (const auto& [id, label] : known) {
    pts.row(r++) = X.point_by_id(id);
    lab.push_back(label);
  }
  const int l_eff = std::min<int>(l, static_cast<int>(known.size()));
  Labels out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    auto it = known.find(X.id(i));
    out[i] = it != known.end() ? it->second
                               : l_nearest_neighbor_classify(pts, lab, X.point(i), l_eff, rng);
  }
  return out;
}

struct QnnResult {
  Labels labels;                        // for every point of X
  std::map<VertexId, int> qci_labels;   // vertices labeled by measurement
  std::vector<VertexId> representatives;
  std::size_t evolutions = 0;
};

/// How a vertex drawn for several clusters is labeled. FirstWins is the
/// default; Majority takes the most frequent draw (ties toward the lower
/// cluster index).
enum class QnnLabeling { FirstWins, Majority };

inline std::string to_string(QnnLabeling p) { return p == QnnLabeling::FirstWins ? "first" : "majority"; }

inline QnnLabeling parse_qnn_labeling(const std::string& s) {
  if (s == "first") return QnnLabeling::FirstWins;
  if (s == "majority") return QnnLabeling::Majority;
  throw ParameterError("unknown q-nn labeling '" + s + "' (expected first | majority)");
}

/// Representatives by iterated QCI; then m rounds, each drawing one vertex
/// per cluster j with all other representatives marked. Representatives keep
/// their own label. Remaining points get the l-nn vote.
inline QnnResult qnn(const PointCloud& X, const LaplacianMatrix& L, int k, int m, int l,
                     const QciConfig& cfg, Rng& rng, QnnLabeling labeling = QnnLabeling::FirstWins) {
  if (k < 2) throw ParameterError("qnn: k must be >= 2");
  if (m < 1) throw ParameterError("qnn: m must be >= 1");
  if (l < 1) throw ParameterError("qnn: l must be >= 1");
  for (VertexId id : L.vertex_ids())
    if (!X.contains(id)) throw InputError("qnn: Laplacian vertex missing from the data");
  detail::QciCache cache(L, cfg);
  QnnResult out;
  out.representatives = detail::qci_representatives(L, k, cache, rng);
  for (int j = 0; j < k; ++j) out.qci_labels.emplace(out.representatives[static_cast<std::size_t>(j)], j);
  std::vector<const OutcomeDistribution*> dists;
  for (int j = 0; j < k; ++j)
    dists.push_back(&cache.get(detail::all_but(out.representatives, static_cast<std::size_t>(j))));
  std::map<VertexId, std::vector<int>> votes;
  for (int round = 0; round < m; ++round)
    for (int j = 0; j < k; ++j) {
      const VertexId v = dists[static_cast<std::size_t>(j)]->sample(rng);
      if (labeling == QnnLabeling::FirstWins) {
        out.qci_labels.emplace(v, j);
      } else {
        auto& c = votes[v];
        c.resize(static_cast<std::size_t>(k), 0);
        ++c[static_cast<std::size_t>(j)];
      }
    }
  for (const auto& [v, c] : votes)
    out.qci_labels.emplace(v, static_cast<int>(std::max_element(c.begin(), c.end()) - c.begin()));
  out.labels = extend_labels(X, out.qci_labels, l, rng);
  out.evolutions = cache.evolutions();
  return out;
}

// ---------------------------------------------------------------------------
// Spectral baseline
// ---------------------------------------------------------------------------

/// Unnormalized spectral clustering: k-means (k++ seeds) on the rows of the
/// eigenvectors of the k smallest Laplacian eigenvalues.
inline Labels laplacian_spectral_clustering(const LaplacianMatrix& L, int k, const KMeansConfig& cfg,
                                            Rng& rng) {
  if (k < 1) throw ParameterError("spectral clustering: k must be >= 1");
  if (static_cast<std::size_t>(k) > L.size()) throw InputError("spectral clustering: k exceeds graph size");
  if (connected_components(L).size() != 1)
    throw NotApplicableError("spectral clustering: graph is not connected");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(L.entries());
  PointCloud embedding(Matrix(solver.eigenvectors().leftCols(k)), L.vertex_ids());
  KMeansConfig kc = cfg;
  kc.k = k;
  return kmeans(embedding, kpp_seed(embedding, k, rng), kc).labels;
}

inline bool success_indicator(const ClusteringResult& result, const Labels& truth) {
  return success_indicator(result.labels, truth);
}

inline nlohmann::json to_json(const ClusteringResult& r, const Labels* truth = nullptr,
                              const PointCloud* X = nullptr) {
  nlohmann::json j;
  j["labels"] = r.labels;
  j["centroids"] = nlohmann::json::array();
  for (Eigen::Index c = 0; c < r.centroids.rows(); ++c) {
    std::vector<double> row;
    for (Eigen::Index d = 0; d < r.centroids.cols(); ++d) row.push_back(r.centroids(c, d));
    j["centroids"].push_back(row);
  }
  j["iterations"] = r.iterations_used;
  j["converged"] = r.converged;
  nlohmann::json metrics = nlohmann::json::object();
  metrics["inertia_history"] = r.inertia_history;
  if (X) {
    const ScatterReport s = within_cluster_scatter(*X, r.labels, r.centroids);
    metrics["inertia"] = s.inertia;
    metrics["det_criterion"] = s.det_criterion;
  }
  if (truth) {
    metrics["ari"] = adjusted_rand_index(r.labels, *truth);
    metrics["success"] = success_indicator(r.labels, *truth);
  }
  j["metrics"] = metrics;
  return j;
}

}  // namespace quac
