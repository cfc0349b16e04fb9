#pragma once

// Experiment runner: per-trial pipelines (dataset -> subsample -> epsilon
// graph -> outlier removal -> algorithm -> score), epsilon sweeps, and
// aggregate statistics. Every trial draws from streams derived from
// (root_seed, trial index) only, so algorithms and grid points see the same
// datasets and results do not depend on worker scheduling.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "quac/clustering.hpp"
#include "quac/datasets.hpp"
#include "quac/error.hpp"
#include "quac/graph.hpp"
#include "quac/metrics.hpp"
#include "quac/qci.hpp"

namespace quac {

enum class Algorithm { QMeans, Kpp, Random, Qnn, Spectral };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::QMeans: return "qmeans";
    case Algorithm::Kpp: return "kpp";
    case Algorithm::Random: return "random";
    case Algorithm::Qnn: return "qnn";
    case Algorithm::Spectral: return "spectral";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "qmeans" || s == "q-means") return Algorithm::QMeans;
  if (s == "kpp" || s == "k++") return Algorithm::Kpp;
  if (s == "random") return Algorithm::Random;
  if (s == "qnn" || s == "q-nn") return Algorithm::Qnn;
  if (s == "spectral") return Algorithm::Spectral;
  throw ParameterError("unknown algorithm '" + s + "'");
}

/// True for algorithms scored by the ARI distribution rather than the
/// success rate.
inline bool scored_by_ari(Algorithm a) { return a == Algorithm::Qnn || a == Algorithm::Spectral; }

struct ExperimentSpec {
  nlohmann::json dataset = {{"generator", "five_cluster"}};  // generator params
  std::vector<double> graph_eps{2.0};
  Algorithm algorithm = Algorithm::QMeans;
  int k = 0;  // 0: number of ground-truth clusters
  std::size_t trials = 500;
  double subsample_fraction = 0.10;
  int m = 0;  // 0: twenty times the subsample size
  int l = 5;
  double fidelity_eps = 0.1;
  double outlier_fraction = 0.01;
  bool regenerate_per_trial = true;
  bool kpp_linear = false;
  QnnLabeling qnn_labeling = QnnLabeling::FirstWins;
  int max_iterations = 300;
  double centroid_tolerance = 1e-6;
  std::uint64_t root_seed = 1;
  std::size_t workers = 0;  // 0: hardware concurrency
  std::string output;       // path prefix for CSV/JSON

  void validate() const {
    if (trials < 1) throw ParameterError("spec: trials must be >= 1");
    if (graph_eps.empty()) throw ParameterError("spec: epsilon grid is empty");
    for (double e : graph_eps)
      if (!(e > 0.0)) throw ParameterError("spec: graph epsilon must be positive");
    if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0))
      throw ParameterError("spec: subsample fraction must lie in (0, 1]");
    if (m < 0) throw ParameterError("spec: m must be >= 1");
    if (l < 1) throw ParameterError("spec: l must be >= 1");
    if (!(fidelity_eps > 0.0 && fidelity_eps < 1.0))
      throw ParameterError("spec: fidelity_eps must lie in (0, 1)");
    if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
      throw ParameterError("spec: outlier fraction must lie in [0, 1)");
    if (k < 0) throw ParameterError("spec: k must be >= 1");
    if (!dataset.is_object() || !dataset.contains("generator"))
      throw ParameterError("spec: dataset needs a generator name");
  }
};

inline nlohmann::json to_json(const ExperimentSpec& s) {
  return {{"dataset", s.dataset},
          {"graph_eps", s.graph_eps},
          {"algorithm", to_string(s.algorithm)},
          {"k", s.k},
          {"trials", s.trials},
          {"subsample_fraction", s.subsample_fraction},
          {"m", s.m},
          {"l", s.l},
          {"fidelity_eps", s.fidelity_eps},
          {"outlier_fraction", s.outlier_fraction},
          {"regenerate_per_trial", s.regenerate_per_trial},
          {"kpp_linear", s.kpp_linear},
          {"qnn_labeling", to_string(s.qnn_labeling)},
          {"max_iterations", s.max_iterations},
          {"centroid_tolerance", s.centroid_tolerance},
          {"root_seed", s.root_seed},
          {"workers", s.workers},
          {"output", s.output}};
}

/// Keys absent from `j` keep the values already in `base`.
inline ExperimentSpec spec_from_json(const nlohmann::json& j, ExperimentSpec base = {}) {
  try {
    if (!j.is_object()) throw InputError("spec json: expected an object");
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      base.dataset = d.is_string() ? nlohmann::json{{"generator", d.get<std::string>()}} : d;
    }
    if (j.contains("graph_eps")) {
      const auto& e = j.at("graph_eps");
      base.graph_eps = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
    }
    if (j.contains("algorithm")) base.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    base.k = j.value("k", base.k);
    base.trials = j.value("trials", base.trials);
    base.subsample_fraction = j.value("subsample_fraction", base.subsample_fraction);
    base.m = j.value("m", base.m);
    base.l = j.value("l", base.l);
    base.fidelity_eps = j.value("fidelity_eps", base.fidelity_eps);
    base.outlier_fraction = j.value("outlier_fraction", base.outlier_fraction);
    base.regenerate_per_trial = j.value("regenerate_per_trial", base.regenerate_per_trial);
    base.kpp_linear = j.value("kpp_linear", base.kpp_linear);
    if (j.contains("qnn_labeling")) base.qnn_labeling = parse_qnn_labeling(j.at("qnn_labeling").get<std::string>());
    base.max_iterations = j.value("max_iterations", base.max_iterations);
    base.centroid_tolerance = j.value("centroid_tolerance", base.centroid_tolerance);
    base.root_seed = j.value("root_seed", base.root_seed);
    base.workers = j.value("workers", base.workers);
    base.output = j.value("output", base.output);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("spec json: ") + e.what());
  }
  return base;
}

struct TrialRecord {
  std::size_t trial = 0;
  bool skipped = false;
  std::string skip_reason;
  bool success = false;
  int iterations = 0;  // Lloyd iterations (0 when no k-means stage)
  bool converged = false;
  double ari = 0.0;
  double inertia = 0.0;
  double det_criterion = 0.0;
  std::size_t graph_vertices = 0;  // after outlier removal
  std::size_t components = 0;
  std::size_t evolutions = 0;
  bool lloyd_monotone = true;
  double wall_seconds = 0.0;  // JSON only
};

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

inline SummaryStats summarize(const std::vector<double>& v) {
  SummaryStats s;
  s.count = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

/// Linear-interpolated quantile of sorted data.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// 95% Wilson score interval.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct Aggregate {
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::size_t skipped = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;  // over completed trials
  double wilson_low = 0.0;
  double wilson_high = 1.0;
  SummaryStats iterations_success;
  SummaryStats iterations_failure;
  double ari_mean = 0.0;
  double ari_min = 0.0, ari_q1 = 0.0, ari_median = 0.0, ari_q3 = 0.0, ari_max = 0.0;
};

inline Aggregate aggregate(const std::vector<TrialRecord>& trials) {
  Aggregate a;
  a.trials = trials.size();
  std::vector<double> it_ok, it_fail, ari;
  for (const auto& t : trials) {
    if (t.skipped) {
      ++a.skipped;
      continue;
    }
    ++a.completed;
    ari.push_back(t.ari);
    if (t.success) {
      ++a.successes;
      it_ok.push_back(t.iterations);
    } else {
      it_fail.push_back(t.iterations);
    }
  }
  if (a.completed) a.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.completed);
  std::tie(a.wilson_low, a.wilson_high) = wilson_interval(a.successes, a.completed);
  a.iterations_success = summarize(it_ok);
  a.iterations_failure = summarize(it_fail);
  if (!ari.empty()) {
    a.ari_mean = summarize(ari).mean;
    a.ari_min = quantile(ari, 0.0);
    a.ari_q1 = quantile(ari, 0.25);
    a.ari_median = quantile(ari, 0.5);
    a.ari_q3 = quantile(ari, 0.75);
    a.ari_max = quantile(ari, 1.0);
  }
  return a;
}

struct ExperimentRecord {
  ExperimentSpec spec;
  double graph_eps = 0.0;
  std::vector<TrialRecord> trials;  // ordered by trial index
  Aggregate summary;

  std::string dataset_name() const { return spec.dataset.value("generator", std::string("custom")); }
};

// ---------------------------------------------------------------------------
// Trial pipeline
// ---------------------------------------------------------------------------

struct TrialData {
  LabeledDataset full;
  LabeledDataset sample;
};

/// Per-trial dataset and subsample; independent of epsilon and algorithm.
inline TrialData trial_data(const ExperimentSpec& spec, std::size_t trial) {
  Rng stream = derive_stream(spec.root_seed, trial);
  const std::uint64_t data_seed = stream();
  const std::uint64_t sample_seed = stream();
  nlohmann::json params = spec.dataset;
  if (spec.regenerate_per_trial || !params.contains("seed")) params["seed"] = spec.regenerate_per_trial ? data_seed : spec.root_seed;
  TrialData d;
  d.full = regenerate(params);
  d.sample = subsample(d.full, spec.subsample_fraction, sample_seed);
  return d;
}

/// Algorithm stream for a trial, shared by all algorithms and grid points.
inline Rng trial_algorithm_stream(const ExperimentSpec& spec, std::size_t trial) {
  Rng stream = derive_stream(spec.root_seed, trial);
  stream.discard(2);
  return Rng(stream());
}

/// Graph built on the subsample, with small components dropped (none when
/// the fraction is zero).
inline WeightedGraph trial_graph(const TrialData& d, double graph_eps, double outlier_fraction) {
  WeightedGraph g = build_epsilon_graph(d.sample.cloud, graph_eps);
  return outlier_fraction > 0.0 ? remove_outliers(g, outlier_fraction) : g;
}

inline QciConfig qci_config(const ExperimentSpec& spec) {
  QciConfig cfg;
  cfg.fidelity_eps = spec.fidelity_eps;
  return cfg;
}

inline KMeansConfig kmeans_config(const ExperimentSpec& spec, int k) {
  KMeansConfig cfg;
  cfg.k = k;
  cfg.max_iterations = spec.max_iterations;
  cfg.centroid_tolerance = spec.centroid_tolerance;
  return cfg;
}

inline bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] * (1.0 + 1e-12) + 1e-12) return false;
  return true;
}

inline TrialRecord run_trial(const ExperimentSpec& spec, double graph_eps, std::size_t trial) {
  TrialRecord rec;
  rec.trial = trial;
  const auto start = std::chrono::steady_clock::now();
  try {
    const TrialData data = trial_data(spec, trial);
    Rng rng = trial_algorithm_stream(spec, trial);
    const int k = spec.k ? spec.k : data.full.cluster_count();
    const PointCloud& X = data.full.cloud;
    const Labels& truth = data.full.truth;
    const bool needs_graph = spec.algorithm == Algorithm::QMeans || scored_by_ari(spec.algorithm);

    std::optional<LaplacianMatrix> L;
    if (needs_graph) {
      const WeightedGraph g = trial_graph(data, graph_eps, spec.outlier_fraction);
      rec.graph_vertices = g.size();
      if (g.size() < static_cast<std::size_t>(k) + 1) throw NotApplicableError("graph has too few vertices after outlier removal");
      rec.components = connected_components(g).size();
      L = graph_laplacian(g);
    }

    auto score_kmeans = [&](const Matrix& seeds) {
      const ClusteringResult r = kmeans(X, seeds, kmeans_config(spec, k));
      const ScatterReport s = within_cluster_scatter(X, r.labels, r.centroids);
      rec.iterations = r.iterations_used;
      rec.converged = r.converged;
      rec.lloyd_monotone = non_increasing(r.inertia_history);
      rec.inertia = s.inertia;
      rec.det_criterion = s.det_criterion;
      rec.ari = adjusted_rand_index(r.labels, truth);
      rec.success = success_indicator(r.labels, truth);
    };
    auto score_labels = [&](const Labels& labels) {
      const ScatterReport s = within_cluster_scatter(X, labels);
      rec.inertia = s.inertia;
      rec.det_criterion = s.det_criterion;
      rec.ari = adjusted_rand_index(labels, truth);
      rec.success = success_indicator(labels, truth);
    };

    const int m = spec.m ? spec.m : static_cast<int>(20 * data.sample.size());
    switch (spec.algorithm) {
      case Algorithm::QMeans: {
        const QMeansSeeds seeds = qmeans_seed(X, *L, k, m, qci_config(spec), rng);
        rec.evolutions = seeds.evolutions;
        score_kmeans(seeds.seeds);
        break;
      }
      case Algorithm::Kpp:
        score_kmeans(kpp_seed(X, k, rng, spec.kpp_linear ? KppWeighting::Linear : KppWeighting::Squared));
        break;
      case Algorithm::Random:
        score_kmeans(random_seed(X, k, rng));
        break;
      case Algorithm::Qnn: {
        const QnnResult r = qnn(X, *L, k, m, spec.l, qci_config(spec), rng, spec.qnn_labeling);
        rec.evolutions = r.evolutions;
        score_labels(r.labels);
        break;
      }
      case Algorithm::Spectral: {
        const Labels sub = laplacian_spectral_clustering(*L, k, kmeans_config(spec, k), rng);
        std::map<VertexId, int> known;
        for (std::size_t i = 0; i < L->size(); ++i) known.emplace(L->vertex_ids()[i], sub[i]);
        score_labels(extend_labels(X, known, spec.l, rng));
        break;
      }
    }
  } catch (const NotApplicableError& e) {
    rec.skipped = true;
    rec.skip_reason = e.what();
  } catch (const Error& e) {
    rec.skipped = true;
    rec.skip_reason = std::string("error: ") + e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

/// Runs `count` independent jobs on a bounded pool; job i writes slot i.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

inline ExperimentRecord run_experiment(const ExperimentSpec& spec, double graph_eps) {
  spec.validate();
  ExperimentRecord rec;
  rec.spec = spec;
  rec.graph_eps = graph_eps;
  rec.trials.resize(spec.trials);
  parallel_for(spec.trials, spec.workers, [&](std::size_t t) { rec.trials[t] = run_trial(spec, graph_eps, t); });
  rec.summary = aggregate(rec.trials);
  return rec;
}

/// The spec's grid must hold exactly one epsilon.
inline ExperimentRecord run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.graph_eps.size() != 1)
    throw ParameterError("run_experiment: expected a single graph epsilon (use a sweep for grids)");
  return run_experiment(spec, spec.graph_eps.front());
}

inline std::vector<ExperimentRecord> epsilon_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ExperimentRecord> out;
  for (double e : spec.graph_eps) out.push_back(run_experiment(spec, e));
  return out;
}

/// Grid point maximizing the success rate (median ARI for ARI-scored
/// algorithms); ties go to the smaller epsilon.
inline const ExperimentRecord& optimal_record(const std::vector<ExperimentRecord>& sweep) {
  if (sweep.empty()) throw InputError("optimal_record: empty sweep");
  const ExperimentRecord* best = &sweep.front();
  auto score = [](const ExperimentRecord& r) {
    if (r.summary.completed == 0) return -1e300;
    return scored_by_ari(r.spec.algorithm) ? r.summary.ari_median : r.summary.success_rate;
  };
  for (const auto& r : sweep)
    if (score(r) > score(*best) || (score(r) == score(*best) && r.graph_eps < best->graph_eps)) best = &r;
  return *best;
}

// ---------------------------------------------------------------------------
// Partition analysis (inertia vs determinant criterion)
// ---------------------------------------------------------------------------

struct PartitionScore {
  std::string name;
  Labels labels;
  double inertia = 0.0;
  double det_criterion = 0.0;
};

/// Correct partition plus the distinct incorrect k-means fixed points found
/// from `restarts` k++ starts, sorted by inertia.
inline std::vector<PartitionScore> partition_analysis(const LabeledDataset& ds, int restarts, std::uint64_t seed,
                                                      int max_iterations = 300) {
  if (restarts < 1) throw ParameterError("partition_analysis: restarts must be >= 1");
  const int k = ds.cluster_count();
  std::vector<PartitionScore> out;
  const ScatterReport truth = within_cluster_scatter(ds.cloud, ds.truth);
  out.push_back({"correct", ds.truth, truth.inertia, truth.det_criterion});
  std::vector<PartitionScore> wrong;
  Rng rng = derive_stream(seed, 7);
  KMeansConfig cfg;
  cfg.k = k;
  cfg.max_iterations = max_iterations;
  for (int r = 0; r < restarts; ++r) {
    const ClusteringResult res = kmeans(ds.cloud, kpp_seed(ds.cloud, k, rng), cfg);
    if (success_indicator(res.labels, ds.truth)) continue;
    bool seen = false;
    for (const auto& w : wrong)
      if (success_indicator(w.labels, res.labels)) seen = true;
    if (seen) continue;
    const ScatterReport s = within_cluster_scatter(ds.cloud, res.labels);
    wrong.push_back({"", res.labels, s.inertia, s.det_criterion});
  }
  std::sort(wrong.begin(), wrong.end(), [](const auto& a, const auto& b) { return a.inertia < b.inertia; });
  for (std::size_t i = 0; i < wrong.size(); ++i) {
    wrong[i].name = "incorrect " + std::to_string(i + 1);
    out.push_back(std::move(wrong[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// QCI iteration snapshots
// ---------------------------------------------------------------------------

struct QciSnapshot {
  std::vector<VertexId> marks;
  QciOutcome outcome;
  VertexId measured = -1;
};

/// Iterated QCI as in the representative search: marks grow by the measured
/// vertex each round. Returns one snapshot per evolution.
inline std::vector<QciSnapshot> qci_iterations(const LaplacianMatrix& L, int k, const QciConfig& cfg, Rng& rng,
                                               std::optional<VertexId> first = std::nullopt) {
  if (k < 2) throw ParameterError("qci_iterations: k must be >= 2");
  std::vector<VertexId> marks{first ? *first : L.vertex_ids()[uniform_index(rng, L.size())]};
  std::vector<QciSnapshot> out;
  for (int i = 1; i < k; ++i) {
    QciSnapshot snap;
    snap.marks = marks;
    snap.outcome = qci_evolve(L, MarkSet(marks), cfg);
    snap.measured = snap.outcome.distribution.sample(rng);
    marks.push_back(snap.measured);
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace quac
