// quac: command-line front end for datasets, graphs, QCI runs and experiments.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "quac/quac.hpp"

namespace {

using namespace quac;
namespace fs = std::filesystem;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

template <class Fn>
void write_with(const std::string& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_text(path, os.str());
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

/// Inline JSON object, JSON file, or bare generator name.
nlohmann::json dataset_params(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return parse_json(arg, "dataset params");
  if (fs::exists(arg)) {
    nlohmann::json doc = parse_json(read_text(arg), arg);
    return doc.contains("generator_params") ? doc.at("generator_params") : doc;
  }
  return {{"generator", arg}};
}

/// CSV or JSON dataset file, or generator params as accepted above.
LabeledDataset load_dataset(const std::string& arg) {
  if (fs::exists(arg)) {
    if (fs::path(arg).extension() == ".csv") {
      std::ifstream in(arg);
      if (!in) throw IoError("cannot read '" + arg + "'");
      return read_dataset_csv(in);
    }
    return dataset_from_json(parse_json(read_text(arg), arg));
  }
  return regenerate(dataset_params(arg));
}

// ---------------------------------------------------------------------------
// Experiment options: JSON config first, explicit flags override.
// ---------------------------------------------------------------------------

struct ExperimentOptions {
  std::string config;
  ExperimentSpec cli;
  std::string dataset_arg;
  std::string algorithm_arg;
  std::string qnn_labeling_arg;
  bool no_regenerate = false;
  bool trace = false;
  std::size_t trace_every = 16;
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentSpec&)>>> overrides;

  ExperimentSpec resolve() const {
    ExperimentSpec s = config.empty() ? ExperimentSpec{} : spec_from_json(parse_json(read_text(config), config));
    for (const auto& [opt, apply] : overrides)
      if (opt->count()) apply(s);
    s.validate();
    return s;
  }
};

void add_experiment_options(CLI::App* app, ExperimentOptions& o, bool with_algorithm) {
  app->add_option("--config", o.config, "JSON experiment spec; flags given explicitly override it");
  auto bind = [&o](CLI::Option* opt, std::function<void(ExperimentSpec&)> apply) {
    o.overrides.emplace_back(opt, std::move(apply));
  };
  bind(app->add_option("--dataset", o.dataset_arg, "generator name, inline JSON params, or JSON file"),
       [&o](ExperimentSpec& s) { s.dataset = dataset_params(o.dataset_arg); });
  bind(app->add_option("--eps", o.cli.graph_eps, "epsilon-ball radius; several values form a grid"),
       [&o](ExperimentSpec& s) { s.graph_eps = o.cli.graph_eps; });
  if (with_algorithm)
    bind(app->add_option("--algorithm", o.algorithm_arg, "qmeans | kpp | random | qnn | spectral"),
         [&o](ExperimentSpec& s) { s.algorithm = parse_algorithm(o.algorithm_arg); });
  bind(app->add_option("--k", o.cli.k, "cluster count (0: from ground truth)"),
       [&o](ExperimentSpec& s) { s.k = o.cli.k; });
  bind(app->add_option("--trials", o.cli.trials, "trials per grid point"),
       [&o](ExperimentSpec& s) { s.trials = o.cli.trials; });
  bind(app->add_option("--subsample", o.cli.subsample_fraction, "fraction of the data used for the graph"),
       [&o](ExperimentSpec& s) { s.subsample_fraction = o.cli.subsample_fraction; });
  bind(app->add_option("--m", o.cli.m, "QCI samples per cluster (0: 20 x subsample size)"),
       [&o](ExperimentSpec& s) { s.m = o.cli.m; });
  bind(app->add_option("--l", o.cli.l, "neighbors in the l-nn vote"), [&o](ExperimentSpec& s) { s.l = o.cli.l; });
  bind(app->add_option("--fidelity-eps", o.cli.fidelity_eps, "adiabatic schedule fidelity parameter"),
       [&o](ExperimentSpec& s) { s.fidelity_eps = o.cli.fidelity_eps; });
  bind(app->add_option("--outlier-fraction", o.cli.outlier_fraction,
                       "drop components smaller than this fraction of the graph"),
       [&o](ExperimentSpec& s) { s.outlier_fraction = o.cli.outlier_fraction; });
  bind(app->add_flag("--no-regenerate", o.no_regenerate, "reuse one dataset for every trial"),
       [&o](ExperimentSpec& s) { s.regenerate_per_trial = !o.no_regenerate; });
  bind(app->add_flag("--kpp-linear", o.cli.kpp_linear, "weight k++ draws by distance instead of squared distance"),
       [&o](ExperimentSpec& s) { s.kpp_linear = o.cli.kpp_linear; });
  bind(app->add_option("--qnn-labeling", o.qnn_labeling_arg, "first | majority: label of a vertex drawn for several clusters"),
       [&o](ExperimentSpec& s) { s.qnn_labeling = parse_qnn_labeling(o.qnn_labeling_arg); });
  bind(app->add_option("--max-iterations", o.cli.max_iterations, "k-means iteration cap"),
       [&o](ExperimentSpec& s) { s.max_iterations = o.cli.max_iterations; });
  bind(app->add_option("--centroid-tolerance", o.cli.centroid_tolerance, "k-means centroid movement tolerance"),
       [&o](ExperimentSpec& s) { s.centroid_tolerance = o.cli.centroid_tolerance; });
  bind(app->add_option("--seed", o.cli.root_seed, "root seed"),
       [&o](ExperimentSpec& s) { s.root_seed = o.cli.root_seed; });
  bind(app->add_option("--workers", o.cli.workers, "worker threads (0: hardware concurrency)"),
       [&o](ExperimentSpec& s) { s.workers = o.cli.workers; });
  bind(app->add_option("--output,-o", o.cli.output, "output path prefix"),
       [&o](ExperimentSpec& s) { s.output = o.cli.output; });
  app->add_flag("--trace", o.trace, "write the QCI evolution traces of trial 0");
  app->add_option("--trace-every", o.trace_every, "steps between trace points");
}

std::string output_prefix(const ExperimentSpec& s, const std::string& fallback) {
  return s.output.empty() ? fallback : s.output;
}

/// Evolution traces of the representative search in trial 0.
void write_trial_trace(const ExperimentSpec& spec, double graph_eps, std::size_t every, const std::string& path) {
  const TrialData data = trial_data(spec, 0);
  const LaplacianMatrix L = graph_laplacian(trial_graph(data, graph_eps, spec.outlier_fraction));
  QciConfig cfg = qci_config(spec);
  cfg.integrator.trace_every = std::max<std::size_t>(1, every);
  Rng rng = trial_algorithm_stream(spec, 0);
  const int k = spec.k ? spec.k : data.full.cluster_count();
  const auto snaps = qci_iterations(L, k, cfg, rng);
  write_with(path, [&](std::ostream& os) {
    os.precision(17);
    os << "iteration,t,s,norm,ground_overlap\n";
    for (std::size_t i = 0; i < snaps.size(); ++i)
      for (const auto& p : snaps[i].outcome.trace)
        os << (i + 1) << ',' << p.t << ',' << p.s << ',' << p.norm << ',' << p.ground_overlap << '\n';
  });
}

void emit_records(const std::vector<ExperimentRecord>& records, const std::string& prefix) {
  write_with(prefix + ".trials.csv", [&](std::ostream& os) { write_trials_csv(os, records); });
  write_with(prefix + ".lineplot.csv", [&](std::ostream& os) { write_lineplot_csv(os, records); });
  write_with(prefix + ".boxplot.csv", [&](std::ostream& os) { write_boxplot_csv(os, records); });
  write_text(prefix + ".json", to_json(records).dump(2) + "\n");
  const std::string table = table2_text(records);
  write_text(prefix + ".table.txt", table);
  std::cout << table;
}

int run_experiment_command(const ExperimentOptions& o, std::optional<Algorithm> forced, const std::string& fallback) {
  ExperimentSpec spec = o.resolve();
  if (forced) spec.algorithm = *forced;
  const std::string prefix = output_prefix(spec, fallback);
  const auto records = epsilon_sweep(spec);
  emit_records(records, prefix);
  if (o.trace) write_trial_trace(spec, spec.graph_eps.front(), o.trace_every, prefix + ".trace.csv");
  return 0;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct GenerateOptions {
  std::string dataset = "five_cluster";
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double subsample = 1.0;
  std::string out = "dataset";
};

int cmd_generate(const GenerateOptions& o, const CLI::App& sub) {
  nlohmann::json params = dataset_params(o.dataset);
  if (sub.count("--seed")) params["seed"] = o.seed;
  if (o.n) {
    if (params.value("generator", "") == "sun_moon") {
      params["n_sun"] = o.n;
      params["n_moon"] = 3 * o.n;
    } else {
      params["n_per_cluster"] = o.n;
    }
  }
  LabeledDataset ds = regenerate(params);
  if (o.subsample < 1.0) ds = subsample(ds, o.subsample, params.value("seed", std::uint64_t{0}));
  write_with(o.out + ".csv", [&](std::ostream& os) { write_dataset_csv(os, ds); });
  write_text(o.out + ".json", to_json(ds).dump(2) + "\n");
  std::cout << "wrote " << ds.size() << " points, " << ds.cluster_count() << " clusters to " << o.out
            << ".{csv,json}\n";
  return 0;
}

struct GraphOptions {
  std::string input = "five_cluster";
  double eps = 0.0;
  double subsample = 1.0;
  std::uint64_t seed = 0;
  double outlier_fraction = 0.0;
  std::vector<VertexId> marks;
  double penalty = 0.0;
  std::size_t gap_samples = 101;
  std::string out = "graph";
};

MarkingMode marking_mode(double penalty) {
  if (penalty > 0.0) return PenalizeMarked{penalty};
  return DeleteMarked{};
}

LaplacianMatrix build_laplacian(const LabeledDataset& ds, double eps, double fraction, std::uint64_t seed,
                                double outlier_fraction, WeightedGraph* graph_out = nullptr) {
  const LabeledDataset sample = fraction < 1.0 ? subsample(ds, fraction, seed) : ds;
  WeightedGraph g = build_epsilon_graph(sample.cloud, eps);
  if (outlier_fraction > 0.0) g = remove_outliers(g, outlier_fraction);
  if (graph_out) *graph_out = g;
  return graph_laplacian(g);
}

int cmd_graph(const GraphOptions& o) {
  const LabeledDataset ds = load_dataset(o.input);
  WeightedGraph g;
  const LaplacianMatrix L = build_laplacian(ds, o.eps, o.subsample, o.seed, o.outlier_fraction, &g);
  const SpectrumReport spec = eigendecompose(L.entries());
  const auto components = connected_components(L);
  write_text(o.out + ".graph.json", to_json(g).dump(2) + "\n");
  write_text(o.out + ".laplacian.json", to_json(L).dump(2) + "\n");
  write_with(o.out + ".laplacian.csv", [&](std::ostream& os) { write_matrix_csv(os, L.entries()); });
  nlohmann::json summary = {{"vertices", L.size()},
                            {"edges", g.edge_count()},
                            {"components", components.size()},
                            {"spectrum", to_json(spec)}};
  std::cout << "vertices " << L.size() << ", edges " << g.edge_count() << ", components " << components.size()
            << ", zero multiplicity " << spec.zero_multiplicity << ", gap " << spec.gap << "\n";
  if (!o.marks.empty()) {
    const MarkSet marks(o.marks);
    const LaplacianMatrix reduced = reduced_laplacian(L, marks, marking_mode(o.penalty));
    write_with(o.out + ".reduced.csv", [&](std::ostream& os) { write_matrix_csv(os, reduced.entries()); });
    const SpectrumReport dir = dirichlet_spectrum(L, marks);
    summary["dirichlet"] = to_json(dir);
    std::vector<VertexId> unmarked;
    for (VertexId id : reduced.vertex_ids())
      if (!marks.contains(id)) unmarked.push_back(id);
    const QuantumState phi = uniform_state(reduced.vertex_ids(), unmarked);
    const Vector v = phi.amplitudes.real();
    const HamiltonianPath path(Matrix::Identity(v.size(), v.size()) - v * v.transpose(), reduced.entries());
    const auto profile = gap_profile(path, uniform_samples(o.gap_samples));
    write_with(o.out + ".gap.csv", [&](std::ostream& os) { write_gap_profile_csv(os, profile); });
    std::cout << "dirichlet ground " << dir.eigenvalues(0) << ", dirichlet gap " << dir.gap << "\n";
  }
  write_text(o.out + ".spectrum.json", summary.dump(2) + "\n");
  return 0;
}

struct QciOptions {
  std::string input;
  std::string laplacian;
  double eps = 0.0;
  double subsample = 1.0;
  std::uint64_t seed = 0;
  double outlier_fraction = 0.0;
  std::vector<VertexId> marks;
  int iterations = 0;
  double fidelity_eps = 0.1;
  std::size_t steps = 0;
  std::size_t samples = 0;
  double penalty = 0.0;
  bool trace = false;
  std::size_t trace_every = 16;
  std::string out = "qci";
};

void write_trace_rows(std::ostream& os, const std::vector<TracePoint>& trace, std::size_t iteration) {
  for (const auto& p : trace)
    os << iteration << ',' << p.t << ',' << p.s << ',' << p.norm << ',' << p.ground_overlap << '\n';
}

int cmd_qci(const QciOptions& o) {
  std::optional<LabeledDataset> ds;
  LaplacianMatrix L;
  if (!o.laplacian.empty()) {
    L = laplacian_from_json(parse_json(read_text(o.laplacian), o.laplacian));
  } else {
    if (o.input.empty()) throw InputError("qci: give --input with --eps, or --laplacian");
    if (!(o.eps > 0.0)) throw ParameterError("qci: --eps must be positive");
    ds = load_dataset(o.input);
    L = build_laplacian(*ds, o.eps, o.subsample, o.seed, o.outlier_fraction);
  }
  QciConfig cfg;
  cfg.fidelity_eps = o.fidelity_eps;
  cfg.fixed_steps = o.steps;
  cfg.marking = marking_mode(o.penalty);
  cfg.seed = o.seed;
  if (o.trace) cfg.integrator.trace_every = std::max<std::size_t>(1, o.trace_every);
  Rng rng = derive_stream(o.seed, 99);

  std::vector<QciSnapshot> snaps;
  if (!o.marks.empty()) {
    QciSnapshot s;
    s.marks = o.marks;
    s.outcome = qci_evolve(L, MarkSet(o.marks), cfg);
    s.measured = s.outcome.distribution.sample(rng);
    snaps.push_back(std::move(s));
  } else {
    if (o.iterations < 2) throw ParameterError("qci: give --marks or --iterations >= 2");
    snaps = qci_iterations(L, o.iterations, cfg, rng);
  }

  const QciSnapshot& last = snaps.back();
  std::vector<std::size_t> counts(last.outcome.distribution.size(), 0);
  for (std::size_t i = 0; i < o.samples; ++i) {
    const VertexId v = last.outcome.distribution.sample(rng);
    const auto& ids = last.outcome.distribution.ids();
    ++counts[static_cast<std::size_t>(std::find(ids.begin(), ids.end(), v) - ids.begin())];
  }
  write_with(o.out + ".distribution.csv", [&](std::ostream& os) {
    os.precision(17);
    os << "id,probability" << (o.samples ? ",count" : "") << '\n';
    const auto& d = last.outcome.distribution;
    for (std::size_t i = 0; i < d.size(); ++i) {
      os << d.ids()[i] << ',' << d.probabilities()[i];
      if (o.samples) os << ',' << counts[i];
      os << '\n';
    }
  });
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& s : snaps)
    doc.push_back({{"marks", s.marks},
                   {"measured", s.measured},
                   {"steps", s.outcome.steps},
                   {"tv_distance", s.outcome.tv_distance},
                   {"max_norm_drift", s.outcome.max_norm_drift}});
  write_text(o.out + ".json", doc.dump(2) + "\n");
  if (ds && snaps.size() > 1) {
    const LabeledDataset sample = o.subsample < 1.0 ? subsample(*ds, o.subsample, o.seed) : *ds;
    PointCloud kept = sample.cloud;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < sample.size(); ++i)
      if (L.contains(sample.cloud.id(i))) idx.push_back(i);
    LabeledDataset restricted;
    restricted.cloud = sample.cloud.select(idx);
    for (std::size_t i : idx) restricted.truth.push_back(sample.truth[i]);
    write_with(o.out + ".snapshots.csv", [&](std::ostream& os) { write_snapshots_csv(os, snaps, restricted); });
  }
  if (o.trace)
    write_with(o.out + ".trace.csv", [&](std::ostream& os) {
      os.precision(17);
      os << "iteration,t,s,norm,ground_overlap\n";
      for (std::size_t i = 0; i < snaps.size(); ++i) write_trace_rows(os, snaps[i].outcome.trace, i + 1);
    });
  for (const auto& s : snaps) {
    std::cout << "marks {";
    for (std::size_t i = 0; i < s.marks.size(); ++i) std::cout << (i ? "," : "") << s.marks[i];
    std::cout << "} -> measured " << s.measured << " (steps " << s.outcome.steps << ", tv "
              << s.outcome.tv_distance << ")\n";
  }
  return 0;
}

struct SweepOptions {
  ExperimentOptions exp;
  std::vector<std::string> algorithms;
};

int cmd_sweep(const SweepOptions& o, const std::string& fallback = "sweep") {
  ExperimentSpec base = o.exp.resolve();
  std::vector<Algorithm> algs;
  for (const auto& a : o.algorithms) algs.push_back(parse_algorithm(a));
  if (algs.empty()) algs.push_back(base.algorithm);
  std::vector<ExperimentRecord> all;
  for (Algorithm a : algs) {
    ExperimentSpec s = base;
    s.algorithm = a;
    auto recs = epsilon_sweep(s);
    const ExperimentRecord& best = optimal_record(recs);
    std::cout << to_string(a) << ": optimal eps " << best.graph_eps << " (success "
              << percent(best.summary.success_rate) << ", median ARI " << best.summary.ari_median << ")\n";
    all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  const std::string prefix = output_prefix(base, fallback);
  emit_records(all, prefix);
  if (o.exp.trace) write_trial_trace(base, base.graph_eps.front(), o.exp.trace_every, prefix + ".trace.csv");
  return 0;
}

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string partition_dataset;
  int restarts = 200;
  std::uint64_t seed = 0;
  std::string out = "report";
};

int cmd_report(const ReportOptions& o) {
  if (o.inputs.empty() && o.partition_dataset.empty())
    throw InputError("report: give --input trial CSVs and/or --partition-analysis");
  std::vector<ExperimentRecord> records;
  for (const auto& path : o.inputs) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    auto recs = read_trials_csv(in);
    records.insert(records.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  if (!records.empty()) {
    const std::string table = table2_text(records);
    write_text(o.out + ".table.txt", table);
    write_with(o.out + ".lineplot.csv", [&](std::ostream& os) { write_lineplot_csv(os, records); });
    write_with(o.out + ".boxplot.csv", [&](std::ostream& os) { write_boxplot_csv(os, records); });
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& r : records)
      summary.push_back({{"dataset", r.dataset_name()},
                         {"algorithm", to_string(r.spec.algorithm)},
                         {"graph_eps", r.graph_eps},
                         {"summary", to_json(r.summary)}});
    write_text(o.out + ".summary.json", summary.dump(2) + "\n");
    std::cout << table;
  }
  if (!o.partition_dataset.empty()) {
    const auto parts = partition_analysis(load_dataset(o.partition_dataset), o.restarts, o.seed);
    const std::string table = table1_text(parts);
    write_text(o.out + ".partitions.txt", table);
    std::cout << table;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quac: adiabatic cluster-indicator simulator and benchmark harness"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Generate a labeled synthetic dataset");
  generate->add_option("--dataset", gen.dataset, "generator name, inline JSON params, or JSON file");
  generate->add_option("--n", gen.n, "points per cluster (sun: n, moon: 3n)");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--subsample", gen.subsample, "keep this fraction of the points");
  generate->add_option("--output,-o", gen.out, "output path prefix");

  GraphOptions gr;
  auto* graph = app.add_subcommand("graph", "Build the epsilon-ball graph, Laplacian and spectra");
  graph->add_option("--input,-i", gr.input, "dataset CSV/JSON file or generator params");
  graph->add_option("--eps", gr.eps, "epsilon-ball radius")->required();
  graph->add_option("--subsample", gr.subsample, "fraction of points used");
  graph->add_option("--seed", gr.seed, "subsample seed");
  graph->add_option("--outlier-fraction", gr.outlier_fraction, "drop components smaller than this fraction");
  graph->add_option("--marks", gr.marks, "vertex ids to mark");
  graph->add_option("--penalty", gr.penalty, "mark by diagonal penalty of this weight instead of deletion");
  graph->add_option("--gap-samples", gr.gap_samples, "s-samples in the gap profile");
  graph->add_option("--output,-o", gr.out, "output path prefix");

  QciOptions qo;
  auto* qci_cmd = app.add_subcommand("qci", "Run the quantum cluster indicator on a graph");
  qci_cmd->add_option("--input,-i", qo.input, "dataset CSV/JSON file or generator params");
  qci_cmd->add_option("--laplacian", qo.laplacian, "Laplacian JSON (instead of --input)");
  qci_cmd->add_option("--eps", qo.eps, "epsilon-ball radius");
  qci_cmd->add_option("--subsample", qo.subsample, "fraction of points used");
  qci_cmd->add_option("--seed", qo.seed, "seed for subsampling and measurement");
  qci_cmd->add_option("--outlier-fraction", qo.outlier_fraction, "drop components smaller than this fraction");
  qci_cmd->add_option("--marks", qo.marks, "vertex ids to mark");
  qci_cmd->add_option("--iterations", qo.iterations, "iterated QCI from a random first mark (k rounds)");
  qci_cmd->add_option("--fidelity-eps", qo.fidelity_eps, "adiabatic schedule fidelity parameter");
  qci_cmd->add_option("--steps", qo.steps, "fixed integrator steps (default: doubling to convergence)");
  qci_cmd->add_option("--samples", qo.samples, "measurements drawn from the final distribution");
  qci_cmd->add_option("--penalty", qo.penalty, "mark by diagonal penalty of this weight instead of deletion");
  qci_cmd->add_flag("--trace", qo.trace, "write evolution traces");
  qci_cmd->add_option("--trace-every", qo.trace_every, "steps between trace points");
  qci_cmd->add_option("--output,-o", qo.out, "output path prefix");

  ExperimentOptions qmeans_opts;
  auto* qmeans_cmd = app.add_subcommand("qmeans", "k-means trials with q-means, k++ or random seeding");
  add_experiment_options(qmeans_cmd, qmeans_opts, false);
  std::string seeding = "qmeans";
  qmeans_cmd->add_option("--seeding", seeding, "qmeans | kpp | random");

  ExperimentOptions qnn_opts;
  auto* qnn_cmd = app.add_subcommand("qnn", "q-nn labeling trials");
  add_experiment_options(qnn_cmd, qnn_opts, false);
  bool with_spectral = false;
  qnn_cmd->add_flag("--with-spectral", with_spectral, "also run spectral clustering on the same trials");

  SweepOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Epsilon sweep over one or more algorithms");
  add_experiment_options(sweep_cmd, sweep_opts.exp, true);
  sweep_cmd->add_option("--algorithms", sweep_opts.algorithms, "algorithms to sweep (default: --algorithm)");

  ReportOptions rep;
  auto* report_cmd = app.add_subcommand("report", "Re-aggregate trial CSVs into tables and plot data");
  report_cmd->add_option("--input,-i", rep.inputs, "trial CSV files");
  report_cmd->add_option("--partition-analysis", rep.partition_dataset,
                         "dataset for the inertia / determinant comparison of k-means partitions");
  report_cmd->add_option("--restarts", rep.restarts, "k-means restarts in the partition analysis");
  report_cmd->add_option("--seed", rep.seed, "seed for the partition analysis");
  report_cmd->add_option("--output,-o", rep.out, "output path prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*generate) return cmd_generate(gen, *generate);
    if (*graph) return cmd_graph(gr);
    if (*qci_cmd) return cmd_qci(qo);
    if (*qmeans_cmd) return run_experiment_command(qmeans_opts, parse_algorithm(seeding), "qmeans");
    if (*qnn_cmd) {
      if (!with_spectral) return run_experiment_command(qnn_opts, Algorithm::Qnn, "qnn");
      return cmd_sweep(SweepOptions{qnn_opts, {"qnn", "spectral"}}, "qnn");
    }
    if (*sweep_cmd) return cmd_sweep(sweep_opts);
    if (*report_cmd) return cmd_report(rep);
  } catch (const IoError& e) {
    std::cerr << "quac: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    std::cerr << "quac: " << e.what() << '\n';
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "quac: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "quac: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
