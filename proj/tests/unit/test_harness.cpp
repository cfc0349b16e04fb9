#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace quac;
using namespace support;

namespace {

ExperimentSpec small_spec(Algorithm a) {
  ExperimentSpec s;
  s.dataset = {{"generator", "five_cluster"}, {"n_per_cluster", 50}};
  s.graph_eps = {3.0};
  s.algorithm = a;
  s.trials = 4;
  s.subsample_fraction = 0.2;
  s.m = 20;
  s.root_seed = 5;
  s.workers = 1;
  return s;
}

std::string csv_of(const std::vector<ExperimentRecord>& r) {
  std::ostringstream os;
  write_trials_csv(os, r);
  return os.str();
}

}  // namespace

TEST(Spec, ValidationErrors) {
  ExperimentSpec s;
  EXPECT_NO_THROW(s.validate());
  auto bad = [](auto mutate) {
    ExperimentSpec x;
    mutate(x);
    EXPECT_THROW(x.validate(), ParameterError);
  };
  bad([](ExperimentSpec& x) { x.trials = 0; });
  bad([](ExperimentSpec& x) { x.graph_eps.clear(); });
  bad([](ExperimentSpec& x) { x.graph_eps = {-1.0}; });
  bad([](ExperimentSpec& x) { x.subsample_fraction = 0.0; });
  bad([](ExperimentSpec& x) { x.fidelity_eps = 1.0; });
  bad([](ExperimentSpec& x) { x.l = 0; });
  bad([](ExperimentSpec& x) { x.dataset = nlohmann::json::object(); });
  EXPECT_THROW(parse_algorithm("kmedoids"), ParameterError);
  EXPECT_EQ(parse_algorithm("k++"), Algorithm::Kpp);
}

TEST(Spec, JsonRoundTrip) {
  ExperimentSpec s = small_spec(Algorithm::Qnn);
  s.graph_eps = {2.0, 2.5};
  s.qnn_labeling = QnnLabeling::Majority;
  s.kpp_linear = true;
  const ExperimentSpec back = spec_from_json(to_json(s));
  EXPECT_EQ(to_json(back), to_json(s));
  const ExperimentSpec partial = spec_from_json({{"dataset", "elliptical"}, {"graph_eps", 1.5}, {"trials", 7}});
  EXPECT_EQ(partial.dataset.at("generator"), "elliptical");
  EXPECT_EQ(partial.graph_eps, std::vector<double>{1.5});
  EXPECT_EQ(partial.trials, 7u);
  EXPECT_EQ(partial.l, 5);
  EXPECT_THROW(spec_from_json({{"trials", "many"}}), InputError);
  EXPECT_THROW(spec_from_json({{"algorithm", "dbscan"}}), ParameterError);
  EXPECT_THROW(spec_from_json(nlohmann::json::array()), InputError);
}

TEST(Experiment, SingleTrialDeterministic) {
  ExperimentSpec s = small_spec(Algorithm::QMeans);
  s.trials = 1;
  const ExperimentRecord a = run_experiment(s), b = run_experiment(s);
  ASSERT_EQ(a.trials.size(), 1u);
  EXPECT_EQ(csv_of({a}), csv_of({b}));
  EXPECT_FALSE(a.trials[0].skipped);
  EXPECT_TRUE(a.trials[0].lloyd_monotone);
}

TEST(Experiment, CsvIdenticalAcrossWorkerCounts) {
  for (Algorithm a : {Algorithm::QMeans, Algorithm::Kpp, Algorithm::Random, Algorithm::Qnn}) {
    ExperimentSpec s = small_spec(a);
    const std::string serial = csv_of({run_experiment(s)});
    s.workers = 3;
    EXPECT_EQ(csv_of({run_experiment(s)}), serial) << to_string(a);
  }
}

TEST(Experiment, ReaggregationMatches) {
  ExperimentSpec s = small_spec(Algorithm::Kpp);
  s.trials = 12;
  s.graph_eps = {2.5, 3.0};
  const std::vector<ExperimentRecord> sweep = epsilon_sweep(s);
  std::istringstream is(csv_of(sweep));
  const std::vector<ExperimentRecord> back = read_trials_csv(is);
  ASSERT_EQ(back.size(), sweep.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(to_json(back[i].summary), to_json(sweep[i].summary));
    EXPECT_EQ(back[i].graph_eps, sweep[i].graph_eps);
  }
}

TEST(Experiment, SinglePointSweepEqualsRun) {
  const ExperimentSpec s = small_spec(Algorithm::Random);
  EXPECT_EQ(csv_of(epsilon_sweep(s)), csv_of({run_experiment(s)}));
  ExperimentSpec grid = s;
  grid.graph_eps = {1.0, 2.0};
  EXPECT_THROW(run_experiment(grid), ParameterError);
}

TEST(Experiment, SpectralSkipsDisconnectedGraphs) {
  ExperimentSpec s = small_spec(Algorithm::Spectral);
  s.trials = 3;
  const ExperimentRecord r = run_experiment(s);
  EXPECT_EQ(r.summary.skipped, 3u);
  EXPECT_EQ(r.summary.completed, 0u);
  for (const auto& t : r.trials) {
    EXPECT_TRUE(t.skipped);
    EXPECT_GT(t.components, 1u);
    EXPECT_NE(t.skip_reason.find("not connected"), std::string::npos);
  }
}

TEST(Experiment, CommonRandomNumbersAcrossEpsilon) {
  const ExperimentSpec s = small_spec(Algorithm::Kpp);
  const ExperimentRecord a = run_experiment(s, 2.0), b = run_experiment(s, 4.0);
  for (std::size_t t = 0; t < s.trials; ++t) EXPECT_EQ(a.trials[t].inertia, b.trials[t].inertia);
}

TEST(Aggregates, WilsonInterval) {
  EXPECT_EQ(wilson_interval(0, 0), std::make_pair(0.0, 1.0));
  const auto [lo, hi] = wilson_interval(50, 100);
  EXPECT_NEAR(lo, 0.4038, 1e-4);
  EXPECT_NEAR(hi, 0.5962, 1e-4);
  EXPECT_NEAR(wilson_interval(10, 10).second, 1.0, 1e-12);
  EXPECT_GT(wilson_interval(10, 10).first, 0.69);
}

TEST(Aggregates, RecomputedFromRows) {
  std::vector<TrialRecord> t(5);
  for (std::size_t i = 0; i < 5; ++i) {
    t[i].trial = i;
    t[i].success = i % 2 == 0;
    t[i].iterations = static_cast<int>(i + 1);
    t[i].ari = 0.1 * static_cast<double>(i);
  }
  t[4].skipped = true;
  const Aggregate a = aggregate(t);
  EXPECT_EQ(a.completed, 4u);
  EXPECT_EQ(a.successes, 2u);
  EXPECT_EQ(a.success_rate, 0.5);
  EXPECT_EQ(a.iterations_success.mean, 2.0);
  EXPECT_EQ(a.iterations_failure.mean, 3.0);
  EXPECT_NEAR(a.iterations_success.stddev, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(a.ari_median, 0.15, 1e-15);
  EXPECT_NEAR(quantile({1, 2, 3, 4}, 0.25), 1.75, 1e-15);
}

TEST(Report, ErrorsOnEmptyInput) {
  std::ostringstream os;
  EXPECT_THROW(write_trials_csv(os, {}), InputError);
  EXPECT_THROW(write_boxplot_csv(os, {}), InputError);
  EXPECT_THROW(write_lineplot_csv(os, {}), InputError);
  EXPECT_THROW(table2_text({}), InputError);
  EXPECT_THROW(table1_text({}), InputError);
  std::istringstream header_only(std::string(kTrialCsvHeader) + "\n");
  EXPECT_THROW(read_trials_csv(header_only), InputError);
  std::istringstream wrong("a,b\n");
  EXPECT_THROW(read_trials_csv(wrong), InputError);
}

TEST(Report, TableShape) {
  ExperimentSpec s = small_spec(Algorithm::Kpp);
  s.trials = 3;
  const std::string text = table2_text({run_experiment(s)});
  EXPECT_NE(text.find("Success Rate"), std::string::npos);
  EXPECT_NE(text.find("# Iterations when Successful"), std::string::npos);
  EXPECT_NE(text.find("# Iterations when Failed"), std::string::npos);
  EXPECT_NE(text.find("[five_cluster]"), std::string::npos);
  EXPECT_NE(text.find("kpp"), std::string::npos);
  std::ostringstream box, line;
  write_boxplot_csv(box, {run_experiment(s)});
  write_lineplot_csv(line, {run_experiment(s)});
  const std::string box_text = box.str();
  EXPECT_EQ(std::count(box_text.begin(), box_text.end(), '\n'), 2);
  EXPECT_EQ(line.str().rfind("dataset,algorithm,graph_eps,completed,successes", 0), 0u);
}

TEST(Report, OptimalRecordPrefersBestThenSmallerEps) {
  std::vector<ExperimentRecord> sweep(3);
  const double rates[] = {0.5, 0.9, 0.9};
  for (int i = 0; i < 3; ++i) {
    sweep[i].graph_eps = 1.0 + i;
    sweep[i].summary.completed = 10;
    sweep[i].summary.success_rate = rates[i];
  }
  EXPECT_EQ(optimal_record(sweep).graph_eps, 2.0);
  EXPECT_THROW(optimal_record({}), InputError);
}

TEST(PartitionAnalysis, CorrectFirstThenDistinctIncorrect) {
  const LabeledDataset ds = gen_elliptical(200, 3);
  const auto parts = partition_analysis(ds, 20, 1);
  ASSERT_GE(parts.size(), 1u);
  EXPECT_EQ(parts[0].name, "correct");
  for (std::size_t i = 1; i < parts.size(); ++i) {
    EXPECT_FALSE(success_indicator(parts[i].labels, ds.truth));
    if (i > 1) {
      EXPECT_LE(parts[i - 1].inertia, parts[i].inertia);
    }
  }
  EXPECT_NE(table1_text(parts).find("|S_W|"), std::string::npos);
}

TEST(QciIterations, OneSnapshotPerEvolution) {
  const LaplacianMatrix L = graph_laplacian(cliques({3, 3, 3}));
  Rng rng(2);
  const auto snaps = qci_iterations(L, 3, QciConfig{}, rng, VertexId{0});
  ASSERT_EQ(snaps.size(), 2u);
  EXPECT_EQ(snaps[0].marks, std::vector<VertexId>{0});
  EXPECT_EQ(snaps[1].marks.size(), 2u);
  EXPECT_EQ(snaps[1].marks[1], snaps[0].measured);
  std::ostringstream os;
  LabeledDataset sample;
  sample.cloud = cloud_2d({{0, 0}, {1, 0}, {0, 1}, {5, 0}, {6, 0}, {5, 1}, {0, 5}, {1, 5}, {0, 6}});
  sample.truth = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  write_snapshots_csv(os, snaps, sample);
  EXPECT_EQ(os.str().substr(0, 17), "id,x,y,label,p1,p");
}
