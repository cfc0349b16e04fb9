#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace quac;
using namespace support;

namespace {

std::vector<VertexId> ids(std::size_t n) {
  std::vector<VertexId> v(n);
  std::iota(v.begin(), v.end(), VertexId{0});
  return v;
}

double grover_fidelity(std::size_t n, double eps) {
  const HamiltonianPath p = grover_path(n, {0});
  const ConvergedEvolution c =
      evolve_converged(p, grover_schedule(n, 1, eps), uniform_state(ids(n)));
  return std::norm(c.result.state.amplitudes(0));
}

}  // namespace

TEST(Schedule, TwoStateFinalTime) {
  EXPECT_NEAR(grover_schedule(2, 1, 0.1).t_final(), 5.0 * M_PI, 1e-12);
}

TEST(Schedule, EndpointsAndMidpoint) {
  for (std::size_t n : {2u, 3u, 8u, 100u})
    for (double eps : {0.05, 0.3}) {
      const Schedule s = grover_schedule(n, 1, eps);
      EXPECT_NEAR(s.s(0.0), 0.0, 1e-10);
      EXPECT_NEAR(s.s(s.t_final()), 1.0, 1e-10);
      EXPECT_NEAR(s.s(0.5 * s.t_final()), 0.5, 1e-12);
    }
}

TEST(Schedule, FinalTimeClosedForm) {
  for (std::size_t n : {3u, 8u, 50u})
    for (std::size_t m : {1u, 2u}) {
      const double r = double(n) / double(m), eps = 0.2;
      const double expected = r * std::atan(std::sqrt(r - 1)) / (std::sqrt(r - 1) * eps);
      EXPECT_NEAR(grover_schedule(n, m, eps).t_final(), expected, 1e-9 * expected);
    }
}

TEST(Schedule, StrictlyIncreasing) {
  const Schedule s = grover_schedule(16, 1, 0.1);
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = s.s(s.t_final() * i / 1000.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Schedule, IntegralMatchesQuadrature) {
  const Schedule s = grover_schedule(10, 1, 0.2);
  const double a = 0.3, b = 0.8 * s.t_final();
  double quad = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) quad += s.s(a + (b - a) * (i + 0.5) / n) * (b - a) / n;
  EXPECT_NEAR(s.integral(a, b), quad, 1e-7);
}

TEST(Schedule, RejectsBadParameters) {
  EXPECT_THROW(grover_schedule(1, 1, 0.1), ParameterError);
  EXPECT_THROW(grover_schedule(4, 4, 0.1), ParameterError);
  EXPECT_THROW(grover_schedule(4, 0, 0.1), ParameterError);
  EXPECT_THROW(grover_schedule(4, 1, 0.0), ParameterError);
  EXPECT_THROW(grover_schedule(4, 1, 1.0), ParameterError);
}

TEST(UniformState, Examples) {
  const QuantumState all = uniform_state(ids(4));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(all.amplitudes(i).real(), 0.5, 1e-15);
  const QuantumState single = uniform_state(ids(5), {3});
  EXPECT_EQ(single.amplitudes(3), Complex(1.0, 0.0));
  EXPECT_NEAR(single.amplitudes.norm(), 1.0, 1e-15);
  const QuantumState pair = uniform_state(ids(8), {2, 6});
  EXPECT_NEAR(pair.amplitudes(2).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(pair.amplitudes(6).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(pair.is_normalized());
  EXPECT_THROW(uniform_state(ids(3), {}), InputError);
  EXPECT_THROW(uniform_state(ids(3), {9}), InputError);
}

TEST(Measure, BasisStateAlwaysReturnsItself) {
  Rng rng(1);
  const QuantumState s = uniform_state({10, 20, 30}, {20});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(measure(s, rng), 20);
}

TEST(Measure, BornRuleOnPair) {
  Rng rng(2);
  const QuantumState s = uniform_state({7, 8});
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += measure(s, rng) == 7;
  EXPECT_NEAR(hits / 10000.0, 0.5, 0.02);
}

TEST(Measure, ZeroAmplitudeNeverReturned) {
  Rng rng(3);
  CVector a(4);
  a << 0.0, Complex(0.6, 0.0), 0.0, Complex(0.0, 0.8);
  const QuantumState s(a, {0, 1, 2, 3});
  for (int i = 0; i < 2000; ++i) {
    const VertexId v = measure(s, rng);
    EXPECT_TRUE(v == 1 || v == 3);
  }
}

TEST(Measure, DeterministicGivenSeed) {
  const QuantumState s = uniform_state(ids(10));
  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(measure(s, a), measure(s, b));
}

TEST(OutcomeDistributionTest, UniformAndBasis) {
  const OutcomeDistribution u = outcome_distribution(uniform_state(ids(6)));
  double total = 0.0;
  for (double p : u.probabilities()) {
    EXPECT_NEAR(p, 1.0 / 6.0, 1e-15);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-8);
  const OutcomeDistribution b = outcome_distribution(uniform_state(ids(6), {4}));
  EXPECT_EQ(b.probability(4), 1.0);
  EXPECT_EQ(b.mass_on(std::vector<VertexId>{0, 1, 2, 3, 5}), 0.0);
}

TEST(OutcomeDistributionTest, TotalVariation) {
  const OutcomeDistribution a({1, 2}, {0.5, 0.5}), b({2, 3}, {0.5, 0.5});
  EXPECT_NEAR(total_variation(a, b), 0.5, 1e-15);
  EXPECT_NEAR(total_variation(a, a), 0.0, 1e-15);
}

TEST(Evolve, StationaryDiagonalState) {
  Matrix d = Vector::LinSpaced(5, 0.0, 4.0).asDiagonal();
  const QuantumState psi0 = uniform_state(ids(5), {2});
  const QuantumState out = evolve(d, d, grover_schedule(5, 1, 0.1), psi0, 50);
  EXPECT_NEAR(std::norm(out.amplitudes(2)), 1.0, 1e-12);
}

TEST(Evolve, GroverEightStatesSingleMark) {
  EXPECT_GE(grover_fidelity(8, 0.1), 0.99);
}

TEST(Evolve, FidelityBoundAcrossSizes) {
  for (std::size_t n : {4u, 8u, 16u, 32u})
    for (double eps : {0.05, 0.1, 0.2}) EXPECT_GE(grover_fidelity(n, eps), 1.0 - eps * eps) << n << " " << eps;
}

TEST(Evolve, GeneralizedGroverConcentratesOnTarget) {
  Rng rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    const GroverInstance inst = random_grover_instance(rng);
    const GeneralizedGrover gg = generalized_grover(inst.graph, inst.marks);
    const auto basis = gg.final_laplacian.vertex_ids();
    const ConvergedEvolution c =
        evolve_converged(gg.path, grover_schedule(gg.n, gg.n_target, 0.05), uniform_state(basis));
    EXPECT_GE(outcome_distribution(c.result.state).mass_on(gg.target), 0.99);
  }
}

TEST(Evolve, NormDriftSmallAndConvergenceMonotone) {
  const HamiltonianPath p = grover_path(12, {0});
  const Schedule s = grover_schedule(12, 1, 0.1);
  ConvergenceOptions opts;
  opts.initial_steps = 8;
  const ConvergedEvolution c = evolve_converged(p, s, uniform_state(ids(12)), opts);
  EXPECT_LT(c.result.max_norm_drift, 1e-6);
  EXPECT_LT(c.tv_distance(), 1e-4);
  for (std::size_t i = 1; i < c.tv_history.size(); ++i) EXPECT_LT(c.tv_history[i], c.tv_history[i - 1]);
}

TEST(Evolve, TraceRecordsEndpoints) {
  const HamiltonianPath p = grover_path(6, {0});
  const Schedule s = grover_schedule(6, 1, 0.2);
  const EvolutionResult r = evolve_detailed(p, s, uniform_state(ids(6)), 200, 50);
  ASSERT_EQ(r.trace.size(), 5u);
  EXPECT_EQ(r.trace.front().t, 0.0);
  EXPECT_NEAR(r.trace.back().t, s.t_final(), 1e-12);
  EXPECT_NEAR(r.trace.front().ground_overlap, 1.0, 1e-12);
  for (const auto& tp : r.trace) EXPECT_NEAR(tp.norm, 1.0, 1e-10);
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  EXPECT_EQ(os.str().substr(0, 25), "t,s,norm,ground_overlap\n0");
}

TEST(Evolve, InputValidation) {
  const HamiltonianPath p = grover_path(4, {0});
  const Schedule s = grover_schedule(4, 1, 0.1);
  EXPECT_THROW(evolve_detailed(p, s, uniform_state(ids(4)), 0), ParameterError);
  EXPECT_THROW(evolve_detailed(p, s, uniform_state(ids(3)), 10), InputError);
  CVector bad = CVector::Ones(4);
  EXPECT_THROW(evolve_detailed(p, s, QuantumState(bad, ids(4)), 10), InputError);
}

TEST(Evolve, NoConvergenceWithinBudgetIsIntegrationError) {
  const HamiltonianPath p = grover_path(16, {0});
  ConvergenceOptions opts;
  opts.initial_steps = 1;
  opts.max_steps = 4;
  EXPECT_THROW(evolve_converged(p, grover_schedule(16, 1, 0.1), uniform_state(ids(16)), opts),
               IntegrationError);
}

TEST(Evolve, ProjectorConstructorAgreesWithGeneralPath) {
  Rng rng(6);
  const LaplacianMatrix L = graph_laplacian(random_graph(9, 0.4, rng));
  const LaplacianMatrix r = reduced_laplacian(L, MarkSet{0});
  const QuantumState psi0 = uniform_state(r.vertex_ids());
  const Vector phi = psi0.amplitudes.real();
  const Schedule s = grover_schedule(r.size(), 1, 0.1);
  const HamiltonianPath path(Matrix::Identity(8, 8) - phi * phi.transpose(), r.entries());
  const QuantumState a = SplittingPropagator(path).run(s, psi0, 400).state;
  const QuantumState b = SplittingPropagator(r.entries(), phi).run(s, psi0, 400).state;
  EXPECT_GT(std::norm(a.amplitudes.dot(b.amplitudes)), 1.0 - 1e-12);
}

TEST(Evolve, AcceptedRunResolvesFastestPhase) {
  Rng rng(12);
  const LaplacianMatrix L = graph_laplacian(random_graph(12, 0.5, rng));
  const LaplacianMatrix r = reduced_laplacian(L, MarkSet{0});
  const QuantumState psi0 = uniform_state(r.vertex_ids());
  const SplittingPropagator prop(r.entries(), psi0.amplitudes.real());
  const Schedule s = grover_schedule(r.size(), 1, 1e-3);
  const ConvergedEvolution c = evolve_converged(prop, s, psi0);
  const double dt = s.t_final() / static_cast<double>(c.result.steps);
  EXPECT_LE(dt * std::max(1.0, prop.final_spectral_radius()), ConvergenceOptions{}.max_step_phase);
}
