#pragma once

// Quantum cluster indicator: evolve from the uniform superposition over the
// unmarked vertices to the ground state of the reduced Laplacian, then
// measure. The schedule is the single-target Grover schedule on the evolved
// dimension.

#include <variant>
#include <vector>

#include "quac/adiabatic.hpp"
#include "quac/error.hpp"
#include "quac/graph.hpp"
#include "quac/random.hpp"

namespace quac {

struct QciConfig {
  double fidelity_eps = 0.1;
  std::size_t fixed_steps = 0;  // > 0: one fixed-step run, no doubling
  ConvergenceOptions integrator{};
  MarkingMode marking = DeleteMarked{};
  std::uint64_t seed = 0;

  void validate() const {
    if (!(fidelity_eps > 0.0 && fidelity_eps < 1.0))
      throw ParameterError("QciConfig: fidelity_eps must lie in (0, 1)");
    if (!(integrator.tv_tolerance > 0.0))
      throw ParameterError("QciConfig: tv_tolerance must be positive");
    if (!(integrator.max_step_phase > 0.0))
      throw ParameterError("QciConfig: max_step_phase must be positive");
  }
};

struct QciOutcome {
  OutcomeDistribution distribution;  // over original vertex ids
  std::vector<VertexId> basis;       // evolved index set
  std::size_t steps = 0;             // 0 when no evolution was needed
  double tv_distance = 0.0;          // last step-doubling difference
  double max_norm_drift = 0.0;
  std::vector<TracePoint> trace;
};

/// Runs the evolution once and returns the full outcome distribution.
inline QciOutcome qci_evolve(const LaplacianMatrix& L, const MarkSet& marks, const QciConfig& cfg) {
  cfg.validate();
  if (marks.empty()) throw InputError("qci: mark set is empty");
  marks.validate_for(L);
  const LaplacianMatrix reduced = reduced_laplacian(L, marks, cfg.marking);

  QciOutcome out;
  out.basis = reduced.vertex_ids();
  std::vector<VertexId> unmarked;
  for (VertexId id : out.basis)
    if (!marks.contains(id)) unmarked.push_back(id);
  if (unmarked.empty()) throw InputError("qci: every vertex is marked");

  if (unmarked.size() == 1) {
    std::vector<double> p(out.basis.size(), 0.0);
    for (std::size_t i = 0; i < out.basis.size(); ++i)
      if (out.basis[i] == unmarked.front()) p[i] = 1.0;
    out.distribution = OutcomeDistribution(out.basis, std::move(p));
    return out;
  }

  const QuantumState psi0 = uniform_state(out.basis, unmarked);
  const Vector phi = psi0.amplitudes.real();
  const SplittingPropagator propagator(reduced.entries(), phi);
  const Schedule schedule = grover_schedule(unmarked.size(), 1, cfg.fidelity_eps);

  EvolutionResult result;
  if (cfg.fixed_steps) {
    result = propagator.run(schedule, psi0, cfg.fixed_steps, cfg.integrator.trace_every);
  } else {
    ConvergedEvolution conv = evolve_converged(propagator, schedule, psi0, cfg.integrator);
    out.tv_distance = conv.tv_distance();
    result = std::move(conv.result);
  }
  out.steps = result.steps;
  out.max_norm_drift = result.max_norm_drift;
  out.trace = std::move(result.trace);
  out.distribution = outcome_distribution(result.state);
  return out;
}

inline OutcomeDistribution qci_distribution(const LaplacianMatrix& L, const MarkSet& marks,
                                            const QciConfig& cfg) {
  return qci_evolve(L, marks, cfg).distribution;
}

/// One measured vertex drawn from `rng`.
inline VertexId qci(const LaplacianMatrix& L, const MarkSet& marks, const QciConfig& cfg,
                    Rng& rng) {
  return qci_distribution(L, marks, cfg).sample(rng);
}

/// One measured vertex drawn from a stream seeded by cfg.seed.
inline VertexId qci(const LaplacianMatrix& L, const MarkSet& marks, const QciConfig& cfg) {
  Rng rng(cfg.seed);
  return qci(L, marks, cfg, rng);
}

}  // namespace quac
