#pragma once

// Time-dependent Schroedinger evolution i d/dt psi = H(s(t)) psi (hbar = 1)
// along H(s) = (1 - s) H_init + s H_final with the adiabatic Grover schedule.
//
// Integrator: Strang splitting of the two endpoint terms, raised to fourth
// order by Suzuki's five-stage composition. The state is kept in the
// eigenbasis of H_final, where the H_final flow is diagonal. The H_init flow
// is applied through the spectral projectors of H_init off its most
// degenerate level, so I - |phi><phi| costs O(n) per application. The clock
// is treated as an extra coordinate: the H_init flow integrates 1 - s(t)
// exactly over its sub-interval, and the H_final flow freezes s at the
// sub-interval midpoint. Every flow is unitary.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <vector>

#include "quac/error.hpp"
#include "quac/linalg.hpp"
#include "quac/random.hpp"
#include "quac/spectral.hpp"

namespace quac {

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

/// s(t) = tan(2 sqrt(r-1)/r * eps * t - atan(sqrt(r-1))) / (2 sqrt(r-1)) + 1/2
/// with r = n / |M|; s(0) = 0 and s(t_final) = 1.
class Schedule {
 public:
  Schedule(std::size_t n_states, std::size_t n_marked, double fidelity_eps)
      : n_states_(n_states), n_marked_(n_marked), eps_(fidelity_eps) {
    if (n_marked == 0 || n_states < 2)
      throw ParameterError("Schedule: need n >= 2 and at least one marked state");
    if (!(fidelity_eps > 0.0 && fidelity_eps < 1.0))
      throw ParameterError("Schedule: fidelity_eps must lie in (0, 1)");
    ratio_ = static_cast<double>(n_states) / static_cast<double>(n_marked);
    if (!(ratio_ > 1.0)) throw ParameterError("Schedule: r = n/|M| must exceed 1");
    root_ = std::sqrt(ratio_ - 1.0);
    omega_ = 2.0 * root_ / ratio_ * eps_;
    theta_ = std::atan(root_);
    t_final_ = 2.0 * theta_ / omega_;
  }

  std::size_t n_states() const { return n_states_; }
  std::size_t n_marked() const { return n_marked_; }
  double ratio() const { return ratio_; }
  double fidelity_eps() const { return eps_; }
  double t_final() const { return t_final_; }

  double s(double t) const { return std::tan(omega_ * t - theta_) / (2.0 * root_) + 0.5; }

  /// Exact integral of s over [t0, t1] (signed).
  double integral(double t0, double t1) const {
    const double log_cos0 = std::log(std::cos(omega_ * t0 - theta_));
    const double log_cos1 = std::log(std::cos(omega_ * t1 - theta_));
    return 0.5 * (t1 - t0) + (log_cos0 - log_cos1) / (2.0 * root_ * omega_);
  }

 private:
  std::size_t n_states_;
  std::size_t n_marked_;
  double eps_;
  double ratio_ = 0.0;
  double root_ = 0.0;
  double omega_ = 0.0;
  double theta_ = 0.0;
  double t_final_ = 0.0;
};

inline Schedule grover_schedule(std::size_t n, std::size_t n_marked, double fidelity_eps) {
  if (n_marked >= n) throw ParameterError("grover_schedule: r = n/|M| must exceed 1");
  return Schedule(n, n_marked, fidelity_eps);
}

// ---------------------------------------------------------------------------
// States and measurement
// ---------------------------------------------------------------------------

struct QuantumState {
  CVector amplitudes;
  std::vector<VertexId> vertex_ids;

  QuantumState() = default;
  QuantumState(CVector amps, std::vector<VertexId> ids)
      : amplitudes(std::move(amps)), vertex_ids(std::move(ids)) {
    if (static_cast<Eigen::Index>(vertex_ids.size()) != amplitudes.size())
      throw InputError("QuantumState: amplitude/id size mismatch");
  }

  std::size_t dim() const { return vertex_ids.size(); }
  double norm() const { return amplitudes.norm(); }
  bool is_normalized(double tol = 1e-8) const { return std::abs(norm() - 1.0) <= tol; }
};

/// |phi_A> = |A|^{-1/2} sum_{k in A} |k> over the basis `basis_ids`.
inline QuantumState uniform_state(const std::vector<VertexId>& basis_ids,
                                  const std::vector<VertexId>& subset) {
  if (subset.empty()) throw InputError("uniform_state: empty subset");
  const std::set<VertexId> members(subset.begin(), subset.end());
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis_ids.size()));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < basis_ids.size(); ++i)
    if (members.count(basis_ids[i])) {
      amps(static_cast<Eigen::Index>(i)) = 1.0;
      ++hits;
    }
  if (hits != members.size()) throw InputError("uniform_state: subset id outside the basis");
  amps /= std::sqrt(static_cast<double>(hits));
  return QuantumState(std::move(amps), basis_ids);
}

inline QuantumState uniform_state(const std::vector<VertexId>& basis_ids) {
  return uniform_state(basis_ids, basis_ids);
}

/// Categorical distribution over vertex ids with inverse-CDF sampling.
class OutcomeDistribution {
 public:
  OutcomeDistribution() = default;
  OutcomeDistribution(std::vector<VertexId> ids, std::vector<double> probabilities)
      : ids_(std::move(ids)), probs_(std::move(probabilities)) {
    if (ids_.size() != probs_.size() || ids_.empty())
      throw InputError("OutcomeDistribution: need matching, nonempty ids and probabilities");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) throw InputError("OutcomeDistribution: negative probability");
      total += p;
    }
    if (!(total > 0.0)) throw InputError("OutcomeDistribution: zero total mass");
    cdf_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      probs_[i] /= total;
      acc += probs_[i];
      cdf_[i] = acc;
      index_.emplace(ids_[i], i);
    }
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<VertexId>& ids() const { return ids_; }
  const std::vector<double>& probabilities() const { return probs_; }

  double probability(VertexId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? 0.0 : probs_[it->second];
  }

  template <class Container>
  double mass_on(const Container& ids) const {
    double m = 0.0;
    for (VertexId id : ids) m += probability(id);
    return m;
  }

  VertexId sample(Rng& rng) const {
    const double u = uniform01(rng) * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    if (i >= ids_.size()) i = ids_.size() - 1;
    // Never return a zero-probability outcome (possible only at cdf ties).
    while (probs_[i] == 0.0 && i > 0) --i;
    return ids_[i];
  }

 private:
  std::vector<VertexId> ids_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  std::map<VertexId, std::size_t> index_;
};

/// Half the L1 distance, over the union of supports.
inline double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  std::set<VertexId> ids(a.ids().begin(), a.ids().end());
  ids.insert(b.ids().begin(), b.ids().end());
  double tv = 0.0;
  for (VertexId id : ids) tv += std::abs(a.probability(id) - b.probability(id));
  return 0.5 * tv;
}

inline OutcomeDistribution outcome_distribution(const QuantumState& psi) {
  std::vector<double> p(psi.dim());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = std::norm(psi.amplitudes(static_cast<Eigen::Index>(i)));
  return OutcomeDistribution(psi.vertex_ids, std::move(p));
}

/// Born-rule measurement in the vertex basis.
inline VertexId measure(const QuantumState& psi, Rng& rng) {
  return outcome_distribution(psi).sample(rng);
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

struct TracePoint {
  double t;
  double s;
  double norm;
  double ground_overlap;  // weight of psi in the ground eigenspace of H(s)
};

struct EvolutionResult {
  QuantumState state;  // renormalized once at the end
  std::size_t steps = 0;
  double max_norm_drift = 0.0;  // before renormalization
  std::vector<TracePoint> trace;
};

inline constexpr double kNormDriftLimit = 1e-3;

class SplittingPropagator {
 public:
  explicit SplittingPropagator(const HamiltonianPath& path) : path_(path) {
    Eigen::SelfAdjointEigenSolver<Matrix> final_solver(path.final());
    final_vectors_ = final_solver.eigenvectors();
    final_values_ = final_solver.eigenvalues();

    Eigen::SelfAdjointEigenSolver<Matrix> init_solver(path.initial());
    const Vector& mu = init_solver.eigenvalues();
    const Eigen::Index n = mu.size();
    const double tol = 1e-9 * std::max(1.0, mu.cwiseAbs().maxCoeff());
    // Find the most populated eigenvalue level of H_init.
    Eigen::Index best_start = 0, best_len = 0;
    for (Eigen::Index i = 0; i < n;) {
      Eigen::Index j = i + 1;
      while (j < n && mu(j) - mu(i) <= tol) ++j;
      if (j - i > best_len) {
        best_start = i;
        best_len = j - i;
      }
      i = j;
    }
    base_level_ = n ? mu.segment(best_start, best_len).mean() : 0.0;
    std::vector<Eigen::Index> others;
    for (Eigen::Index i = 0; i < n; ++i)
      if (i < best_start || i >= best_start + best_len) others.push_back(i);
    low_rank_.resize(n, static_cast<Eigen::Index>(others.size()));
    level_shift_.resize(static_cast<Eigen::Index>(others.size()));
    for (std::size_t c = 0; c < others.size(); ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      low_rank_.col(col) = final_vectors_.transpose() * init_solver.eigenvectors().col(others[c]);
      level_shift_(col) = mu(others[c]) - base_level_;
    }
    low_rank_c_ = low_rank_.cast<Complex>();
  }

  /// H_init = I - |phi><phi| for unit phi; skips the H_init eigensolve.
  SplittingPropagator(const Matrix& H_final, const Vector& phi)
      : path_(Matrix::Identity(H_final.rows(), H_final.cols()) - phi * phi.transpose(), H_final) {
    if (std::abs(phi.norm() - 1.0) > 1e-10)
      throw InputError("SplittingPropagator: driver vector must be a unit vector");
    Eigen::SelfAdjointEigenSolver<Matrix> final_solver(H_final);
    final_vectors_ = final_solver.eigenvectors();
    final_values_ = final_solver.eigenvalues();
    base_level_ = 1.0;
    low_rank_ = final_vectors_.transpose() * phi;
    level_shift_ = Vector::Constant(1, -1.0);
    low_rank_c_ = low_rank_.cast<Complex>();
  }

  const HamiltonianPath& path() const { return path_; }
  double final_spectral_radius() const {
    return final_values_.size() ? final_values_.cwiseAbs().maxCoeff() : 0.0;
  }

  /// Fixed-step evolution from t = 0 to t_final. `trace_every` > 0 records a
  /// trace point every that many steps (plus the endpoints).
  EvolutionResult run(const Schedule& schedule, const QuantumState& psi0, std::size_t steps,
                      std::size_t trace_every = 0) const {
    if (steps < 1) throw ParameterError("evolve: steps must be >= 1");
    if (psi0.amplitudes.size() != path_.dim())
      throw InputError("evolve: state dimension differs from the Hamiltonian");
    if (!psi0.is_normalized()) throw InputError("evolve: initial state is not normalized");

    EvolutionResult result;
    result.steps = steps;
    CVector psi = to_final_basis(psi0.amplitudes);
    const double h = schedule.t_final() / static_cast<double>(steps);
    constexpr double kP = 0.41449077179437573714;  // 1 / (4 - 4^{1/3})
    constexpr double kStages[5] = {kP, kP, 1.0 - 4.0 * kP, kP, kP};

    double pending_alpha = 0.0;  // accumulated H_init flow not yet applied
    auto init_weight = [&](double a, double b) { return (b - a) - schedule.integral(a, b); };
    auto record = [&](double t) {
      apply_initial(psi, pending_alpha);
      pending_alpha = 0.0;
      result.trace.push_back(trace_point(schedule, psi, t));
    };

    if (trace_every) record(0.0);
    double t = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
      double clock = t;
      for (double gamma : kStages) {
        const double tau = gamma * h;
        const double mid = clock + 0.5 * tau;
        pending_alpha += init_weight(clock, mid);
        apply_initial(psi, pending_alpha);
        pending_alpha = 0.0;
        apply_final(psi, tau * schedule.s(mid));
        pending_alpha += init_weight(mid, clock + tau);
        clock += tau;
      }
      t = (step + 1 == steps) ? schedule.t_final() : h * static_cast<double>(step + 1);
      if ((step & 63u) == 63u || step + 1 == steps)
        result.max_norm_drift = std::max(result.max_norm_drift, std::abs(psi.norm() - 1.0));
      if (trace_every && ((step + 1) % trace_every == 0 || step + 1 == steps)) record(t);
    }
    apply_initial(psi, pending_alpha);
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(psi.norm() - 1.0));
    if (!(result.max_norm_drift <= kNormDriftLimit))
      throw IntegrationError("evolve: norm drift " + std::to_string(result.max_norm_drift) +
                             " exceeds limit; increase the step count");
    CVector out = from_final_basis(psi);
    out /= out.norm();
    result.state = QuantumState(std::move(out), psi0.vertex_ids);
    return result;
  }

 private:
  CVector to_final_basis(const CVector& v) const {
    return final_vectors_.transpose().cast<Complex>() * v;
  }
  CVector from_final_basis(const CVector& v) const { return final_vectors_.cast<Complex>() * v; }

  // psi <- exp(-i alpha H_init) psi, in the H_final eigenbasis.
  void apply_initial(CVector& psi, double alpha) const {
    if (alpha == 0.0) return;
    if (low_rank_.cols() > 0) {
      CVector coeff = low_rank_c_.adjoint() * psi;
      for (Eigen::Index k = 0; k < coeff.size(); ++k)
        coeff(k) *= std::polar(1.0, -alpha * level_shift_(k)) - 1.0;
      psi.noalias() += low_rank_c_ * coeff;
    }
    if (base_level_ != 0.0) psi *= std::polar(1.0, -alpha * base_level_);
  }

  // psi <- exp(-i beta H_final) psi, diagonal in its own eigenbasis.
  void apply_final(CVector& psi, double beta) const {
    for (Eigen::Index k = 0; k < psi.size(); ++k)
      psi(k) *= std::polar(1.0, -beta * final_values_(k));
  }

  TracePoint trace_point(const Schedule& schedule, const CVector& psi_final_basis,
                         double t) const {
    const double s = std::clamp(schedule.s(t), 0.0, 1.0);
    const CVector psi = from_final_basis(psi_final_basis);
    const SpectrumReport spec = eigendecompose(path_.at(s));
    const double tol = kZeroTolerance * std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff());
    double overlap = 0.0;
    for (Eigen::Index c = 0; c < spec.eigenvalues.size(); ++c) {
      if (spec.eigenvalues(c) > spec.eigenvalues(0) + tol) break;
      overlap += std::norm(spec.eigenvectors.col(c).cast<Complex>().dot(psi));
    }
    return {t, s, psi.norm(), overlap / psi.squaredNorm()};
  }

  HamiltonianPath path_;
  Matrix final_vectors_;
  Vector final_values_;
  double base_level_ = 0.0;
  Matrix low_rank_;  // eigenvectors of H_init off the base level, in H_final basis
  Vector level_shift_;
  CMatrix low_rank_c_;
};

inline EvolutionResult evolve_detailed(const HamiltonianPath& path, const Schedule& schedule,
                                       const QuantumState& psi0, std::size_t steps,
                                       std::size_t trace_every = 0) {
  return SplittingPropagator(path).run(schedule, psi0, steps, trace_every);
}

/// psi(t_final) for H(s) = (1 - s) H_init + s H_final with `steps` fixed steps.
inline QuantumState evolve(const Matrix& H_init, const Matrix& H_final, const Schedule& schedule,
                           const QuantumState& psi0, std::size_t steps) {
  return evolve_detailed(HamiltonianPath(H_init, H_final), schedule, psi0, steps).state;
}

struct ConvergenceOptions {
  std::size_t initial_steps = 0;  // 0: chosen from t_final and ||H_final||
  double tv_tolerance = 1e-4;
  std::size_t max_steps = std::size_t{1} << 24;
  std::size_t trace_every = 0;  // applied to the accepted run only
  // accepted runs satisfy dt * max(1, ||H_final||) <= max_step_phase; past pi
  // the fast phases alias identically at dt and dt / 2
  double max_step_phase = 3.0;
};

struct ConvergedEvolution {
  EvolutionResult result;             // the finer of the last two runs
  std::vector<double> tv_history;     // TV(steps, 2 steps) per doubling
  double tv_distance() const { return tv_history.empty() ? 0.0 : tv_history.back(); }
};

inline std::size_t default_initial_steps(const Schedule& schedule, double spectral_radius) {
  const double estimate = schedule.t_final() * std::max(1.0, spectral_radius) / 16.0;
  return static_cast<std::size_t>(std::clamp(std::ceil(estimate), 32.0, 65536.0));
}

/// Doubles the step count until the outcome distributions of consecutive
/// runs differ by less than `tv_tolerance` in total variation and the finer
/// run resolves the fastest phase.
inline ConvergedEvolution evolve_converged(const SplittingPropagator& propagator,
                                           const Schedule& schedule, const QuantumState& psi0,
                                           const ConvergenceOptions& opts = {}) {
  std::size_t steps = opts.initial_steps
                          ? opts.initial_steps
                          : default_initial_steps(schedule, propagator.final_spectral_radius());
  const double resolved_steps =
      schedule.t_final() * std::max(1.0, propagator.final_spectral_radius()) / opts.max_step_phase;
  ConvergedEvolution out;
  EvolutionResult coarse = propagator.run(schedule, psi0, steps);
  OutcomeDistribution coarse_dist = outcome_distribution(coarse.state);
  while (true) {
    if (2 * steps > opts.max_steps)
      throw IntegrationError("evolve: no convergence within " + std::to_string(opts.max_steps) +
                             " steps");
    steps *= 2;
    EvolutionResult fine = propagator.run(schedule, psi0, steps);
    OutcomeDistribution fine_dist = outcome_distribution(fine.state);
    const double tv = total_variation(coarse_dist, fine_dist);
    out.tv_history.push_back(tv);
    if (tv < opts.tv_tolerance && static_cast<double>(steps) >= resolved_steps) {
      out.result = opts.trace_every ? propagator.run(schedule, psi0, steps, opts.trace_every)
                                    : std::move(fine);
      return out;
    }
    coarse = std::move(fine);
    coarse_dist = std::move(fine_dist);
  }
}

inline ConvergedEvolution evolve_converged(const HamiltonianPath& path, const Schedule& schedule,
                                           const QuantumState& psi0,
                                           const ConvergenceOptions& opts = {}) {
  return evolve_converged(SplittingPropagator(path), schedule, psi0, opts);
}

inline void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
  os.precision(17);
  os << "t,s,norm,ground_overlap\n";
  for (const auto& p : trace) os << p.t << ',' << p.s << ',' << p.norm << ',' << p.ground_overlap << '\n';
}

}  // namespace quac
