#pragma once

// Dense eigenanalysis of Hamiltonians built from graph Laplacians, gap
// profiles along linear interpolation paths, and the generalized Grover
// construction (a reduced Laplacian whose gap matches adiabatic Grover).

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "quac/error.hpp"
#include "quac/graph.hpp"
#include "quac/linalg.hpp"

namespace quac {

/// Eigenvalues below this fraction of max(1, |lambda|_max) count as zero.
inline constexpr double kZeroTolerance = 1e-8;

struct SpectrumReport {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns, aligned with eigenvalues
  int zero_multiplicity = 0;
  double gap = 0.0;  // first eigenvalue strictly above lambda_0, minus lambda_0
};

inline SpectrumReport eigendecompose(const Matrix& H, double zero_tol = kZeroTolerance) {
  if (!is_symmetric(H, 1e-10)) throw InputError("eigendecompose: matrix is not symmetric");
  SpectrumReport out;
  if (H.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H);
  if (solver.info() != Eigen::Success) throw Error("eigendecompose: solver failed");
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  const double scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  const double tol = zero_tol * scale;
  for (double lambda : out.eigenvalues)
    if (std::abs(lambda) <= tol) ++out.zero_multiplicity;
  const double ground = out.eigenvalues(0);
  for (double lambda : out.eigenvalues)
    if (lambda > ground + tol) {
      out.gap = lambda - ground;
      break;
    }
  return out;
}

/// Spectrum of the Laplacian restricted to functions vanishing on `marks`.
inline SpectrumReport dirichlet_spectrum(const LaplacianMatrix& L, const MarkSet& marks,
                                         double zero_tol = kZeroTolerance) {
  return eigendecompose(reduced_laplacian(L, marks, DeleteMarked{}).entries(), zero_tol);
}

inline nlohmann::json to_json(const SpectrumReport& r) {
  std::vector<double> values(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
  nlohmann::json vectors = nlohmann::json::array();
  for (Eigen::Index c = 0; c < r.eigenvectors.cols(); ++c) {
    const Vector col = r.eigenvectors.col(c);
    vectors.push_back(std::vector<double>(col.data(), col.data() + col.size()));
  }
  return {{"eigenvalues", values},
          {"eigenvectors", vectors},
          {"zero_multiplicity", r.zero_multiplicity},
          {"gap", r.gap}};
}

// ---------------------------------------------------------------------------
// Interpolation paths
// ---------------------------------------------------------------------------

/// H(s) = (1 - s) H_init + s H_final.
class HamiltonianPath {
 public:
  HamiltonianPath() = default;
  HamiltonianPath(Matrix initial, Matrix final)
      : initial_(std::move(initial)), final_(std::move(final)) {
    if (initial_.rows() != final_.rows() || initial_.cols() != final_.cols())
      throw InputError("HamiltonianPath: endpoint dimensions differ");
    if (!is_symmetric(initial_) || !is_symmetric(final_))
      throw InputError("HamiltonianPath: endpoints must be symmetric");
  }

  Eigen::Index dim() const { return initial_.rows(); }
  const Matrix& initial() const { return initial_; }
  const Matrix& final() const { return final_; }
  Matrix at(double s) const { return (1.0 - s) * initial_ + s * final_; }

 private:
  Matrix initial_;
  Matrix final_;
};

struct GapSample {
  double s;
  double gap;
};

inline std::vector<GapSample> gap_profile(const HamiltonianPath& path,
                                          const std::vector<double>& s_samples,
                                          double zero_tol = kZeroTolerance) {
  std::vector<GapSample> out;
  out.reserve(s_samples.size());
  for (double s : s_samples) {
    if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("gap_profile: s outside [0, 1]");
    out.push_back({s, eigendecompose(path.at(s), zero_tol).gap});
  }
  return out;
}

inline std::vector<double> uniform_samples(std::size_t count) {
  std::vector<double> s(count);
  for (std::size_t i = 0; i < count; ++i)
    s[i] = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
  return s;
}

inline void write_gap_profile_csv(std::ostream& os, const std::vector<GapSample>& profile) {
  os.precision(17);
  os << "s,gap\n";
  for (const auto& g : profile) os << g.s << ',' << g.gap << '\n';
}

/// Uniform unit vector over `members` (positions) in dimension n.
inline Vector indicator_state(Eigen::Index n, const std::vector<Eigen::Index>& members) {
  Vector v = Vector::Zero(n);
  if (members.empty()) return v;
  const double a = 1.0 / std::sqrt(static_cast<double>(members.size()));
  for (Eigen::Index i : members) v(i) = a;
  return v;
}

/// Standard adiabatic Grover on n states with marked positions M:
/// H_I = I - |phi><phi|, H_F = I - |phi_M><phi_M|. For |M| = 1 this is
/// I - |m><m|.
inline HamiltonianPath grover_path(std::size_t n, const std::vector<Eigen::Index>& marked) {
  if (n < 2) throw ParameterError("grover_path: need at least two states");
  if (marked.empty() || marked.size() >= n)
    throw ParameterError("grover_path: need 1 <= |M| < n");
  const auto dim = static_cast<Eigen::Index>(n);
  std::vector<Eigen::Index> all(n);
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  const Vector phi = indicator_state(dim, all);
  const Vector phi_m = indicator_state(dim, marked);
  const Matrix id = Matrix::Identity(dim, dim);
  return HamiltonianPath(id - phi * phi.transpose(), id - phi_m * phi_m.transpose());
}

/// Gap of the standard Grover path, sqrt(1 - 4 (1 - |M|/n) s (1 - s)).
inline double grover_gap(std::size_t n, std::size_t n_marked, double s) {
  const double a = static_cast<double>(n_marked) / static_cast<double>(n);
  return std::sqrt(std::max(0.0, 1.0 - 4.0 * (1.0 - a) * s * (1.0 - s)));
}

// ---------------------------------------------------------------------------
// Generalized Grover construction
// ---------------------------------------------------------------------------

/// Final Hamiltonian = reduced Laplacian of a graph whose only mark-free
/// component is the target; initial Hamiltonian = H_F with the pair
/// (f0 = phi_target, f1 = phi_rest) swapped for (e0 = phi, e1).
struct GeneralizedGrover {
  HamiltonianPath path;
  LaplacianMatrix final_laplacian;  // delete-mode reduced Laplacian
  std::vector<VertexId> target;     // vertex ids of the mark-free component
  Vector f0, f1, e0, e1;            // in reduced coordinates (f1/e1 empty if k = 1)
  std::size_t n = 0;                // reduced dimension
  std::size_t n_target = 0;
  bool degenerate = false;  // single component, nothing marked
};

inline GeneralizedGrover generalized_grover(const WeightedGraph& g, const MarkSet& marks) {
  for (VertexId m : marks) (void)g.index_of(m);
  const auto comps = connected_components(g);
  std::optional<std::size_t> target_comp;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const bool marked = std::any_of(comps[c].begin(), comps[c].end(),
                                    [&](VertexId id) { return marks.contains(id); });
    if (!marked) {
      if (target_comp) throw ConstructionError("generalized_grover: more than one unmarked component");
      target_comp = c;
    }
  }
  if (!target_comp) throw ConstructionError("generalized_grover: every component carries a mark");
  const std::set<VertexId> target(comps[*target_comp].begin(), comps[*target_comp].end());

  for (std::size_t u = 0; u < g.size(); ++u) {
    const VertexId id = g.vertex_id(u);
    if (target.count(id) || marks.contains(id)) continue;
    int marked_neighbors = 0;
    for (const auto& [v, w] : g.neighbors(u)) {
      if (!marks.contains(g.vertex_id(v))) continue;
      ++marked_neighbors;
      if (std::abs(w - 1.0) > 1e-12)
        throw ConstructionError("generalized_grover: edges to marks must have unit weight");
    }
    if (marked_neighbors != 1)
      throw ConstructionError("generalized_grover: vertex " + std::to_string(id) +
                              " is adjacent to " + std::to_string(marked_neighbors) +
                              " marked vertices (need exactly one)");
  }

  GeneralizedGrover out;
  const LaplacianMatrix full = graph_laplacian(g);
  out.final_laplacian = marks.empty() ? full : reduced_laplacian(full, marks, DeleteMarked{});
  out.target.assign(target.begin(), target.end());
  const auto n = static_cast<Eigen::Index>(out.final_laplacian.size());
  out.n = static_cast<std::size_t>(n);
  out.n_target = target.size();

  std::vector<Eigen::Index> tgt, rest, all;
  for (Eigen::Index i = 0; i < n; ++i) {
    all.push_back(i);
    (target.count(out.final_laplacian.vertex_ids()[static_cast<std::size_t>(i)]) ? tgt : rest)
        .push_back(i);
  }
  const Matrix& hf = out.final_laplacian.entries();
  out.f0 = indicator_state(n, tgt);
  out.e0 = indicator_state(n, all);
  if (rest.empty()) {
    out.degenerate = true;
    out.path = HamiltonianPath(hf, hf);
    return out;
  }
  out.f1 = indicator_state(n, rest);
  Vector e1 = out.f0 - out.e0.dot(out.f0) * out.e0;
  out.e1 = e1 / e1.norm();
  Matrix hi = hf - out.f1 * out.f1.transpose() + out.e1 * out.e1.transpose();
  hi = 0.5 * (hi + hi.transpose());
  out.path = HamiltonianPath(std::move(hi), hf);
  return out;
}

/// Orthonormal basis of the smallest H_final-invariant subspace containing
/// range(H_init - H_final). Its complement is spanned by common eigenvectors
/// of both endpoints; eigenvalues there are linear in s and carry no
/// information about the interpolation.
inline Matrix varying_subspace(const HamiltonianPath& path, double tol = 1e-9) {
  const Matrix diff = path.initial() - path.final();
  const Eigen::Index n = diff.rows();
  auto orthonormal_range = [&](const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const Vector sv = svd.singularValues();
    const double cut = tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    return Matrix(svd.matrixU().leftCols(rank));
  };
  Matrix basis = orthonormal_range(diff);
  for (Eigen::Index iter = 0; iter < n && basis.cols() > 0; ++iter) {
    Matrix stacked(n, 2 * basis.cols());
    stacked << basis, path.final() * basis;
    Matrix next = orthonormal_range(stacked);
    if (next.cols() == basis.cols()) break;
    basis = std::move(next);
  }
  return basis;
}

struct GroverEquivalenceReport {
  bool applicable = true;
  double max_gap_deviation = 0.0;             // full spectra
  double max_varying_gap_deviation = 0.0;     // spectra restricted to the varying subspace
  std::vector<double> ground_state_overlaps;  // ||P_varying psi_0(s)||^2
  std::vector<GapSample> generalized_profile;
  std::vector<GapSample> grover_profile;
};

/// Compares a generalized path against standard Grover with n states and
/// n_target marks at each s sample.
inline GroverEquivalenceReport verify_grover_equivalence(const HamiltonianPath& generalized,
                                                         std::size_t n, std::size_t n_target,
                                                         const std::vector<double>& s_samples) {
  GroverEquivalenceReport report;
  if (static_cast<std::size_t>(generalized.dim()) != n)
    throw ParameterError("verify_grover_equivalence: path dimension differs from n");
  const Matrix varying = varying_subspace(generalized);
  if (n_target >= n || n_target == 0 || varying.cols() == 0) {
    report.applicable = false;
    return report;
  }
  std::vector<Eigen::Index> marked(n_target);
  std::iota(marked.begin(), marked.end(), Eigen::Index{0});
  const HamiltonianPath standard = grover_path(n, marked);

  for (double s : s_samples) {
    if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("verify_grover_equivalence: s outside [0, 1]");
    const Matrix hs = generalized.at(s);
    const SpectrumReport gen = eigendecompose(hs);
    const SpectrumReport std_ = eigendecompose(standard.at(s));
    Matrix block = varying.transpose() * hs * varying;
    block = 0.5 * (block + block.transpose());
    const SpectrumReport restricted = eigendecompose(block);
    report.generalized_profile.push_back({s, gen.gap});
    report.grover_profile.push_back({s, std_.gap});
    report.max_gap_deviation = std::max(report.max_gap_deviation, std::abs(gen.gap - std_.gap));
    report.max_varying_gap_deviation =
        std::max(report.max_varying_gap_deviation, std::abs(restricted.gap - std_.gap));
    const Vector ground = gen.eigenvectors.col(0);
    report.ground_state_overlaps.push_back((varying.transpose() * ground).squaredNorm());
  }
  return report;
}

}  // namespace quac
