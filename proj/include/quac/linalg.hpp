#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace quac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Stable identifier of a data point / graph vertex across subsampling,
/// outlier removal and Laplacian reduction.
using VertexId = std::int64_t;

inline bool is_symmetric(const Matrix& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
  return true;
}

}  // namespace quac
