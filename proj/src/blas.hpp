#pragma once

// Dense products routed straight to BLAS. Eigen's own BLAS bindings are not
// used: its symmetric kernels (symm, syrk) return wrong results with the
// OpenBLAS build this project links against.

#include <Eigen/Dense>
#include <cblas.h>

namespace dicke::detail {

/// op(a) · b where op is the transpose when `transpose_a` is set.
inline Eigen::MatrixXd gemm(const Eigen::MatrixXd& a, bool transpose_a, const Eigen::MatrixXd& b) {
  const auto m = static_cast<blasint>(transpose_a ? a.cols() : a.rows());
  const auto k = static_cast<blasint>(transpose_a ? a.rows() : a.cols());
  const auto n = static_cast<blasint>(b.cols());
  Eigen::MatrixXd c(m, n);
  if (m == 0 || n == 0) return c;
  if (k == 0) return c.setZero();
  cblas_dgemm(CblasColMajor, transpose_a ? CblasTrans : CblasNoTrans, CblasNoTrans, m, n, k, 1.0,
              a.data(), static_cast<blasint>(a.rows()), b.data(), static_cast<blasint>(b.rows()),
              0.0, c.data(), m);
  return c;
}

}  // namespace dicke::detail
