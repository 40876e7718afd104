#include "dicke/solver.hpp"

#include "blas.hpp"
#include "dicke/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace dicke {

bool ResidualReport::within_bounds() const {
  return max_residual <= kResidualBound * matrix_norm &&
         max_orthonormality_defect <= kOrthonormalityBound;
}

ResidualReport residuals(const SymmetricMatrix& matrix, const Spectrum& spectrum) {
  const Eigen::MatrixXd& h = matrix.entries();
  const Eigen::MatrixXd& v = spectrum.vectors;
  if (v.rows() != h.rows() || v.cols() != spectrum.energies.size()) {
    throw InputError("residuals: dimension mismatch");
  }
  ResidualReport out;
  out.matrix_norm = matrix.frobenius_norm();

  Eigen::MatrixXd r = detail::gemm(h, false, v);
  r -= v * spectrum.energies.asDiagonal();
  out.max_residual = v.cols() > 0 ? r.colwise().norm().maxCoeff() : 0.0;

  Eigen::MatrixXd gram = detail::gemm(v, true, v);
  gram.diagonal().array() -= 1.0;
  for (Eigen::Index c = 0; c < gram.cols(); ++c) {
    const double col_max = gram.col(c).tail(gram.rows() - c).cwiseAbs().maxCoeff();
    out.max_orthonormality_defect = std::max(out.max_orthonormality_defect, col_max);
  }
  return out;
}

Spectrum eigh(const SymmetricMatrix& matrix) {
  const auto n = static_cast<lapack_int>(matrix.dim());
  Spectrum out;
  out.basis = matrix.basis();
  out.vectors = matrix.entries();
  out.energies.resize(n);
  if (n == 0) return out;

  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                                         out.energies.data());
  if (info != 0) {
    throw SolverError("dsyevd failed for dim " + std::to_string(n) +
                          (info > 0 ? ": divide and conquer did not converge"
                                    : ": illegal argument"),
                      info);
  }

  constexpr double kSignThreshold = 1e-8;
  for (lapack_int k = 0; k < n; ++k) {
    auto col = out.vectors.col(k);
    for (lapack_int i = 0; i < n; ++i) {
      if (std::abs(col(i)) > kSignThreshold) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
  }

  out.residual = residuals(matrix, out);
  if (!out.residual.within_bounds()) {
    throw SolverError("eigh: audit failed (residual " + std::to_string(out.residual.max_residual) +
                       ", orthonormality " +
                          std::to_string(out.residual.max_orthonormality_defect) + ")",
                      0);
  }
  return out;
}

}  // namespace dicke
