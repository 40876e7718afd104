#pragma once

#include "dicke/hamiltonian.hpp"

#include <Eigen/Dense>

namespace dicke {

struct ResidualReport {
  double max_residual = 0.0;               // max_k ‖H v_k − E_k v_k‖₂
  double max_orthonormality_defect = 0.0;  // max |VᵀV − I|
  double matrix_norm = 0.0;                // ‖H‖_F

  static constexpr double kResidualBound = 1e-10;      // relative to ‖H‖_F
  static constexpr double kOrthonormalityBound = 1e-10;
  bool within_bounds() const;
};

struct Spectrum {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // column k ↔ energies(k)
  BasisSpec basis;
  ResidualReport residual;

  std::size_t size() const noexcept { return static_cast<std::size_t>(energies.size()); }
};

/// All eigenpairs of a dense symmetric matrix. Each eigenvector is sign-fixed
/// so that its first component of magnitude above 1e-8 is positive. Throws
/// SolverError (carrying LAPACK's info code) if the iteration fails, and
/// a SolverError with info 0 if the audit bounds are violated.
Spectrum eigh(const SymmetricMatrix& matrix);

/// Recomputes the audit numbers for an existing decomposition.
ResidualReport residuals(const SymmetricMatrix& matrix, const Spectrum& spectrum);

}  // namespace dicke
