#pragma once

#include "dicke/hamiltonian.hpp"
#include "dicke/solver.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dicke {

enum class PeresOp { jz, jx2, photon_n };

std::string to_string(PeresOp op);  // "Jz", "Jx2", "n"
/// Accepts Jz, Jx2, n (also photon_n). Jx is rejected: it mixes parity sectors.
PeresOp parse_peres_op(std::string_view name);

/// Matrix of a Peres operator in any of the fock, coherent or parity bases.
SymmetricMatrix peres_matrix(PeresOp op, const BasisIndex& basis, const ModelParams& params);

/// Π = exp(iπΛ). Diagonal (−1)^(n+m+j) in the Fock basis, a signed
/// m → −m permutation in the coherent basis, ±identity in a parity sector.
SymmetricMatrix parity_operator(const BasisIndex& basis);

/// Λ = a†a + Jz + j in the Fock basis.
SymmetricMatrix excitation_operator(const BasisIndex& fock);

/// v_kᵀ · op · v_k for every eigenvector. The operator must carry the same
/// basis provenance as the spectrum.
std::vector<double> expectation(const Spectrum& spectrum, const SymmetricMatrix& op);

struct ParityAssignment {
  std::vector<int> parity;  // ±1 per state
  std::vector<double> raw;  // ⟨Π⟩ after degenerate-cluster rotation
};

/// ⟨Π⟩ per eigenstate. Degenerate clusters (gaps below 1e-9·‖H‖_F) are
/// resolved by diagonalizing Π inside the cluster. Throws
/// ParityResolutionError when a value is not within 1e-6 of ±1.
ParityAssignment parity_expectation(const Spectrum& spectrum, const ModelParams& params);

inline constexpr double kDefaultDeltaPTolerance = 1e-12;

/// ΔP is the weight of each eigenstate in the top retained excitation shell.
struct ConvergenceReport {
  std::vector<double> delta_p;
  double tolerance = kDefaultDeltaPTolerance;
  std::size_t converged_count = 0;  // leading run of states with delta_p < tolerance

  bool converged(std::size_t k) const { return delta_p.at(k) < tolerance; }
};

/// P_N per eigenstate: row N, column k. Columns sum to one.
Eigen::MatrixXd shell_probabilities(const Spectrum& spectrum, const BasisIndex& basis);

ConvergenceReport delta_p(const Spectrum& spectrum, const BasisIndex& basis,
                          double tolerance = kDefaultDeltaPTolerance);

}  // namespace dicke
