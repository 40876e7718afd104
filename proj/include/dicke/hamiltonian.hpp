#pragma once

#include "dicke/basis.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace dicke {

/// Dicke model constants. gamma is in the same energy units as omega.
struct ModelParams {
  double omega = 1.0;
  double omega0 = 1.0;
  double gamma = 0.0;
  HalfInteger j = HalfInteger::from_twice(1);

  /// Throws InputError unless omega > 0, omega0 ≥ 0, gamma ≥ 0 and j ≥ 1/2.
  void validate() const;

  double critical_coupling() const;
  int n_atoms() const noexcept { return j.twice(); }
  /// G = 2γ/(ω√𝒩), the Jx-proportional displacement of the coherent basis.
  double coherent_shift() const;
};

struct BuildLimits {
  std::size_t memory_budget_bytes = std::size_t{4} << 30;
};

/// Throws CapacityError if the three dim×dim working matrices of a
/// diagonalization (operator, eigenvectors, solver workspace) exceed the budget.
void check_capacity(std::size_t dim, const BuildLimits& limits);

class SymmetricMatrix {
 public:
  /// Validates exact symmetry and finiteness.
  SymmetricMatrix(BasisSpec basis, Eigen::MatrixXd entries);
  /// Mirrors the lower triangle of `lower` onto the upper one.
  static SymmetricMatrix from_lower(BasisSpec basis, Eigen::MatrixXd lower);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const BasisSpec& basis() const noexcept { return basis_; }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(std::size_t r, std::size_t c) const {
    return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  double frobenius_norm() const { return entries_.norm(); }

 private:
  SymmetricMatrix() = default;
  BasisSpec basis_;
  Eigen::MatrixXd entries_;
};

/// H over |n⟩⊗|j,m⟩ (Jz eigenbasis).
SymmetricMatrix build_fock(const ModelParams& params, int n_max, const BuildLimits& limits = {});

/// H over the displaced basis |N;j,m⟩ (Jx eigenbasis).
SymmetricMatrix build_coherent(const ModelParams& params, int n_max, const BuildLimits& limits = {});

/// H restricted to one Π sector of the parity-adapted coherent basis.
SymmetricMatrix build_coherent_parity(const ModelParams& params, int n_max, Sector sector,
                                      const BuildLimits& limits = {});

/// Rotating-wave Hamiltonian ωa†a + ω₀Jz + (γ/√𝒩)(aJ₊ + a†J₋) on the Λ = λ block.
SymmetricMatrix build_tc_block(const ModelParams& params, int lambda);

/// Isometry from a TC block into a Fock basis: column k is the Fock-basis
/// image of block state k.
Eigen::MatrixXd tc_block_embedding(const BasisIndex& block, const BasisIndex& fock);

/// Little-endian binary dump: "DPH1", u32 dim, u32 basis-kind code, then the
/// lower triangle row by row as f64.
void write_matrix_dump(const std::filesystem::path& path, const SymmetricMatrix& matrix);

struct MatrixDump {
  std::uint32_t basis_kind_code = 0;
  Eigen::MatrixXd entries;
};
MatrixDump read_matrix_dump(const std::filesystem::path& path);

}  // namespace dicke
