#pragma once

#include "dicke/algebra.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dicke {

/// fock: |n⟩⊗|j,m⟩ with m the Jz projection.
/// coherent: |N;j,m⟩, N counts displaced quanta, m the Jx projection.
/// coherent_parity: Π-adapted combinations of coherent states, m ≥ 0.
/// tavis_cummings: one conserved-excitation block; `n_max` holds λ.
enum class BasisKind { fock, coherent, coherent_parity, tavis_cummings };

enum class Sector { none = 0, plus = 1, minus = -1 };

std::string to_string(BasisKind kind);
std::string to_string(Sector sector);
/// Numeric code written into matrix dumps.
std::uint32_t basis_kind_code(BasisKind kind);

struct BasisSpec {
  BasisKind kind = BasisKind::fock;
  HalfInteger j;
  int n_max = 0;
  Sector sector = Sector::none;

  /// Throws InputError when the sector/kind pairing or truncation is inconsistent.
  void validate() const;
  bool operator==(const BasisSpec&) const = default;
};

struct BasisLabel {
  int excitations = 0;  // n, N, or photon number inside a TC block
  HalfInteger m;
  bool operator==(const BasisLabel&) const = default;
};

/// Ordered labels with O(1) lookup in both directions. Ordering is m-major,
/// excitation-minor; the coherent Hamiltonian is then block-tridiagonal in m.
class BasisIndex {
 public:
  static BasisIndex enumerate(const BasisSpec& spec);

  const BasisSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const BasisLabel& label(std::size_t i) const { return labels_.at(i); }
  std::span<const BasisLabel> labels() const noexcept { return labels_; }
  std::optional<std::size_t> index_of(const BasisLabel& label) const;

  /// Contiguous index range [first, last) holding projection m.
  std::pair<std::size_t, std::size_t> m_range(HalfInteger m) const;

 private:
  BasisSpec spec_;
  std::vector<BasisLabel> labels_;
  int min_excitation_ = 0;
  int excitation_span_ = 0;
  std::vector<long> lookup_;  // (m slot, excitation) → index or −1
};

/// Sign picked up by |N;j,m⟩ under Π = exp(iπΛ): Π|N;m⟩ = phase · |N;−m⟩.
/// With Jz represented by the Condon–Shortley x-ladder this is (−1)^(N+2j).
int coherent_parity_phase(int excitations, HalfInteger j);

struct Component {
  BasisLabel label;
  double coefficient;
};

/// Expansion of the parity-adapted state `label` (m ≥ 0) of `sector` in the
/// full coherent basis: one component for m = 0, two for m > 0.
std::vector<Component> parity_expansion(const BasisLabel& label, Sector sector, HalfInteger j);

}  // namespace dicke
