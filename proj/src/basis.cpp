#include "dicke/basis.hpp"

#include "dicke/errors.hpp"

#include <cmath>

namespace dicke {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::fock: return "fock";
    case BasisKind::coherent: return "coherent";
    case BasisKind::coherent_parity: return "parity";
    case BasisKind::tavis_cummings: return "tavis_cummings";
  }
  return "unknown";
}

std::string to_string(Sector sector) {
  switch (sector) {
    case Sector::plus: return "plus";
    case Sector::minus: return "minus";
    case Sector::none: return "all";
  }
  return "unknown";
}

std::uint32_t basis_kind_code(BasisKind kind) {
  switch (kind) {
    case BasisKind::fock: return 0;
    case BasisKind::coherent: return 1;
    case BasisKind::coherent_parity: return 2;
    case BasisKind::tavis_cummings: return 3;
  }
  return 0xffffffffu;
}

void BasisSpec::validate() const {
  if (j.twice() < 0) throw InputError("basis: negative j");
  if (n_max < 0) throw InputError("basis: negative truncation");
  const bool needs_sector = kind == BasisKind::coherent_parity;
  if (needs_sector != (sector != Sector::none)) {
    throw InputError("basis: parity sector is required for, and only for, the parity basis");
  }
}

int coherent_parity_phase(int excitations, HalfInteger j) {
  return ((excitations + j.twice()) % 2 == 0) ? 1 : -1;
}

std::vector<Component> parity_expansion(const BasisLabel& label, Sector sector, HalfInteger j) {
  if (sector == Sector::none) throw InputError("parity_expansion: sector required");
  if (label.m.twice() < 0) throw InputError("parity_expansion: parity labels carry m >= 0");
  if (label.m.twice() == 0) {
    if (coherent_parity_phase(label.excitations, j) != static_cast<int>(sector)) {
      throw InputError("parity_expansion: m = 0 state absent from this sector");
    }
    return {{label, 1.0}};
  }
  const double s = static_cast<int>(sector);
  const double c = 1.0 / std::sqrt(2.0);
  return {{label, c},
          {{label.excitations, -label.m}, s * coherent_parity_phase(label.excitations, j) * c}};
}

BasisIndex BasisIndex::enumerate(const BasisSpec& spec) {
  spec.validate();
  BasisIndex out;
  out.spec_ = spec;
  const int two_j = spec.j.twice();

  int min_two_m = -two_j;
  int max_two_m = two_j;
  if (spec.kind == BasisKind::coherent_parity) min_two_m = two_j % 2;
  if (spec.kind == BasisKind::tavis_cummings) {
    // n = λ − j − m ≥ 0  ⇔  2m ≤ 2λ − 2j
    max_two_m = std::min(two_j, 2 * spec.n_max - two_j);
  }

  for (int two_m = min_two_m; two_m <= max_two_m; two_m += 2) {
    const HalfInteger m = HalfInteger::from_twice(two_m);
    if (spec.kind == BasisKind::tavis_cummings) {
      const int n = (2 * spec.n_max - two_j - two_m) / 2;
      out.labels_.push_back({n, m});
      continue;
    }
    for (int n = 0; n <= spec.n_max; ++n) {
      if (spec.kind == BasisKind::coherent_parity && two_m == 0 &&
          coherent_parity_phase(n, spec.j) != static_cast<int>(spec.sector)) {
        continue;
      }
      out.labels_.push_back({n, m});
    }
  }

  out.min_excitation_ = 0;
  out.excitation_span_ = spec.kind == BasisKind::tavis_cummings
                             ? spec.n_max + two_j + 1
                             : spec.n_max + 1;
  out.lookup_.assign(static_cast<std::size_t>(two_j + 1) * out.excitation_span_, -1);
  for (std::size_t i = 0; i < out.labels_.size(); ++i) {
    const auto& l = out.labels_[i];
    const std::size_t slot = static_cast<std::size_t>((l.m.twice() + two_j) / 2);
    out.lookup_[slot * out.excitation_span_ + l.excitations] = static_cast<long>(i);
  }
  return out;
}

std::optional<std::size_t> BasisIndex::index_of(const BasisLabel& label) const {
  const int two_j = spec_.j.twice();
  if (!SpinQuantum::valid(spec_.j, label.m)) return std::nullopt;
  if (label.excitations < min_excitation_ || label.excitations >= excitation_span_) {
    return std::nullopt;
  }
  const std::size_t slot = static_cast<std::size_t>((label.m.twice() + two_j) / 2);
  const long idx = lookup_[slot * excitation_span_ + label.excitations];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

std::pair<std::size_t, std::size_t> BasisIndex::m_range(HalfInteger m) const {
  std::size_t first = labels_.size();
  std::size_t last = labels_.size();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].m == m) {
      if (first == labels_.size()) first = i;
      last = i + 1;
    } else if (first != labels_.size()) {
      break;
    }
  }
  if (first == labels_.size()) return {0, 0};
  return {first, last};
}

}  // namespace dicke
