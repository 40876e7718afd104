#include "dicke/hamiltonian.hpp"

#include "coherent_assembly.hpp"
#include "dicke/errors.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace dicke {

void ModelParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InputError("omega must be positive");
  if (!(omega0 >= 0.0) || !std::isfinite(omega0)) throw InputError("omega0 must be non-negative");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be non-negative");
  if (j.twice() < 1) throw InputError("j must be at least 1/2");
}

double ModelParams::critical_coupling() const { return 0.5 * std::sqrt(omega0 * omega); }

double ModelParams::coherent_shift() const {
  return 2.0 * gamma / (omega * std::sqrt(static_cast<double>(n_atoms())));
}

void check_capacity(std::size_t dim, const BuildLimits& limits) {
  const long double bytes = 3.0L * static_cast<long double>(dim) * dim * sizeof(double);
  if (bytes > static_cast<long double>(limits.memory_budget_bytes)) {
    throw CapacityError("dimension " + std::to_string(dim) + " needs " +
                        std::to_string(static_cast<double>(bytes) / (1 << 20)) +
                        " MiB, budget is " +
                        std::to_string(limits.memory_budget_bytes >> 20) + " MiB");
  }
}

SymmetricMatrix::SymmetricMatrix(BasisSpec basis, Eigen::MatrixXd entries)
    : basis_(basis), entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw InputError("SymmetricMatrix: not square");
  if (!entries_.allFinite()) throw NumericError("SymmetricMatrix: non-finite entry");
  for (Eigen::Index c = 0; c < entries_.cols(); ++c) {
    for (Eigen::Index r = c + 1; r < entries_.rows(); ++r) {
      if (entries_(r, c) != entries_(c, r)) throw InputError("SymmetricMatrix: not symmetric");
    }
  }
}

SymmetricMatrix SymmetricMatrix::from_lower(BasisSpec basis, Eigen::MatrixXd lower) {
  if (lower.rows() != lower.cols()) throw InputError("SymmetricMatrix: not square");
  lower.triangularView<Eigen::StrictlyUpper>() = lower.transpose();
  if (!lower.allFinite()) throw NumericError("SymmetricMatrix: non-finite entry");
  SymmetricMatrix out;
  out.basis_ = basis;
  out.entries_ = std::move(lower);
  return out;
}

SymmetricMatrix build_fock(const ModelParams& params, int n_max, const BuildLimits& limits) {
  params.validate();
  const BasisIndex basis = BasisIndex::enumerate({BasisKind::fock, params.j, n_max, Sector::none});
  check_capacity(basis.size(), limits);

  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const double coupling = 2.0 * params.gamma / std::sqrt(static_cast<double>(params.n_atoms()));
  for (Eigen::Index i = 0; i < dim; ++i) {
    const BasisLabel& l = basis.label(static_cast<std::size_t>(i));
    h(i, i) = params.omega * l.excitations + params.omega0 * l.m.value();
    if (coupling == 0.0) continue;
    // (a + a†) Jx links (n, m) with (n ± 1, m ± 1); fill only partners with larger n.
    for (int step : {-1, +1}) {
      const BasisLabel partner{l.excitations + 1, l.m + step};
      if (const auto k = basis.index_of(partner)) {
        const double v = coupling * std::sqrt(l.excitations + 1.0) *
                         spin_matrix_element(SpinOp::x, params.j, partner.m, l.m);
        h(std::max<Eigen::Index>(i, *k), std::min<Eigen::Index>(i, *k)) = v;
      }
    }
  }
  return SymmetricMatrix::from_lower(basis.spec(), std::move(h));
}

namespace detail {

SymmetricMatrix assemble_coherent(const BasisIndex& basis, const ModelParams& params,
                                  const CoherentTerms& terms) {
  const BasisSpec& spec = basis.spec();
  const HalfInteger j = spec.j;
  const double jj = j.value() * (j.value() + 1.0);
  const double shift = params.coherent_shift();
  const std::optional<OverlapTable> overlaps =
      terms.spin_flip != 0.0 ? std::optional<OverlapTable>(std::in_place, spec.n_max, shift)
                             : std::nullopt;

  // Matrix element between two full-coherent labels.
  const auto element = [&](const BasisLabel& row, const BasisLabel& col) {
    const int dm = row.m.twice() - col.m.twice();
    if (dm == 0) {
      double v = 0.0;
      if (row.excitations == col.excitations && terms.diagonal) {
        v += terms.diagonal(col.excitations, col.m);
      }
      if (terms.hop && std::abs(row.excitations - col.excitations) == 1) {
        v += terms.hop(col.m) * std::sqrt(std::max(row.excitations, col.excitations));
      }
      return v;
    }
    if (overlaps && std::abs(dm) == 2) {
      const double spin = 0.5 * std::sqrt(jj - row.m.value() * col.m.value());
      // ⟨N'|D(+G)|N⟩ for m' = m + 1; D(−G) = D(G)† for m' = m − 1.
      const double bos = dm > 0 ? (*overlaps)(row.excitations, col.excitations)
                                : (*overlaps)(col.excitations, row.excitations);
      return terms.spin_flip * spin * bos;
    }
    return 0.0;
  };

  std::vector<std::vector<Component>> expansion(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    expansion[i] = spec.kind == BasisKind::coherent_parity
                       ? parity_expansion(basis.label(i), spec.sector, j)
                       : std::vector<Component>{{basis.label(i), 1.0}};
  }

  // Contiguous m groups (m-major ordering).
  struct Group {
    HalfInteger m;
    std::size_t first, last;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (groups.empty() || groups.back().m != basis.label(i).m) {
      groups.push_back({basis.label(i).m, i, i + 1});
    } else {
      groups.back().last = i + 1;
    }
  }
  const bool paired = spec.kind == BasisKind::coherent_parity;
  const auto coupled = [&](HalfInteger a, HalfInteger b) {
    const auto near = [](int x, int y) { return std::abs(x - y) <= 2; };
    if (near(a.twice(), b.twice())) return true;
    return paired && near(a.twice(), -b.twice());
  };

  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t gr = 0; gr < groups.size(); ++gr) {
    for (std::size_t gc = 0; gc <= gr; ++gc) {
      if (!coupled(groups[gr].m, groups[gc].m)) continue;
      for (std::size_t r = groups[gr].first; r < groups[gr].last; ++r) {
        const std::size_t c_end = gc == gr ? r + 1 : groups[gc].last;
        for (std::size_t c = groups[gc].first; c < c_end; ++c) {
          double v = 0.0;
          for (const Component& a : expansion[r]) {
            for (const Component& b : expansion[c]) {
              v += a.coefficient * b.coefficient * element(a.label, b.label);
            }
          }
          h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
      }
    }
  }
  return SymmetricMatrix::from_lower(spec, std::move(h));
}

}  // namespace detail

namespace {

detail::CoherentTerms hamiltonian_terms(const ModelParams& params) {
  const double quad = 4.0 * params.gamma * params.gamma /
                      (params.omega * static_cast<double>(params.n_atoms()));
  detail::CoherentTerms terms;
  terms.diagonal = [omega = params.omega, quad](int n, HalfInteger m) {
    return omega * n - quad * m.value() * m.value();
  };
  terms.spin_flip = params.omega0;
  return terms;
}

}  // namespace

SymmetricMatrix build_coherent(const ModelParams& params, int n_max, const BuildLimits& limits) {
  params.validate();
  const BasisIndex basis =
      BasisIndex::enumerate({BasisKind::coherent, params.j, n_max, Sector::none});
  check_capacity(basis.size(), limits);
  return detail::assemble_coherent(basis, params, hamiltonian_terms(params));
}

SymmetricMatrix build_coherent_parity(const ModelParams& params, int n_max, Sector sector,
                                      const BuildLimits& limits) {
  params.validate();
  if (sector == Sector::none) throw InputError("build_coherent_parity: sector must be + or -");
  const BasisIndex basis =
      BasisIndex::enumerate({BasisKind::coherent_parity, params.j, n_max, sector});
  check_capacity(basis.size(), limits);
  return detail::assemble_coherent(basis, params, hamiltonian_terms(params));
}

SymmetricMatrix build_tc_block(const ModelParams& params, int lambda) {
  params.validate();
  if (lambda < 0) throw InputError("build_tc_block: lambda must be non-negative");
  const BasisIndex basis =
      BasisIndex::enumerate({BasisKind::tavis_cummings, params.j, lambda, Sector::none});
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const double coupling = params.gamma / std::sqrt(static_cast<double>(params.n_atoms()));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const BasisLabel& l = basis.label(static_cast<std::size_t>(i));
    h(i, i) = params.omega * l.excitations + params.omega0 * l.m.value();
    // a J₊ takes (n, m) to (n − 1, m + 1); labels are ordered by m so that is i + 1.
    if (i + 1 < dim) {
      h(i + 1, i) = coupling * std::sqrt(static_cast<double>(l.excitations)) *
                    spin_matrix_element(SpinOp::ladder_raise, params.j, l.m + 1, l.m);
    }
  }
  return SymmetricMatrix::from_lower(basis.spec(), std::move(h));
}

Eigen::MatrixXd tc_block_embedding(const BasisIndex& block, const BasisIndex& fock) {
  if (block.spec().kind != BasisKind::tavis_cummings || fock.spec().kind != BasisKind::fock ||
      block.spec().j != fock.spec().j) {
    throw InputError("tc_block_embedding: expects a TC block and a Fock basis with equal j");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fock.size()),
                                              static_cast<Eigen::Index>(block.size()));
  for (std::size_t k = 0; k < block.size(); ++k) {
    const auto row = fock.index_of(block.label(k));
    if (!row) throw InputError("tc_block_embedding: Fock truncation too small for block");
    out(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(k)) = 1.0;
  }
  return out;
}

namespace {

constexpr std::array<char, 4> kDumpMagic{'D', 'P', 'H', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t b = 0; b < sizeof(U); ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  os.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(U)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw InputError("matrix dump: truncated file");
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) bits |= static_cast<U>(bytes[b]) << (8 * b);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_matrix_dump(const std::filesystem::path& path, const SymmetricMatrix& matrix) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  os.write(kDumpMagic.data(), kDumpMagic.size());
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(matrix.dim()));
  put_le<std::uint32_t>(os, basis_kind_code(matrix.basis().kind));
  for (std::size_t r = 0; r < matrix.dim(); ++r) {
    for (std::size_t c = 0; c <= r; ++c) put_le<double>(os, matrix(r, c));
  }
  if (!os) throw InputError("write failed: " + path.string());
}

MatrixDump read_matrix_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kDumpMagic) throw InputError("matrix dump: bad magic");
  MatrixDump out;
  const auto dim = static_cast<Eigen::Index>(get_le<std::uint32_t>(is));
  out.basis_kind_code = get_le<std::uint32_t>(is);
  out.entries.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) {
      const double v = get_le<double>(is);
      out.entries(r, c) = v;
      out.entries(c, r) = v;
    }
  }
  return out;
}

}  // namespace dicke
