#include "dicke/observables.hpp"

#include "blas.hpp"
#include "coherent_assembly.hpp"
#include "dicke/errors.hpp"

#include <Eigen/Sparse>

#include <cmath>

namespace dicke {

std::string to_string(PeresOp op) {
  switch (op) {
    case PeresOp::jz: return "Jz";
    case PeresOp::jx2: return "Jx2";
    case PeresOp::photon_n: return "n";
  }
  return "unknown";
}

PeresOp parse_peres_op(std::string_view name) {
  if (name == "Jz" || name == "jz") return PeresOp::jz;
  if (name == "Jx2" || name == "jx2") return PeresOp::jx2;
  if (name == "n" || name == "photon_n") return PeresOp::photon_n;
  if (name == "Jx" || name == "jx") {
    throw InputError("Jx is not a Peres operator here: it connects states of different parity");
  }
  throw InputError("unknown Peres operator '" + std::string(name) + "'");
}

namespace {

void require_consistent(const BasisIndex& basis, const ModelParams& params) {
  params.validate();
  if (basis.spec().j != params.j) throw InputError("basis and parameters disagree on j");
}

SymmetricMatrix fock_peres(PeresOp op, const BasisIndex& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const HalfInteger j = basis.spec().j;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const BasisLabel& l = basis.label(static_cast<std::size_t>(i));
    switch (op) {
      case PeresOp::jz: m(i, i) = l.m.value(); break;
      case PeresOp::photon_n: m(i, i) = l.excitations; break;
      case PeresOp::jx2:
        for (int step : {0, 1, 2}) {
          const BasisLabel partner{l.excitations, l.m + step};
          if (const auto k = basis.index_of(partner)) {
            m(static_cast<Eigen::Index>(*k), i) =
                spin_matrix_element(SpinOp::x_squared, j, partner.m, l.m);
          }
        }
        break;
    }
  }
  return SymmetricMatrix::from_lower(basis.spec(), std::move(m));
}

}  // namespace

SymmetricMatrix peres_matrix(PeresOp op, const BasisIndex& basis, const ModelParams& params) {
  require_consistent(basis, params);
  switch (basis.spec().kind) {
    case BasisKind::fock:
      return fock_peres(op, basis);
    case BasisKind::coherent:
    case BasisKind::coherent_parity: {
      detail::CoherentTerms terms;
      const double shift = params.coherent_shift();
      switch (op) {
        case PeresOp::jz:
          terms.spin_flip = 1.0;
          break;
        case PeresOp::jx2:
          terms.diagonal = [](int, HalfInteger m) { return m.value() * m.value(); };
          break;
        case PeresOp::photon_n:
          // a = A − G·Jx
          terms.diagonal = [shift](int n, HalfInteger m) {
            return n + shift * shift * m.value() * m.value();
          };
          if (shift != 0.0) terms.hop = [shift](HalfInteger m) { return -shift * m.value(); };
          break;
      }
      return detail::assemble_coherent(basis, params, terms);
    }
    case BasisKind::tavis_cummings:
      break;
  }
  throw InputError("peres_matrix: unsupported basis " + to_string(basis.spec().kind));
}

SymmetricMatrix parity_operator(const BasisIndex& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const HalfInteger j = basis.spec().j;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  switch (basis.spec().kind) {
    case BasisKind::fock:
      for (Eigen::Index i = 0; i < dim; ++i) {
        const BasisLabel& l = basis.label(static_cast<std::size_t>(i));
        const int lambda2 = 2 * l.excitations + l.m.twice() + j.twice();  // 2Λ
        p(i, i) = (lambda2 / 2) % 2 == 0 ? 1.0 : -1.0;
      }
      break;
    case BasisKind::coherent:
      for (Eigen::Index i = 0; i < dim; ++i) {
        const BasisLabel& l = basis.label(static_cast<std::size_t>(i));
        const auto k = basis.index_of({l.excitations, -l.m});
        p(static_cast<Eigen::Index>(*k), i) = coherent_parity_phase(l.excitations, j);
      }
      break;
    case BasisKind::coherent_parity:
      p.diagonal().setConstant(static_cast<int>(basis.spec().sector));
      break;
    case BasisKind::tavis_cummings:
      throw InputError("parity_operator: unsupported basis");
  }
  return SymmetricMatrix(basis.spec(), std::move(p));
}

SymmetricMatrix excitation_operator(const BasisIndex& fock) {
  if (fock.spec().kind != BasisKind::fock) throw InputError("excitation_operator: Fock basis only");
  const auto dim = static_cast<Eigen::Index>(fock.size());
  Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const BasisLabel& l = fock.label(static_cast<std::size_t>(i));
    lam(i, i) = l.excitations + l.m.value() + fock.spec().j.value();
  }
  return SymmetricMatrix(fock.spec(), std::move(lam));
}

namespace {

// op · V, through a sparse copy when the operator is mostly zeros.
Eigen::MatrixXd apply(const SymmetricMatrix& op, const Eigen::MatrixXd& v) {
  const Eigen::MatrixXd& a = op.entries();
  const auto nnz = (a.array() != 0.0).count();
  if (static_cast<double>(nnz) < 0.2 * static_cast<double>(a.size())) {
    const Eigen::SparseMatrix<double> s = a.sparseView();
    return s * v;
  }
  return detail::gemm(a, false, v);
}

}  // namespace

std::vector<double> expectation(const Spectrum& spectrum, const SymmetricMatrix& op) {
  if (!(op.basis() == spectrum.basis)) throw InputError("expectation: basis provenance mismatch");
  if (static_cast<Eigen::Index>(op.dim()) != spectrum.vectors.rows()) {
    throw InputError("expectation: dimension mismatch");
  }
  const Eigen::MatrixXd w = apply(op, spectrum.vectors);
  std::vector<double> out(spectrum.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    out[k] = spectrum.vectors.col(c).dot(w.col(c));
  }
  return out;
}

ParityAssignment parity_expectation(const Spectrum& spectrum, const ModelParams& params) {
  const BasisIndex basis = BasisIndex::enumerate(spectrum.basis);
  require_consistent(basis, params);
  const Eigen::MatrixXd pi_v = apply(parity_operator(basis), spectrum.vectors);

  constexpr double kClusterGap = 1e-9;
  constexpr double kResolution = 1e-6;
  const double gap = kClusterGap * spectrum.residual.matrix_norm;

  ParityAssignment out;
  out.parity.resize(spectrum.size());
  out.raw.resize(spectrum.size());
  std::size_t first = 0;
  while (first < spectrum.size()) {
    std::size_t last = first + 1;
    while (last < spectrum.size() &&
           spectrum.energies(static_cast<Eigen::Index>(last)) -
                   spectrum.energies(static_cast<Eigen::Index>(last - 1)) <
               gap) {
      ++last;
    }
    const auto k0 = static_cast<Eigen::Index>(first);
    const auto size = static_cast<Eigen::Index>(last - first);
    const Eigen::MatrixXd restricted =
        spectrum.vectors.middleCols(k0, size).transpose() * pi_v.middleCols(k0, size);
    Eigen::VectorXd values;
    if (size == 1) {
      values = restricted.diagonal();
    } else {
      const Eigen::MatrixXd sym = 0.5 * (restricted + restricted.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
      values = es.eigenvalues();
    }
    for (Eigen::Index i = 0; i < size; ++i) {
      const double v = values(i);
      if (std::abs(std::abs(v) - 1.0) > kResolution) {
        throw ParityResolutionError("parity of state " + std::to_string(first + i) +
                                    " unresolved: <Pi> = " + std::to_string(v));
      }
      out.raw[first + i] = v;
      out.parity[first + i] = v > 0.0 ? 1 : -1;
    }
    first = last;
  }
  return out;
}

Eigen::MatrixXd shell_probabilities(const Spectrum& spectrum, const BasisIndex& basis) {
  if (!(basis.spec() == spectrum.basis)) {
    throw InputError("shell_probabilities: basis provenance mismatch");
  }
  if (basis.spec().kind == BasisKind::tavis_cummings) {
    throw InputError("shell_probabilities: no truncation shell in a TC block");
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(basis.spec().n_max + 1, spectrum.vectors.cols());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    p.row(basis.label(i).excitations) +=
        spectrum.vectors.row(static_cast<Eigen::Index>(i)).cwiseAbs2();
  }
  return p;
}

ConvergenceReport delta_p(const Spectrum& spectrum, const BasisIndex& basis, double tolerance) {
  if (!(tolerance > 0.0)) throw InputError("delta_p: tolerance must be positive");
  const Eigen::MatrixXd shells = shell_probabilities(spectrum, basis);
  ConvergenceReport out;
  out.tolerance = tolerance;
  out.delta_p.resize(spectrum.size());
  const Eigen::Index top = shells.rows() - 1;
  bool leading = true;
  for (std::size_t k = 0; k < out.delta_p.size(); ++k) {
    out.delta_p[k] = shells(top, static_cast<Eigen::Index>(k));
    if (leading && out.delta_p[k] < tolerance) {
      ++out.converged_count;
    } else {
      leading = false;
    }
  }
  return out;
}

}  // namespace dicke
