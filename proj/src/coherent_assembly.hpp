#pragma once

// Shared assembly of operators that act on the displaced (coherent) basis.
// An operator is described by three kinds of matrix element in the full
// |N;j,m⟩ basis; parity-adapted matrices are projections of those.

#include "dicke/basis.hpp"
#include "dicke/hamiltonian.hpp"

#include <functional>

namespace dicke::detail {

struct CoherentTerms {
  // Diagonal value at (N, m).
  std::function<double(int, HalfInteger)> diagonal;
  // Coefficient on the x-basis representation of Jz:
  // ½·sqrt(j(j+1) − m m')·⟨N'|D(G(m'−m))|N⟩ for m' = m ± 1.
  double spin_flip = 0.0;
  // Same-m coupling c(m)·sqrt(N+1) between N and N+1; empty means none.
  std::function<double(HalfInteger)> hop;
};

SymmetricMatrix assemble_coherent(const BasisIndex& basis, const ModelParams& params,
                                  const CoherentTerms& terms);

}  // namespace dicke::detail
