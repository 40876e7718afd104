#pragma once

// Sanity check of the linked BLAS. Some OpenBLAS builds pick a GEMM kernel
// for the detected CPU that returns wrong products; the eigensolver inherits
// the error. The residual audit would reject every result, so programs check
// once at start-up and, if needed, restart with a conservative kernel.

#include <string>

namespace dicke {

/// Compares a 256×256 BLAS product with a reference loop.
bool blas_backend_ok();

/// Kernel family OpenBLAS reports, or "unknown".
std::string blas_backend_name();

/// Returns when the BLAS backend is usable. If it is not and
/// OPENBLAS_CORETYPE is unset, re-executes the current program with a
/// conservative OPENBLAS_CORETYPE for this CPU. Throws SolverError if the
/// backend is still faulty.
void require_blas_backend(char** argv);

}  // namespace dicke
