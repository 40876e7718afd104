#include "dicke/backend.hpp"

#include "blas.hpp"
#include "dicke/errors.hpp"

#include <unistd.h>

#include <cstdlib>
#include <random>

namespace dicke {

bool blas_backend_ok() {
  constexpr int n = 256;
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::MatrixXd a(n, n), b(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a.data()[i] = d(rng);
    b.data()[i] = d(rng);
  }
  const Eigen::MatrixXd c = detail::gemm(a, false, b);
  const Eigen::MatrixXd ref = a.lazyProduct(b);
  return (c - ref).cwiseAbs().maxCoeff() < 1e-10;
}

std::string blas_backend_name() {
  const char* name = openblas_get_corename();
  return name ? name : "unknown";
}

void require_blas_backend(char** argv) {
  if (blas_backend_ok()) return;
  if (std::getenv("OPENBLAS_CORETYPE") == nullptr && argv != nullptr) {
    const char* fallback = "Prescott";
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
      fallback = "Haswell";
    } else if (__builtin_cpu_supports("avx")) {
      fallback = "Sandybridge";
    }
    setenv("OPENBLAS_CORETYPE", fallback, 1);
    execv("/proc/self/exe", argv);
  }
  throw SolverError("BLAS backend (" + blas_backend_name() +
                        ") returns wrong matrix products; set OPENBLAS_CORETYPE to a "
                        "conservative kernel such as Haswell",
                    0);
}

}  // namespace dicke
