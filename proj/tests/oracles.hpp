#pragma once

// Test-side reference constructions, written independently of the library.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace oracle {

// Annihilation operator on photon numbers 0..cutoff-1.
inline Eigen::MatrixXd annihilation(int cutoff) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Spin-j matrices in the Jz basis, rows ordered by ascending m.
struct Spin {
  Eigen::MatrixXd jz, jp, jm, jx;
};

inline Spin spin(int two_j) {
  const int d = two_j + 1;
  const double j = 0.5 * two_j;
  Spin s;
  s.jz = Eigen::MatrixXd::Zero(d, d);
  s.jp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = -j + i;
    s.jz(i, i) = m;
    if (i + 1 < d) s.jp(i + 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  s.jm = s.jp.transpose();
  s.jx = 0.5 * (s.jp + s.jm);
  return s;
}

// Dicke Hamiltonian on photon ⊗ spin, index = n·(2j+1) + (m + j).
inline Eigen::MatrixXd dicke_fock(double omega, double omega0, double gamma, int two_j, int cutoff) {
  const Eigen::MatrixXd a = annihilation(cutoff);
  const Spin s = spin(two_j);
  const Eigen::MatrixXd ib = Eigen::MatrixXd::Identity(cutoff, cutoff);
  const Eigen::MatrixXd is = Eigen::MatrixXd::Identity(two_j + 1, two_j + 1);
  const double g = 2.0 * gamma / std::sqrt(static_cast<double>(two_j));
  Eigen::MatrixXd h = omega * Eigen::kroneckerProduct(a.transpose() * a, is).eval();
  h += omega0 * Eigen::kroneckerProduct(ib, s.jz).eval();
  h += g * Eigen::kroneckerProduct(Eigen::MatrixXd(a + a.transpose()), s.jx).eval();
  return h;
}

// Rotating-wave Hamiltonian on the same product space.
inline Eigen::MatrixXd tavis_cummings_fock(double omega, double omega0, double gamma, int two_j,
                                           int cutoff) {
  const Eigen::MatrixXd a = annihilation(cutoff);
  const Spin s = spin(two_j);
  const Eigen::MatrixXd ib = Eigen::MatrixXd::Identity(cutoff, cutoff);
  const Eigen::MatrixXd is = Eigen::MatrixXd::Identity(two_j + 1, two_j + 1);
  const double g = gamma / std::sqrt(static_cast<double>(two_j));
  Eigen::MatrixXd h = omega * Eigen::kroneckerProduct(a.transpose() * a, is).eval();
  h += omega0 * Eigen::kroneckerProduct(ib, s.jz).eval();
  h += g * (Eigen::kroneckerProduct(a, s.jp).eval() +
            Eigen::kroneckerProduct(a.transpose(), s.jm).eval());
  return h;
}

// Displacement exp(δ(a† − a)).
inline Eigen::MatrixXd displacement(int cutoff, double delta) {
  const Eigen::MatrixXd a = annihilation(cutoff);
  return Eigen::MatrixXd(delta * (a.transpose() - a)).exp();
}

// Columns are Jx eigenvectors in the Jz basis, ordered by ascending eigenvalue,
// built by an explicit π/2 rotation about y. Column phases are then fixed so
// that Jz has non-negative elements between neighbouring columns.
inline Eigen::MatrixXd jx_eigenvectors(int two_j) {
  const Spin s = spin(two_j);
  // exp(−iθJy) with −iJy = (J₋ − J₊)/2, real.
  const Eigen::MatrixXd gen = 0.5 * (s.jm - s.jp);
  Eigen::MatrixXd u = Eigen::MatrixXd(M_PI / 2 * gen).exp();
  if ((u.transpose() * s.jx * u - s.jz).norm() > 1e-9) {
    u = Eigen::MatrixXd(-M_PI / 2 * gen).exp();
  }
  for (int i = 0; i < two_j; ++i) {
    if (u.col(i + 1).dot(s.jz * u.col(i)) < 0.0) u.col(i + 1) *= -1.0;
  }
  return u;
}

}  // namespace oracle
