#include "dicke/algebra.hpp"

#include "dicke/errors.hpp"

#include <cmath>
#include <string>

namespace dicke {

HalfInteger HalfInteger::from_double(double v) {
  const double twice = 2.0 * v;
  const double rounded = std::round(twice);
  if (!std::isfinite(v) || std::abs(twice - rounded) > 1e-9 || std::abs(rounded) > 1e8) {
    throw InputError("not a half-integer: " + std::to_string(v));
  }
  return HalfInteger(static_cast<int>(rounded));
}

bool SpinQuantum::valid(HalfInteger j, HalfInteger m) noexcept {
  return j.twice() >= 0 && std::abs(m.twice()) <= j.twice() &&
         (j.twice() - m.twice()) % 2 == 0;
}

SpinQuantum SpinQuantum::make(HalfInteger j, HalfInteger m) {
  if (!valid(j, m)) {
    throw InputError("invalid spin labels j=" + std::to_string(j.value()) +
                     " m=" + std::to_string(m.value()));
  }
  return {j, m};
}

namespace {

double ladder_coefficient(double j, double m_from, int step) {
  // ⟨m+step| J_step |m⟩ = sqrt(j(j+1) − m(m+step))
  const double v = j * (j + 1.0) - m_from * (m_from + step);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

double x_element(HalfInteger j, HalfInteger m_row, HalfInteger m_col) {
  const int d = m_row.twice() - m_col.twice();
  if (d == 2) return 0.5 * ladder_coefficient(j.value(), m_col.value(), +1);
  if (d == -2) return 0.5 * ladder_coefficient(j.value(), m_col.value(), -1);
  return 0.0;
}

}  // namespace

double spin_matrix_element(SpinOp kind, HalfInteger j, HalfInteger m_row, HalfInteger m_col) {
  if (!SpinQuantum::valid(j, m_row) || !SpinQuantum::valid(j, m_col)) {
    throw InputError("spin_matrix_element: invalid quantum numbers");
  }
  switch (kind) {
    case SpinOp::z_diagonal:
      return m_row == m_col ? m_row.value() : 0.0;
    case SpinOp::ladder_raise:
      return m_row == m_col + 1 ? ladder_coefficient(j.value(), m_col.value(), +1) : 0.0;
    case SpinOp::ladder_lower:
      return m_row == m_col - 1 ? ladder_coefficient(j.value(), m_col.value(), -1) : 0.0;
    case SpinOp::x:
      return x_element(j, m_row, m_col);
    case SpinOp::x_squared: {
      // Row of x times column of x; only m_col ± 1 intermediates contribute.
      double sum = 0.0;
      for (int step : {-1, +1}) {
        const HalfInteger mid = m_col + step;
        if (SpinQuantum::valid(j, mid)) sum += x_element(j, m_row, mid) * x_element(j, mid, m_col);
      }
      return sum;
    }
  }
  throw InputError("spin_matrix_element: unknown operator");
}

Eigen::MatrixXd spin_operator_matrix(SpinOp kind, HalfInteger j) {
  if (j.twice() < 0) throw InputError("spin_operator_matrix: negative j");
  const int dim = j.twice() + 1;
  const auto m_of = [&](int i) { return HalfInteger::from_twice(-j.twice() + 2 * i); };
  if (kind == SpinOp::x_squared) {
    const Eigen::MatrixXd x = spin_operator_matrix(SpinOp::x, j);
    return x * x;
  }
  Eigen::MatrixXd out(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) out(r, c) = spin_matrix_element(kind, j, m_of(r), m_of(c));
  }
  return out;
}

ScaledValue laguerre_assoc_scaled(int n, int alpha, double x) {
  if (n < 0) throw InputError("laguerre_assoc: negative degree");
  if (alpha < 0) throw InputError("laguerre_assoc: negative order");
  constexpr double kRescaleAbove = 1e200;
  ScaledValue out{1.0, 0.0};
  if (n == 0) return out;
  double prev = 1.0;
  double curr = 1.0 + alpha - x;
  double log_scale = 0.0;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * curr - (k + alpha) * prev) / (k + 1.0);
    prev = curr;
    curr = next;
    if (std::abs(curr) > kRescaleAbove) {
      prev /= kRescaleAbove;
      curr /= kRescaleAbove;
      log_scale += std::log(kRescaleAbove);
    }
  }
  if (!std::isfinite(curr)) throw NumericError("laguerre_assoc: non-finite recurrence");
  out.mantissa = curr;
  out.log_scale = log_scale;
  return out;
}

double laguerre_assoc(int n, int alpha, double x) {
  const ScaledValue v = laguerre_assoc_scaled(n, alpha, x);
  return v.mantissa * std::exp(v.log_scale);
}

double displaced_overlap(int n_row, int n_col, double delta) {
  if (n_row < 0 || n_col < 0) throw InputError("displaced_overlap: negative photon count");
  if (!std::isfinite(delta)) throw InputError("displaced_overlap: non-finite displacement");
  if (delta == 0.0) return n_row == n_col ? 1.0 : 0.0;

  // ⟨n|D(δ)|n'⟩ for n ≥ n'; the other triangle follows from D(δ)† = D(−δ).
  const int hi = std::max(n_row, n_col);
  const int lo = std::min(n_row, n_col);
  const int gap = hi - lo;
  const double x = delta * delta;

  const ScaledValue lag = laguerre_assoc_scaled(lo, gap, x);
  if (lag.mantissa == 0.0) return 0.0;

  double sign = lag.mantissa < 0.0 ? -1.0 : 1.0;
  if (delta < 0.0 && gap % 2 == 1) sign = -sign;
  if (n_row < n_col && gap % 2 == 1) sign = -sign;

  const double log_mag = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) +
                         gap * std::log(std::abs(delta)) - 0.5 * x +
                         std::log(std::abs(lag.mantissa)) + lag.log_scale;
  const double value = sign * std::exp(log_mag);
  if (std::isnan(value)) throw NumericError("displaced_overlap: NaN");
  return value;
}

OverlapTable::OverlapTable(int n_max, double delta) : delta_(delta) {
  if (n_max < 0) throw InputError("OverlapTable: negative n_max");
  table_.resize(n_max + 1, n_max + 1);
  for (int r = 0; r <= n_max; ++r) {
    for (int c = 0; c <= r; ++c) {
      const double v = displaced_overlap(r, c, delta);
      table_(r, c) = v;
      table_(c, r) = (r - c) % 2 == 0 ? v : -v;
    }
  }
}

}  // namespace dicke
