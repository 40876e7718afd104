#pragma once

// Collective spin matrix elements and displaced number-state overlaps.

#include <Eigen/Dense>

#include <compare>
#include <cstdint>

namespace dicke {

/// A value in ½ℤ stored as its double. Spin lengths and projections are
/// always carried this way so parity checks stay exact.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;

  static constexpr HalfInteger from_twice(int twice) { return HalfInteger(twice); }
  /// Throws InputError unless 2v is an integer.
  static HalfInteger from_double(double v);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  constexpr bool is_integer() const noexcept { return twice_ % 2 == 0; }

  constexpr HalfInteger operator-() const noexcept { return HalfInteger(-twice_); }
  constexpr HalfInteger operator+(int k) const noexcept { return HalfInteger(twice_ + 2 * k); }
  constexpr HalfInteger operator-(int k) const noexcept { return HalfInteger(twice_ - 2 * k); }

  constexpr auto operator<=>(const HalfInteger&) const = default;

 private:
  constexpr explicit HalfInteger(int twice) : twice_(twice) {}
  int twice_ = 0;
};

/// |j, m⟩ labels of the symmetric subspace.
struct SpinQuantum {
  HalfInteger j;
  HalfInteger m;

  /// Throws InputError on 2j < 0, |m| > j, or mismatched parity of 2j and 2m.
  static SpinQuantum make(HalfInteger j, HalfInteger m);
  static bool valid(HalfInteger j, HalfInteger m) noexcept;
};

enum class SpinOp { z_diagonal, ladder_raise, ladder_lower, x, x_squared };

/// ⟨j, m_row| O |j, m_col⟩ in the eigenbasis of the quantization axis.
/// The x-squared element is the explicit matrix square of the x elements.
double spin_matrix_element(SpinOp kind, HalfInteger j, HalfInteger m_row, HalfInteger m_col);

/// Full (2j+1)×(2j+1) matrix of `kind`, rows and columns ordered by ascending m.
Eigen::MatrixXd spin_operator_matrix(SpinOp kind, HalfInteger j);

/// Associated Laguerre polynomial L_n^(alpha)(x) by upward recurrence in n.
double laguerre_assoc(int n, int alpha, double x);

/// Recurrence result kept as mantissa · exp(log_scale) so high degrees cannot
/// overflow before they are combined with small prefactors.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;
};
ScaledValue laguerre_assoc_scaled(int n, int alpha, double x);

/// ⟨n_row| exp(delta (a† − a)) |n_col⟩ for real delta, evaluated in log space.
double displaced_overlap(int n_row, int n_col, double delta);

/// Dense table of displaced_overlap(r, c, delta) for 0 ≤ r, c ≤ n_max.
class OverlapTable {
 public:
  OverlapTable(int n_max, double delta);

  double operator()(int n_row, int n_col) const { return table_(n_row, n_col); }
  double delta() const noexcept { return delta_; }
  int n_max() const noexcept { return static_cast<int>(table_.rows()) - 1; }

 private:
  double delta_;
  Eigen::MatrixXd table_;
};

}  // namespace dicke
