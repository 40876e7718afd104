#include "dicke/analysis.hpp"

#include "dicke/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace dicke {

namespace {

void check_bounds(PeresOp op, double value, double j) {
  const double slack = 1e-9 * std::max(1.0, j * j);
  bool ok = true;
  switch (op) {
    case PeresOp::jz: ok = value >= -j - slack && value <= j + slack; break;
    case PeresOp::jx2: ok = value >= -slack && value <= j * j + slack; break;
    case PeresOp::photon_n: ok = value >= -slack; break;
  }
  if (!ok || !std::isfinite(value)) {
    throw NumericError("lattice: <" + to_string(op) + "> = " + std::to_string(value) +
                       " outside the operator range");
  }
}

long bin_of(double x, double width) { return static_cast<long>(std::floor(x / width + 0.5)); }

// Least-squares slope of y against x.
double slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

PeresLattice lattice(std::span<const double> energies, std::span<const double> expectations,
                     std::span<const int> parities, const ConvergenceReport& report,
                     const ModelParams& params, PeresOp op, LatticeFilter filter) {
  params.validate();
  const std::size_t n = energies.size();
  if (expectations.size() != n || parities.size() != n || report.delta_p.size() != n) {
    throw InputError("lattice: energies, expectations, parities and delta_p differ in length");
  }
  const double j = params.j.value();
  PeresLattice out;
  out.op = op;
  out.params = params;
  out.tolerance = report.tolerance;
  out.points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (filter == LatticeFilter::converged && !report.converged(k)) continue;
    check_bounds(op, expectations[k], j);
    out.points.push_back({energies[k] / j, expectations[k], parities[k], report.delta_p[k]});
  }
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const LatticePoint& a, const LatticePoint& b) {
                     return a.energy_over_j < b.energy_over_j;
                   });
  return out;
}

PeresLattice lattice(const Spectrum& spectrum, std::span<const double> expectations,
                     std::span<const int> parities, const ConvergenceReport& report,
                     const ModelParams& params, PeresOp op, LatticeFilter filter) {
  return lattice(std::span<const double>(spectrum.energies.data(), spectrum.size()), expectations,
                 parities, report, params, op, filter);
}

PeresLattice merge_lattices(std::span<const PeresLattice> parts) {
  if (parts.empty()) throw InputError("merge_lattices: nothing to merge");
  PeresLattice out;
  out.op = parts.front().op;
  out.params = parts.front().params;
  out.tolerance = parts.front().tolerance;
  for (const PeresLattice& p : parts) {
    if (p.op != out.op || p.params.gamma != out.params.gamma || p.params.j != out.params.j) {
      throw InputError("merge_lattices: lattices of different operators or parameters");
    }
    out.tolerance = std::min(out.tolerance, p.tolerance);
    out.points.insert(out.points.end(), p.points.begin(), p.points.end());
  }
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const LatticePoint& a, const LatticePoint& b) {
                     return a.energy_over_j < b.energy_over_j;
                   });
  return out;
}

Histogram density_of_states(std::span<const double> energies, HalfInteger j, double bin_width) {
  if (!(bin_width > 0.0)) throw InputError("density_of_states: bin_width must be positive");
  if (j.twice() < 1) throw InputError("density_of_states: j must be positive");
  Histogram out;
  out.bin_width = bin_width;
  if (energies.empty()) return out;
  std::vector<long> bins;
  bins.reserve(energies.size());
  for (double e : energies) bins.push_back(bin_of(e / j.value(), bin_width));
  const auto [lo, hi] = std::minmax_element(bins.begin(), bins.end());
  out.origin = (static_cast<double>(*lo) - 0.5) * bin_width;
  out.counts.assign(static_cast<std::size_t>(*hi - *lo + 1), 0);
  for (long b : bins) ++out.counts[static_cast<std::size_t>(b - *lo)];
  return out;
}

EsqptMarkers esqpt_markers(const PeresLattice& lattice, double bin_width, double window) {
  if (lattice.op != PeresOp::jz) throw InputError("esqpt_markers: needs a Jz lattice");
  if (!(bin_width > 0.0) || !(window > bin_width)) {
    throw InputError("esqpt_markers: need 0 < bin_width < window");
  }
  constexpr double kLow = -2.0, kHigh = 2.0;
  constexpr std::size_t kMinBinsPerSide = 3;

  std::map<long, std::pair<double, std::size_t>> sums;  // bin → (Σ⟨Jz⟩, count)
  for (const LatticePoint& p : lattice.points) {
    if (!(p.delta_p < lattice.tolerance)) continue;
    auto& s = sums[bin_of(p.energy_over_j, bin_width)];
    s.first += p.expectation;
    ++s.second;
  }
  std::vector<double> centers, averages;
  for (const auto& [bin, s] : sums) {
    centers.push_back(static_cast<double>(bin) * bin_width);
    averages.push_back(s.first / static_cast<double>(s.second));
  }
  const auto in_range = std::count_if(centers.begin(), centers.end(), [&](double c) {
    return c >= kLow - 1e-12 && c <= kHigh + 1e-12;
  });
  if (in_range < 5) {
    throw InsufficientDataError("esqpt_markers: only " + std::to_string(in_range) +
                                " populated bins in E/j range [-2, 2]");
  }

  const double eps = 1e-9 * bin_width;
  std::vector<KinkCandidate> raw;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double c = centers[i];
    if (c < kLow - eps || c > kHigh + eps) continue;
    std::vector<double> lx, ly, rx, ry;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (centers[k] >= c - window - eps && centers[k] <= c + eps) {
        lx.push_back(centers[k]);
        ly.push_back(averages[k]);
      }
      if (centers[k] >= c - eps && centers[k] <= c + window + eps) {
        rx.push_back(centers[k]);
        ry.push_back(averages[k]);
      }
    }
    if (lx.size() < kMinBinsPerSide || rx.size() < kMinBinsPerSide) continue;
    raw.push_back({c, slope(rx, ry) - slope(lx, ly)});
  }
  std::stable_sort(raw.begin(), raw.end(), [](const KinkCandidate& a, const KinkCandidate& b) {
    return std::abs(a.slope_change) > std::abs(b.slope_change);
  });

  EsqptMarkers out;
  out.bin_width = bin_width;
  out.window = window;
  if (raw.empty()) return out;
  // Relative to the strongest change and to the overall slope of the curve,
  // so rounding noise on a straight line is not reported.
  const auto [amin, amax] = std::minmax_element(averages.begin(), averages.end());
  const double overall = (*amax - *amin) / (centers.back() - centers.front());
  const double floor = std::max(1e-6 * std::abs(raw.front().slope_change), 1e-9 * overall);
  for (const KinkCandidate& k : raw) {
    if (out.candidates.size() == 2) break;
    if (std::abs(k.slope_change) <= floor) break;
    const bool separated = std::all_of(out.candidates.begin(), out.candidates.end(),
                                       [&](const KinkCandidate& a) {
                                         return std::abs(a.energy_over_j - k.energy_over_j) >
                                                window + eps;
                                       });
    if (separated) out.candidates.push_back(k);
  }
  if (out.candidates.size() == 2) {
    const auto [lo, hi] = std::minmax(out.candidates[0].energy_over_j,
                                      out.candidates[1].energy_over_j);
    out.dynamic_marker = lo;
    out.static_marker = hi;
  }
  return out;
}

std::vector<double> unfold(std::span<const double> energies, int polynomial_degree) {
  constexpr std::size_t kMinLevels = 50;
  constexpr double kMaxCondition = 1e12;
  if (energies.size() < kMinLevels) {
    throw InputError("unfold: needs at least 50 levels, got " + std::to_string(energies.size()));
  }
  if (polynomial_degree < 1) throw InputError("unfold: polynomial degree must be >= 1");

  std::vector<double> e(energies.begin(), energies.end());
  std::sort(e.begin(), e.end());
  const auto n = static_cast<Eigen::Index>(e.size());
  const double mid = 0.5 * (e.front() + e.back());
  const double half = 0.5 * (e.back() - e.front());
  if (!(half > 0.0)) throw FitError("unfold: all levels coincide", std::numeric_limits<double>::infinity());

  Eigen::MatrixXd design(n, polynomial_degree + 1);
  Eigen::VectorXd staircase(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (e[static_cast<std::size_t>(i)] - mid) / half;
    double p = 1.0;
    for (int d = 0; d <= polynomial_degree; ++d, p *= x) design(i, d) = p;
    staircase(i) = static_cast<double>(i) + 0.5;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                   : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) {
    throw FitError("unfold: ill-conditioned fit, condition number " + std::to_string(condition),
                   condition);
  }
  const Eigen::VectorXd coef = svd.solve(staircase);
  const Eigen::VectorXd mapped = design * coef;

  const double slack = 1e-12 * static_cast<double>(n);
  for (Eigen::Index i = 1; i < n; ++i) {
    if (mapped(i) < mapped(i - 1) - slack) {
      throw FitError("unfold: fitted level staircase decreases near E = " +
                         std::to_string(e[static_cast<std::size_t>(i)]),
                     condition);
    }
  }
  const double span = mapped(n - 1) - mapped(0);
  if (!(span > 0.0)) throw FitError("unfold: degenerate fitted range", condition);
  const double scale = static_cast<double>(n - 1) / span;
  std::vector<double> out(e.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = mapped(0) + (mapped(i) - mapped(0)) * scale;
  }
  // Clamp rounding-level inversions so the output is monotone.
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

namespace {

// Σ min/max over consecutive spacing pairs and the number of pairs used.
std::pair<double, std::size_t> gap_ratio_sum(std::span<const double> levels) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 2; i < levels.size(); ++i) {
    const double a = levels[i - 1] - levels[i - 2];
    const double b = levels[i] - levels[i - 1];
    const double hi = std::max(a, b);
    if (!(hi > 0.0)) continue;
    sum += std::min(a, b) / hi;
    ++count;
  }
  return {sum, count};
}

}  // namespace

double mean_gap_ratio(std::span<const double> levels) {
  const auto [sum, count] = gap_ratio_sum(levels);
  if (count == 0) throw InsufficientDataError("mean_gap_ratio: fewer than two nonzero spacings");
  return sum / static_cast<double>(count);
}

SpacingStats spacing_stats(std::span<const double> unfolded, double spacing_bin) {
  if (unfolded.size() < 3) throw InsufficientDataError("spacing_stats: needs at least 3 levels");
  if (!(spacing_bin > 0.0)) throw InputError("spacing_stats: bin width must be positive");
  if (!std::is_sorted(unfolded.begin(), unfolded.end())) {
    throw InputError("spacing_stats: levels must be sorted");
  }
  SpacingStats out;
  out.spacings.origin = 0.0;
  out.spacings.bin_width = spacing_bin;
  double total = 0.0;
  for (std::size_t i = 1; i < unfolded.size(); ++i) {
    const double s = unfolded[i] - unfolded[i - 1];
    total += s;
    const auto b = static_cast<std::size_t>(std::floor(s / spacing_bin));
    if (b >= out.spacings.counts.size()) out.spacings.counts.resize(b + 1, 0);
    ++out.spacings.counts[b];
  }
  out.mean_spacing = total / static_cast<double>(unfolded.size() - 1);
  out.mean_ratio = mean_gap_ratio(unfolded);
  out.ratio_count = gap_ratio_sum(unfolded).second;
  return out;
}

std::vector<double> select_window(std::span<const double> energies, HalfInteger j, double lo,
                                  double hi) {
  std::vector<double> out;
  for (double e : energies) {
    const double x = e / j.value();
    if (x > lo && x < hi) out.push_back(e);
  }
  return out;
}

std::vector<double> remove_degenerate(std::span<const double> sorted_levels, double tolerance) {
  std::vector<double> out;
  for (std::size_t i = 0; i < sorted_levels.size(); ++i) {
    const bool near_prev = i > 0 && sorted_levels[i] - sorted_levels[i - 1] <= tolerance;
    const bool near_next =
        i + 1 < sorted_levels.size() && sorted_levels[i + 1] - sorted_levels[i] <= tolerance;
    if (!near_prev && !near_next) out.push_back(sorted_levels[i]);
  }
  return out;
}

}  // namespace dicke
