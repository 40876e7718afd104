#pragma once

#include "dicke/observables.hpp"

#include <optional>
#include <span>
#include <vector>

namespace dicke {

struct LatticePoint {
  double energy_over_j = 0.0;
  double expectation = 0.0;
  int parity = 0;
  double delta_p = 0.0;
};

struct PeresLattice {
  PeresOp op = PeresOp::jz;
  std::vector<LatticePoint> points;  // ascending energy
  ModelParams params;
  double tolerance = kDefaultDeltaPTolerance;  // ΔP threshold for "converged"
};

enum class LatticeFilter { all, converged };

/// Pairs each eigenvalue (scaled by 1/j) with the Peres expectation, parity
/// and ΔP of the same state. Throws InputError on length mismatch and
/// NumericError if an expectation leaves the operator's spectral range.
PeresLattice lattice(std::span<const double> energies, std::span<const double> expectations,
                     std::span<const int> parities, const ConvergenceReport& report,
                     const ModelParams& params, PeresOp op,
                     LatticeFilter filter = LatticeFilter::all);
PeresLattice lattice(const Spectrum& spectrum, std::span<const double> expectations,
                     std::span<const int> parities, const ConvergenceReport& report,
                     const ModelParams& params, PeresOp op,
                     LatticeFilter filter = LatticeFilter::all);

/// Union of lattices of the same operator and parameters (e.g. both sectors).
PeresLattice merge_lattices(std::span<const PeresLattice> parts);

/// Fixed-width histogram; bin i covers [origin + i·w, origin + (i+1)·w).
struct Histogram {
  double origin = 0.0;
  double bin_width = 0.0;
  std::vector<std::size_t> counts;

  double center(std::size_t i) const { return origin + (static_cast<double>(i) + 0.5) * bin_width; }
  bool empty() const noexcept { return counts.empty(); }
};

inline constexpr double kDefaultBinWidth = 0.05;
inline constexpr double kDefaultMarkerWindow = 0.3;
inline constexpr int kDefaultUnfoldDegree = 6;

/// Level counts per E/j bin; bins are centred on integer multiples of bin_width.
Histogram density_of_states(std::span<const double> energies, HalfInteger j, double bin_width);

struct KinkCandidate {
  double energy_over_j = 0.0;
  double slope_change = 0.0;  // right slope minus left slope
};

struct EsqptMarkers {
  std::optional<double> dynamic_marker;  // lower slope change
  std::optional<double> static_marker;   // upper slope change
  double bin_width = kDefaultBinWidth;
  double window = kDefaultMarkerWindow;
  std::vector<KinkCandidate> candidates;  // accepted kinks, strongest first
};

/// Slope changes of the bin-averaged ⟨Jz⟩(E/j) curve. At every populated bin
/// centre in [−2, 2] a line is fitted to the bins within `window` on each
/// side; the two strongest well-separated changes are the markers. Only
/// converged points are used. Throws InsufficientDataError with fewer than
/// five populated bins in range.
EsqptMarkers esqpt_markers(const PeresLattice& lattice, double bin_width = kDefaultBinWidth,
                           double window = kDefaultMarkerWindow);

/// Maps sorted levels through a degree-d polynomial fit of the cumulative
/// level count, then rescales to unit mean spacing. Needs at least 50 levels.
/// Throws FitError when the design matrix condition number exceeds 1e12 or
/// the fitted staircase is not monotone over the data.
std::vector<double> unfold(std::span<const double> energies, int polynomial_degree = kDefaultUnfoldDegree);

struct SpacingStats {
  Histogram spacings;         // nearest-neighbour spacing counts
  double mean_spacing = 0.0;
  double mean_ratio = 0.0;    // ⟨min(s_i, s_i+1) / max(s_i, s_i+1)⟩
  std::size_t ratio_count = 0;
};

SpacingStats spacing_stats(std::span<const double> unfolded, double spacing_bin = 0.1);

/// Mean consecutive-gap ratio of sorted levels; pairs of zero spacings are skipped.
double mean_gap_ratio(std::span<const double> levels);

/// Levels with lo < E/j < hi.
std::vector<double> select_window(std::span<const double> energies, HalfInteger j, double lo,
                                  double hi);

/// Drops every level that lies within `tolerance` of a neighbour.
std::vector<double> remove_degenerate(std::span<const double> sorted_levels, double tolerance);

}  // namespace dicke
