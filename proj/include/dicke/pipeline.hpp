#pragma once

// Run orchestration: basis → Hamiltonian → eigenpairs → observables → analysis,
// with CSV/JSON output and manifests.

#include "dicke/analysis.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dicke {

struct EnergyWindow {
  std::string name;
  double lo = 0.0;  // exclusive, in E/j
  double hi = 0.0;
};

std::vector<EnergyWindow> default_windows();

struct RunConfig {
  ModelParams params;
  BasisKind basis = BasisKind::coherent_parity;
  int n_max = 250;
  std::vector<Sector> sectors{Sector::plus, Sector::minus};
  std::vector<PeresOp> ops;
  bool markers = false;
  bool dos = false;
  bool stats = false;
  bool plot_scripts = false;
  std::filesystem::path out = "out";
  double tol_dp = kDefaultDeltaPTolerance;
  double bin_width = kDefaultBinWidth;
  double marker_window = kDefaultMarkerWindow;
  int unfold_degree = kDefaultUnfoldDegree;
  std::vector<EnergyWindow> windows = default_windows();
  std::vector<double> gammas;  // sweep points; empty means just params.gamma
  int workers = 1;
  BuildLimits limits;

  /// Throws InputError if the configuration cannot resolve to a run.
  void validate() const;
  /// Sectors actually diagonalized: {none} unless the basis is parity-adapted.
  std::vector<Sector> resolved_sectors() const;
};

/// Everything computed for one Hamiltonian block, kept in memory.
struct SectorData {
  Sector sector = Sector::none;
  BasisIndex basis;
  Spectrum spectrum;
  ConvergenceReport convergence;
  ParityAssignment parity;
  std::map<PeresOp, std::vector<double>> expectations;
  struct Timings {
    double build = 0, solve = 0, observables = 0;
  } seconds;
};

SectorData compute_sector(const ModelParams& params, BasisKind kind, int n_max, Sector sector,
                          std::span<const PeresOp> ops, double tol_dp,
                          const BuildLimits& limits = {});

struct WindowStats {
  EnergyWindow window;
  std::size_t levels = 0;
  std::optional<double> mean_ratio;
  std::optional<SpacingStats> spacing;
  std::string error;
};

/// Gap-ratio and spacing statistics of the ΔP-converged, non-degenerate
/// levels of one sector inside each window.
std::vector<WindowStats> window_statistics(const SectorData& data, const ModelParams& params,
                                           std::span<const EnergyWindow> windows, int degree);

struct FileRecord {
  std::string path;  // relative to the output root
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct SectorSummary {
  Sector sector = Sector::none;
  std::size_t dim = 0;
  ResidualReport residual;
  std::size_t converged_count = 0;
  double ground_energy = 0.0;
  double max_converged_energy = 0.0;
  std::optional<EsqptMarkers> markers;
  std::vector<WindowStats> stats;
  SectorData::Timings seconds;
  double analysis_seconds = 0.0;
};

struct RunManifest {
  double gamma = 0.0;
  bool ok = true;
  std::string error;
  int exit_code = 0;
  std::vector<SectorSummary> sectors;
  std::optional<EsqptMarkers> combined_markers;
  std::vector<FileRecord> files;
  double wall_seconds = 0.0;
};

/// Exit codes shared with the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitCapacity = 3, kExitSolver = 4, kExitPartial = 5 };
int exit_code_for(const std::exception& e);

/// Directory name for a coupling, e.g. "gamma_0.75".
std::string gamma_dirname(double gamma);

/// One coupling (config.params.gamma). Writes <out>/<gamma>/<sector>/... and
/// <out>/<gamma>/manifest.json. On failure the partial outputs are kept, a
/// FAILED marker is written and the exception is rethrown.
RunManifest run(const RunConfig& config);

/// One run per entry of config.gammas, up to config.workers at a time.
/// Failures are isolated per point. Writes <out>/summary.csv and
/// <out>/manifest.json.
std::vector<RunManifest> sweep(const RunConfig& config);

struct ConvergenceRow {
  int n_max = 0;
  Sector sector = Sector::none;
  std::size_t dim = 0;
  std::size_t converged_count = 0;
  double max_converged_energy_over_j = 0.0;
  double ground_delta_p = 0.0;
};

/// ΔP profile as the truncation grows; writes <out>/convergence.csv.
std::vector<ConvergenceRow> convergence_profile(const RunConfig& config,
                                                std::span<const int> n_max_values);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace dicke
