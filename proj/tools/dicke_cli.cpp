// Command-line front end: spectrum, lattice, sweep, stats, convergence.

#include "dicke/backend.hpp"
#include "dicke/errors.hpp"
#include "dicke/pipeline.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dicke;

struct Options {
  double omega = 1.0;
  double omega0 = 1.0;
  std::optional<double> gamma;
  std::optional<double> gamma_over_gc;
  int n_atoms = 40;
  int n_max = 250;
  std::string basis = "parity";
  std::string sector = "both";
  std::vector<std::string> ops{"Jz", "Jx2", "n"};
  double tol_dp = kDefaultDeltaPTolerance;
  std::string out = "out";
  int workers = 1;
  double memory_mb = 4096;
  double bin_width = kDefaultBinWidth;
  double marker_window = kDefaultMarkerWindow;
  int unfold_degree = kDefaultUnfoldDegree;
  std::vector<std::string> windows;
  bool plot_scripts = false;
  std::vector<std::string> sweep_gammas;
  std::vector<std::string> sweep_gammas_over_gc;
  std::vector<std::string> n_max_list{"50", "100", "150", "200", "250"};
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InputError("not a number: '" + s + "'");
  return v;
}

// Each item is a number or "start:stop:count" (inclusive, evenly spaced).
std::vector<double> parse_values(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const std::string& item : items) {
    if (item.find(':') == std::string::npos) {
      out.push_back(to_double(item));
      continue;
    }
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw InputError("range must be start:stop:count");
    const double a = to_double(parts[0]), b = to_double(parts[1]);
    const int n = static_cast<int>(to_double(parts[2]));
    if (n < 1) throw InputError("range count must be >= 1");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  return out;
}

RunConfig make_config(const Options& o) {
  RunConfig c;
  c.params.omega = o.omega;
  c.params.omega0 = o.omega0;
  if (o.n_atoms < 1) throw InputError("--n-atoms must be >= 1");
  c.params.j = HalfInteger::from_twice(o.n_atoms);
  if (o.gamma && o.gamma_over_gc) throw InputError("give --gamma or --gamma-over-gc, not both");
  c.params.gamma = o.gamma ? *o.gamma : o.gamma_over_gc.value_or(0.0) * c.params.critical_coupling();

  if (o.basis == "fock") c.basis = BasisKind::fock;
  else if (o.basis == "coherent") c.basis = BasisKind::coherent;
  else if (o.basis == "parity") c.basis = BasisKind::coherent_parity;
  else throw InputError("--basis must be fock, coherent or parity");

  if (o.sector == "+") c.sectors = {Sector::plus};
  else if (o.sector == "-") c.sectors = {Sector::minus};
  else if (o.sector == "both") c.sectors = {Sector::plus, Sector::minus};
  else throw InputError("--sector must be +, - or both");

  c.n_max = o.n_max;
  for (const auto& name : o.ops) c.ops.push_back(parse_peres_op(name));
  c.tol_dp = o.tol_dp;
  c.out = o.out;
  c.workers = o.workers;
  if (!(o.memory_mb > 0)) throw InputError("--memory-mb must be positive");
  c.limits.memory_budget_bytes = static_cast<std::size_t>(o.memory_mb * 1024.0 * 1024.0);
  c.bin_width = o.bin_width;
  c.marker_window = o.marker_window;
  c.unfold_degree = o.unfold_degree;
  c.plot_scripts = o.plot_scripts;
  if (!o.windows.empty()) {
    c.windows.clear();
    for (const auto& w : o.windows) {
      const auto lh = split(w, ':');
      if (lh.size() != 2) throw InputError("windows are lo:hi pairs separated by commas");
      c.windows.push_back({lh[0] + "_to_" + lh[1], to_double(lh[0]), to_double(lh[1])});
    }
  }
  return c;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--omega", o.omega, "Field frequency")->capture_default_str();
  sub->add_option("--omega0", o.omega0, "Atomic level splitting")->capture_default_str();
  sub->add_option("--gamma", o.gamma, "Coupling");
  sub->add_option("--gamma-over-gc", o.gamma_over_gc, "Coupling in units of sqrt(omega*omega0)/2");
  sub->add_option("--n-atoms", o.n_atoms, "Number of atoms (2j)")->capture_default_str();
  sub->add_option("--n-max", o.n_max, "Boson truncation")->capture_default_str();
  sub->add_option("--basis", o.basis, "fock | coherent | parity")->capture_default_str();
  sub->add_option("--sector", o.sector, "+ | - | both (parity basis)")->capture_default_str();
  sub->add_option("--ops", o.ops, "Peres operators, comma separated (Jz,Jx2,n)")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--tol-dp", o.tol_dp, "Delta-P convergence tolerance")->capture_default_str();
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  sub->add_option("--workers", o.workers, "Concurrent sweep points")->capture_default_str();
  sub->add_option("--memory-mb", o.memory_mb, "Memory budget for dense matrices")->capture_default_str();
  sub->add_option("--bin-width", o.bin_width, "E/j bin width for DoS and markers")->capture_default_str();
  sub->add_option("--marker-window", o.marker_window, "E/j half-window for slope fits")->capture_default_str();
  sub->add_option("--unfold-degree", o.unfold_degree, "Polynomial degree for unfolding")->capture_default_str();
  sub->add_option("--windows", o.windows, "Statistics windows in E/j, e.g. -inf:-1,-1:1,1:inf")
      ->delimiter(',');
  sub->add_flag("--plot-scripts", o.plot_scripts, "Emit gnuplot scripts next to the data");
}

void print_run(const RunManifest& m, const RunConfig& c) {
  const double j = c.params.j.value();
  std::printf("gamma = %.10g (gamma/gc = %.6g)\n", m.gamma, m.gamma / c.params.critical_coupling());
  for (const SectorSummary& s : m.sectors) {
    std::printf("  sector %-5s dim %6zu  E0/j % .12f  converged %6zu (up to E/j %.4f)  "
                "residual %.2e  orth %.2e\n",
                to_string(s.sector).c_str(), s.dim, s.ground_energy / j, s.converged_count,
                s.max_converged_energy / j, s.residual.max_residual,
                s.residual.max_orthonormality_defect);
    if (s.markers && s.markers->dynamic_marker) {
      std::printf("    markers: dynamic %.4f  static %.4f\n", *s.markers->dynamic_marker,
                  *s.markers->static_marker);
    }
    for (const WindowStats& w : s.stats) {
      if (w.mean_ratio) {
        std::printf("    window %-10s levels %5zu  mean ratio %.4f\n", w.window.name.c_str(),
                    w.levels, *w.mean_ratio);
      } else {
        std::printf("    window %-10s levels %5zu  (%s)\n", w.window.name.c_str(), w.levels,
                    w.error.c_str());
      }
    }
  }
  if (m.combined_markers && m.combined_markers->dynamic_marker) {
    std::printf("  combined markers: dynamic %.4f  static %.4f\n",
                *m.combined_markers->dynamic_marker, *m.combined_markers->static_marker);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dicke model exact diagonalization, Peres lattices and chaos diagnostics"};
  app.set_config("--config", "", "Key-value config file with one section per subcommand");
  app.require_subcommand(1);
  // One option set per subcommand: the config file fills every section.
  std::map<const CLI::App*, Options> options;

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues, parity and Delta-P per state");
  auto* lattice = app.add_subcommand("lattice", "Peres lattices, density of states and ESQPT markers");
  auto* sweep_cmd = app.add_subcommand("sweep", "Lattices and statistics across couplings");
  auto* stats = app.add_subcommand("stats", "Level-spacing statistics per energy window");
  auto* convergence = app.add_subcommand("convergence", "Delta-P profile versus truncation");
  for (auto* sub : {spectrum, lattice, sweep_cmd, stats, convergence}) add_common(sub, options[sub]);
  sweep_cmd->add_option("--gammas", options[sweep_cmd].sweep_gammas, "Couplings: a,b,c or start:stop:count")
      ->delimiter(',');
  sweep_cmd->add_option("--gammas-over-gc", options[sweep_cmd].sweep_gammas_over_gc,
                        "Couplings over gc: a,b,c or start:stop:count")
      ->delimiter(',');
  convergence->add_option("--n-max-list", options[convergence].n_max_list, "Truncations: a,b,c or start:stop:count")
      ->delimiter(',')
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    require_blas_backend(argv);
    const Options& o = options.at(app.get_subcommands().front());
    RunConfig config = make_config(o);
    if (*spectrum) {
      config.ops.clear();
      print_run(run(config), config);
    } else if (*lattice) {
      config.markers = std::find(config.ops.begin(), config.ops.end(), PeresOp::jz) != config.ops.end();
      config.dos = true;
      print_run(run(config), config);
    } else if (*stats) {
      config.ops.clear();
      config.stats = true;
      print_run(run(config), config);
    } else if (*sweep_cmd) {
      if (!o.sweep_gammas.empty() && !o.sweep_gammas_over_gc.empty()) {
        throw InputError("give --gammas or --gammas-over-gc, not both");
      }
      if (!o.sweep_gammas.empty()) {
        config.gammas = parse_values(o.sweep_gammas);
      } else if (!o.sweep_gammas_over_gc.empty()) {
        for (double g : parse_values(o.sweep_gammas_over_gc)) {
          config.gammas.push_back(g * config.params.critical_coupling());
        }
      }
      config.markers = std::find(config.ops.begin(), config.ops.end(), PeresOp::jz) != config.ops.end();
      config.dos = true;
      config.stats = true;
      const auto results = sweep(config);
      bool failed = false;
      for (const RunManifest& m : results) {
        if (m.ok) {
          print_run(m, config);
        } else {
          failed = true;
          std::printf("gamma = %.10g FAILED: %s\n", m.gamma, m.error.c_str());
        }
      }
      std::printf("summary: %s\n", (config.out / "summary.csv").string().c_str());
      return failed ? kExitPartial : kExitOk;
    } else if (*convergence) {
      std::vector<int> n_values;
      for (double v : parse_values(o.n_max_list)) n_values.push_back(static_cast<int>(std::lround(v)));
      const auto rows = convergence_profile(config, n_values);
      std::printf("%6s %6s %7s %10s %14s %14s\n", "n_max", "sector", "dim", "converged",
                  "max_E_over_j", "ground_dP");
      for (const ConvergenceRow& r : rows) {
        std::printf("%6d %6s %7zu %10zu %14.6f %14.3e\n", r.n_max, to_string(r.sector).c_str(),
                    r.dim, r.converged_count, r.max_converged_energy_over_j, r.ground_delta_p);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
  return kExitOk;
}
