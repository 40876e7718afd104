#include "dicke/pipeline.hpp"

#include "dicke/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace dicke {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::vector<EnergyWindow> default_windows() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{"below_-1", -inf, -1.0}, {"-1_to_1", -1.0, 1.0}, {"above_1", 1.0, inf}};
}

void RunConfig::validate() const {
  params.validate();
  if (n_max < 0) throw InputError("n_max must be non-negative");
  if (basis == BasisKind::tavis_cummings) throw InputError("runs use the fock, coherent or parity basis");
  if (basis == BasisKind::coherent_parity && sectors.empty()) throw InputError("no parity sector selected");
  if (!(tol_dp > 0.0)) throw InputError("tol-dp must be positive");
  if (!(bin_width > 0.0)) throw InputError("bin width must be positive");
  if (workers < 1) throw InputError("workers must be >= 1");
  for (double g : gammas) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw InputError("sweep gammas must be finite and >= 0");
  }
  if (markers && std::find(ops.begin(), ops.end(), PeresOp::jz) == ops.end()) {
    throw InputError("ESQPT markers need the Jz Peres operator");
  }
  for (const EnergyWindow& w : windows) {
    if (!(w.lo < w.hi)) throw InputError("window " + w.name + " is empty");
  }
}

std::vector<Sector> RunConfig::resolved_sectors() const {
  if (basis != BasisKind::coherent_parity) return {Sector::none};
  std::vector<Sector> out;
  for (Sector s : sectors) {
    if (s != Sector::none && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return kExitConfig;
  if (dynamic_cast<const CapacityError*>(&e)) return kExitCapacity;
  if (dynamic_cast<const SolverError*>(&e)) return kExitSolver;
  return kExitSolver;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SymmetricMatrix build_hamiltonian(const ModelParams& params, BasisKind kind, int n_max,
                                  Sector sector, const BuildLimits& limits) {
  switch (kind) {
    case BasisKind::fock: return build_fock(params, n_max, limits);
    case BasisKind::coherent: return build_coherent(params, n_max, limits);
    case BasisKind::coherent_parity: return build_coherent_parity(params, n_max, sector, limits);
    case BasisKind::tavis_cummings: break;
  }
  throw InputError("unsupported basis for a run");
}

}  // namespace

SectorData compute_sector(const ModelParams& params, BasisKind kind, int n_max, Sector sector,
                          std::span<const PeresOp> ops, double tol_dp, const BuildLimits& limits) {
  SectorData out;
  out.sector = sector;
  auto t0 = Clock::now();
  const SymmetricMatrix h = build_hamiltonian(params, kind, n_max, sector, limits);
  out.basis = BasisIndex::enumerate(h.basis());
  out.seconds.build = seconds_since(t0);

  t0 = Clock::now();
  out.spectrum = eigh(h);
  out.seconds.solve = seconds_since(t0);

  t0 = Clock::now();
  out.convergence = delta_p(out.spectrum, out.basis, tol_dp);
  if (kind == BasisKind::coherent_parity) {
    const int s = static_cast<int>(sector);
    out.parity.parity.assign(out.spectrum.size(), s);
    out.parity.raw.assign(out.spectrum.size(), static_cast<double>(s));
  } else {
    out.parity = parity_expectation(out.spectrum, params);
  }
  for (PeresOp op : ops) {
    out.expectations[op] = expectation(out.spectrum, peres_matrix(op, out.basis, params));
  }
  out.seconds.observables = seconds_since(t0);
  return out;
}

std::vector<WindowStats> window_statistics(const SectorData& data, const ModelParams& params,
                                           std::span<const EnergyWindow> windows, int degree) {
  std::vector<double> converged;
  for (std::size_t k = 0; k < data.spectrum.size(); ++k) {
    if (data.convergence.converged(k)) converged.push_back(data.spectrum.energies(static_cast<Eigen::Index>(k)));
  }
  const double degenerate_tol = 1e-9 * data.spectrum.residual.matrix_norm;
  std::vector<WindowStats> out;
  for (const EnergyWindow& w : windows) {
    WindowStats ws;
    ws.window = w;
    const std::vector<double> levels =
        remove_degenerate(select_window(converged, params.j, w.lo, w.hi), degenerate_tol);
    ws.levels = levels.size();
    try {
      const std::vector<double> unfolded = unfold(levels, degree);
      ws.spacing = spacing_stats(unfolded);
      ws.mean_ratio = ws.spacing->mean_ratio;
    } catch (const std::exception& e) {
      ws.error = e.what();
    }
    out.push_back(std::move(ws));
  }
  return out;
}

std::string gamma_dirname(double gamma) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "gamma_%.10g", gamma);
  return buf;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (is) {
    is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

namespace {

json to_json(const EsqptMarkers& m) {
  json j;
  j["dynamic_marker"] = m.dynamic_marker ? json(*m.dynamic_marker) : json(nullptr);
  j["static_marker"] = m.static_marker ? json(*m.static_marker) : json(nullptr);
  j["bin_width"] = m.bin_width;
  j["window"] = m.window;
  j["candidates"] = json::array();
  for (const KinkCandidate& k : m.candidates) {
    j["candidates"].push_back({{"E_over_j", k.energy_over_j}, {"slope_change", k.slope_change}});
  }
  return j;
}

json bound_json(double v) { return std::isfinite(v) ? json(v) : json(v < 0 ? "-inf" : "inf"); }

json to_json(const WindowStats& w) {
  json j{{"window", w.window.name},
         {"lo", bound_json(w.window.lo)},
         {"hi", bound_json(w.window.hi)},
         {"levels", w.levels}};
  j["mean_ratio"] = w.mean_ratio ? json(*w.mean_ratio) : json(nullptr);
  if (w.spacing) {
    j["mean_spacing"] = w.spacing->mean_spacing;
    j["spacing_bin"] = w.spacing->spacings.bin_width;
    j["spacing_counts"] = w.spacing->spacings.counts;
  }
  if (!w.error.empty()) j["error"] = w.error;
  return j;
}

json to_json(const ResidualReport& r) {
  return {{"max_residual", r.max_residual},
          {"max_orthonormality_defect", r.max_orthonormality_defect},
          {"matrix_norm_frobenius", r.matrix_norm},
          {"within_bounds", r.within_bounds()}};
}

// Writes files under the output root and remembers each one for the manifest.
class OutputSink {
 public:
  explicit OutputSink(fs::path root) : root_(std::move(root)) {}

  std::ofstream open(const fs::path& relative) {
    const fs::path full = root_ / relative;
    fs::create_directories(full.parent_path());
    std::ofstream os(full, std::ios::binary);
    if (!os) throw InputError("cannot write " + full.string());
    pending_.push_back(relative);
    return os;
  }

  void write_text(const fs::path& relative, const std::string& text) {
    std::ofstream os = open(relative);
    os << text;
  }

  std::vector<FileRecord> records() const {
    std::vector<FileRecord> out;
    for (const fs::path& rel : pending_) {
      const fs::path full = root_ / rel;
      if (!fs::exists(full)) continue;
      out.push_back({rel.generic_string(), sha256_file(full), fs::file_size(full)});
    }
    return out;
  }

 private:
  fs::path root_;
  std::vector<fs::path> pending_;
};

void write_energies(OutputSink& sink, const fs::path& dir, const SectorData& d, double j) {
  std::ofstream os = sink.open(dir / "energies.csv");
  os << "index,E,E_over_j,parity,parity_raw,delta_p,converged\n";
  for (std::size_t k = 0; k < d.spectrum.size(); ++k) {
    const double e = d.spectrum.energies(static_cast<Eigen::Index>(k));
    os << k << ',' << fmt17(e) << ',' << fmt17(e / j) << ',' << d.parity.parity[k] << ','
       << fmt17(d.parity.raw[k]) << ',' << fmt17(d.convergence.delta_p[k]) << ','
       << (d.convergence.converged(k) ? 1 : 0) << '\n';
  }
}

void write_lattice(OutputSink& sink, const fs::path& dir, const PeresLattice& lat) {
  std::ofstream os = sink.open(dir / ("lattice_" + to_string(lat.op) + ".csv"));
  os << "E_over_j,expval,parity,delta_p\n";
  for (const LatticePoint& p : lat.points) {
    os << fmt17(p.energy_over_j) << ',' << fmt17(p.expectation) << ',' << p.parity << ','
       << fmt17(p.delta_p) << '\n';
  }
}

void write_dos(OutputSink& sink, const fs::path& dir, const Histogram& h) {
  std::ofstream os = sink.open(dir / "dos.csv");
  os << "E_over_j,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << fmt17(h.center(i)) << ',' << h.counts[i] << '\n';
  }
}

void write_plot_script(OutputSink& sink, const fs::path& dir, std::span<const PeresOp> ops) {
  std::ostringstream gp;
  gp << "# gnuplot: one panel per Peres operator plus the convergence certificate\n"
     << "set datafile separator ','\nset key off\nset xlabel 'E/j'\n"
     << "set multiplot layout 2,2\n";
  for (PeresOp op : ops) {
    gp << "set ylabel '<" << to_string(op) << ">'\nunset logscale y\n"
       << "plot 'lattice_" << to_string(op) << ".csv' every ::1 using 1:2 with points pt 7 ps 0.3\n";
  }
  gp << "set ylabel 'delta P'\nset logscale y\n"
     << "plot 'energies.csv' every ::1 using 3:($6 > 0 ? $6 : 1e-300) with points pt 7 ps 0.3\n"
     << "unset multiplot\n";
  sink.write_text(dir / "plot.gp", gp.str());
}

double sector_ground(const SectorData& d) {
  return d.spectrum.size() ? d.spectrum.energies(0) : std::numeric_limits<double>::quiet_NaN();
}

json manifest_json(const RunConfig& config, const RunManifest& m) {
  json j;
  j["status"] = m.ok ? "ok" : "failed";
  if (!m.ok) {
    j["error"] = m.error;
    j["exit_code"] = m.exit_code;
  }
  j["params"] = {{"omega", config.params.omega},
                 {"omega0", config.params.omega0},
                 {"gamma", m.gamma},
                 {"gamma_over_gc", m.gamma / config.params.critical_coupling()},
                 {"j", config.params.j.value()},
                 {"n_atoms", config.params.n_atoms()}};
  j["basis"] = to_string(config.basis);
  j["n_max"] = config.n_max;
  j["tol_dp"] = config.tol_dp;
  j["sectors"] = json::array();
  for (const SectorSummary& s : m.sectors) {
    json sj{{"sector", to_string(s.sector)},
            {"dim", s.dim},
            {"residual", to_json(s.residual)},
            {"converged_count", s.converged_count},
            {"ground_energy", s.ground_energy},
            {"max_converged_energy", s.max_converged_energy},
            {"wall_seconds",
             {{"build", s.seconds.build},
              {"solve", s.seconds.solve},
              {"observables", s.seconds.observables},
              {"analysis", s.analysis_seconds}}}};
    if (s.markers) sj["markers"] = to_json(*s.markers);
    j["sectors"].push_back(sj);
  }
  if (m.combined_markers) j["combined_markers"] = to_json(*m.combined_markers);
  j["wall_seconds"] = m.wall_seconds;
  j["files"] = json::array();
  for (const FileRecord& f : m.files) {
    j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  return j;
}

// Run one coupling; `root` is the output root shared by a sweep.
RunManifest run_point(const RunConfig& config, double gamma) {
  const auto t_start = Clock::now();
  RunConfig cfg = config;
  cfg.params.gamma = gamma;
  cfg.validate();
  const double j = cfg.params.j.value();
  const fs::path gdir = gamma_dirname(gamma);
  OutputSink sink(cfg.out);
  RunManifest m;
  m.gamma = gamma;

  const auto finish = [&] {
    m.wall_seconds = seconds_since(t_start);
    m.files = sink.records();
    const fs::path path = cfg.out / gdir / "manifest.json";
    fs::create_directories(path.parent_path());
    std::ofstream(path) << manifest_json(cfg, m).dump(2) << '\n';
  };

  try {
    fs::remove(cfg.out / gdir / "FAILED");
    std::vector<PeresLattice> jz_parts;
    for (Sector sector : cfg.resolved_sectors()) {
      const fs::path sdir = gdir / to_string(sector);
      const SectorData d =
          compute_sector(cfg.params, cfg.basis, cfg.n_max, sector, cfg.ops, cfg.tol_dp, cfg.limits);
      const auto t_analysis = Clock::now();

      SectorSummary s;
      s.sector = sector;
      s.dim = d.spectrum.size();
      s.residual = d.spectrum.residual;
      s.converged_count = d.convergence.converged_count;
      s.ground_energy = sector_ground(d);
      s.max_converged_energy = s.converged_count
          ? d.spectrum.energies(static_cast<Eigen::Index>(s.converged_count - 1))
          : std::numeric_limits<double>::quiet_NaN();
      s.seconds = d.seconds;

      write_energies(sink, sdir, d, j);
      for (PeresOp op : cfg.ops) {
        const PeresLattice lat = lattice(d.spectrum, d.expectations.at(op), d.parity.parity,
                                         d.convergence, cfg.params, op);
        write_lattice(sink, sdir, lat);
        if (op == PeresOp::jz) jz_parts.push_back(lat);
        if (op == PeresOp::jz && cfg.markers) {
          try {
            s.markers = esqpt_markers(lat, cfg.bin_width, cfg.marker_window);
            sink.write_text(sdir / "markers.json", to_json(*s.markers).dump(2) + "\n");
          } catch (const InsufficientDataError& e) {
            sink.write_text(sdir / "markers.json", json{{"error", e.what()}}.dump(2) + "\n");
          }
        }
      }
      if (cfg.dos) {
        write_dos(sink, sdir, density_of_states(std::span<const double>(d.spectrum.energies.data(),
                                                                        d.spectrum.size()),
                                                cfg.params.j, cfg.bin_width));
      }
      if (cfg.stats) {
        s.stats = window_statistics(d, cfg.params, cfg.windows, cfg.unfold_degree);
        json sj = json::array();
        for (const WindowStats& w : s.stats) sj.push_back(to_json(w));
        sink.write_text(sdir / "stats.json", sj.dump(2) + "\n");
      }
      if (cfg.plot_scripts) write_plot_script(sink, sdir, cfg.ops);
      s.analysis_seconds = seconds_since(t_analysis);

      const json sector_manifest{{"sector", to_string(sector)},
                                 {"dim", s.dim},
                                 {"residual", to_json(s.residual)},
                                 {"converged_count", s.converged_count}};
      sink.write_text(sdir / "manifest.json", sector_manifest.dump(2) + "\n");
      m.sectors.push_back(std::move(s));
    }

    if (jz_parts.size() > 1 && cfg.markers) {
      const PeresLattice merged = merge_lattices(jz_parts);
      try {
        m.combined_markers = esqpt_markers(merged, cfg.bin_width, cfg.marker_window);
        sink.write_text(gdir / "combined" / "markers.json", to_json(*m.combined_markers).dump(2) + "\n");
      } catch (const InsufficientDataError& e) {
        sink.write_text(gdir / "combined" / "markers.json", json{{"error", e.what()}}.dump(2) + "\n");
      }
    }
  } catch (const std::exception& e) {
    m.ok = false;
    m.error = e.what();
    m.exit_code = exit_code_for(e);
    sink.write_text(gdir / "FAILED", std::string(e.what()) + "\n");
    finish();
    throw;
  }
  finish();
  return m;
}

std::string opt_csv(const std::optional<double>& v) { return v ? fmt17(*v) : ""; }

void write_summary(const RunConfig& config, const std::vector<RunManifest>& runs) {
  fs::create_directories(config.out);
  std::ofstream os(config.out / "summary.csv", std::ios::binary);
  os << "gamma,gamma_over_gc,status,sector,dim,ground_E,ground_E_over_j,converged_count,"
        "max_converged_E_over_j,dynamic_marker,static_marker,combined_dynamic_marker,"
        "combined_static_marker";
  for (const EnergyWindow& w : config.windows) os << ",ratio_" << w.name;
  os << '\n';
  const double j = config.params.j.value();
  const double gc = config.params.critical_coupling();
  for (const RunManifest& r : runs) {
    const auto prefix = fmt17(r.gamma) + ',' + fmt17(r.gamma / gc) + ',' + (r.ok ? "ok" : "failed");
    if (r.sectors.empty()) {
      os << prefix << ",,,,,,,,,,";
      for (std::size_t i = 0; i < config.windows.size(); ++i) os << ',';
      os << '\n';
      continue;
    }
    for (const SectorSummary& s : r.sectors) {
      os << prefix << ',' << to_string(s.sector) << ',' << s.dim << ',' << fmt17(s.ground_energy)
         << ',' << fmt17(s.ground_energy / j) << ',' << s.converged_count << ','
         << fmt17(s.max_converged_energy / j) << ','
         << opt_csv(s.markers ? s.markers->dynamic_marker : std::nullopt) << ','
         << opt_csv(s.markers ? s.markers->static_marker : std::nullopt) << ','
         << opt_csv(r.combined_markers ? r.combined_markers->dynamic_marker : std::nullopt) << ','
         << opt_csv(r.combined_markers ? r.combined_markers->static_marker : std::nullopt);
      for (std::size_t i = 0; i < config.windows.size(); ++i) {
        os << ',' << (i < s.stats.size() ? opt_csv(s.stats[i].mean_ratio) : "");
      }
      os << '\n';
    }
  }
}

}  // namespace

RunManifest run(const RunConfig& config) { return run_point(config, config.params.gamma); }

std::vector<RunManifest> sweep(const RunConfig& config) {
  config.validate();
  std::vector<double> gammas = config.gammas;
  if (gammas.empty()) gammas.push_back(config.params.gamma);
  std::set<std::string> dirs;
  for (double g : gammas) {
    if (!dirs.insert(gamma_dirname(g)).second) throw InputError("duplicate sweep point " + gamma_dirname(g));
  }

  std::vector<RunManifest> results(gammas.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < gammas.size(); i = next++) {
      try {
        results[i] = run_point(config, gammas[i]);
      } catch (const std::exception& e) {
        results[i].gamma = gammas[i];
        results[i].ok = false;
        results[i].error = e.what();
        results[i].exit_code = exit_code_for(e);
      }
    }
  };
  {
    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(config.workers), gammas.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  write_summary(config, results);
  json top;
  top["points"] = json::array();
  for (const RunManifest& r : results) {
    json p{{"gamma", r.gamma}, {"status", r.ok ? "ok" : "failed"},
           {"manifest", (fs::path(gamma_dirname(r.gamma)) / "manifest.json").generic_string()}};
    if (!r.ok) p["error"] = r.error;
    top["points"].push_back(p);
  }
  const fs::path summary = config.out / "summary.csv";
  top["files"] = json::array({{{"path", "summary.csv"},
                               {"sha256", sha256_file(summary)},
                               {"bytes", fs::file_size(summary)}}});
  std::ofstream(config.out / "manifest.json") << top.dump(2) << '\n';
  return results;
}

std::vector<ConvergenceRow> convergence_profile(const RunConfig& config,
                                                std::span<const int> n_max_values) {
  config.validate();
  if (n_max_values.empty()) throw InputError("convergence: no truncations given");
  std::vector<ConvergenceRow> rows;
  for (int n_max : n_max_values) {
    for (Sector sector : config.resolved_sectors()) {
      const SectorData d = compute_sector(config.params, config.basis, n_max, sector, {},
                                          config.tol_dp, config.limits);
      ConvergenceRow row;
      row.n_max = n_max;
      row.sector = sector;
      row.dim = d.spectrum.size();
      row.converged_count = d.convergence.converged_count;
      row.max_converged_energy_over_j =
          row.converged_count
              ? d.spectrum.energies(static_cast<Eigen::Index>(row.converged_count - 1)) /
                    config.params.j.value()
              : std::numeric_limits<double>::quiet_NaN();
      row.ground_delta_p = d.convergence.delta_p.empty() ? 0.0 : d.convergence.delta_p.front();
      rows.push_back(row);
    }
  }
  fs::create_directories(config.out);
  std::ofstream os(config.out / "convergence.csv", std::ios::binary);
  os << "n_max,sector,dim,converged_count,max_converged_E_over_j,ground_delta_p\n";
  for (const ConvergenceRow& r : rows) {
    os << r.n_max << ',' << to_string(r.sector) << ',' << r.dim << ',' << r.converged_count << ','
       << fmt17(r.max_converged_energy_over_j) << ',' << fmt17(r.ground_delta_p) << '\n';
  }
  return rows;
}

}  // namespace dicke
