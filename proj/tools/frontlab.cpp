// Command-line driver: closed-form spectra, pattern continuation, Bloch
// diagnostics, and the simulation scenarios, all emitting columnar text
// for plotting scripts and the regression suite.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <thread>

#include "frontlab/experiments.hpp"
#include "frontlab/io.hpp"
#include "frontlab/spectral.hpp"

namespace fs = std::filesystem;
using namespace frontlab;

namespace {

RunConfig load_config(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig cfg;
  if (!path.empty()) cfg.load_file(path);
  cfg.merge_overrides(sets);
  return cfg;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg) {
  std::ofstream f(dir / "manifest.txt");
  f << "# frontlab run manifest\n";
  f << "# version=1.0\n";
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  f << "# wall_time_unix=" << std::chrono::duration_cast<std::chrono::seconds>(now).count()
    << "\n";
  f << cfg.serialize();
}

int cmd_spectrum(const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  const std::string model = cfg.get_string("model");
  if (model == "pulse") {
    PulseModelParams p = pulse_params_from_config(cfg);
    const double kmax = cfg.get_double("k_max");
    const int kn = cfg.get_int("k_points");
    TableWriter tw((out / "pulse_spectrum.tsv").string(),
                   {"k", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2"});
    double max_re = -1e300;
    for (int i = 0; i < kn; ++i) {
      const double k = -kmax + 2.0 * kmax * i / (kn - 1);
      auto [l1, l2] = pulse_continuous_spectrum(k, p);
      max_re = std::max({max_re, l1.real(), l2.real()});
      tw.row({k, l1.real(), l1.imag(), l2.real(), l2.imag()});
    }
    write_key_values((out / "pulse_spectrum_summary.txt").string(),
                     {{"max_re", format_double(max_re)}});
    std::cout << "pulse continuous spectrum: max Re = " << max_re << "\n";
    return 0;
  }

  FrontModelParams p = front_params_from_config(cfg);
  const double kmax = cfg.get_double("k_max");
  const int kn = cfg.get_int("k_points");
  const auto betas = cfg.get_double_list("beta_list");

  for (const double beta : betas) {
    std::string name = "dispersion_beta" + format_double(beta) + ".tsv";
    TableWriter tw((out / name).string(),
                   {"k", "re_l1p", "im_l1p", "re_l1m", "im_l1m", "re_l2", "im_l2"});
    for (int i = 0; i < kn; ++i) {
      const double k = -kmax + 2.0 * kmax * i / (kn - 1);
      auto [l1p, l2] = dispersion_homogeneous(k, p, BranchSign::plus, beta);
      auto [l1m, l2b] = dispersion_homogeneous(k, p, BranchSign::minus, beta);
      (void)l2b;
      tw.row({k, l1p.real(), l1p.imag(), l1m.real(), l1m.imag(), l2.real(), l2.imag()});
    }
  }

  // weight window report
  WeightWindow w = find_weight_window(p, cfg.get_double("c1_slope"));
  write_key_values((out / "weight_window.txt").string(),
                   {{"beta0", format_double(w.beta0)},
                    {"c1_slope", format_double(w.c1_slope)},
                    {"nu", format_double(w.nu)},
                    {"bound_at_half_beta0",
                     format_double(weighted_spectrum_bound(
                         0.5 * w.beta0, std::sqrt(w.c1_slope * 0.5 * w.beta0), p))}});

  // spatial eigenvalue table
  const int mrange = cfg.get_int("m_range");
  const double c = cfg.get_double("spatial_c");
  TableWriter tw((out / "spatial_eigenvalues.tsv").string(),
                 {"m", "sign", "re", "im", "residual"});
  for (int m = -mrange; m <= mrange; ++m) {
    for (int s = 0; s < 2; ++s) {
      SpatialEigenReport rep = spatial_eigenvalues(
          m, c, p.alpha, p, s == 0 ? BranchSign::plus : BranchSign::minus);
      for (int i = 0; i < 2; ++i)
        tw.row({double(m), s == 0 ? 1.0 : -1.0, rep.transport_roots[i].real(),
                rep.transport_roots[i].imag(), rep.residuals[i]});
      for (int i = 0; i < 4; ++i)
        tw.row({double(m), s == 0 ? 1.0 : -1.0, rep.pattern_roots[i].real(),
                rep.pattern_roots[i].imag(), rep.residuals[2 + i]});
    }
  }
  std::cout << "spectrum tables written to " << out << "\n";
  return 0;
}

int cmd_turing(const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  FrontModelParams p = front_params_from_config(cfg);
  const BranchSign sign = cfg.get_string("sign") == "plus" ? BranchSign::plus : BranchSign::minus;

  std::map<std::string, std::string> coeffs;
  TuringCoefficients t = turing_coefficients(p, sign);
  coeffs["A"] = format_double(t.A);
  coeffs["b"] = format_double(t.b);
  coeffs["d_res"] = format_double(t.d_res);
  coeffs["B"] = format_double(t.B);
  coeffs["D"] = format_double(t.D);
  coeffs["a"] = format_double(t.a);
  coeffs["amplitude_factor"] = format_double(t.amplitude_factor());
  write_key_values((out / "coefficients.txt").string(), coeffs);

  // pattern profile at the configured epsilon
  const double eps = cfg.get_double("epsilon");
  NewtonResult res = newton_pattern(eps, p, sign, cfg.get_int("cell_points"),
                                    cfg.get_int("cos_modes"));
  if (!res.converged) {
    std::cerr << "newton failed; residual history:";
    for (double r : res.residual_history) std::cerr << " " << r;
    std::cerr << "\n";
    return 1;
  }
  {
    TableWriter tw((out / "pattern.tsv").string(), {"x", "u", "v"});
    for (int j = 0; j < res.pattern.size(); ++j)
      tw.row({res.pattern.grid.x(j) + kPi, res.pattern[0][j], res.pattern[1][j]});
  }

  // amplitude vs epsilon with the quadratic-error slope fit
  const auto eps_list = cfg.get_double_list("eps_list");
  TableWriter tw((out / "amplitude_sweep.tsv").string(),
                 {"epsilon", "v_amp", "predicted", "error"});
  std::vector<double> lx, ly;
  FrontModelParams pe = p;
  for (const double e : eps_list) {
    pe.alpha = e * e;
    NewtonResult r = newton_pattern(e, pe, sign, cfg.get_int("cell_points"),
                                    cfg.get_int("cos_modes"));
    const double predicted = e * turing_coefficients(pe, sign).amplitude_factor();
    const double err = std::abs(std::abs(r.v_cos_amplitude) - predicted);
    tw.row({e, r.v_cos_amplitude, predicted, err});
    if (err > 0.0) {
      lx.push_back(std::log(e));
      ly.push_back(std::log(err));
    }
  }
  std::map<std::string, std::string> fitkv;
  if (lx.size() >= 2) {
    LineFit f = fit_line(lx, ly);
    fitkv["error_slope"] = format_double(f.slope);
    fitkv["rms_residual"] = format_double(f.rms_residual);
  }
  write_key_values((out / "amplitude_fit.txt").string(), fitkv);
  std::cout << "turing tables written to " << out << "\n";
  return 0;
}

int cmd_bloch(const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  FrontModelParams p = front_params_from_config(cfg);
  const double eps = cfg.get_double("epsilon");
  p.alpha = eps * eps;
  const int K = cfg.get_int("bloch_K");

  NewtonResult pat = newton_pattern(eps, p, BranchSign::minus, cfg.get_int("cell_points"),
                                    cfg.get_int("cos_modes"));
  if (!pat.converged || pat.trivial_branch) {
    std::cerr << "newton pattern failed (residual " << pat.residual_norm << ")\n";
    return 1;
  }

  const double step = cfg.get_double("ell_step");
  std::vector<double> ells;
  for (double ell = 0.0; ell <= 0.5 + 1e-12; ell += step) {
    ells.push_back(std::min(ell, 0.5));
    if (ell > 0.0) ells.push_back(-std::min(ell, 0.5));
  }
  BlochSweep sweep = sweep_bloch_spectrum(pat.pattern, p, ells, K);
  {
    TableWriter tw((out / "mu_curves.tsv").string(),
                   {"ell", "re_mu1", "im_mu1", "re_mu2", "im_mu2", "res1", "res2"});
    std::vector<size_t> order(ells.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return ells[a] < ells[b]; });
    for (size_t i : order)
      tw.row({ells[i], sweep.mu1[i].real(), sweep.mu1[i].imag(), sweep.mu2[i].real(),
              sweep.mu2[i].imag(), sweep.res1[i], sweep.res2[i]});
  }

  // diffusion coefficient from the small-ell samples
  const double h = std::min(0.02, step);
  BlochSweep fine = sweep_bloch_spectrum(pat.pattern, p, {0.0, h, -h, 2 * h, -2 * h}, K);
  std::vector<std::pair<double, cplx>> samples;
  for (size_t i = 1; i < 5; ++i) samples.push_back({fine.ells[i], fine.mu1[i]});
  DiffusionFit dfit = fit_diffusion_coefficient(samples);

  // zero-mode residual and K-doubling delta
  BlochOperator op0 = assemble_bloch_operator(pat.pattern, 0.0, p, K);
  BlochEigenSystem sys0 = bloch_eigenvalues(op0, 2);
  BlochOperator op2 = assemble_bloch_operator(pat.pattern, 0.0, p, 2 * K);
  BlochEigenSystem sys2 = bloch_eigenvalues(op2, 2);

  write_key_values((out / "bloch_summary.txt").string(),
                   {{"mu1_at_0", format_double(sys0.values[0].real())},
                    {"mu2_at_0", format_double(sys0.values[1].real())},
                    {"mu2_over_minus_2eps2", format_double(sys0.values[1].real() / (-2 * eps * eps))},
                    {"d_fit", format_double(dfit.d)},
                    {"d_fit_residual", format_double(dfit.rms_residual)},
                    {"k_doubling_delta",
                     format_double(std::abs(sys2.values[0] - sys0.values[0]))},
                    {"newton_residual", format_double(pat.residual_norm)},
                    {"branch_crossing", sweep.branch_crossing ? "true" : "false"}});
  std::cout << "bloch tables written to " << out << " (d = " << dfit.d << ")\n";
  return 0;
}

void write_record(const RunRecord& rec, const fs::path& out, bool binary_snaps) {
  fs::create_directories(out);
  write_manifest(out, rec.config);

  // series: one file per series
  for (const auto& [name, vals] : rec.series) {
    TableWriter tw((out / ("series_" + name + ".tsv")).string(), {"t", name});
    for (const auto& [t, v] : vals) tw.row({t, v});
  }
  // snapshots
  fs::create_directories(out / "snapshots");
  for (size_t i = 0; i < rec.snapshots.size(); ++i) {
    char name[64];
    snprintf(name, sizeof(name), "snap_%05zu", i);
    if (binary_snaps)
      write_snapshot_binary((out / "snapshots" / (std::string(name) + ".bin")).string(),
                            rec.snapshots[i], rec.snap_times[i]);
    else
      write_snapshot_text((out / "snapshots" / (std::string(name) + ".tsv")).string(),
                          rec.snapshots[i], rec.snap_times[i]);
  }
  for (size_t i = 0; i < rec.vsnaps.size(); ++i) {
    char name[64];
    snprintf(name, sizeof(name), "vsnap_%05zu.bin", i);
    write_snapshot_binary((out / "snapshots" / name).string(), rec.vsnaps[i],
                          rec.vsnap_times[i]);
  }

  // verdicts
  std::map<std::string, std::string> kv;
  for (const auto& [name, v] : rec.verdicts) {
    kv[name] = format_double(v.value);
    kv[name + ".residual"] = format_double(v.residual);
    kv[name + ".window_lo"] = format_double(v.window_lo);
    kv[name + ".window_hi"] = format_double(v.window_hi);
    kv[name + ".flagged"] = v.flagged ? "true" : "false";
    if (!v.note.empty()) kv[name + ".note"] = v.note;
  }
  kv["blowup"] = rec.blowup ? "true" : "false";
  if (rec.blowup) kv["blowup_time"] = format_double(rec.blowup_time);
  kv["perturb_center_lab"] = format_double(rec.perturb_center_lab);
  write_key_values((out / "verdicts.txt").string(), kv);
}

RunRecord read_record(const fs::path& dir) {
  RunRecord rec;
  {
    std::ifstream f(dir / "manifest.txt");
    if (!f) throw std::runtime_error("missing manifest.txt in " + dir.string());
    std::stringstream ss;
    ss << f.rdbuf();
    rec.config = RunConfig::from_string(ss.str());
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("series_", 0) == 0 && entry.path().extension() == ".tsv") {
      const std::string key = name.substr(7, name.size() - 11);
      std::ifstream f(entry.path());
      std::string line;
      std::getline(f, line);  // header
      double t, v;
      while (f >> t >> v) rec.series[key].push_back({t, v});
    }
  }
  const fs::path snapdir = dir / "snapshots";
  if (fs::exists(snapdir)) {
    std::vector<fs::path> snaps, vsnaps;
    for (const auto& entry : fs::directory_iterator(snapdir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".bin")
        snaps.push_back(entry.path());
      if (name.rfind("vsnap_", 0) == 0) vsnaps.push_back(entry.path());
    }
    std::sort(snaps.begin(), snaps.end());
    std::sort(vsnaps.begin(), vsnaps.end());
    for (const auto& sp : snaps) {
      double t;
      rec.snapshots.push_back(read_snapshot_binary(sp.string(), t));
      rec.snap_times.push_back(t);
    }
    for (const auto& sp : vsnaps) {
      double t;
      rec.vsnaps.push_back(read_snapshot_binary(sp.string(), t));
      rec.vsnap_times.push_back(t);
    }
  }
  const auto kv = read_key_values((dir / "verdicts.txt").string());
  if (kv.count("perturb_center_lab"))
    rec.perturb_center_lab = std::stod(kv.at("perturb_center_lab"));
  return rec;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out) {
  RunRecord rec = run_scenario(cfg);
  write_record(rec, out, cfg.get_bool("binary_snapshots") ||
                             cfg.get_string("scenario") != "modulated_front");
  int fails = 0;
  for (const auto& [name, v] : rec.verdicts) {
    std::cout << name << " = " << v.value;
    if (v.flagged) {
      std::cout << "  [flagged: " << v.note << "]";
      ++fails;
    }
    std::cout << "\n";
  }
  if (rec.blowup) {
    std::cout << "run aborted: blow-up at t = " << rec.blowup_time << "\n";
    return 2;
  }
  return fails == 0 ? 0 : 1;
}

int cmd_analyze(const fs::path& dir) {
  RunRecord rec = read_record(dir);
  // snapshots written as text cannot be re-read; series-based verdicts still work
  rec.verdicts.clear();
  analyze_record(rec);
  std::map<std::string, std::string> kv;
  for (const auto& [name, v] : rec.verdicts) {
    kv[name] = format_double(v.value);
    kv[name + ".residual"] = format_double(v.residual);
    kv[name + ".window_lo"] = format_double(v.window_lo);
    kv[name + ".window_hi"] = format_double(v.window_hi);
    kv[name + ".flagged"] = v.flagged ? "true" : "false";
    if (!v.note.empty()) kv[name + ".note"] = v.note;
  }
  kv["perturb_center_lab"] = format_double(rec.perturb_center_lab);
  write_key_values((dir / "verdicts_analyzed.txt").string(), kv);
  for (const auto& [name, v] : rec.verdicts)
    std::cout << name << " = " << v.value << (v.flagged ? "  [flagged]" : "") << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& base, const fs::path& out,
              const std::vector<std::string>& axis) {
  // axis: key=v1,v2,v3 — one run per value
  if (axis.empty()) throw std::invalid_argument("sweep: need --axis key=v1,v2,...");
  const auto eq = axis[0].find('=');
  const std::string key = axis[0].substr(0, eq);
  std::vector<std::string> values;
  std::stringstream ss(axis[0].substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(item);

  const int jobs = std::max(1, base.get_int("jobs"));
  std::vector<RunRecord> records(values.size());
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      RunConfig cfg = base;
      cfg.set(key, values[i]);
      records[i] = run_scenario(cfg);
    }
  };
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  fs::create_directories(out);
  // summary table: rows = runs, columns = shared verdicts
  std::vector<std::string> cols = {key};
  for (const auto& [name, v] : records.front().verdicts) cols.push_back(name);
  TableWriter tw((out / "sweep_summary.tsv").string(), cols);
  for (size_t i = 0; i < records.size(); ++i) {
    std::vector<double> row = {std::stod(values[i])};
    for (size_t c = 1; c < cols.size(); ++c)
      row.push_back(records[i].has_verdict(cols[c]) ? records[i].verdict(cols[c]) : 0.0);
    tw.row(row);
    char sub[64];
    snprintf(sub, sizeof(sub), "run_%03zu", i);
    write_record(records[i], out / sub, true);
  }
  std::cout << "sweep summary written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frontlab: fronts and pulses near a pattern-forming instability"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::vector<std::string> sets, axis;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("config", config_path, "configuration file (key=value lines)");
    sub->add_option("--set", sets, "override a key (key=value)");
    sub->add_option("--out", out_dir, "output directory");
  };

  auto* spectrum = app.add_subcommand("spectrum", "dispersion curves and eigenvalue tables");
  add_common(spectrum, true);
  auto* turing = app.add_subcommand("turing", "bifurcation coefficients and patterns");
  add_common(turing, true);
  auto* bloch = app.add_subcommand("bloch", "fiber spectra around the pattern");
  add_common(bloch, true);
  auto* simulate = app.add_subcommand("simulate", "run a scenario and write its record");
  add_common(simulate, true);
  auto* analyze = app.add_subcommand("analyze", "recompute verdicts from a run directory");
  std::string run_dir;
  analyze->add_option("dir", run_dir, "run directory")->required();
  auto* sweep = app.add_subcommand("sweep", "fan out runs over one parameter axis");
  add_common(sweep, true);
  sweep->add_option("--axis", axis, "sweep axis (key=v1,v2,...)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed()) return cmd_spectrum(load_config(config_path, sets), out_dir);
    if (turing->parsed()) return cmd_turing(load_config(config_path, sets), out_dir);
    if (bloch->parsed()) return cmd_bloch(load_config(config_path, sets), out_dir);
    if (simulate->parsed()) return cmd_simulate(load_config(config_path, sets), out_dir);
    if (analyze->parsed()) return cmd_analyze(run_dir);
    if (sweep->parsed()) return cmd_sweep(load_config(config_path, sets), out_dir, axis);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
