#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <ostream>

#include "output.hpp"
#include "rabi/errors.hpp"
#include "rabi/units.hpp"

#ifndef RABI_PRESET_DIR
#define RABI_PRESET_DIR "presets"
#endif

namespace rabi::cli {

namespace {

namespace fs = std::filesystem;
using Files = std::vector<fs::path>;

std::string num(double v) { return format_number(v); }

std::string sign_text(int sign) { return sign > 0 ? "+1" : sign < 0 ? "-1" : "0"; }

std::uint64_t effective_seed(const Scenario& s, const RunOptions& opt) { return opt.seed.value_or(s.seed); }

void stamp(CsvTable& t, const Scenario& s, const std::string& command, const RunOptions& opt) {
  t.add_metadata("tool", std::string("rabi ") + kToolVersion);
  t.add_metadata("scenario", s.name);
  t.add_metadata("scenario_hash", scenario_hash(s));
  t.add_metadata("command", command);
  t.add_metadata("seed", std::to_string(effective_seed(s, opt)));
}

std::vector<std::string> series_cells(const Series& se, double delta_khz) {
  return {num(se.omega0_khz), num(se.sigma_khz), sign_text(se.current_sign), num(delta_khz)};
}

const std::vector<std::string> kSeriesHeader{"omega0_kHz", "sigma_kHz", "current_sign", "delta_kHz"};

std::vector<std::string> with_series_header(std::vector<std::string> tail) {
  std::vector<std::string> h = kSeriesHeader;
  h.insert(h.end(), tail.begin(), tail.end());
  return h;
}

void append(std::vector<std::string>& row, std::vector<std::string> tail) {
  row.insert(row.end(), tail.begin(), tail.end());
}

bool want_svg(const Scenario& s, const RunOptions& opt) { return opt.svg || s.svg; }

fs::path out_file(const Scenario& s, const RunOptions& opt, const std::string& suffix) {
  return opt.out_dir / (s.output_prefix + suffix);
}

void write_svg(const fs::path& path, const Plot& plot, Files& files) {
  write_file_atomic(path, render_svg(plot));
  files.push_back(path);
}

void write_track(const Scenario& s, const RunOptions& opt, const std::string& command,
                 const std::vector<std::pair<const Series*, std::pair<double, OscillationTrace>>>& traces, Files& files) {
  CsvTable t(with_series_header({"t_center_ms", "nu_inst_kHz", "nu_ci_kHz", "ok", "error"}));
  stamp(t, s, command, opt);
  Plot plot{s.name + ": sliding-window frequency", "t (ms)", "frequency (kHz)", {}};
  for (const auto& [se, item] : traces) {
    const auto track = sliding_window_frequency(item.second, s.sliding->window_ms, s.sliding->hop_ms, s.decay);
    PlotSeries ps{se->label + " d=" + num(item.first) + "kHz", {}, {}, false};
    for (const auto& p : track) {
      auto row = series_cells(*se, item.first);
      append(row, {num(p.t_center), num(angular_to_khz(p.omega)), num(angular_to_khz(p.ci95)), p.ok ? "1" : "0",
                   p.error});
      t.add_row(std::move(row));
      if (p.ok) {
        ps.x.push_back(p.t_center);
        ps.y.push_back(angular_to_khz(p.omega));
      }
    }
    plot.series.push_back(std::move(ps));
  }
  const auto path = out_file(s, opt, "_track.csv");
  t.write(path);
  files.push_back(path);
  if (want_svg(s, opt)) write_svg(out_file(s, opt, "_track.svg"), plot, files);
}

}  // namespace

Files cmd_simulate(const Scenario& s, const RunOptions& opt) {
  const auto series = expand_series(s);
  const bool mc = s.monte_carlo_samples.has_value();
  std::vector<std::string> tail{"t_ms", "S"};
  if (mc) {
    tail.push_back("S_mc");
    tail.push_back("S_mc_stderr");
  }
  CsvTable table(with_series_header(tail));
  stamp(table, s, "simulate", opt);
  Plot plot{s.name, "t (ms)", "S", {}};
  std::vector<std::pair<const Series*, std::pair<double, OscillationTrace>>> kept;

  for (const auto& se : series) {
    for (std::size_t i = 0; i < se.deltas.size(); ++i) {
      EnsembleConfig cfg = se.config;
      cfg.drive.delta = se.deltas[i];
      const auto trace = ensemble_signal(cfg, se.times, opt.threads);
      std::optional<MonteCarloResult> mcr;
      if (mc) mcr = monte_carlo_signal(cfg, se.times, *s.monte_carlo_samples, effective_seed(s, opt), opt.threads);
      PlotSeries ps{se.label + " d=" + num(se.deltas_khz[i]) + "kHz", {}, {}, false};
      for (std::size_t k = 0; k < trace.size(); ++k) {
        auto row = series_cells(se, se.deltas_khz[i]);
        append(row, {num(trace.time(k)), num(trace.values[k])});
        if (mcr) append(row, {num(mcr->mean.values[k]), num(mcr->standard_error[k])});
        table.add_row(std::move(row));
        ps.x.push_back(trace.time(k));
        ps.y.push_back(trace.values[k]);
      }
      plot.series.push_back(std::move(ps));
      if (s.sliding) kept.push_back({&se, {se.deltas_khz[i], trace}});
    }
  }
  Files files;
  const auto path = out_file(s, opt, "_trace.csv");
  table.write(path);
  files.push_back(path);
  if (want_svg(s, opt)) write_svg(out_file(s, opt, "_trace.svg"), plot, files);
  if (s.sliding) write_track(s, opt, "simulate", kept, files);
  return files;
}

void check_fit_window(const Scenario& s, const Series& se) {
  const double t_end = se.times.t_end();
  if (s.analysis == ScanAnalysis::two && t_end + se.times.dt < s.two_window_periods / se.omega0_khz * (1.0 - 1e-9))
    throw ConfigError("time", "trace is shorter than the two-frequency window");
  if (s.analysis == ScanAnalysis::single && s.window_max_ms > t_end * (1.0 + 1e-9))
    throw ConfigError("analysis.window_ms", "extends beyond the simulated time");
}

Files cmd_scan(const Scenario& s, const RunOptions& opt) {
  const auto series = expand_series(s);
  for (const auto& se : series) check_fit_window(s, se);
  CsvTable table(with_series_header(
      {"delta_over_omega0", "sigma_over_omega0", "nu_R_kHz", "nu_fit_kHz", "nu_fit_ci_kHz", "amplitude",
       "amplitude_ci", "gamma_per_ms", "gamma_ci_per_ms", "tau_ms", "fraction_A", "gamma_b_per_ms",
       "gamma_b_ci_per_ms", "gamma_b_over_omega0", "r_squared", "uncertain", "n_peaks", "error"}));
  stamp(table, s, "scan", opt);

  const bool two = s.analysis == ScanAnalysis::two;
  Plot freq{s.name + ": oscillation frequency", "detuning (kHz)", "frequency (kHz)", {}};
  Plot amp{s.name + ": amplitude", "detuning (kHz)", "amplitude", {}};
  Plot tau{s.name + ": decay time", "detuning (kHz)", "tau (ms)", {}};
  Plot frac{s.name + ": initial fraction at omega0", "detuning / omega0", "fraction A", {}};
  Plot gb{s.name + ": decay of the fast part", "detuning / omega0", "gamma_b / omega0", {}};

  for (const auto& se : series) {
    const auto rows = scan_detuning(scan_settings(s, se, opt.threads), se.deltas);
    const double om = khz_to_angular(se.omega0_khz);
    PlotSeries pf{se.label, {}, {}, false}, pr{se.label + " homogeneous", {}, {}, true};
    PlotSeries pa{se.label, {}, {}, false}, pt{se.label, {}, {}, false};
    PlotSeries pfr{se.label, {}, {}, false}, pgb{se.label, {}, {}, false};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const double dk = se.deltas_khz[i];
      auto row = series_cells(se, dk);
      append(row, {num(dk / se.omega0_khz), num(se.sigma_khz / se.omega0_khz), num(angular_to_khz(r.omega_generalized)),
                   num(angular_to_khz(r.omega_fit)), num(angular_to_khz(r.omega_ci)), num(r.amplitude),
                   num(r.amplitude_ci), num(r.gamma), num(r.gamma_ci), num(r.tau), num(r.fraction_A), num(r.gamma_b),
                   num(r.gamma_b_ci), num(r.gamma_b / om), num(r.r_squared), r.uncertain ? "1" : "0",
                   std::to_string(r.peaks.size()), r.error});
      table.add_row(std::move(row));
      pr.x.push_back(dk);
      pr.y.push_back(angular_to_khz(r.omega_generalized));
      if (!r.ok()) continue;
      pf.x.push_back(dk);
      pf.y.push_back(angular_to_khz(r.omega_fit));
      pa.x.push_back(dk);
      pa.y.push_back(r.amplitude);
      pt.x.push_back(dk);
      pt.y.push_back(r.tau);
      pfr.x.push_back(dk / se.omega0_khz);
      pfr.y.push_back(r.fraction_A);
      pgb.x.push_back(dk / se.omega0_khz);
      pgb.y.push_back(r.gamma_b / om);
    }
    freq.series.push_back(std::move(pf));
    freq.series.push_back(std::move(pr));
    amp.series.push_back(std::move(pa));
    tau.series.push_back(std::move(pt));
    frac.series.push_back(std::move(pfr));
    gb.series.push_back(std::move(pgb));
  }

  Files files;
  const auto path = out_file(s, opt, "_scan.csv");
  table.write(path);
  files.push_back(path);
  if (want_svg(s, opt)) {
    if (two) {
      write_svg(out_file(s, opt, "_fraction.svg"), frac, files);
      write_svg(out_file(s, opt, "_gamma_b.svg"), gb, files);
    } else {
      write_svg(out_file(s, opt, "_frequency.svg"), freq, files);
      if (s.analysis == ScanAnalysis::single) {
        write_svg(out_file(s, opt, "_amplitude.svg"), amp, files);
        write_svg(out_file(s, opt, "_tau.svg"), tau, files);
      }
    }
  }
  return files;
}

Files cmd_spectrum(const Scenario& s, const RunOptions& opt) {
  CsvTable spectra(with_series_header({"freq_kHz", "magnitude", "magnitude_offset"}));
  CsvTable peaks(with_series_header({"rank", "freq_kHz", "height", "prominence"}));
  stamp(spectra, s, "spectrum", opt);
  stamp(peaks, s, "spectrum", opt);
  Plot plot{s.name + ": Fourier spectra", "frequency (kHz)", "magnitude", {}};

  auto emit = [&](const std::vector<std::string>& prefix, const std::string& label, const OscillationTrace& trace,
                  double offset) {
    const auto spec = fft_spectrum(trace, s.spectrum);
    PlotSeries ps{label, {}, {}, false};
    for (std::size_t k = 0; k < spec.freqs.size() && spec.freqs[k] <= s.spectrum_max_khz; ++k) {
      auto row = prefix;
      append(row, {num(spec.freqs[k]), num(spec.power[k]), num(spec.power[k] + offset)});
      spectra.add_row(std::move(row));
      ps.x.push_back(spec.freqs[k]);
      ps.y.push_back(spec.power[k] + offset);
    }
    for (std::size_t r = 0; r < spec.peaks.size(); ++r) {
      auto row = prefix;
      append(row, {std::to_string(r + 1), num(spec.peaks[r].frequency_khz), num(spec.peaks[r].height),
                   num(spec.peaks[r].prominence)});
      peaks.add_row(std::move(row));
    }
    plot.series.push_back(std::move(ps));
  };

  Files files;
  if (s.trace_file) {
    emit({"", "", "", ""}, s.trace_file->filename().string(), read_trace_csv(*s.trace_file), 0.0);
  } else {
    const auto series = expand_series(s);
    std::vector<std::pair<const Series*, std::pair<double, OscillationTrace>>> kept;
    std::size_t curve = 0;
    for (const auto& se : series) {
      for (std::size_t i = 0; i < se.deltas.size(); ++i) {
        EnsembleConfig cfg = se.config;
        cfg.drive.delta = se.deltas[i];
        const auto trace = ensemble_signal(cfg, se.times, opt.threads);
        emit(series_cells(se, se.deltas_khz[i]), se.label + " d=" + num(se.deltas_khz[i]) + "kHz", trace,
             s.spectrum_offset * static_cast<double>(curve++));
        if (s.sliding) kept.push_back({&se, {se.deltas_khz[i], trace}});
      }
    }
    if (s.sliding) write_track(s, opt, "spectrum", kept, files);
  }
  const auto p1 = out_file(s, opt, "_spectrum.csv");
  const auto p2 = out_file(s, opt, "_peaks.csv");
  spectra.write(p1);
  peaks.write(p2);
  files.push_back(p1);
  files.push_back(p2);
  if (want_svg(s, opt)) write_svg(out_file(s, opt, "_spectrum.svg"), plot, files);
  return files;
}

Files cmd_field_dist(const Scenario& s, const RunOptions& opt) {
  if (!s.fieldmap) throw ConfigError("fieldmap", "is required for field-dist");
  const auto& fm = *s.fieldmap;
  CsvTable summary({"current_sign", "mean_kHz", "std_kHz", "skewness", "fraction_below", "fraction_above",
                    "n_bins", "bin_width_kHz"});
  stamp(summary, s, "field-dist", opt);
  Plot plot{s.name + ": field deviation", "|B_tot| - B_set (kHz)", "weight", {}};
  Files files;
  for (int sign : fm.signs) {
    FieldGridModel model = fm.model;
    model.current_sign = sign;
    const auto h = field_magnitude_histogram(model, fm.beam, fm.n_bins);
    CsvTable hist({"bin_center_kHz", "weight"});
    stamp(hist, s, "field-dist", opt);
    hist.add_metadata("current_sign", sign_text(sign));
    PlotSeries ps{"sign " + sign_text(sign), {}, {}, sign < 0};
    for (std::size_t b = 0; b < h.weights.size(); ++b) {
      hist.add_row({num(h.bin_centers_khz[b]), num(h.weights[b])});
      ps.x.push_back(h.bin_centers_khz[b]);
      ps.y.push_back(h.weights[b]);
    }
    plot.series.push_back(std::move(ps));
    summary.add_row({sign_text(sign), num(h.mean_khz), num(h.std_khz), num(h.skewness), num(h.fraction_below),
                     num(h.fraction_above), std::to_string(h.weights.size()), num(h.bin_width_khz)});
    const auto path = out_file(s, opt, sign > 0 ? "_hist_plus.csv" : "_hist_minus.csv");
    hist.write(path);
    files.push_back(path);
  }
  const auto path = out_file(s, opt, "_summary.csv");
  summary.write(path);
  files.push_back(path);
  if (want_svg(s, opt)) write_svg(out_file(s, opt, "_hist.svg"), plot, files);
  return files;
}

Files run_command(const std::string& command, const Scenario& s, const RunOptions& opt) {
  if (command == "simulate") return cmd_simulate(s, opt);
  if (command == "scan") return cmd_scan(s, opt);
  if (command == "spectrum") return cmd_spectrum(s, opt);
  if (command == "field-dist") return cmd_field_dist(s, opt);
  throw ConfigError("command", "unknown command '" + command + "'");
}

fs::path default_preset_dir() {
  if (const char* env = std::getenv("RABI_PRESET_DIR"); env && *env) return env;
  return RABI_PRESET_DIR;
}

fs::path preset_path(const std::string& preset, const fs::path& dir) {
  fs::path p = dir / (preset + ".json");
  if (!fs::exists(p)) throw ConfigError("preset", "no preset '" + preset + "' in " + dir.string());
  return p;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ensemble Rabi-oscillation simulation and analysis"};
  app.set_version_flag("--version", std::string("rabi ") + kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions opt;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--svg", opt.svg, "Also write SVG plots");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides the scenario)");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string config;
  std::string preset;
  std::string preset_dir;
  std::vector<std::pair<std::string, CLI::App*>> commands;
  for (const char* name : {"simulate", "scan", "spectrum", "field-dist"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "Scenario file (JSON)")->required();
    commands.emplace_back(name, sub);
  }
  commands[0].second->description("Ensemble trace S(t) for every configured detuning");
  commands[1].second->description("Detuning scan with fits");
  commands[2].second->description("Fourier spectra of ensemble traces or of a trace file");
  commands[3].second->description("Histogram of the field deviation over the cell");
  auto* repro = app.add_subcommand("reproduce", "Run a shipped preset");
  repro->add_option("preset", preset, "Preset name, e.g. fig3a")->required();
  repro->add_option("--presets", preset_dir, "Directory holding the preset files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  opt.out_dir = out_dir;
  opt.threads = threads;
  if (seed_opt->count() > 0) opt.seed = seed;

  try {
    Files files;
    if (repro->parsed()) {
      const auto path = preset_path(preset, preset_dir.empty() ? default_preset_dir() : fs::path(preset_dir));
      const Scenario s = load_scenario(path);
      if (s.command.empty()) throw ConfigError("command", "preset " + preset + " does not name a command");
      files = run_command(s.command, s, opt);
    } else {
      for (const auto& [name, sub] : commands) {
        if (!sub->parsed()) continue;
        files = run_command(name, load_scenario(config), opt);
      }
    }
    for (const auto& f : files) out << f.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "rabi: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "rabi: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rabi::cli
