#include "rabi/scan.hpp"

#include <cmath>
#include <limits>

#include "rabi/errors.hpp"
#include "rabi/parallel.hpp"
#include "rabi/units.hpp"

namespace rabi {

ScanRow analyse_trace(const ScanSettings& settings, double delta, const OscillationTrace& trace) {
  ScanRow row;
  row.delta = delta;
  const double omega0 = settings.base.drive.omega0;
  row.omega_generalized = std::hypot(omega0, delta);
  switch (settings.analysis) {
    case ScanAnalysis::single: {
      const auto fit = fit_single_frequency(trace, settings.window_min, settings.window_max, settings.single);
      row.omega_fit = fit.omega;
      row.omega_ci = fit.ci95[2];
      row.amplitude = fit.A;
      row.amplitude_ci = fit.ci95[0];
      row.gamma = fit.gamma;
      row.gamma_ci = fit.ci95[1];
      row.tau = fit.gamma != 0.0 ? 1.0 / fit.gamma : std::numeric_limits<double>::infinity();
      row.r_squared = fit.r_squared;
      row.uncertain = fit.degenerate;
      break;
    }
    case ScanAnalysis::two: {
      double t_max = settings.two_window_max > 0.0 ? settings.two_window_max : two_frequency_window(omega0);
      // A grid built on the nominal window may stop short of it by less than one step.
      const double t_last = trace.time(trace.size() - 1);
      if (t_max > t_last && t_max < t_last + trace.dt) t_max = t_last;
      const auto fit = fit_two_frequency(trace, omega0, trace.t0, t_max, settings.two);
      row.omega_fit = fit.omega_bar;
      row.omega_ci = fit.ci95[4];
      row.amplitude = fit.A + fit.B_amp;
      row.amplitude_ci = fit.ci95[0] + fit.ci95[3];
      row.fraction_A = fit.fraction_A;
      row.gamma_b = fit.gamma_b;
      row.gamma_b_ci = fit.ci95[6];
      row.r_squared = fit.r_squared;
      row.uncertain = fit.uncertain;
      break;
    }
    case ScanAnalysis::fft: {
      const auto spec = fft_spectrum(trace, settings.spectrum);
      row.peaks = spec.peaks;
      if (!spec.peaks.empty()) {
        row.omega_fit = khz_to_angular(spec.peaks.front().frequency_khz);
        row.omega_ci = khz_to_angular(spec.bin_width());
        row.amplitude = spec.peaks.front().height;
      }
      break;
    }
  }
  return row;
}

std::vector<ScanRow> scan_detuning(const ScanSettings& settings, const std::vector<double>& detunings) {
  if (detunings.empty()) throw ConfigError("detunings", "list is empty");
  for (double d : detunings)
    if (!std::isfinite(d)) throw ConfigError("detunings", "values must be finite");

  std::vector<ScanRow> rows(detunings.size());
  parallel_for(detunings.size(), settings.threads, [&](std::size_t i) {
    EnsembleConfig cfg = settings.base;
    cfg.drive.delta = detunings[i];
    try {
      const auto trace = ensemble_signal(cfg, settings.times);
      rows[i] = analyse_trace(settings, detunings[i], trace);
    } catch (const Error& e) {
      rows[i].delta = detunings[i];
      rows[i].omega_generalized = std::hypot(cfg.drive.omega0, detunings[i]);
      rows[i].error = e.what();
    }
  });
  return rows;
}

}  // namespace rabi
