#pragma once

#include <cstddef>
#include <vector>

#include "rabi/trace.hpp"

namespace rabi {

enum class WindowFunction { none, hann };

struct SpectrumOptions {
  bool detrend = true;  ///< subtract a least-squares line B t + C first
  WindowFunction window = WindowFunction::hann;
  std::size_t zero_pad = 4;         ///< transform length multiplier, 1..4
  double relative_prominence = 0.05;  ///< fraction of the global maximum
};

struct SpectralPeak {
  double frequency_khz = 0.0;
  double height = 0.0;
  double prominence = 0.0;
};

struct SpectrumResult {
  std::vector<double> freqs;  ///< kHz, starting at 0
  std::vector<double> power;  ///< one-sided magnitude, 2|X| / sum(window)
  std::vector<SpectralPeak> peaks;  ///< highest first

  double bin_width() const noexcept { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

inline constexpr std::size_t kMinSpectrumSamples = 16;

/// One-sided magnitude spectrum of the trace and its prominent local maxima
/// (the DC bin is never reported as a peak). Throws ConfigError for traces
/// shorter than 16 samples.
SpectrumResult fft_spectrum(const OscillationTrace& trace, const SpectrumOptions& options = {});

/// Topographic prominence of every interior local maximum; 0 elsewhere.
std::vector<double> peak_prominences(const std::vector<double>& y);

}  // namespace rabi
