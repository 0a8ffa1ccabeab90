#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rabi/ensemble.hpp"
#include "rabi/fieldmap.hpp"
#include "rabi/scan.hpp"

namespace rabi::cli {

enum class DistributionSource { gaussian, skewed_gaussian, file, fieldmap };

struct FieldmapSpec {
  FieldGridModel model;
  std::vector<int> signs{1};
  ProbeBeam beam;
  std::size_t n_bins = 60;
  bool recenter = true;
};

struct SlidingSpec {
  double window_ms = 0.3;
  double hop_ms = 0.05;
};

/// Everything a command needs, with frequencies still in kHz as configured.
struct Scenario {
  std::string name = "scenario";
  std::string command;  ///< default command for `reproduce`

  std::vector<double> omega0_khz;
  std::vector<double> deltas;  ///< kHz, or units of omega0 if deltas_relative
  bool deltas_relative = false;

  DistributionSource source = DistributionSource::gaussian;
  std::vector<double> sigmas;  ///< kHz, or units of omega0 if sigmas_relative
  bool sigmas_relative = false;
  double skew = 0.0;
  std::filesystem::path distribution_file;
  std::optional<FieldmapSpec> fieldmap;

  AtomModel atom_model = AnalyticTwoLevel{};
  QuadratureSpec quadrature;

  std::optional<double> t_max_ms;
  std::optional<double> t_max_periods;
  double dt_ms = 0.008;

  ScanAnalysis analysis = ScanAnalysis::single;
  double window_min_ms = 0.01;
  double window_max_ms = 0.6;
  DecayLaw decay = DecayLaw::exponential;
  double two_window_periods = 10.0;
  TwoFitOptions two;
  SpectrumOptions spectrum;
  double spectrum_max_khz = 50.0;
  double spectrum_offset = 0.0;  ///< vertical shift per curve, plotting only
  std::optional<SlidingSpec> sliding;

  std::optional<std::size_t> monte_carlo_samples;
  std::optional<std::filesystem::path> trace_file;

  std::string output_prefix;
  bool svg = false;
  std::uint64_t seed = 0;

  nlohmann::json raw;  ///< as read, for hashing
};

/// One combination of drive amplitude and distribution over which detunings run.
struct Series {
  std::string label;
  double omega0_khz = 0.0;
  double sigma_khz = 0.0;  ///< standard deviation of the shifts
  int current_sign = 0;    ///< fieldmap sign, 0 otherwise
  EnsembleConfig config;   ///< drive.delta left at 0
  std::vector<double> deltas;  ///< rad/ms
  std::vector<double> deltas_khz;
  TimeGrid times;
};

/// Reads a JSON scenario (comments allowed). Relative paths inside it are
/// resolved against the file's directory. Throws ConfigError naming the
/// offending field, e.g. "drive.omega0_khz[1]: must be positive".
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Cartesian product of omega0 values and distributions.
std::vector<Series> expand_series(const Scenario& scenario);

ScanSettings scan_settings(const Scenario& scenario, const Series& series, std::size_t threads);

/// FNV-1a of the canonical JSON text, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);

/// Uniformly sampled two-column (t_ms, value) CSV; '#' lines and a
/// non-numeric header row are skipped.
OscillationTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace rabi::cli
