#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rabi/errors.hpp"
#include "rabi/units.hpp"

namespace rabi::cli {

namespace {

using nlohmann::json;

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Schema-checking view of one JSON object; unknown keys are rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return join_path(path_, key); }
  [[noreturn]] void fail(const std::string& key, const std::string& what) const { throw ConfigError(at(key), what); }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Reader child(const std::string& key) { return Reader(raw(key), at(key)); }

  double number(const std::string& key) {
    if (!has(key)) fail(key, "is required");
    return as_number(raw(key), at(key));
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key, "expected a non-negative integer");
    if (v.get<long long>() < 0) fail(key, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  /// A number, a list of numbers, or {"from", "to", "step"}.
  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) fail(key, "is required");
    const json& v = raw(key);
    const std::string p = at(key);
    if (v.is_number()) return {as_number(v, p)};
    if (v.is_array()) {
      std::vector<double> out;
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], p + "[" + std::to_string(i) + "]"));
      return out;
    }
    if (v.is_object()) {
      Reader r(v, p);
      const double from = r.number("from"), to = r.number("to"), step = r.number("step");
      r.finish();
      if (!(step > 0.0)) r.fail("step", "must be positive");
      if (to < from) r.fail("to", "must not be below 'from'");
      std::vector<double> out;
      const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < n; ++i) out.push_back(from + static_cast<double>(i) * step);
      return out;
    }
    fail(key, "expected a number, a list, or {from, to, step}");
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(at(k), "unknown key");
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void require_all(const std::vector<double>& v, const std::string& path, bool strictly_positive) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (strictly_positive ? !(v[i] > 0.0) : !(v[i] >= 0.0))
      throw ConfigError(path + "[" + std::to_string(i) + "]", strictly_positive ? "must be positive" : "must be >= 0");
  }
}

Profile read_profile_file(const std::filesystem::path& path, const std::string& field, double scale) {
  std::ifstream in(path);
  if (!in) throw ConfigError(field, "cannot open profile file " + path.string());
  std::vector<std::pair<double, double>> nodes;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    double x = 0, v = 0;
    if (!(fields >> x >> v)) throw ConfigError(field, "malformed line in " + path.string());
    nodes.emplace_back(x, v * scale);
  }
  return Profile::piecewise_linear(std::move(nodes));
}

Profile read_profile(Reader& parent, const std::string& key, const std::filesystem::path& base, double scale) {
  const json& v = parent.raw(key);
  const std::string p = parent.at(key);
  if (v.is_number()) return Profile::constant(Reader::as_number(v, p) * scale);
  Reader r(v, p);
  Profile out;
  int forms = 0;
  if (r.has("constant")) {
    out = Profile::constant(r.number("constant") * scale);
    ++forms;
  }
  if (r.has("polynomial")) {
    auto c = r.numbers("polynomial");
    for (double& x : c) x *= scale;
    out = Profile::polynomial(std::move(c));
    ++forms;
  }
  if (r.has("nodes")) {
    const json& nodes = r.raw("nodes");
    if (!nodes.is_array()) r.fail("nodes", "expected a list of [position_mm, value] pairs");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string np = r.at("nodes") + "[" + std::to_string(i) + "]";
      if (!nodes[i].is_array() || nodes[i].size() != 2) throw ConfigError(np, "expected [position_mm, value]");
      pts.emplace_back(Reader::as_number(nodes[i][0], np), Reader::as_number(nodes[i][1], np) * scale);
    }
    try {
      out = Profile::piecewise_linear(std::move(pts));
    } catch (const ConfigError& e) {
      r.fail("nodes", e.what());
    }
    ++forms;
  }
  if (r.has("file")) {
    out = read_profile_file(resolve(base, r.string("file", "")), r.at("file"), scale);
    ++forms;
  }
  r.finish();
  if (forms != 1) throw ConfigError(p, "give exactly one of constant, polynomial, nodes, file");
  return out;
}

FieldmapSpec read_fieldmap(Reader r, const std::filesystem::path& base) {
  FieldmapSpec spec;
  const std::string preset = r.string("preset", "uniform");
  if (preset == "fig8_like") {
    spec.model = fig8_like_preset(1);
  } else if (preset != "uniform") {
    r.fail("preset", "unknown preset '" + preset + "' (expected uniform or fig8_like)");
  }
  const std::string units = r.string("units", "kHz");
  double scale = 1.0;
  if (units == "mG") {
    scale = kGyromagneticKhzPerMilliGauss;
  } else if (units != "kHz") {
    r.fail("units", "expected kHz or mG");
  }
  if (r.has("bounds_mm")) {
    Reader b = r.child("bounds_mm");
    auto pair = [&](const char* axis, double& lo, double& hi) {
      if (!b.has(axis)) return;
      const auto v = b.numbers(axis);
      if (v.size() != 2 || !(v[1] >= v[0])) b.fail(axis, "expected [min, max] with min <= max");
      lo = v[0];
      hi = v[1];
    };
    pair("x", spec.model.x_min, spec.model.x_max);
    pair("y", spec.model.y_min, spec.model.y_max);
    pair("z", spec.model.z_min, spec.model.z_max);
    b.finish();
  }
  spec.model.spacing = r.number("spacing_mm", spec.model.spacing);
  if (!(spec.model.spacing > 0.0)) r.fail("spacing_mm", "must be positive");
  spec.model.b_set_khz = r.number("b_set_khz", spec.model.b_set_khz);
  if (!(spec.model.b_set_khz > 0.0)) r.fail("b_set_khz", "must be positive");
  if (r.has("profiles")) {
    Reader p = r.child("profiles");
    const std::pair<const char*, Profile*> slots[] = {{"b0x", &spec.model.b0x}, {"b0y", &spec.model.b0y},
                                                      {"b0z", &spec.model.b0z}, {"b1x", &spec.model.b1x},
                                                      {"b1y", &spec.model.b1y}, {"b1z", &spec.model.b1z}};
    for (const auto& [key, slot] : slots)
      if (p.has(key)) *slot = read_profile(p, key, base, scale);
    p.finish();
  }
  if (r.has("current_sign")) {
    spec.signs.clear();
    const auto signs = r.numbers("current_sign");
    for (std::size_t i = 0; i < signs.size(); ++i) {
      if (signs[i] != 1.0 && signs[i] != -1.0)
        throw ConfigError(r.at("current_sign") + "[" + std::to_string(i) + "]", "must be +1 or -1");
      spec.signs.push_back(static_cast<int>(signs[i]));
    }
    if (spec.signs.empty()) r.fail("current_sign", "list is empty");
  }
  if (r.has("beam")) {
    Reader b = r.child("beam");
    const std::string prof = b.string("profile", "flat_top");
    if (prof == "gaussian") {
      spec.beam.profile = BeamProfile::gaussian;
    } else if (prof != "flat_top") {
      b.fail("profile", "expected flat_top or gaussian");
    }
    spec.beam.diameter = b.number("diameter_mm", spec.beam.diameter);
    if (!(spec.beam.diameter > 0.0)) b.fail("diameter_mm", "must be positive");
    b.finish();
  }
  spec.n_bins = r.count("n_bins", spec.n_bins);
  if (spec.n_bins == 0) r.fail("n_bins", "must be positive");
  spec.recenter = r.boolean("recenter", spec.recenter);
  r.finish();
  return spec;
}

}  // namespace

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
  Scenario s;
  s.raw = j;
  Reader top(j, "");
  s.name = top.string("name", s.name);
  s.command = top.string("command", "");
  if (!s.command.empty() && s.command != "simulate" && s.command != "scan" && s.command != "spectrum" &&
      s.command != "field-dist")
    top.fail("command", "expected simulate, scan, spectrum or field-dist");

  if (top.has("trace_file")) s.trace_file = resolve(base_dir, top.string("trace_file", ""));

  if (top.has("drive")) {
    Reader d = top.child("drive");
    s.omega0_khz = d.numbers("omega0_khz");
    require_all(s.omega0_khz, d.at("omega0_khz"), true);
    const bool abs = d.has("delta_khz"), rel = d.has("delta_over_omega0");
    if (abs && rel) d.fail("delta_khz", "give delta_khz or delta_over_omega0, not both");
    if (abs) s.deltas = d.numbers("delta_khz");
    if (rel) {
      s.deltas = d.numbers("delta_over_omega0");
      s.deltas_relative = true;
    }
    if (!abs && !rel) s.deltas = {0.0};
    d.finish();
  }

  if (top.has("distribution")) {
    Reader d = top.child("distribution");
    const std::string kind = d.string("kind", "gaussian");
    if (kind == "gaussian" || kind == "skewed_gaussian") {
      s.source = kind == "gaussian" ? DistributionSource::gaussian : DistributionSource::skewed_gaussian;
      const bool abs = d.has("sigma_khz"), rel = d.has("sigma_over_omega0");
      if (abs == rel) d.fail("sigma_khz", "give exactly one of sigma_khz or sigma_over_omega0");
      s.sigmas = d.numbers(abs ? "sigma_khz" : "sigma_over_omega0");
      s.sigmas_relative = rel;
      require_all(s.sigmas, d.at(abs ? "sigma_khz" : "sigma_over_omega0"), false);
      if (kind == "skewed_gaussian") {
        if (d.has("skew") && d.has("field_skew")) d.fail("skew", "give skew or field_skew, not both");
        // A field-space tail toward weak fields is a detuning-space tail toward
        // positive shifts, hence the sign flip.
        s.skew = d.has("field_skew") ? -d.number("field_skew") : d.number("skew", 0.0);
      }
    } else if (kind == "file") {
      s.source = DistributionSource::file;
      s.distribution_file = resolve(base_dir, d.string("file", ""));
      if (!d.has("file")) d.fail("file", "is required for kind 'file'");
    } else if (kind == "fieldmap") {
      s.source = DistributionSource::fieldmap;
    } else {
      d.fail("kind", "expected gaussian, skewed_gaussian, file or fieldmap");
    }
    d.finish();
  } else {
    s.sigmas = {0.0};
  }

  if (top.has("fieldmap")) s.fieldmap = read_fieldmap(top.child("fieldmap"), base_dir);
  if (s.source == DistributionSource::fieldmap && !s.fieldmap)
    throw ConfigError("fieldmap", "is required when distribution.kind is 'fieldmap'");

  if (top.has("atom_model")) {
    Reader a = top.child("atom_model");
    const std::string kind = a.string("kind", "analytic");
    if (kind == "multilevel") {
      MultilevelModel m;
      m.gamma = khz_to_angular(a.number("gamma_khz", 0.0));
      if (!(m.gamma >= 0.0)) a.fail("gamma_khz", "must be >= 0");
      if (a.has("quadratic_shift_khz")) {
        const json& q = a.raw("quadratic_shift_khz");
        if (q.is_string() && q.get<std::string>() == "isolated") {
          m.quadratic_shift = kIsolatedQuadraticShift;
        } else {
          m.quadratic_shift = khz_to_angular(Reader::as_number(q, a.at("quadratic_shift_khz")));
          if (!(m.quadratic_shift >= 0.0)) a.fail("quadratic_shift_khz", "must be >= 0");
        }
      }
      m.relaxation = khz_to_angular(a.number("relaxation_khz", 0.0));
      if (!(m.relaxation >= 0.0)) a.fail("relaxation_khz", "must be >= 0");
      m.pumping_fraction = a.number("pumping_fraction", 1.0);
      if (!(m.pumping_fraction >= 0.0 && m.pumping_fraction <= 1.0)) a.fail("pumping_fraction", "must lie in [0, 1]");
      s.atom_model = m;
    } else if (kind != "analytic") {
      a.fail("kind", "expected analytic or multilevel");
    }
    a.finish();
  }

  if (top.has("quadrature")) {
    Reader q = top.child("quadrature");
    s.quadrature.nodes = q.count("nodes", 0);
    if (s.quadrature.nodes != 0 && s.quadrature.nodes < 201) q.fail("nodes", "must be 0 (auto) or >= 201");
    s.quadrature.halfwidth_sigma = q.number("halfwidth_sigma", 8.0);
    if (!(s.quadrature.halfwidth_sigma >= 5.0)) q.fail("halfwidth_sigma", "must be at least 5");
    q.finish();
  }

  if (top.has("time")) {
    Reader t = top.child("time");
    if (t.has("t_max_ms") && t.has("t_max_periods")) t.fail("t_max_ms", "give t_max_ms or t_max_periods, not both");
    if (t.has("t_max_ms")) {
      s.t_max_ms = t.number("t_max_ms");
      if (!(*s.t_max_ms > 0.0)) t.fail("t_max_ms", "must be positive");
    }
    if (t.has("t_max_periods")) {
      s.t_max_periods = t.number("t_max_periods");
      if (!(*s.t_max_periods > 0.0)) t.fail("t_max_periods", "must be positive");
    }
    s.dt_ms = t.number("dt_ms", s.dt_ms);
    if (!(s.dt_ms > 0.0)) t.fail("dt_ms", "must be positive");
    t.finish();
  }

  if (top.has("analysis")) {
    Reader a = top.child("analysis");
    const std::string kind = a.string("kind", "single");
    if (kind == "two") {
      s.analysis = ScanAnalysis::two;
    } else if (kind == "fft") {
      s.analysis = ScanAnalysis::fft;
    } else if (kind != "single") {
      a.fail("kind", "expected single, two or fft");
    }
    if (a.has("window_ms")) {
      const auto w = a.numbers("window_ms");
      if (w.size() != 2 || !(w[1] > w[0]) || w[0] < 0.0) a.fail("window_ms", "expected [t_min, t_max] with 0 <= t_min < t_max");
      s.window_min_ms = w[0];
      s.window_max_ms = w[1];
    }
    const std::string decay = a.string("decay", "exponential");
    if (decay == "gaussian") {
      s.decay = DecayLaw::gaussian;
    } else if (decay != "exponential") {
      a.fail("decay", "expected exponential or gaussian");
    }
    s.two_window_periods = a.number("two_window_periods", s.two_window_periods);
    if (!(s.two_window_periods > 0.0)) a.fail("two_window_periods", "must be positive");
    s.two.fit_gamma_a = a.boolean("fit_gamma_a", false);
    s.two.gamma_a = khz_to_angular(a.number("gamma_a_khz", 0.0));
    if (!(s.two.gamma_a >= 0.0)) a.fail("gamma_a_khz", "must be >= 0");
    s.two.uncertainty_threshold = a.number("uncertainty_threshold", s.two.uncertainty_threshold);
    if (!(s.two.uncertainty_threshold > 0.0)) a.fail("uncertainty_threshold", "must be positive");
    if (a.has("spectrum")) {
      Reader sp = a.child("spectrum");
      s.spectrum.detrend = sp.boolean("detrend", s.spectrum.detrend);
      const std::string win = sp.string("window", "hann");
      if (win == "none") {
        s.spectrum.window = WindowFunction::none;
      } else if (win != "hann") {
        sp.fail("window", "expected none or hann");
      }
      s.spectrum.zero_pad = sp.count("zero_pad", s.spectrum.zero_pad);
      if (s.spectrum.zero_pad < 1 || s.spectrum.zero_pad > 4) sp.fail("zero_pad", "must be between 1 and 4");
      s.spectrum.relative_prominence = sp.number("prominence", s.spectrum.relative_prominence);
      if (!(s.spectrum.relative_prominence >= 0.0)) sp.fail("prominence", "must be >= 0");
      s.spectrum_max_khz = sp.number("max_khz", s.spectrum_max_khz);
      if (!(s.spectrum_max_khz > 0.0)) sp.fail("max_khz", "must be positive");
      s.spectrum_offset = sp.number("plot_offset", 0.0);
      sp.finish();
    }
    if (a.has("sliding")) {
      Reader sl = a.child("sliding");
      SlidingSpec spec;
      spec.window_ms = sl.number("window_ms", spec.window_ms);
      spec.hop_ms = sl.number("hop_ms", spec.hop_ms);
      if (!(spec.window_ms > 0.0)) sl.fail("window_ms", "must be positive");
      if (!(spec.hop_ms > 0.0)) sl.fail("hop_ms", "must be positive");
      sl.finish();
      s.sliding = spec;
    }
    a.finish();
  }

  if (top.has("monte_carlo")) {
    Reader m = top.child("monte_carlo");
    s.monte_carlo_samples = m.count("n_samples", 100000);
    if (*s.monte_carlo_samples < 1000) m.fail("n_samples", "must be at least 1000");
    m.finish();
  }

  if (top.has("output")) {
    Reader o = top.child("output");
    s.output_prefix = o.string("prefix", "");
    s.svg = o.boolean("svg", false);
    o.finish();
  }
  if (s.output_prefix.empty()) s.output_prefix = s.name;

  if (top.has("seed")) {
    const json& v = top.raw("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      top.fail("seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  top.finish();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open scenario file");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(j, path.parent_path());
}

std::vector<Series> expand_series(const Scenario& s) {
  if (s.omega0_khz.empty()) throw ConfigError("drive.omega0_khz", "is required");
  if (s.deltas.empty()) throw ConfigError("drive.delta_khz", "detuning list is empty");

  struct Dist {
    DetuningDistribution dist;
    double sigma_value;  // as configured, for labels
    int sign;
  };
  auto dists_for = [&](double omega0_khz) {
    std::vector<Dist> out;
    switch (s.source) {
      case DistributionSource::gaussian:
      case DistributionSource::skewed_gaussian:
        for (double sig : s.sigmas) {
          const double sigma_khz = s.sigmas_relative ? sig * omega0_khz : sig;
          const double sigma = khz_to_angular(sigma_khz);
          out.push_back({s.source == DistributionSource::gaussian ? DetuningDistribution::gaussian(sigma)
                                                                  : DetuningDistribution::skewed_gaussian(sigma, s.skew),
                         sigma_khz, 0});
        }
        break;
      case DistributionSource::file: {
        if (!std::filesystem::exists(s.distribution_file))
          throw ConfigError("distribution.file", "no such file: " + s.distribution_file.string());
        auto d = load_empirical_distribution(s.distribution_file);
        out.push_back({d, angular_to_khz(d.standard_deviation()), 0});
        break;
      }
      case DistributionSource::fieldmap:
        for (int sign : s.fieldmap->signs) {
          FieldGridModel model = s.fieldmap->model;
          model.current_sign = sign;
          const auto hist = field_magnitude_histogram(model, s.fieldmap->beam, s.fieldmap->n_bins);
          auto d = histogram_to_distribution(hist, s.fieldmap->recenter);
          out.push_back({d, angular_to_khz(d.standard_deviation()), sign});
        }
        break;
    }
    return out;
  };

  std::vector<Series> series;
  for (double om_khz : s.omega0_khz) {
    for (auto& d : dists_for(om_khz)) {
      Series se;
      se.omega0_khz = om_khz;
      se.sigma_khz = d.sigma_value;
      se.current_sign = d.sign;
      std::ostringstream label;
      label << "O0=" << om_khz << "kHz";
      if (d.sign != 0) {
        label << " sign=" << (d.sign > 0 ? "+1" : "-1");
      } else {
        label << " s=" << d.sigma_value << "kHz";
      }
      se.label = label.str();
      se.config.drive = DriveParams::from_khz(om_khz, 0.0);
      se.config.distribution = std::move(d.dist);
      se.config.atom_model = s.atom_model;
      se.config.quadrature = s.quadrature;
      for (double v : s.deltas) {
        se.deltas_khz.push_back(s.deltas_relative ? v * om_khz : v);
        se.deltas.push_back(khz_to_angular(se.deltas_khz.back()));
      }

      const double period_ms = 1.0 / om_khz;
      double t_max = 1.0;
      if (s.t_max_ms) {
        t_max = *s.t_max_ms;
      } else if (s.t_max_periods) {
        t_max = *s.t_max_periods * period_ms;
      } else if (s.analysis == ScanAnalysis::two) {
        t_max = s.two_window_periods * period_ms;
      }
      se.times = TimeGrid::span(0.0, t_max, s.dt_ms);
      series.push_back(std::move(se));
    }
  }
  return series;
}

ScanSettings scan_settings(const Scenario& s, const Series& series, std::size_t threads) {
  ScanSettings st;
  st.base = series.config;
  st.times = series.times;
  st.analysis = s.analysis;
  st.window_min = s.window_min_ms;
  st.window_max = s.window_max_ms;
  st.single.decay = s.decay;
  st.two = s.two;
  st.two_window_max = s.two_window_periods / series.omega0_khz;
  st.spectrum = s.spectrum;
  st.threads = threads;
  return st;
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = s.raw.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OscillationTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("trace_file", "cannot open " + path.string());
  std::vector<double> t, v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    double a = 0, b = 0;
    if (!(fields >> a >> b)) {
      if (t.empty()) continue;  // header row
      throw ConfigError("trace_file", path.string() + ":" + std::to_string(line_no) + ": expected 't_ms, value'");
    }
    t.push_back(a);
    v.push_back(b);
  }
  if (t.size() < 2) throw ConfigError("trace_file", "needs at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs(t[k] - t[k - 1] - dt) > 1e-6 * std::abs(dt) + 1e-12)
      throw ConfigError("trace_file", "samples are not uniformly spaced");
  OscillationTrace tr{t.front(), dt, std::move(v)};
  tr.validate();
  return tr;
}

}  // namespace rabi::cli
