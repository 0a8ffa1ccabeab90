#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "output.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rabi");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = rabi::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("rabi_cli_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(path / file) << text;
    return path / file;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Data rows of a CSV file, split on commas; comment and header lines dropped.
std::vector<std::vector<std::string>> rows(const fs::path& p, std::vector<std::string>* header = nullptr) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> out;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (!seen_header) {
      seen_header = true;
      if (header) *header = cells;
      continue;
    }
    out.push_back(cells);
  }
  return out;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

const char* kHomogeneous = R"({
  "name": "homog",
  "drive": {"omega0_khz": 9, "delta_khz": 0},
  "distribution": {"kind": "gaussian", "sigma_khz": 0},
  "time": {"t_max_ms": 1.0, "dt_ms": 0.008}
})";

}  // namespace

TEST_CASE("homogeneous simulate matches sin^2 and carries metadata") {
  TempDir dir("simulate");
  const auto cfg = dir.write("s.json", kHomogeneous);
  const auto r = run({"--out", dir.path.string(), "simulate", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  const auto csv = dir.path / "homog_trace.csv";
  REQUIRE(fs::exists(csv));
  const std::string text = slurp(csv);
  CHECK(text.find("# tool: rabi " + std::string(rabi::cli::kToolVersion)) != std::string::npos);
  CHECK(text.find("# scenario_hash: ") != std::string::npos);
  std::vector<std::string> header;
  const auto data = rows(csv, &header);
  const auto ti = column(header, "t_ms"), si = column(header, "S");
  REQUIRE(data.size() == 126);
  const double om = 2.0 * M_PI * 9.0;
  for (const auto& row : data) {
    const double t = std::stod(row[ti]);
    CHECK(std::abs(std::stod(row[si]) - std::pow(std::sin(0.5 * om * t), 2)) < 1e-9);
  }
  for (const auto& e : fs::directory_iterator(dir.path)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("identical runs produce identical bytes") {
  TempDir dir("determinism");
  const auto cfg = dir.write("s.json", R"({
    "name": "mc",
    "drive": {"omega0_khz": 9, "delta_khz": [-5, 5]},
    "distribution": {"kind": "skewed_gaussian", "sigma_khz": 6, "field_skew": -0.3},
    "monte_carlo": {"n_samples": 2000},
    "time": {"t_max_ms": 0.5}
  })");
  const auto first = run({"--out", (dir.path / "a").string(), "simulate", "--config", cfg.string()});
  INFO(first.err);
  REQUIRE(first.code == 0);
  REQUIRE(run({"--out", (dir.path / "b").string(), "--threads", "2", "simulate", "--config", cfg.string()}).code == 0);
  CHECK(slurp(dir.path / "a" / "mc_trace.csv") == slurp(dir.path / "b" / "mc_trace.csv"));
  REQUIRE(run({"--out", (dir.path / "c").string(), "--seed", "5", "simulate", "--config", cfg.string()}).code == 0);
  CHECK(slurp(dir.path / "a" / "mc_trace.csv") != slurp(dir.path / "c" / "mc_trace.csv"));
}

TEST_CASE("config errors name the offending field") {
  TempDir dir("errors");
  SUBCASE("empty detuning list") {
    const auto cfg = dir.write("s.json", R"({"drive": {"omega0_khz": 9, "delta_khz": []},
      "distribution": {"kind": "gaussian", "sigma_khz": 1}})");
    const auto r = run({"--out", dir.path.string(), "scan", "--config", cfg.string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("drive.delta_khz") != std::string::npos);
  }
  SUBCASE("unknown key") {
    const auto cfg = dir.write("s.json", R"({"drive": {"omega0_khz": 9, "delta_khz": 0, "detuning": 3}})");
    const auto r = run({"--out", dir.path.string(), "simulate", "--config", cfg.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("drive.detuning") != std::string::npos);
  }
  SUBCASE("negative frequency") {
    const auto cfg = dir.write("s.json", R"({"drive": {"omega0_khz": -9, "delta_khz": 0}})");
    const auto r = run({"--out", dir.path.string(), "simulate", "--config", cfg.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("drive.omega0_khz") != std::string::npos);
  }
  SUBCASE("missing profile file") {
    const auto cfg = dir.write("s.json", R"({"fieldmap": {"profiles": {"b0z": {"file": "nowhere/b0z.csv"}}}})");
    const auto r = run({"--out", dir.path.string(), "field-dist", "--config", cfg.string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("nowhere/b0z.csv") != std::string::npos);
  }
  SUBCASE("missing config file") {
    const auto r = run({"simulate", "--config", (dir.path / "absent.json").string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("absent.json") != std::string::npos);
  }
  SUBCASE("unknown preset") {
    const auto r = run({"--out", dir.path.string(), "reproduce", "fig99"});
    CHECK(r.code != 0);
    CHECK(r.err.find("fig99") != std::string::npos);
  }
  SUBCASE("no subcommand") {
    CHECK(run({}).code != 0);
  }
}

TEST_CASE("spectrum of a pure cosine file has a single peak") {
  TempDir dir("spectrum");
  std::ostringstream trace;
  trace << "t_ms,value\n";
  for (int k = 0; k < 126; ++k) {
    const double t = 0.008 * k;
    trace << t << "," << std::cos(2.0 * M_PI * 9.0 * t) << "\n";
  }
  dir.write("trace.csv", trace.str());
  const auto cfg = dir.write("s.json", R"({"name": "cos", "command": "spectrum", "trace_file": "trace.csv"})");
  REQUIRE(run({"--out", dir.path.string(), "spectrum", "--config", cfg.string()}).code == 0);
  std::vector<std::string> header;
  const auto peaks = rows(dir.path / "cos_peaks.csv", &header);
  REQUIRE(peaks.size() == 1);
  CHECK(std::abs(std::stod(peaks[0][column(header, "freq_kHz")]) - 9.0) < 0.5);
}

TEST_CASE("field-dist") {
  TempDir dir("fielddist");
  SUBCASE("uniform field gives one bin") {
    const auto cfg = dir.write("s.json", R"({"name": "flat", "fieldmap": {"profiles": {"b0z": {"constant": 1.2}}}})");
    REQUIRE(run({"--out", dir.path.string(), "field-dist", "--config", cfg.string()}).code == 0);
    const auto hist = rows(dir.path / "flat_hist_plus.csv");
    REQUIRE(hist.size() == 1);
    CHECK(std::stod(hist[0][1]) == doctest::Approx(1.0));
  }
  SUBCASE("milligauss profiles are converted") {
    const auto cfg = dir.write("s.json", R"({"name": "mg", "fieldmap": {"units": "mG",
      "profiles": {"b0z": {"constant": 10}}}})");
    REQUIRE(run({"--out", dir.path.string(), "field-dist", "--config", cfg.string()}).code == 0);
    const auto hist = rows(dir.path / "mg_hist_plus.csv");
    REQUIRE(hist.size() == 1);
    CHECK(std::stod(hist[0][0]) == doctest::Approx(7.0).epsilon(1e-6));
  }
  SUBCASE("fig8 preset gives opposite skews") {
    REQUIRE(run({"--out", dir.path.string(), "reproduce", "fig8"}).code == 0);
    std::vector<std::string> header;
    const auto summary = rows(dir.path / "fig8_summary.csv", &header);
    REQUIRE(summary.size() == 2);
    const auto k = column(header, "skewness");
    CHECK(std::stod(summary[0][k]) * std::stod(summary[1][k]) < 0.0);
    CHECK(fs::exists(dir.path / "fig8_hist_minus.csv"));
    CHECK(fs::exists(dir.path / "fig8_hist.svg"));
  }
}

TEST_CASE("fieldmap-driven scan") {
  TempDir dir("fieldscan");
  const auto cfg = dir.write("s.json", R"({
    "name": "fm", "command": "scan",
    "drive": {"omega0_khz": 2, "delta_khz": [-8, 8]},
    "distribution": {"kind": "fieldmap"},
    "fieldmap": {"preset": "fig8_like", "current_sign": -1},
    "time": {"t_max_ms": 3, "dt_ms": 0.008},
    "analysis": {"window_ms": [0.01, 3]}
  })");
  REQUIRE(run({"--out", dir.path.string(), "scan", "--config", cfg.string()}).code == 0);
  std::vector<std::string> header;
  const auto data = rows(dir.path / "fm_scan.csv", &header);
  REQUIRE(data.size() == 2);
  const auto nu = column(header, "nu_fit_kHz");
  // Red side stays near the bare frequency, blue side follows the drive.
  CHECK(std::stod(data[0][nu]) < 2.3);
  CHECK(std::stod(data[1][nu]) > 2.3);
}

TEST_CASE("scan CSV header names units") {
  TempDir dir("scanheader");
  const auto cfg = dir.write("s.json", R"({"name": "h", "drive": {"omega0_khz": 9, "delta_over_omega0": [0, 1]},
    "distribution": {"kind": "gaussian", "sigma_over_omega0": 0.5}})");
  REQUIRE(run({"--out", dir.path.string(), "--svg", "scan", "--config", cfg.string()}).code == 0);
  std::vector<std::string> header;
  const auto data = rows(dir.path / "h_scan.csv", &header);
  CHECK(data.size() == 2);
  for (const char* c : {"delta_kHz", "nu_fit_kHz", "tau_ms", "gamma_per_ms", "r_squared", "error"}) column(header, c);
  CHECK(fs::exists(dir.path / "h_frequency.svg"));
  const std::string svg = slurp(dir.path / "h_frequency.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("scenario hash") {
  const auto a = rabi::cli::parse_scenario(nlohmann::json::parse(kHomogeneous), ".");
  const auto b = rabi::cli::parse_scenario(nlohmann::json::parse(kHomogeneous), ".");
  auto j = nlohmann::json::parse(kHomogeneous);
  j["drive"]["delta_khz"] = 1;
  const auto c = rabi::cli::parse_scenario(j, ".");
  CHECK(rabi::cli::scenario_hash(a) == rabi::cli::scenario_hash(b));
  CHECK(rabi::cli::scenario_hash(a) != rabi::cli::scenario_hash(c));
  CHECK(rabi::cli::scenario_hash(a).size() == 16);
}

TEST_CASE("number formatting and atomic writes") {
  CHECK(rabi::cli::format_number(0.1) == "0.1");
  CHECK(rabi::cli::format_number(-2.0) == "-2");
  CHECK(std::stod(rabi::cli::format_number(M_PI)) == M_PI);
  CHECK(rabi::cli::format_number(NAN) == "nan");
  TempDir dir("atomic");
  rabi::cli::write_file_atomic(dir.path / "x.csv", "a,b\n");
  CHECK(slurp(dir.path / "x.csv") == "a,b\n");
  CHECK_FALSE(fs::exists(dir.path / "x.csv.tmp"));
}
