#include <doctest.h>

#include <cmath>

#include "rabi/core_model.hpp"
#include "rabi/errors.hpp"
#include "rabi/scan.hpp"
#include "rabi/units.hpp"

using namespace rabi;
using doctest::Approx;

namespace {

ScanSettings settings(double om, DetuningDistribution d) {
  ScanSettings s;
  s.base.drive = {om, 0.0};
  s.base.distribution = std::move(d);
  return s;
}

std::vector<double> symmetric(double step, double max) {
  std::vector<double> out;
  for (double d = -max; d <= max + 1e-9; d += step) out.push_back(d);
  return out;
}

}  // namespace

TEST_CASE("homogeneous scan follows the generalized Rabi law and the Lorentzian") {
  const double om = khz_to_angular(9.0);
  const auto rows = scan_detuning(settings(om, DetuningDistribution::gaussian(0.0)), symmetric(0.75 * om, 3.0 * om));
  for (const auto& r : rows) {
    REQUIRE(r.ok());
    CHECK(r.omega_fit == Approx(r.omega_generalized).epsilon(0.01));
    CHECK(2.0 * r.amplitude == Approx(lorentzian_factor(om, r.delta)).epsilon(0.02));
    CHECK(r.omega_generalized == Approx(generalized_rabi({om, r.delta})));
  }
}

TEST_CASE("rows come back in input order and failures stay in their row") {
  const double om = khz_to_angular(9.0);
  auto s = settings(om, DetuningDistribution::gaussian(0.5 * om));
  s.threads = 3;
  const std::vector<double> deltas{2.0 * om, -om, 0.0, 0.5 * om};
  const auto rows = scan_detuning(s, deltas);
  REQUIRE(rows.size() == deltas.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].delta == deltas[i]);
  s.threads = 1;
  const auto serial = scan_detuning(s, deltas);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].omega_fit == serial[i].omega_fit);

  auto broken = settings(om, DetuningDistribution::gaussian(0.5 * om));
  broken.window_max = 5.0;  // beyond the 1 ms trace
  const auto bad = scan_detuning(broken, {0.0, om});
  REQUIRE(bad.size() == 2);
  for (const auto& r : bad) CHECK_FALSE(r.ok());

  CHECK_THROWS_AS(scan_detuning(s, {}), ConfigError);
  CHECK_THROWS_AS(scan_detuning(s, {NAN}), ConfigError);
}

TEST_CASE("symmetric distributions give symmetric rigidity curves") {
  const double om = khz_to_angular(9.0);
  const auto rows =
      scan_detuning(settings(om, DetuningDistribution::gaussian(khz_to_angular(8.0))), symmetric(0.5 * om, 2.0 * om));
  const std::size_t n = rows.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const auto& a = rows[i];
    const auto& b = rows[n - 1 - i];
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(std::abs(a.omega_fit - b.omega_fit) <= std::max(a.omega_ci, b.omega_ci) + 1e-9);
  }
}

TEST_CASE("rigidity weakens as the drive grows") {
  // Share of the homogeneous frequency shift that the fit follows at detuning sigma.
  const double sigma = khz_to_angular(8.0);
  std::vector<double> tracked;
  for (double om_khz : {5.0, 9.0, 15.0, 20.0}) {
    const double om = khz_to_angular(om_khz);
    const auto rows = scan_detuning(settings(om, DetuningDistribution::gaussian(sigma)), {sigma});
    REQUIRE(rows[0].ok());
    tracked.push_back((rows[0].omega_fit - om) / (rows[0].omega_generalized - om));
  }
  for (std::size_t i = 0; i < tracked.size(); ++i) {
    CHECK(std::abs(tracked[i]) < 0.15);
    if (i > 0) CHECK(tracked[i] > tracked[i - 1]);
  }
}

TEST_CASE("two-frequency and spectrum analyses") {
  const double om = khz_to_angular(9.0);
  auto s = settings(om, DetuningDistribution::gaussian(2.0 * om));
  s.times = TimeGrid::span(0.0, two_frequency_window(om), 0.002);
  s.analysis = ScanAnalysis::two;
  const auto two = scan_detuning(s, {0.0, 2.0 * om});
  for (const auto& r : two) {
    REQUIRE(r.ok());
    CHECK(r.fraction_A > 0.1);
    CHECK(r.gamma_b > 0.0);
    CHECK(r.omega_fit >= om);
  }
  s.analysis = ScanAnalysis::fft;
  s.times = TimeGrid::span(0.0, 1.0, 0.008);
  const auto fft = scan_detuning(s, {2.0 * om});
  REQUIRE(fft[0].ok());
  REQUIRE_FALSE(fft[0].peaks.empty());
  CHECK(angular_to_khz(fft[0].omega_fit) == Approx(9.0).epsilon(0.1));
}
