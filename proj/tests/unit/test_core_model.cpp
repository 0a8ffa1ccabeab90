#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rabi/core_model.hpp"
#include "rabi/errors.hpp"
#include "rabi/trace.hpp"
#include "rabi/units.hpp"

using namespace rabi;
using doctest::Approx;

TEST_CASE("unit conversions") {
  CHECK(milligauss_to_khz(10.0) == Approx(7.0).epsilon(1e-15));
  CHECK(khz_to_milligauss(7.0) == Approx(10.0).epsilon(1e-15));
  CHECK(angular_to_khz(khz_to_angular(9.0)) == Approx(9.0).epsilon(1e-15));
  CHECK(khz_to_angular(1.0) == Approx(2.0 * std::numbers::pi));
}

TEST_CASE("generalized Rabi frequency") {
  CHECK(generalized_rabi({9.0, 0.0}) == 9.0);
  CHECK(generalized_rabi({3.0, 4.0}) == Approx(5.0).epsilon(1e-15));
  CHECK(generalized_rabi({10.0, -10.0}) == Approx(14.1421356237).epsilon(1e-10));
  CHECK(generalized_rabi({3.0, 1.0}, 3.0) == Approx(5.0).epsilon(1e-15));
}

TEST_CASE("generalized Rabi frequency is even and bounded below") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double om = std::abs(u(rng)) + 0.1, d = u(rng);
    CHECK(generalized_rabi({om, d}) == generalized_rabi({om, -d}));
    CHECK(generalized_rabi({om, d}) >= om);
    CHECK(generalized_rabi({om, 1.1 * d}) >= generalized_rabi({om, d}));
  }
}

TEST_CASE("two-level population") {
  const double om = 5.0;
  CHECK(p1_two_level({om, 0.0}, 0.0, std::numbers::pi / om) == Approx(1.0).epsilon(1e-14));
  CHECK(p1_two_level({om, 0.0}, 0.0, 2.0 * std::numbers::pi / om) == Approx(0.0).epsilon(1e-14));
  CHECK(p1_two_level({1.0, 1.0}, 0.0, std::numbers::pi / std::sqrt(2.0)) == Approx(0.5).epsilon(1e-14));
  // Local shift adds to the central detuning.
  CHECK(p1_two_level({1.0, 0.25}, 0.75, 0.9) == Approx(p1_two_level({1.0, 1.0}, 0.0, 0.9)).epsilon(1e-15));
}

TEST_CASE("two-level maximum is the Lorentzian factor") {
  for (double d : {0.0, 0.3, 1.0, -2.5, 7.0}) {
    const DriveParams drive{2.0, d};
    const double w = generalized_rabi(drive);
    CHECK(p1_two_level(drive, 0.0, std::numbers::pi / w) == Approx(lorentzian_factor(2.0, d)).epsilon(1e-14));
    for (double t = 0.0; t < 20.0; t += 0.013) CHECK(p1_two_level(drive, 0.0, t) <= lorentzian_factor(2.0, d) + 1e-15);
  }
}

TEST_CASE("small-sigma closed form") {
  const auto grid = TimeGrid::span(0.0, 5.0, 0.01);
  SUBCASE("sigma = 0 is an undamped oscillation at the generalized frequency") {
    const DriveParams drive{3.0, 2.0};
    const auto tr = analytic_small_sigma_signal(drive, 0.0, grid);
    for (std::size_t k = 0; k < grid.n; ++k)
      CHECK(tr.values[k] == Approx(p1_two_level(drive, 0.0, grid.at(k))).epsilon(1e-12));
  }
  SUBCASE("zero detuning does not decay") {
    const auto tr = analytic_small_sigma_signal({3.0, 0.0}, 0.4, grid);
    for (std::size_t k = 0; k < grid.n; ++k)
      CHECK(tr.values[k] == Approx(std::pow(std::sin(1.5 * grid.at(k)), 2)).epsilon(1e-12));
  }
  SUBCASE("starts at zero") {
    for (double d : {0.0, 1.0, -4.0})
      for (double s : {0.0, 0.1, 0.5}) CHECK(analytic_small_sigma_signal({3.0, d}, s, grid).values[0] == 0.0);
  }
  SUBCASE("decay rate") {
    CHECK(small_sigma_decay_rate({3.0, 4.0}, 0.5) == Approx(0.5 * 4.0 / 5.0));
    CHECK(small_sigma_decay_rate({3.0, -4.0}, 0.5) == Approx(0.5 * 4.0 / 5.0));
  }
  SUBCASE("long-time mean tends to half the Lorentzian factor") {
    const DriveParams drive{3.0, 1.5};
    const auto long_grid = TimeGrid::span(0.0, 200.0, 0.01);
    const auto tr = analytic_small_sigma_signal(drive, 0.3, long_grid);
    double mean = 0.0;
    for (double v : tr.values) mean += v;
    mean /= static_cast<double>(tr.size());
    CHECK(mean == Approx(0.5 * lorentzian_factor(3.0, 1.5)).epsilon(2e-3));
  }
  SUBCASE("rejects an empty grid") {
    CHECK_THROWS_AS(analytic_small_sigma_signal({3.0, 0.0}, 0.1, TimeGrid{0.0, 0.01, 0}), ConfigError);
  }
}

TEST_CASE("closed form against brute-force ensemble integral") {
  // Agreement improves as sigma shrinks; at sigma = 0.01 omega0 the gap over
  // a few periods is small.
  const double om = 10.0, delta = 10.0, sigma = 0.01 * om;
  std::vector<double> t;
  for (double x = 0.0; x <= 3.0 * 2.0 * std::numbers::pi / om; x += 0.02) t.push_back(x);
  const auto ref = oracle::ensemble_gaussian(om, delta, sigma, t, 4000);
  const auto grid = TimeGrid{0.0, 0.02, t.size()};
  const auto tr = analytic_small_sigma_signal({om, delta}, sigma, grid);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(tr.values[k] == Approx(ref[k]).epsilon(2e-3).scale(1.0));
}

TEST_CASE("drive validation") {
  CHECK_THROWS_AS(DriveParams({0.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(DriveParams({-1.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(DriveParams({1.0, NAN}).validate(), ConfigError);
  CHECK_NOTHROW(DriveParams({1.0, -3.0}).validate());
  const auto d = DriveParams::from_khz(9.0, -2.0);
  CHECK(d.omega0 == Approx(khz_to_angular(9.0)));
  CHECK(d.delta == Approx(khz_to_angular(-2.0)));
}

TEST_CASE("traces and grids") {
  const auto g = TimeGrid::span(0.0, 1.0, 0.008);
  CHECK(g.n == 126);
  CHECK(g.t_end() == Approx(1.0));
  OscillationTrace tr{0.0, 0.1, std::vector<double>(20, 1.0)};
  CHECK_NOTHROW(tr.validate());
  const auto w = tr.window(0.3, 0.7);
  CHECK(w.size() == 5);
  CHECK(w.t0 == Approx(0.3));
  OscillationTrace short_tr{0.0, 0.1, std::vector<double>(5, 0.0)};
  CHECK_THROWS_AS(short_tr.validate(), ConfigError);
  OscillationTrace bad_dt{0.0, 0.0, std::vector<double>(20, 0.0)};
  CHECK_THROWS_AS(bad_dt.validate(), ConfigError);
}
