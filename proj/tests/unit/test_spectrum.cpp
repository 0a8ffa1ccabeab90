#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "rabi/ensemble.hpp"
#include "rabi/errors.hpp"
#include "rabi/spectrum.hpp"
#include "rabi/units.hpp"

#include "oracles.hpp"

using namespace rabi;
using doctest::Approx;

namespace {

OscillationTrace cosine(double f_khz, double t_end, double dt, double offset = 0.0, double slope = 0.0) {
  const auto g = TimeGrid::span(0.0, t_end, dt);
  OscillationTrace tr{0.0, dt, std::vector<double>(g.n)};
  for (std::size_t k = 0; k < g.n; ++k)
    tr.values[k] = offset + slope * g.at(k) + std::cos(khz_to_angular(f_khz) * g.at(k));
  return tr;
}

}  // namespace

TEST_CASE("pure cosine gives a single peak in the right bin") {
  const auto tr = cosine(9.0, 1.0, 0.008);
  const auto s = fft_spectrum(tr, SpectrumOptions{});
  REQUIRE(s.peaks.size() == 1);
  CHECK(std::abs(s.peaks[0].frequency_khz - 9.0) <= s.bin_width());
}

TEST_CASE("peak within one unpadded bin for ten or more periods") {
  for (double f : {3.3, 7.7, 12.1, 31.0}) {
    const auto tr = cosine(f, 10.0 / f + 0.05, 0.004);
    SpectrumOptions opt;
    opt.zero_pad = 1;
    opt.window = WindowFunction::none;
    const auto s = fft_spectrum(tr, opt);
    REQUIRE_FALSE(s.peaks.empty());
    CHECK(std::abs(s.peaks[0].frequency_khz - f) <= s.bin_width());
  }
}

TEST_CASE("spectrum invariants") {
  const auto tr = cosine(5.0, 1.0, 0.008, 0.5, 0.3);
  const auto s = fft_spectrum(tr);
  for (std::size_t i = 1; i < s.freqs.size(); ++i) CHECK(s.freqs[i] > s.freqs[i - 1]);
  for (double p : s.power) CHECK(p >= 0.0);
  CHECK(s.freqs.front() == 0.0);
  CHECK(s.freqs.back() == Approx(0.5 / 0.008).epsilon(1e-2));
  // Detrending removes the baseline and the drift, so DC stays small.
  CHECK(s.power.front() < 0.05 * s.peaks.front().height);
  // Unit-amplitude cosine at a bin centre has magnitude close to one.
  SpectrumOptions plain;
  plain.window = WindowFunction::none;
  plain.zero_pad = 1;
  const auto c = fft_spectrum(cosine(8.0, 1.0 - 0.008, 0.008), plain);
  CHECK(c.peaks.front().height == Approx(1.0).epsilon(0.02));
}

TEST_CASE("two tones give two peaks, highest first") {
  const auto g = TimeGrid::span(0.0, 1.0, 0.004);
  OscillationTrace tr{0.0, 0.004, std::vector<double>(g.n)};
  for (std::size_t k = 0; k < g.n; ++k) {
    const double t = g.at(k);
    tr.values[k] = 0.4 * std::cos(khz_to_angular(9.0) * t) + std::cos(khz_to_angular(20.0) * t);
  }
  const auto s = fft_spectrum(tr);
  REQUIRE(s.peaks.size() == 2);
  CHECK(s.peaks[0].frequency_khz == Approx(20.0).epsilon(0.02));
  CHECK(s.peaks[1].frequency_khz == Approx(9.0).epsilon(0.02));
  CHECK(s.peaks[0].height > s.peaks[1].height);
  SpectrumOptions strict;
  strict.relative_prominence = 0.6;
  CHECK(fft_spectrum(tr, strict).peaks.size() == 1);
}

TEST_CASE("prominence matches a direct walk on random and plateau data") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> level(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> y(5 + trial % 60);
    for (double& v : y) v = trial % 2 ? level(rng) : std::generate_canonical<double, 53>(rng);
    const auto fast = peak_prominences(y);
    const auto slow = oracle::prominences(y);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(fast[i] == slow[i]);
  }
}

TEST_CASE("prominence") {
  const std::vector<double> y{0, 3, 1, 2, 0, 5, 4, 4.5, 0};
  const auto p = peak_prominences(y);
  CHECK(p[1] == Approx(3.0));
  CHECK(p[3] == Approx(1.0));
  CHECK(p[5] == Approx(5.0));
  CHECK(p[7] == Approx(0.5));
  CHECK(p[0] == 0.0);
  CHECK(p[2] == 0.0);
}

TEST_CASE("input checks") {
  OscillationTrace tiny{0.0, 0.01, std::vector<double>(15, 1.0)};
  CHECK_THROWS_AS(fft_spectrum(tiny), ConfigError);
  SpectrumOptions opt;
  opt.zero_pad = 5;
  CHECK_THROWS_AS(fft_spectrum(cosine(9.0, 1.0, 0.008), opt), ConfigError);
  opt.zero_pad = 0;
  CHECK_THROWS_AS(fft_spectrum(cosine(9.0, 1.0, 0.008), opt), ConfigError);
}

TEST_CASE("spectrum is deterministic across threads") {
  const auto tr = cosine(9.0, 1.0, 0.008);
  std::vector<SpectrumResult> out(4);
  std::vector<std::jthread> ts;
  for (auto& o : out) ts.emplace_back([&] { o = fft_spectrum(tr); });
  ts.clear();
  for (const auto& o : out) CHECK(o.power == out[0].power);
}
