#include <doctest.h>

#include <cmath>
#include <random>

#include "rabi/ensemble.hpp"
#include "rabi/errors.hpp"
#include "rabi/fieldmap.hpp"
#include "rabi/units.hpp"

using namespace rabi;
using doctest::Approx;

TEST_CASE("profiles") {
  CHECK(Profile::constant(2.5)(100.0) == 2.5);
  CHECK(Profile::polynomial({1.0, 2.0, 3.0})(2.0) == Approx(17.0));
  const auto p = Profile::piecewise_linear({{0.0, 0.0}, {10.0, 5.0}, {-10.0, 1.0}});
  CHECK(p(5.0) == Approx(2.5));
  CHECK(p(-5.0) == Approx(0.5));
  CHECK(p(-20.0) == Approx(1.0));
  CHECK(p(30.0) == Approx(5.0));
  CHECK_THROWS_AS(Profile::piecewise_linear({}), ConfigError);
  CHECK_THROWS_AS(Profile::piecewise_linear({{1.0, 0.0}, {1.0, 2.0}}), ConfigError);
}

TEST_CASE("uniform field gives a single bin") {
  FieldGridModel m;
  m.b0z = Profile::constant(1.5);
  const auto h = field_magnitude_histogram(m, ProbeBeam{}, 40);
  REQUIRE(h.weights.size() == 1);
  CHECK(h.weights[0] == Approx(1.0));
  CHECK(h.bin_centers_khz[0] == Approx(1.5).epsilon(1e-9));
  CHECK(h.skewness == 0.0);
  CHECK(h.std_khz == Approx(0.0).scale(1.0).epsilon(1e-9));

  const auto d = histogram_to_distribution(h);
  REQUIRE(d.empirical.size() == 1);
  CHECK(d.empirical[0].shift == 0.0);
  EnsembleConfig c;
  c.drive = {khz_to_angular(9.0), 3.0};
  c.distribution = d;
  const auto g = TimeGrid::span(0.0, 1.0, 0.008);
  CHECK(ensemble_signal(c, g).values == atom_signal(c, 0.0, g));
}

TEST_CASE("magnitude is the norm of the summed components") {
  const auto m = fig8_like_preset(-1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-8.0, 8.0), uz(-20.0, 20.0);
  for (int i = 0; i < 10; ++i) {
    const double x = ux(rng), y = ux(rng), z = uz(rng);
    const double u = z / 20.0, rx = x / 8.0, ry = y / 8.0;
    const double bx = 0.3 * rx * rx + 0.2 * rx * rx;
    const double by = 0.3 * ry * ry + 0.2 * ry * ry;
    const double bz = 5.0 * u * u + 2.0 * u - (16000.0 - 4.5 * u * u);
    const double expected = std::sqrt(bx * bx + by * by + bz * bz) - 16000.0;
    CHECK(m.deviation(x, y, z) == Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("fig8-like component profiles stay within 8 kHz of nominal") {
  const auto m = fig8_like_preset(1);
  for (double x = -8.0; x <= 8.0; x += 0.5)
    for (const Profile* p : {&m.b0x, &m.b0y, &m.b1x, &m.b1y}) CHECK(std::abs((*p)(x)) <= 8.0);
  for (double z = -20.0; z <= 20.0; z += 0.5) {
    CHECK(std::abs(m.b0z(z)) <= 8.0);
    CHECK(std::abs(m.b1z(z)) <= 8.0);
  }
}

TEST_CASE("current reversal skews the distribution") {
  const ProbeBeam beam;
  const auto plus = field_magnitude_histogram(fig8_like_preset(1), beam, 60);
  const auto minus = field_magnitude_histogram(fig8_like_preset(-1), beam, 60);
  CHECK(plus.skewness * minus.skewness < 0.0);
  CHECK(minus.skewness < -0.5);
  CHECK(std::abs(plus.mean_khz) < 0.5);
  CHECK(minus.mean_khz < -2.0);
  CHECK(minus.std_khz > 2.0 * plus.std_khz);
  CHECK(minus.fraction_below < 0.5);
  for (const auto* h : {&plus, &minus}) {
    double total = 0.0;
    for (double w : h->weights) total += w;
    CHECK(total == Approx(1.0).epsilon(1e-12));
    CHECK(h->fraction_below + h->fraction_above == Approx(1.0));
  }
}

TEST_CASE("binning convergence") {
  const auto m = fig8_like_preset(-1);
  const auto coarse = histogram_moments(field_magnitude_histogram(m, ProbeBeam{}, 200));
  const auto fine = histogram_moments(field_magnitude_histogram(m, ProbeBeam{}, 400));
  CHECK(fine.mean == Approx(coarse.mean).epsilon(0.01));
  CHECK(fine.skewness == Approx(coarse.skewness).epsilon(0.01));
  const auto raw = field_magnitude_histogram(m, ProbeBeam{}, 400);
  CHECK(fine.mean == Approx(raw.mean_khz).epsilon(0.01));
}

TEST_CASE("narrower beams do not widen the distribution") {
  FieldGridModel radial;
  radial.b0x = Profile::polynomial({0.0, 0.0, 0.05});
  radial.b0y = Profile::polynomial({0.0, 0.0, 0.05});
  ProbeBeam wide, narrow;
  narrow.diameter = 3.0;
  CHECK(field_magnitude_histogram(radial, narrow, 50).std_khz <= field_magnitude_histogram(radial, wide, 50).std_khz);

  const auto m = fig8_like_preset(-1);
  const double w12 = field_magnitude_histogram(m, wide, 50).std_khz;
  const double w3 = field_magnitude_histogram(m, narrow, 50).std_khz;
  CHECK(w3 <= w12 + 1e-9 * w12);
  CHECK(w3 > 0.8 * w12);

  ProbeBeam gauss;
  gauss.profile = BeamProfile::gaussian;
  CHECK(gauss.weight(0.0, 0.0) == 1.0);
  CHECK(gauss.weight(6.0, 0.0) == Approx(std::exp(-2.0)));
  CHECK(wide.weight(6.0, 0.0) == 1.0);
  CHECK(wide.weight(6.1, 0.0) == 0.0);
}

TEST_CASE("histogram to detuning distribution") {
  FieldHistogram h;
  h.bin_centers_khz = {-1.0, 0.0, 2.0};
  h.weights = {0.25, 0.5, 0.25};
  const auto centred = histogram_to_distribution(h);
  CHECK(centred.mean() == Approx(0.0).scale(1.0).epsilon(1e-12));
  // Stronger fields mean lower detuning.
  const auto raw = histogram_to_distribution(h, false);
  CHECK(raw.empirical.front().shift == Approx(khz_to_angular(-2.0)));
  CHECK(raw.empirical.back().shift == Approx(khz_to_angular(1.0)));
  CHECK(raw.skewness() < 0.0);
  CHECK_THROWS_AS(histogram_to_distribution(FieldHistogram{}), ConfigError);
}

TEST_CASE("model validation") {
  FieldGridModel m;
  m.spacing = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.spacing = 0.5;
  m.current_sign = 0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.current_sign = 1;
  m.x_min = 5.0;
  m.x_max = -5.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  ProbeBeam b;
  b.diameter = -1.0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
}
