#include <cmath>
#include <numbers>

#include "doctest.h"

#include "sensor/sensor_model.hpp"

using namespace ssilkc::sensor;

namespace {

double two_pi_f_sq(double f) {
  const double w = 2.0 * std::numbers::pi * f;
  return w * w;
}

}  // namespace

TEST_CASE("resonant inductance") {
  SensorParams p = default_sensor_params();
  const SensorModel m(p);
  const double f_res = 1.0 / (2.0 * std::numbers::pi * std::sqrt(p.capacitance * p.i_comp));
  CHECK(m.resonance_frequency() == doctest::Approx(f_res).epsilon(1e-12));
  CHECK(std::abs(m.inductance_from_frequency(f_res)) < 1e-15 * p.i_comp * 1e3);

  SensorParams no_offset = p;
  no_offset.i_comp = 0.0;
  const SensorModel m0(no_offset);
  CHECK(m0.inductance_from_frequency(1e6) == doctest::Approx(2.533e-4).epsilon(1e-3));

  const double f = 0.3 * f_res;
  const double total = m.inductance_from_frequency(f) + p.i_comp;
  const double total_half = m.inductance_from_frequency(0.5 * f) + p.i_comp;
  CHECK(total_half == doctest::Approx(4.0 * total).epsilon(1e-12));

  CHECK_THROWS_AS((void)m.inductance_from_frequency(0.0), std::domain_error);
  CHECK_THROWS_AS((void)m.inductance_from_frequency(1.01 * f_res), std::domain_error);
}

TEST_CASE("frequency to length") {
  const SensorParams p = default_sensor_params();
  const SensorModel m(p);
  const double f_res = m.resonance_frequency();
  // Nominal point: 200 mm at half the band edge.
  CHECK(m.frequency_to_length(0.5 * f_res) == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(m.frequency_to_length(1e-6 * f_res) < 1e-6);

  // Independent evaluation of the length relation.
  for (double frac : {0.1, 0.37, 0.5, 0.8, 0.95}) {
    const double f = frac * f_res;
    const double w2 = two_pi_f_sq(f);
    const double expected = p.k_composite * w2 / (1.0 - p.capacitance * p.i_comp * w2);
    CHECK(m.frequency_to_length(f) == doctest::Approx(expected).epsilon(1e-12));
  }
  try {
    (void)m.frequency_to_length(f_res * 1.0000001);
    FAIL("expected domain error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()) == "frequency beyond sensor band");
  }
}

TEST_CASE("round trip across the band") {
  const SensorModel m;
  const double f_res = m.resonance_frequency();
  double worst = 0.0;
  double prev = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double f = f_res * k / 101.0;
    const double l = m.frequency_to_length(f);
    CHECK(l > prev);
    prev = l;
    worst = std::max(worst, std::abs(m.length_to_frequency(l) - f) / f);
  }
  CHECK(worst < 1e-9);
  for (double l : {105.0, 200.0, 235.0}) {
    const double f = m.length_to_frequency(l);
    CHECK(m.frequency_to_length(f) == doctest::Approx(l).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)m.length_to_frequency(0.0), std::domain_error);
}

TEST_CASE("f_map alignment") {
  const SensorModel m;
  const double f200 = m.length_to_frequency(200.0);
  CHECK(m.map(f200) == doctest::Approx(188.45).epsilon(1e-12));
  // Intercept: vanishing raw length.
  CHECK(m.map(1e-9 * m.resonance_frequency()) == doctest::Approx(2.45).epsilon(1e-9));

  // Slope beta on 20 points.
  for (int k = 1; k <= 20; ++k) {
    const double raw = 10.0 * k;
    const double f = m.length_to_frequency(raw);
    CHECK((m.map(f) - 2.45) / raw == doctest::Approx(0.93).epsilon(1e-10));
  }

  ssilkc::arm::ChamberVec springs{150, 160, 170, 180, 190, 200, 210, 220, 230};
  const auto freqs = m.map_inverse(springs);
  const auto back = m.map(freqs);
  for (std::size_t i = 0; i < 9; ++i) CHECK(back[i] == doctest::Approx(springs[i]).epsilon(1e-12));

  const auto band = m.action_band(150, 230);
  CHECK(band.lo < band.hi);
  CHECK(m.map(band.lo) == doctest::Approx(150).epsilon(1e-12));
  CHECK(m.map(band.hi) == doctest::Approx(230).epsilon(1e-12));
  CHECK(band.hi < m.resonance_frequency());
}

TEST_CASE("sensor params validation") {
  SensorParams p = default_sensor_params();
  p.capacitance = 0;
  CHECK_THROWS(SensorModel{p});
  p = default_sensor_params();
  CHECK(p.n_turns() > 0);
}
