#include <doctest.h>

#include <cmath>
#include <sstream>

#include "slowshift/error.hpp"
#include "slowshift/stark.hpp"

using namespace slowshift;

TEST_SUITE("stark") {

TEST_CASE("cosine projection of the dipole difference") {
  const auto c = effective_coefficient(DipoleGeometry{111.6, 12.4});
  CHECK(c.khz_per_v_per_cm() == doctest::Approx(109.0).epsilon(5e-4));
  CHECK(c.mhz_per_v_per_mm() == doctest::Approx(1.090).epsilon(5e-4));
  CHECK(effective_coefficient(DipoleGeometry{111.6, 0.0}).khz_per_v_per_cm() == 111.6);
  CHECK(StarkCoefficient::khz_per_v_per_cm(116.7).mhz_per_v_per_mm() == doctest::Approx(1.167));
}

TEST_CASE("static shifts") {
  const auto f = FieldProfile::uniform(6.0, 10.0);
  CHECK(shift_at(88.0, f, StarkCoefficient::khz_per_v_per_cm(109.0), 5.0) == doctest::Approx(16.0).epsilon(2e-3));
  CHECK(shift_at(17.0, f, StarkCoefficient::khz_per_v_per_cm(116.7), 5.0) == doctest::Approx(3.31).epsilon(2e-3));
  for (double z : {0.0, 2.5, 10.0}) CHECK(shift_at(0.0, f, StarkCoefficient::khz_per_v_per_cm(116.7), z) == 0.0);
}

TEST_CASE("shift is linear in V and z independent for a uniform field") {
  const auto f = FieldProfile::uniform(6.0, 10.0);
  const auto k = StarkCoefficient::khz_per_v_per_cm(116.7);
  for (double a : {-3.0, 0.5, 2.0})
    CHECK(shift_at(a * 7.0, f, k, 3.0) == doctest::Approx(a * shift_at(7.0, f, k, 3.0)).epsilon(1e-14));
  CHECK(shift_at(7.0, f, k, 0.0) == shift_at(7.0, f, k, 10.0));
}

TEST_CASE("positions outside the crystal are refused") {
  const auto f = FieldProfile::uniform(6.0, 10.0);
  try {
    shift_at(10.0, f, StarkCoefficient::khz_per_v_per_cm(116.7), 10.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfRange);
  }
}

TEST_CASE("quadratic field profile") {
  const auto f = FieldProfile::quadratic(6.0, 10.0, 0.002);
  CHECK(f.epsilon_at(5.0) == doctest::Approx(0.0));
  CHECK(f.epsilon_at(0.0) == doctest::Approx(-0.002));
  CHECK(f.epsilon_at(10.0) == doctest::Approx(-0.002));
  CHECK_FALSE(f.is_uniform());
  CHECK(f.max_abs_epsilon() == doctest::Approx(0.002));
}

TEST_CASE("field profile csv") {
  std::istringstream ok("z_mm,epsilon\n0,0.001\n5,0\n10,0.001\n");
  const auto f = FieldProfile::read_csv(ok, 6.0, 10.0);
  CHECK(f.epsilon_at(2.5) == doctest::Approx(0.0005));
  std::istringstream bad("0,0\n5,x\n10,0\n");
  CHECK_THROWS_AS(FieldProfile::read_csv(bad, 6.0, 10.0), Error);
}

TEST_CASE("heaviside step for zero rise time") {
  const auto d = step_drive(11.0, 3.0, 0.0, FieldProfile::uniform(6.0, 10.0), StarkCoefficient::khz_per_v_per_cm(116.7));
  const double amp = 1.167 * 11.0 / 6.0;
  CHECK(d.waveform(2.999999) == 0.0);
  CHECK(d.waveform(3.0) == doctest::Approx(amp));
  CHECK(d.waveform(50.0) == doctest::Approx(amp));
}

TEST_CASE("raised-cosine rise of 0.2 us") {
  const auto d = step_drive(11.0, 1.0, 0.2, FieldProfile::uniform(6.0, 10.0), StarkCoefficient::khz_per_v_per_cm(116.7));
  const double amp = d.amplitude_mhz();
  auto crossing = [&](double level) {
    double lo = 1.0, hi = 1.2;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (d.waveform(mid) < level * amp ? lo : hi) = mid;
    }
    return lo;
  };
  CHECK(crossing(0.9) - crossing(0.1) == doctest::Approx(0.118).epsilon(0.01));
  CHECK(d.waveform(1.0) == 0.0);
  CHECK(d.waveform(1.2) == doctest::Approx(amp));
  for (double t = 1.0; t < 1.2; t += 0.01) CHECK(d.waveform(t + 0.01) >= d.waveform(t));
}

TEST_CASE("switch time beyond the window gives no drive in the window") {
  const auto d = step_drive(22.0, 100.0, 0.0, FieldProfile::uniform(6.0, 10.0), StarkCoefficient::khz_per_v_per_cm(116.7));
  for (double t = 0.0; t < 20.0; t += 0.5) CHECK(d.waveform(t) == 0.0);
}

TEST_CASE("spatial scale follows the field profile") {
  const auto d = step_drive(10.0, 0.0, 0.0, FieldProfile::quadratic(6.0, 10.0, 0.002),
                            StarkCoefficient::khz_per_v_per_cm(116.7));
  CHECK(d.at(1.0, 0.0) == doctest::Approx(d.amplitude_mhz() * 0.998));
  CHECK(d.at(1.0, 5.0) == doctest::Approx(d.amplitude_mhz()));
  CHECK(d.max_abs_shift() == doctest::Approx(d.amplitude_mhz()));
}

}
