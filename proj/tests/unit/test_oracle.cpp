#include <doctest.h>

#include <cmath>
#include <vector>

#include "slowshift/oracle.hpp"
#include "slowshift/units.hpp"

using namespace slowshift;

namespace {

IonEnsemble shifter() { return prepare_frequency_shifter(DetuningGrid::symmetric(46.0, 0.02), MediumParameters{}); }

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("flat background absorbs at alpha0 with only the cutoff slope") {
  const auto e = new_background(DetuningGrid::symmetric(20.0, 0.02), MediumParameters{});
  const std::vector<double> f{-0.01, 0.0, 0.01};
  const auto s = susceptibility(e, f, 1.0);
  CHECK(s.field_absorption(1) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(s.intensity_absorption(1) == doctest::Approx(4.0).epsilon(1e-6));
  // A band flat out to ±C disperses as (alpha0/π)·ln((C+f)/(C-f)), slope 2·alpha0/(π·C).
  const double c = e.medium.tail_cutoff_mhz;
  CHECK(std::abs(s.wavenumber(2) - s.wavenumber(0)) / 0.02 == doctest::Approx(2.0 * 2.0 / (kPi * c)).epsilon(1e-3));
}

TEST_CASE("residual absorption inside a sharp 1 MHz hole") {
  MediumParameters m;
  const auto hole = prepare_hole(DetuningGrid::symmetric(20.0, 0.02), m, 0.0, 1.0, 0.0);
  // Depth-20 background: intensity OD of the surroundings is 2·alpha0·L/2 per group pair.
  const double loss = intensity_loss_at(hole, 0.0);
  CHECK(loss > 0.01);
  CHECK(loss < 0.03);
}

TEST_CASE("frequency shifter centre loss") {
  const double loss = intensity_loss_at(shifter(), 0.0);
  CHECK(loss >= 0.01);
  CHECK(loss <= 0.04);
}

TEST_CASE("group velocity against the hole estimate") {
  const auto e = shifter();
  const double tau = group_delay_at(e, 0.0);
  CHECK(tau > 0.0);
  const double v = e.medium.length_mm / tau * 1e3;  // m/s
  // Around the window only one group absorbs: intensity coefficient alpha0.
  const double v4 = eq4_velocity(1.0, 0.5 * e.medium.alpha0_per_mm);
  CHECK(std::abs(v - v4) / v4 < 0.3);
}

TEST_CASE("transparent medium transmits everything") {
  MediumParameters m;
  m.alpha0_per_mm = 0.0;
  const auto e = new_background(DetuningGrid::symmetric(10.0, 0.05), m);
  const auto h = linear_transfer(e, linspace(-5, 5, 101));
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(h.values()[i] - cplx(1.0)) < 1e-15);
}

TEST_CASE("passivity and positive delay in the window") {
  const auto e = shifter();
  for (double ds : {0.0, 2.0, -3.5}) {
    const auto h = linear_transfer(e, linspace(-10, 10, 2001), ds);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(h.values()[i]) <= 1.0);
    CHECK(group_delay_at(e, ds, ds) > 0.0);
  }
}

TEST_CASE("static passband follows the Stark coefficient") {
  const auto e = shifter();
  const double k = 1.167;  // MHz per V/mm
  std::vector<double> v{-22, -11, 0, 11, 22}, c;
  for (double x : v) {
    const double ds = k * x / 6.0;
    c.push_back(passband_center(e, ds, ds));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sx += v[i];
    sy += c[i];
    sxx += v[i] * v[i];
    sxy += v[i] * c[i];
  }
  const double n = static_cast<double>(v.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(k / 6.0).epsilon(0.03));
  CHECK(std::abs(c[1] - k * -11.0 / 6.0) < 0.01);
}

TEST_CASE("Kramers-Kronig consistency") {
  CHECK(kramers_kronig_deviation(shifter()) < 1e-3);
  const auto hole = prepare_hole(DetuningGrid::symmetric(20.0, 0.02), MediumParameters{}, 0.0, 1.0, 0.1);
  CHECK(kramers_kronig_deviation(hole) < 1e-3);
}

TEST_CASE("closed-form estimates") {
  CHECK(eq5_loss(1.0, 5.0) == doctest::Approx(1.0 - std::exp(-0.0314159)).epsilon(1e-5));
  CHECK(eq5_loss(1.0, 5.0) == doctest::Approx(0.031).epsilon(0.01));
  CHECK(eq5_loss(2.5, 0.0) == 0.0);
  CHECK(eq1_velocity(1.8, 66666.0) == doctest::Approx(2500.0).epsilon(0.002));
  CHECK(eq4_velocity(1.0, 1.0) == doctest::Approx(kTwoPi * 1e3).epsilon(1e-12));
}

TEST_CASE("linear propagation of a tone-free pulse through a transparent medium") {
  MediumParameters m;
  m.alpha0_per_mm = 0.0;
  const auto e = new_background(DetuningGrid::symmetric(10.0, 0.05), m);
  std::vector<cplx> in(512);
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = std::exp(-std::pow((static_cast<double>(i) - 200.0) / 30.0, 2));
  const auto out = propagate_linear(e, in, 0.01);
  for (std::size_t i = 0; i < in.size(); ++i) CHECK(std::abs(out[i] - in[i]) < 1e-6);
}

}
