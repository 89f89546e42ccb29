#include <doctest.h>

#include <cmath>

#include "slowshift/ensemble.hpp"
#include "slowshift/error.hpp"

using namespace slowshift;

namespace {

const StarkCoefficient kPrep = StarkCoefficient::khz_per_v_per_cm(109.0);

double at(const IonEnsemble& e, const GroupProfile& g, double detuning) {
  const auto i = static_cast<std::size_t>(std::llround(e.grid.position(detuning)));
  return g.density[i];
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("grid construction") {
  const auto g = DetuningGrid::symmetric(46.0, 0.02);
  CHECK(g.size() == 4601);
  CHECK(g.front() == doctest::Approx(-46.0));
  CHECK(g.back() == doctest::Approx(46.0));
  CHECK(g[2300] == doctest::Approx(0.0));
  CHECK(kind_of([] { DetuningGrid::symmetric(10.0, 0.0); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { DetuningGrid(0.0, 0.1, 50).validate(); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("background") {
  MediumParameters m;
  const auto e = new_background(DetuningGrid::symmetric(10.0, 0.05), m);
  CHECK(e.optical_depth() == doctest::Approx(20.0));
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    CHECK(e.slices[0].a.density[i] + e.slices[0].b.density[i] == 2.0);
    CHECK(e.alpha_total(0, i) == doctest::Approx(m.alpha0_per_mm));
  }
  m.alpha0_per_mm = 0.0;
  CHECK(new_background(DetuningGrid::symmetric(10.0, 0.05), m).optical_depth() == 0.0);
}

TEST_CASE("invalid medium parameters") {
  const auto g = DetuningGrid::symmetric(10.0, 0.05);
  MediumParameters m;
  m.length_mm = 0.0;
  CHECK(kind_of([&] { new_background(g, m); }) == ErrorKind::InvalidParameter);
  m = {};
  m.alpha0_per_mm = -1.0;
  CHECK(kind_of([&] { new_background(g, m); }) == ErrorKind::InvalidParameter);
  m = {};
  m.t2_us = 400.0;
  m.t1_us = 100.0;
  CHECK(kind_of([&] { new_background(g, m); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("burn under 88 V removes displaced ions") {
  const auto bg = new_background(DetuningGrid::symmetric(46.0, 0.02), MediumParameters{});
  const auto e = burn(bg, BurnStep{-9.0, 9.0, 88.0, 0.1, 1.0}, kPrep, 6.0);
  const auto& s = e.slices[0];
  CHECK(at(e, s.a, -16.0) < 1e-9);
  CHECK(at(e, s.a, -8.0) < 1e-6);
  CHECK(at(e, s.a, -24.0) < 1e-6);
  CHECK(at(e, s.a, 0.0) == doctest::Approx(1.0));
  CHECK(at(e, s.b, 16.0) < 1e-9);
  CHECK(at(e, s.b, 8.0) < 1e-6);
  CHECK(at(e, s.b, 0.0) == doctest::Approx(1.0));
  CHECK(at(e, s.b, -16.0) == doctest::Approx(1.0));
}

TEST_CASE("burn depth composes multiplicatively") {
  const auto bg = new_background(DetuningGrid::symmetric(10.0, 0.02), MediumParameters{});
  const auto same = burn(bg, BurnStep{-1.0, 1.0, 0.0, 0.1, 0.0}, kPrep, 6.0);
  CHECK(same.slices[0].a.density == bg.slices[0].a.density);
  const BurnStep half{-1.0, 1.0, 0.0, 0.1, 0.5};
  const auto twice = burn(burn(bg, half, kPrep, 6.0), half, kPrep, 6.0);
  CHECK(at(twice, twice.slices[0].a, 0.0) == doctest::Approx(0.25));
  CHECK(at(twice, twice.slices[0].b, 0.0) == doctest::Approx(0.25));
}

TEST_CASE("burns in disjoint windows commute") {
  const auto bg = new_background(DetuningGrid::symmetric(10.0, 0.02), MediumParameters{});
  const BurnStep w1{-4.0, -2.0, 0.0, 0.1, 0.7}, w2{1.0, 3.0, 0.0, 0.1, 0.4};
  const auto x = burn(burn(bg, w1, kPrep, 6.0), w2, kPrep, 6.0);
  const auto y = burn(burn(bg, w2, kPrep, 6.0), w1, kPrep, 6.0);
  for (std::size_t i = 0; i < bg.grid.size(); ++i)
    CHECK(x.slices[0].a.density[i] == doctest::Approx(y.slices[0].a.density[i]).epsilon(1e-14));
}

TEST_CASE("burn window off the grid") {
  const auto bg = new_background(DetuningGrid::symmetric(10.0, 0.02), MediumParameters{});
  CHECK(kind_of([&] { burn(bg, BurnStep{-9.0, 9.0, 88.0, 0.1, 1.0}, kPrep, 6.0); }) == ErrorKind::OutOfRange);
}

TEST_CASE("frequency shifter structure") {
  const auto e = prepare_frequency_shifter(DetuningGrid::symmetric(46.0, 0.02), MediumParameters{});
  const auto& s = e.slices[0];
  CHECK(at(e, s.a, 0.0) < 1e-3);
  CHECK(at(e, s.b, 0.0) < 1e-3);
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    const double d = std::abs(e.grid[i]);
    if (d < 0.85 || d > 8.7) continue;
    CHECK(s.b.density[i] < 1e-3);
    CHECK(s.a.density[i] > 0.9);
  }
  // Mirrored half hole of group A near -2·shift.
  CHECK(at(e, s.a, -32.0) < 1e-6);
  CHECK(at(e, s.b, -32.0) == doctest::Approx(1.0));
  const auto win = transmission_window(e.grid, combined_profile(e), 0.0, 0.25);
  CHECK(win.second - win.first == doctest::Approx(1.0).epsilon(0.05));
  CHECK(e.guard_band() > 4.28);
}

TEST_CASE("degenerate shifter geometries") {
  const auto g = DetuningGrid::symmetric(46.0, 0.02);
  ShifterGeometry geo;
  geo.narrow_hole_mhz = geo.wide_hole_mhz;
  CHECK(kind_of([&] { prepare_frequency_shifter(g, MediumParameters{}, geo); }) == ErrorKind::InvalidPreparation);
  geo = {};
  geo.prep_voltage_v = 40.0;
  CHECK(kind_of([&] { prepare_frequency_shifter(g, MediumParameters{}, geo); }) == ErrorKind::InvalidPreparation);
}

TEST_CASE("shifted profiles") {
  const auto e = prepare_frequency_shifter(DetuningGrid::symmetric(46.0, 0.02), MediumParameters{});
  const auto same = shift_profiles(e, 0.0);
  CHECK(same.slices[0].a.density == e.slices[0].a.density);
  CHECK(same.slices[0].b.density == e.slices[0].b.density);

  const auto moved = shift_profiles(e, 3.8);
  const auto win = transmission_window(moved.grid, combined_profile(moved), 3.8, 0.25);
  CHECK(0.5 * (win.first + win.second) == doctest::Approx(3.8).epsilon(0.01));

  double last = 1e9;
  for (double ds = 0.0; ds <= 4.5; ds += 0.5) {
    const auto m = shift_profiles(e, ds);
    const auto w = transmission_window(m.grid, combined_profile(m), ds, 0.25);
    CHECK(w.second - w.first <= last + 1e-9);
    last = w.second - w.first;
  }
}

TEST_CASE("grid-aligned shifts compose exactly") {
  const auto e = prepare_frequency_shifter(DetuningGrid::symmetric(46.0, 0.02), MediumParameters{});
  const auto ab = shift_profiles(shift_profiles(e, 1.2), 0.6);
  const auto direct = shift_profiles(e, 1.8);
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    CHECK(ab.slices[0].a.density[i] == doctest::Approx(direct.slices[0].a.density[i]).epsilon(1e-12));
    CHECK(ab.slices[0].b.density[i] == doctest::Approx(direct.slices[0].b.density[i]).epsilon(1e-12));
  }
}

TEST_CASE("shift beyond the guard band") {
  const auto e = prepare_frequency_shifter(DetuningGrid::symmetric(46.0, 0.02), MediumParameters{});
  CHECK(kind_of([&] { shift_profiles(e, e.guard_band() + 0.1); }) == ErrorKind::OutOfRange);
}

TEST_CASE("densities stay in [0, 1]") {
  const auto e = prepare_two_hole(DetuningGrid::symmetric(70.0, 0.05), MediumParameters{}, ShifterGeometry{}, 20.0);
  for (const auto& s : e.slices)
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
      CHECK(s.a.density[i] >= 0.0);
      CHECK(s.a.density[i] <= 1.0);
      CHECK(s.b.density[i] >= 0.0);
      CHECK(s.b.density[i] <= 1.0);
    }
}

TEST_CASE("non-uniform preparation field gives position dependent profiles") {
  const auto f = FieldProfile::quadratic(6.0, 10.0, 0.002);
  const auto e = prepare_frequency_shifter(DetuningGrid::symmetric(46.0, 0.02), MediumParameters{}, ShifterGeometry{}, &f);
  CHECK(e.position_dependent());
  CHECK_NOTHROW(e.validate());
  CHECK(e.slice_at(0.0).z_begin_mm == 0.0);
}

}
