#include <doctest.h>

#include <cmath>
#include <limits>

#include "slowshift/analysis.hpp"
#include "slowshift/error.hpp"
#include "slowshift/oracle.hpp"
#include "slowshift/solver.hpp"

using namespace slowshift;

namespace {

MediumParameters thin(double alpha0) {
  MediumParameters m;
  m.alpha0_per_mm = alpha0;
  return m;
}

IonEnsemble small_hole(double alpha0 = 0.3) {
  return prepare_hole(DetuningGrid::symmetric(6.0, 0.05), thin(alpha0), 0.0, 1.0, 0.1);
}

SolverOptions coarse() {
  SolverOptions o;
  o.dt_us = 0.004;
  o.dz_mm = 0.25;
  return o;
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("transparent medium leaves the envelope unchanged") {
  const auto e = new_background(DetuningGrid::symmetric(6.0, 0.05), thin(0.0));
  const auto r = propagate(e, PulseSpec{}, StarkDrive::none(), coarse());
  CHECK(rel_l2(r.transmitted_mhz, r.input_mhz) < 1e-12);
  CHECK(energy_partition(r, 2.0).u_med == 0.0);
}

TEST_CASE("weak probe agrees with the linear transfer") {
  const auto e = small_hole();
  const auto r = propagate(e, PulseSpec{}, StarkDrive::none(), coarse());
  const auto lin = propagate_linear(e, r.input_mhz, r.dt_us);
  CHECK(rel_l2(r.transmitted_mhz, lin) < 1e-2);
  CHECK(r.transmitted_energy() <= r.input_energy());
}

TEST_CASE("weak-probe response is linear in the drive amplitude") {
  const auto e = small_hole();
  PulseSpec p;
  const auto full = propagate(e, p, StarkDrive::none(), coarse());
  p.peak_rabi_mhz *= 0.5;
  const auto half = propagate(e, p, StarkDrive::none(), coarse());
  std::vector<cplx> scaled(half.transmitted_mhz.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = 2.0 * half.transmitted_mhz[i];
  CHECK(rel_l2(scaled, full.transmitted_mhz) < 1e-3);
}

TEST_CASE("Bloch norm is preserved without relaxation") {
  MediumParameters m = thin(0.3);
  m.t1_us = 1e12;
  m.t2_us = 1e12;
  const auto e = prepare_hole(DetuningGrid::symmetric(6.0, 0.05), m, 0.0, 1.0, 0.1);
  PulseSpec p;
  p.peak_rabi_mhz = 0.3;  // well out of the linear regime
  const auto r = propagate(e, p, StarkDrive::none(), coarse());
  CHECK(r.diagnostics.max_norm_excess <= 1e-6);
}

TEST_CASE("opposite voltages mirror the output of a symmetric structure") {
  const auto e = small_hole();
  const auto f = FieldProfile::uniform(6.0, 10.0);
  const auto k = StarkCoefficient::khz_per_v_per_cm(116.7);
  SolverOptions o = coarse();
  o.window_us = 10.0;
  const auto up = propagate(e, PulseSpec{}, step_drive(5.0, 2.5, 0.0, f, k), o);
  const auto down = propagate(e, PulseSpec{}, step_drive(-5.0, 2.5, 0.0, f, k), o);
  std::vector<cplx> mirrored(down.transmitted_mhz.size());
  for (std::size_t i = 0; i < mirrored.size(); ++i) mirrored[i] = std::conj(down.transmitted_mhz[i]);
  CHECK(rel_l2(mirrored, up.transmitted_mhz) < 1e-9);
  auto centroid = [](const SimResult& r) {
    const auto s = spectrum(r.transmitted_mhz, r.dt_us);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.power.size(); ++i) {
      num += s.frequency_mhz[i] * s.power[i];
      den += s.power[i];
    }
    return num / den;
  };
  CHECK(centroid(up) == doctest::Approx(-centroid(down)).epsilon(1e-6));
}

TEST_CASE("snapshot energy matches the history and the map") {
  const auto e = small_hole(1.0);
  SolverOptions o = coarse();
  o.dz_mm = 0.1;
  o.snapshot_times_us = {2.4};
  const auto r = propagate(e, PulseSpec{}, StarkDrive::none(), o);
  REQUIRE(r.snapshots.size() == 1);
  const auto& s = r.snapshots[0];
  const auto from_snap = energy_partition(s, e);
  const auto from_hist = energy_partition(r, s.tau_us);
  CHECK(from_snap.u_med == doctest::Approx(from_hist.u_med).epsilon(1e-9));
  CHECK(from_snap.u_em == doctest::Approx(from_hist.u_em).epsilon(1e-9));

  double tail = 0.0;
  const double dz = s.z_mm[1] - s.z_mm[0];
  for (std::size_t k = 0; k < s.z_mm.size(); ++k)
    tail += ((k == 0 || k + 1 == s.z_mm.size()) ? 0.5 : 1.0) * dz * s.tail_excitation[k];
  tail *= 2.0 * e.medium.alpha0_per_mm / kPi;
  const auto map = excitation_map(s, e.grid);
  CHECK(map_energy(map, e) + tail == doctest::Approx(from_snap.u_med).epsilon(1e-10));
}

TEST_CASE("ground-state ensemble has an empty excitation map") {
  PulseSpec p;
  p.peak_rabi_mhz = 0.0;
  SolverOptions o = coarse();
  o.snapshot_times_us = {1.0};
  const auto r = propagate(small_hole(), p, StarkDrive::none(), o);
  const auto map = excitation_map(r.snapshots[0], r.grid);
  for (double v : map.values) CHECK(v == 0.0);
}

TEST_CASE("stepping preconditions") {
  const auto e = prepare_frequency_shifter(DetuningGrid::symmetric(46.0, 0.02), MediumParameters{});
  SolverOptions o;
  o.dt_us = 0.01;  // dt·max|Δ| = 0.46
  CHECK_THROWS_AS(check_preconditions(e, PulseSpec{}, StarkDrive::none(), o), Error);
  o = {};
  o.dz_mm = 0.2;  // alpha0·dz = 0.4
  CHECK_THROWS_AS(check_preconditions(e, PulseSpec{}, StarkDrive::none(), o), Error);
  o = {};
  const auto far = step_drive(40.0, 1.0, 0.0, FieldProfile::uniform(6.0, 10.0), StarkCoefficient::khz_per_v_per_cm(116.7));
  try {
    check_preconditions(e, PulseSpec{}, far, o);
    FAIL("expected a refusal");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::Precondition);
  }
  CHECK_NOTHROW(check_preconditions(e, PulseSpec{}, StarkDrive::none(), o));
}

TEST_CASE("short windows are refused") {
  SolverOptions o = coarse();
  o.window_us = 2.5;  // pulse peak at 2 us
  CHECK_THROWS_AS(propagate(small_hole(), PulseSpec{}, StarkDrive::none(), o), Error);
}

TEST_CASE("single-ion closed forms") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(rabi_reference(0.0, 0.5, 1.0, inf, inf)[2] == doctest::Approx(1.0).epsilon(1e-12));
  const auto frozen = rabi_reference(0.3, 0.0, 5.0, inf, inf);
  CHECK(frozen[2] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rabi_reference(0.3, 0.0, 5.0, 164.0, 318.0)[2] == doctest::Approx(-1.0));
  // Generalized Rabi frequency sqrt(0.3² + 0.4²) = 0.5 MHz.
  CHECK(rabi_reference(0.3, 0.4, 2.0, inf, inf)[2] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rabi_reference(0.3, 0.4, 1.0, inf, inf)[2] == doctest::Approx(-1.0 + 2.0 * 0.64).epsilon(1e-12));
  for (double t : {0.3, 1.7, 4.1}) {
    const auto a = rabi_reference(0.3, 0.4, t, inf, inf);
    const auto b = rabi_rotation(0.3, 0.4, t);
    for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }
}

TEST_CASE("RK4 stepper against the damped closed form") {
  const auto path = integrate_single_ion(0.3, 0.4, 2.0, 0.002, 164.0, 318.0);
  REQUIRE(path.size() == 1001);
  double worst = 0.0;
  for (std::size_t n = 0; n < path.size(); n += 50)
    worst = std::max(worst, std::abs(path[n][2] - rabi_reference(0.3, 0.4, 0.002 * n, 164.0, 318.0)[2]));
  CHECK(worst < 1e-6);
}

}
