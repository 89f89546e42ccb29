#include <doctest.h>

#include <cmath>
#include <vector>

#include "slowshift/analysis.hpp"
#include "slowshift/error.hpp"

using namespace slowshift;

namespace {

std::vector<cplx> gaussian_tone(std::size_t n, double dt, double f_mhz, double chirp = 0.0) {
  std::vector<cplx> e(n);
  const double t0 = 0.5 * dt * static_cast<double>(n), w = 0.15 * dt * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i) - t0;
    e[i] = std::exp(-0.5 * t * t / (w * w)) * std::polar(1.0, kTwoPi * (f_mhz * t + 0.5 * chirp * t * t));
  }
  return e;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("spectrum locates a tone within one bin") {
  const double dt = 0.002;
  const auto e = gaussian_tone(4000, dt, 3.8);
  const auto s = spectrum(e, dt);
  CHECK(std::abs(s.peak_mhz - 3.8) < s.df_mhz);
  CHECK(s.frequency_mhz.front() < s.frequency_mhz.back());
  double pmax = 0.0;
  for (double p : s.power) pmax = std::max(pmax, p);
  CHECK(pmax == 1.0);
}

TEST_CASE("unwindowed spectrum conserves energy") {
  const double dt = 0.002;
  const auto e = gaussian_tone(3000, dt, -1.2, 0.4);
  const auto s = spectrum(e, dt, Window::None, 4);
  double total = 0.0;
  for (double p : s.power) total += p * s.scale * s.df_mhz;
  CHECK(std::abs(total / envelope_energy(e, dt) - 1.0) < 1e-6);
}

TEST_CASE("spectrum input checks") {
  CHECK(kind_of([] { spectrum(std::vector<cplx>{}, 0.002); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { spectrum(std::vector<cplx>(63, 1.0), 0.002); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { spectrum(std::vector<cplx>(64, 1.0), 0.0); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("beat pattern") {
  const double dt = 0.002;
  const std::vector<cplx> zero(500, 0.0);
  for (double b : beat_pattern(zero, dt, -5.0, 0.3)) CHECK(b == doctest::Approx(0.09));
  const double a = 0.4, f = 2.0, lo = -5.0;
  std::vector<cplx> tone(500);
  for (std::size_t i = 0; i < tone.size(); ++i) tone[i] = std::polar(1.0, kTwoPi * f * dt * static_cast<double>(i));
  const auto b = beat_pattern(tone, dt, lo, a);
  for (std::size_t i = 0; i < b.size(); i += 37) {
    const double t = dt * static_cast<double>(i);
    CHECK(b[i] == doctest::Approx(1.0 + a * a + 2.0 * a * std::cos(kTwoPi * (f - lo) * t)).epsilon(1e-12));
  }
}

TEST_CASE("instantaneous frequency of a tone and a chirp") {
  const double dt = 0.002;
  const auto tone = gaussian_tone(5000, dt, 2.14);
  const auto t = instantaneous_frequency(tone, dt);
  REQUIRE(t.valid_count() > 1000);
  for (std::size_t i = 0; i < t.valid.size(); ++i)
    if (t.valid[i]) CHECK(t.frequency_mhz[i] == doctest::Approx(2.14).epsilon(1e-9));

  const double chirp = 0.001;  // 1 kHz/us
  const auto c = gaussian_tone(5000, dt, 0.0, chirp);
  const auto tc = instantaneous_frequency(c, dt);
  const auto fit = fit_trace(tc, 0.0, 10.0);
  CHECK(std::abs(fit.slope / chirp - 1.0) < 0.02);
  CHECK(fit.r_squared > 0.999);
}

TEST_CASE("instantaneous frequency masks weak samples") {
  const std::vector<cplx> zero(300, 0.0);
  const auto t = instantaneous_frequency(zero, 0.002);
  CHECK(t.valid_count() == 0);
  CHECK(t.times_us.size() == 300);
  const auto tone = gaussian_tone(3000, 0.002, 1.0);
  const auto strict = instantaneous_frequency(tone, 0.002, 0.5);
  const auto loose = instantaneous_frequency(tone, 0.002, 0.05);
  CHECK(strict.valid_count() < loose.valid_count());
  CHECK_FALSE(loose.valid.front());
  CHECK_FALSE(loose.valid.back());
}

TEST_CASE("sideband demodulation recovers the signal frequency") {
  const double dt = 0.002, lo = -5.0;
  const auto tone = gaussian_tone(8192, dt, 2.0);
  const auto b = beat_pattern(tone, dt, lo, 0.01);
  const auto t = instantaneous_frequency_from_beat(b, dt, lo, 0.2);
  REQUIRE(t.valid_count() > 1000);
  const auto fit = fit_trace(t, 6.0, 10.0);
  CHECK(fit.intercept + fit.slope * 8.0 == doctest::Approx(2.0).epsilon(1e-3));
  CHECK_THROWS_AS(instantaneous_frequency_from_beat(b, dt, 0.0), Error);
}

TEST_CASE("line fit") {
  const std::vector<double> x{-22, -11, 0, 11, 22}, y{-4.2, -2.1, 0.0, 2.1, 4.2};
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(4.2 / 22.0));
  CHECK(f.intercept == doctest::Approx(0.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(kind_of([] { fit_line(std::vector<double>{1.0}, std::vector<double>{1.0}); }) == ErrorKind::InvalidInput);
}

TEST_CASE("relative efficiency") {
  const auto e = gaussian_tone(1000, 0.002, 0.0);
  CHECK(relative_efficiency(e, e, 0.002) == doctest::Approx(1.0));
  std::vector<cplx> half(e);
  for (auto& v : half) v *= std::sqrt(0.5);
  CHECK(relative_efficiency(half, e, 0.002) == doctest::Approx(0.5));
  const std::vector<cplx> zero(1000, 0.0);
  CHECK(kind_of([&] { relative_efficiency(e, zero, 0.002); }) == ErrorKind::InvalidReference);
  CHECK(kind_of([&] { relative_efficiency(std::span<const cplx>(e).first(10), e, 0.002); }) == ErrorKind::InvalidInput);
}

TEST_CASE("translation mismatch of a shifted map") {
  ExcitationMap pre, post;
  for (int i = -200; i <= 200; ++i) pre.detuning_mhz.push_back(0.02 * i);
  pre.z_mm = {0.0, 5.0, 10.0};
  post.detuning_mhz = pre.detuning_mhz;
  post.z_mm = pre.z_mm;
  const double ds = 1.0;
  for (double z : pre.z_mm)
    for (double d : pre.detuning_mhz) {
      pre.values.push_back(std::exp(-d * d / 0.2) * (1.0 + 0.1 * z));
      post.values.push_back(std::exp(-(d - ds) * (d - ds) / 0.2) * (1.0 + 0.1 * z));
    }
  CHECK(translation_mismatch(pre, post, ds) < 1e-3);
  CHECK(translation_mismatch(pre, post, 0.0) > 0.5);
  CHECK(translation_mismatch(pre, pre, 0.0) == 0.0);
  CHECK(spatial_extent(pre, 0.5) > 0.0);
}

TEST_CASE("extended-shift loss closed form") {
  CHECK(extended_shift_loss(1.0, 0.0, LossMethod::Eq5) == 0.0);
  CHECK(extended_shift_loss(1.0, 5.0, LossMethod::Eq5) == doctest::Approx(0.0309).epsilon(0.02));
  CHECK(kind_of([] { extended_shift_loss(0.0, 5.0, LossMethod::Eq5); }) == ErrorKind::InvalidParameter);
}

}
