#include "slowshift/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "slowshift/error.hpp"

namespace slowshift {

namespace {

constexpr cplx kI{0.0, 1.0};

// Sum of both group densities over a slice: the integrand of the response.
std::vector<double> total_density(const ProfileSlice& s) {
  std::vector<double> f(s.a.density.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = s.a.density[i] + s.b.density[i];
  return f;
}

// ∫ F(Δ) / (hw + i(f - Δ)) dΔ over the grid (F piecewise linear) plus the
// constant edge values carried to ±cutoff.
cplx response_integral(const DetuningGrid& grid, const std::vector<double>& F, double cutoff, double hw,
                       double f) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  auto logu = [&](double d) { return std::log(cplx(hw, f - d)); };
  cplx acc = 0.0;
  double slope_sum = 0.0;
  cplx l_prev = logu(grid[0]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const cplx l_next = logu(grid[k + 1]);
    const double s = (F[k + 1] - F[k]) / h;
    if (F[k] != 0.0 || s != 0.0) {
      const cplx c0 = F[k] + s * cplx(f - grid[k], -hw);
      acc += c0 * (l_next - l_prev);
    }
    slope_sum += s;
    l_prev = l_next;
  }
  acc += F[n - 1] * (logu(cutoff) - logu(grid[n - 1]));
  acc += F[0] * (logu(grid[0]) - logu(-cutoff));
  return kI * (acc + slope_sum * h);
}

void check_gamma(double gamma_h_khz) {
  require(gamma_h_khz > 0.0 && std::isfinite(gamma_h_khz), ErrorKind::InvalidParameter,
          "homogeneous linewidth must be positive and finite");
}

// ∫ gamma(f, z) dz over the crystal, on profiles already translated.
std::vector<cplx> integrated_exponent(const IonEnsemble& e, std::span<const double> freqs) {
  std::vector<cplx> out(freqs.size(), cplx(0.0));
  for (std::size_t k = 0; k < e.slices.size(); ++k) {
    const double len = e.slices[k].z_end_mm - e.slices[k].z_begin_mm;
    Susceptibility s = susceptibility(e, freqs, e.medium.gamma_h_khz, k);
    for (std::size_t i = 0; i < freqs.size(); ++i) out[i] += s.gamma[i] * len;
  }
  return out;
}

}  // namespace

Susceptibility susceptibility(const IonEnsemble& e, std::span<const double> freqs, double gamma_h_khz,
                              std::size_t slice) {
  check_gamma(gamma_h_khz);
  require(slice < e.slices.size(), ErrorKind::OutOfRange, "slice index out of range");
  const auto F = total_density(e.slices[slice]);
  const double hw = 0.5e-3 * gamma_h_khz;  // HWHM in MHz
  const double scale = e.medium.alpha0_per_mm / kTwoPi;
  Susceptibility out;
  out.frequency_mhz.assign(freqs.begin(), freqs.end());
  out.gamma.resize(freqs.size());
  const auto count = static_cast<std::ptrdiff_t>(freqs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i)
    out.gamma[i] = scale * response_integral(e.grid, F, e.medium.tail_cutoff_mhz, hw, freqs[i]);
  return out;
}

Susceptibility susceptibility(const IonEnsemble& e, std::size_t slice) {
  const auto pts = e.grid.points();
  return susceptibility(e, pts, e.medium.gamma_h_khz, slice);
}

TransferFunction::TransferFunction(std::vector<double> f, std::vector<cplx> h) : freq_(std::move(f)), h_(std::move(h)) {
  require(freq_.size() == h_.size(), ErrorKind::InvalidParameter, "transfer function size mismatch");
}

std::vector<double> TransferFunction::phase() const {
  std::vector<double> p(h_.size());
  for (std::size_t i = 0; i < h_.size(); ++i) {
    p[i] = std::arg(h_[i]);
    if (i > 0) {
      double d = p[i] - p[i - 1];
      p[i] -= kTwoPi * std::round(d / kTwoPi);
    }
  }
  return p;
}

std::vector<double> TransferFunction::group_delay() const {
  const auto p = phase();
  const std::size_t n = p.size();
  std::vector<double> tau(n, 0.0);
  if (n < 2) return tau;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = i == 0 ? 0 : i - 1;
    std::size_t b = i + 1 == n ? n - 1 : i + 1;
    tau[i] = -(p[b] - p[a]) / (kTwoPi * (freq_[b] - freq_[a]));
  }
  return tau;
}

TransferFunction linear_transfer(const IonEnsemble& ensemble, std::span<const double> freqs, double ds_mhz) {
  check_gamma(ensemble.medium.gamma_h_khz);
  const IonEnsemble e = shift_profiles(ensemble, ds_mhz);
  auto expo = integrated_exponent(e, freqs);
  std::vector<cplx> h(freqs.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::exp(-expo[i]);
  return TransferFunction(std::vector<double>(freqs.begin(), freqs.end()), std::move(h));
}

TransferFunction linear_transfer(const IonEnsemble& ensemble, double ds_mhz) {
  const auto pts = ensemble.grid.points();
  return linear_transfer(ensemble, pts, ds_mhz);
}

double group_delay_at(const IonEnsemble& ensemble, double f, double ds_mhz) {
  constexpr double kStep = 1e-4;
  const IonEnsemble e = shift_profiles(ensemble, ds_mhz);
  const double fs[2] = {f - kStep, f + kStep};
  auto expo = integrated_exponent(e, fs);
  // H = exp(-X); phase = -Im X; delay = -dφ/dω.
  return (expo[1].imag() - expo[0].imag()) / (kTwoPi * 2.0 * kStep);
}

double intensity_loss_at(const IonEnsemble& ensemble, double f, double ds_mhz) {
  const double fs[1] = {f};
  return 1.0 - linear_transfer(ensemble, fs, ds_mhz).power(0);
}

double passband_center(const IonEnsemble& ensemble, double ds_mhz, double guess, double search) {
  require(search > 0.0, ErrorKind::InvalidParameter, "search half-width must be positive");
  const IonEnsemble e = shift_profiles(ensemble, ds_mhz);
  constexpr double kStep = 0.002;
  const auto m = static_cast<std::size_t>(std::ceil(search / kStep));
  std::vector<double> fs(2 * m + 1);
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] = guess + kStep * (static_cast<double>(i) - static_cast<double>(m));
  auto expo = integrated_exponent(e, fs);
  // Maximum transmission = minimum of Re X.
  std::size_t best = 0;
  for (std::size_t i = 1; i < fs.size(); ++i)
    if (expo[i].real() < expo[best].real()) best = i;
  if (best == 0 || best + 1 == fs.size()) return fs[best];
  const double y0 = expo[best - 1].real(), y1 = expo[best].real(), y2 = expo[best + 1].real();
  const double den = y0 - 2.0 * y1 + y2;
  const double off = den > 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
  return fs[best] + off * kStep;
}

std::vector<cplx> propagate_linear(const IonEnsemble& ensemble, std::span<const cplx> input, double dt_us,
                                   double ds_mhz) {
  require(dt_us > 0.0, ErrorKind::InvalidParameter, "time step must be positive");
  require(!input.empty(), ErrorKind::InvalidInput, "empty input envelope");
  const std::size_t n = detail::next_pow2(2 * input.size());
  std::vector<cplx> x(n, cplx(0.0));
  std::copy(input.begin(), input.end(), x.begin());
  detail::fft_forward(x);

  double peak = 0.0;
  for (const auto& v : x) peak = std::max(peak, std::abs(v));
  std::vector<std::size_t> idx;
  std::vector<double> freqs;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(x[k]) > 1e-13 * peak) {
      idx.push_back(k);
      freqs.push_back(detail::fft_frequency(k, n, dt_us));
    }
  }
  auto tf = linear_transfer(ensemble, freqs, ds_mhz);
  std::vector<cplx> y(n, cplx(0.0));
  for (std::size_t j = 0; j < idx.size(); ++j) y[idx[j]] = x[idx[j]] * tf.values()[j];
  detail::fft_backward(y);
  std::vector<cplx> out(input.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] / static_cast<double>(n);
  return out;
}

double kramers_kronig_deviation(const IonEnsemble& e, int refine, double margin_mhz, std::size_t slice) {
  require(refine >= 1, ErrorKind::InvalidParameter, "refinement factor must be >= 1");
  const DetuningGrid& g = e.grid;
  const double hr = g.spacing() / refine;
  const std::size_t nr = (g.size() - 1) * static_cast<std::size_t>(refine) + 1;
  std::vector<double> nu(nr);
  for (std::size_t j = 0; j < nr; ++j) nu[j] = g.front() + hr * static_cast<double>(j);

  const auto fine = susceptibility(e, nu, e.medium.gamma_h_khz, slice);
  std::vector<double> A(nr);
  for (std::size_t j = 0; j < nr; ++j) A[j] = fine.gamma[j].real();

  // ln|m - j| table for nodes on the refined grid.
  std::vector<double> lnk(nr + 1, 0.0);
  for (std::size_t k = 1; k <= nr; ++k) lnk[k] = std::log(static_cast<double>(k));
  const double lnh = std::log(hr);
  const double cutoff = e.medium.tail_cutoff_mhz;
  const double a_hi = A.back(), a_lo = A.front();

  double worst = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < nr; m += static_cast<std::size_t>(refine)) {
    const double w = nu[m];
    if (w < g.front() + margin_mhz || w > g.back() - margin_mhz) continue;
    // PV ∫ A(ν)/(ω-ν) dν, piecewise linear A.
    double pv = 0.0;
    for (std::size_t j = 0; j + 1 < nr; ++j) {
      const double q = (A[j + 1] - A[j]) / hr;
      const double p = A[j] + q * (w - nu[j]);
      double lj = 0.0, lj1 = 0.0;
      if (j != m) lj = lnh + lnk[j > m ? j - m : m - j];
      if (j + 1 != m) lj1 = lnh + lnk[j + 1 > m ? j + 1 - m : m - j - 1];
      // Logs at the node ω = ν_m cancel between its two segments.
      double seg = 0.0;
      if (j != m) seg += p * lj;
      if (j + 1 != m) seg -= p * lj1;
      pv += seg - q * hr;
    }
    pv += a_hi * (std::log(std::abs(w - nu.back())) - std::log(std::abs(w - cutoff)));
    pv += a_lo * (std::log(std::abs(w + cutoff)) - std::log(std::abs(w - nu.front())));
    const double numeric = -pv / kPi;
    const double analytic = fine.gamma[m].imag();
    worst = std::max(worst, std::abs(numeric - analytic));
    scale = std::max(scale, std::abs(analytic));
  }
  require(scale > 0.0, ErrorKind::InvalidInput, "no dispersion on the grid interior");
  return worst / scale;
}

double eq1_velocity(double n, double ratio) {
  require(n > 0.0 && ratio >= 0.0, ErrorKind::InvalidParameter, "eq1 needs n > 0 and ratio >= 0");
  return (kSpeedOfLight * 1e3 / n) / (1.0 + ratio);
}

double eq4_velocity(double gamma_mhz, double alpha_half) {
  require(gamma_mhz > 0.0 && alpha_half > 0.0, ErrorKind::InvalidParameter,
          "eq4 needs positive filter width and absorption");
  return kTwoPi * gamma_mhz / alpha_half * 1e3;  // mm/µs -> m/s
}

double eq5_loss(double gamma_mhz, double t_ns) {
  require(gamma_mhz >= 0.0 && t_ns >= 0.0 && std::isfinite(gamma_mhz) && std::isfinite(t_ns),
          ErrorKind::InvalidParameter, "eq5 needs non-negative filter width and switch time");
  return -std::expm1(-kTwoPi * gamma_mhz * t_ns * 1e-3);
}

}  // namespace slowshift
