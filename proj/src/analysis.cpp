#include "slowshift/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fft.hpp"
#include "slowshift/csv.hpp"
#include "slowshift/error.hpp"
#include "slowshift/oracle.hpp"

namespace slowshift {

Spectrum spectrum(std::span<const cplx> env, double dt, Window window, int pad) {
  require(!env.empty(), ErrorKind::InvalidInput, "spectrum of an empty envelope");
  require(env.size() >= 64, ErrorKind::InvalidInput, "spectrum needs at least 64 samples");
  require(dt > 0.0 && pad >= 1, ErrorKind::InvalidParameter, "spectrum needs dt > 0 and pad >= 1");
  const std::size_t n = env.size();
  const std::size_t m = detail::next_pow2(static_cast<std::size_t>(pad) * n);
  std::vector<cplx> x(m, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::Hann) w = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
    x[i] = env[i] * w;
  }
  detail::fft_forward(x);

  Spectrum s;
  s.df_mhz = 1.0 / (static_cast<double>(m) * dt);
  s.frequency_mhz.resize(m);
  s.power.resize(m);
  const std::size_t half = m / 2;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t k = (j + half) % m;  // ascending frequency order
    s.frequency_mhz[j] = detail::fft_frequency(k, m, dt);
    s.power[j] = std::norm(x[k] * dt);
  }
  const auto it = std::max_element(s.power.begin(), s.power.end());
  s.scale = *it;
  const auto ip = static_cast<std::size_t>(it - s.power.begin());
  s.peak_mhz = s.frequency_mhz[ip];
  if (s.scale > 0.0) {
    if (ip > 0 && ip + 1 < m) {
      const double a = s.power[ip - 1], b = s.power[ip], c = s.power[ip + 1];
      const double den = a - 2.0 * b + c;
      if (den < 0.0) s.peak_mhz += 0.5 * (a - c) / den * s.df_mhz;
    }
    for (double& p : s.power) p /= s.scale;
  }
  return s;
}

std::vector<double> beat_pattern(std::span<const cplx> env, double dt, double lo, double amp) {
  std::vector<double> out(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) {
    const cplx l = std::polar(amp, kTwoPi * lo * dt * static_cast<double>(i));
    out[i] = std::norm(env[i] + l);
  }
  return out;
}

std::size_t InstFreqTrace::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

InstFreqTrace instantaneous_frequency(std::span<const cplx> env, double dt, double threshold) {
  require(dt > 0.0, ErrorKind::InvalidParameter, "dt must be positive");
  require(threshold >= 0.0 && threshold < 1.0, ErrorKind::InvalidParameter, "threshold must lie in [0, 1)");
  InstFreqTrace t;
  const std::size_t n = env.size();
  t.times_us.resize(n);
  t.frequency_mhz.assign(n, 0.0);
  t.valid.assign(n, false);
  double peak = 0.0;
  for (const auto& v : env) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) t.times_us[i] = dt * static_cast<double>(i);
  if (peak == 0.0 || n < 3) return t;
  const double cut = threshold * peak;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::abs(env[i]) <= cut || std::abs(env[i - 1]) <= cut || std::abs(env[i + 1]) <= cut) continue;
    t.frequency_mhz[i] = std::arg(env[i + 1] * std::conj(env[i - 1])) / (kTwoPi * 2.0 * dt);
    t.valid[i] = true;
  }
  return t;
}

InstFreqTrace instantaneous_frequency_from_beat(std::span<const double> beat, double dt, double lo, double threshold) {
  require(lo != 0.0, ErrorKind::InvalidParameter, "sideband demodulation needs a non-zero LO offset");
  require(std::abs(lo) < 0.5 / dt, ErrorKind::InvalidParameter, "LO offset beyond the Nyquist frequency");
  const std::size_t n = beat.size();
  const std::size_t m = detail::next_pow2(n);
  std::vector<cplx> x(m, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) x[i] = beat[i];
  detail::fft_forward(x);
  // The signal term E·A*·e^{-i2π f_lo τ} sits at f_sig - f_lo.
  const double centre = -lo, half = 0.5 * std::abs(lo);
  for (std::size_t k = 0; k < m; ++k) {
    const double f = detail::fft_frequency(k, m, dt);
    if (std::abs(f - centre) >= half) x[k] = 0.0;
  }
  detail::fft_backward(x);
  std::vector<cplx> sig(n);
  for (std::size_t i = 0; i < n; ++i)
    sig[i] = x[i] / static_cast<double>(m) * std::polar(1.0, kTwoPi * lo * dt * static_cast<double>(i));
  return instantaneous_frequency(sig, dt, threshold);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidInput, "line fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::InvalidInput, "line fit needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

LineFit fit_trace(const InstFreqTrace& t, double lo, double hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.times_us.size(); ++i)
    if (t.valid[i] && t.times_us[i] >= lo && t.times_us[i] <= hi) {
      x.push_back(t.times_us[i]);
      y.push_back(t.frequency_mhz[i]);
    }
  return fit_line(x, y);
}

double envelope_energy(std::span<const cplx> env, double dt) {
  double e = 0.0;
  for (const auto& v : env) e += std::norm(v);
  return e * dt;
}

double relative_efficiency(std::span<const cplx> shifted, std::span<const cplx> reference, double dt) {
  require(shifted.size() == reference.size(), ErrorKind::InvalidInput,
          "efficiency needs runs on the same time base");
  const double ref = envelope_energy(reference, dt);
  require(ref > 0.0, ErrorKind::InvalidReference, "reference run transmitted no energy");
  return envelope_energy(shifted, dt) / ref;
}

double relative_efficiency(const SimResult& shifted, const SimResult& reference) {
  require(shifted.dt_us == reference.dt_us && shifted.grid == reference.grid, ErrorKind::InvalidInput,
          "efficiency needs runs with the same grid and time step");
  require(shifted.input_mhz == reference.input_mhz, ErrorKind::InvalidInput,
          "efficiency needs runs with the same input pulse");
  return relative_efficiency(shifted.transmitted_mhz, reference.transmitted_mhz, shifted.dt_us);
}

namespace {

// Cubic Lagrange interpolation of one grid row at a fractional position;
// linear in the first and last interval, zero outside.
double sample_row(const double* row, std::size_t n, double pos) {
  if (pos < 0.0 || pos > static_cast<double>(n - 1)) return 0.0;
  auto j = static_cast<std::size_t>(pos);
  if (j + 1 >= n) return row[n - 1];
  const double t = pos - static_cast<double>(j);
  if (j == 0 || j + 2 >= n) return row[j] + t * (row[j + 1] - row[j]);
  const double a = t + 1.0, b = t - 1.0, c = t - 2.0;
  return -row[j - 1] * t * b * c / 6.0 + row[j] * a * b * c / 2.0 - row[j + 1] * a * t * c / 2.0 +
         row[j + 2] * a * t * b / 6.0;
}

}  // namespace

ExcitationMap excitation_map(const Snapshot& s, const DetuningGrid& grid) {
  const std::size_t G = grid.size();
  const std::size_t nz = s.z_mm.size();
  require(s.excitation_a.size() == nz * G && s.excitation_b.size() == nz * G, ErrorKind::InvalidInput,
          "snapshot does not match the grid");
  ExcitationMap m;
  m.detuning_mhz = grid.points();
  m.z_mm = s.z_mm;
  m.tau_us = s.tau_us;
  m.values.assign(nz * G, 0.0);
  for (std::size_t k = 0; k < nz; ++k) {
    const double sh = s.stark_shift_mhz * (s.spatial_scale.empty() ? 1.0 : s.spatial_scale[k]);
    const double off = sh / grid.spacing();
    const double* a = s.excitation_a.data() + k * G;
    const double* b = s.excitation_b.data() + k * G;
    for (std::size_t i = 0; i < G; ++i) {
      const double p = static_cast<double>(i);
      m.values[k * G + i] = sample_row(a, G, p - off) + sample_row(b, G, p + off);
    }
  }
  return m;
}

double translation_mismatch(const ExcitationMap& pre, const ExcitationMap& post, double ds) {
  require(pre.values.size() == post.values.size() && pre.detuning_mhz.size() == post.detuning_mhz.size(),
          ErrorKind::InvalidInput, "maps differ in shape");
  const std::size_t G = pre.detuning_mhz.size();
  const std::size_t nz = pre.z_mm.size();
  const double h = pre.detuning_mhz[1] - pre.detuning_mhz[0];
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < nz; ++k) {
    const double* row = pre.values.data() + k * G;
    for (std::size_t i = 0; i < G; ++i) {
      const double moved = sample_row(row, G, static_cast<double>(i) - ds / h);
      const double d = post.values[k * G + i] - moved;
      num += d * d;
      den += row[i] * row[i];
    }
  }
  require(den > 0.0, ErrorKind::InvalidInput, "reference map is empty");
  return std::sqrt(num / den);
}

double map_energy(const ExcitationMap& m, const IonEnsemble& e) {
  const std::size_t G = m.detuning_mhz.size();
  const std::size_t nz = m.z_mm.size();
  require(nz >= 2, ErrorKind::InvalidInput, "map needs two or more z nodes");
  const double dz = m.z_mm[1] - m.z_mm[0];
  const double hang = kTwoPi * (m.detuning_mhz[1] - m.detuning_mhz[0]);
  double total = 0.0;
  for (std::size_t k = 0; k < nz; ++k) {
    const double wz = (k == 0 || k + 1 == nz) ? 0.5 * dz : dz;
    double row = 0.0;
    for (std::size_t i = 0; i < G; ++i) row += ((i == 0 || i + 1 == G) ? 0.5 : 1.0) * m.at(k, i);
    total += wz * row * hang;
  }
  return 2.0 * e.medium.alpha0_per_mm / kPi * total;
}

double spatial_extent(const ExcitationMap& m, double fraction) {
  require(fraction > 0.0 && fraction < 1.0, ErrorKind::InvalidParameter, "fraction must lie in (0, 1)");
  const std::size_t G = m.detuning_mhz.size();
  const std::size_t nz = m.z_mm.size();
  std::vector<double> cum(nz + 1, 0.0);
  for (std::size_t k = 0; k < nz; ++k) {
    double row = 0.0;
    for (std::size_t i = 0; i < G; ++i) row += m.at(k, i);
    cum[k + 1] = cum[k] + row;
  }
  const double total = cum.back();
  require(total > 0.0, ErrorKind::InvalidInput, "map holds no excitation");
  const double lo_level = 0.5 * (1.0 - fraction) * total, hi_level = (1.0 - 0.5 * (1.0 - fraction)) * total;
  auto locate = [&](double level) {
    for (std::size_t k = 0; k < nz; ++k)
      if (cum[k + 1] >= level) {
        const double t = (level - cum[k]) / (cum[k + 1] - cum[k]);
        const double dz = nz > 1 ? m.z_mm[1] - m.z_mm[0] : 0.0;
        return m.z_mm[k] + (t - 0.5) * dz;
      }
    return m.z_mm.back();
  };
  return locate(hi_level) - locate(lo_level);
}

double extended_shift_loss(double gamma_mhz, double t_ns, LossMethod method, const ExtendedShiftOptions& o) {
  require(gamma_mhz > 0.0 && t_ns >= 0.0, ErrorKind::InvalidParameter,
          "loss needs a positive filter width and non-negative switch time");
  if (method == LossMethod::Eq5) return eq5_loss(gamma_mhz, t_ns);
  ShifterGeometry geo = o.geometry;
  geo.narrow_hole_mhz = gamma_mhz;
  const double reach = geo.coefficient.mhz_per_v_per_mm() * geo.prep_voltage_v / geo.gap_mm * 2.0 +
                       0.5 * geo.wide_hole_mhz + 3.0 * geo.edge_width_mhz;
  const double needed = std::max(reach, 2.0 * o.hop_mhz + 0.5 * geo.wide_hole_mhz + 3.0 * geo.edge_width_mhz) + o.hop_mhz;
  require(o.grid_half_span_mhz >= needed, ErrorKind::Precondition,
          "detuning grid of ±" + format_number(o.grid_half_span_mhz) + " MHz is too small for a " +
              format_number(o.hop_mhz) + " MHz two-hole hop (needs ±" + format_number(needed) + " MHz)");
  const auto grid = DetuningGrid::symmetric(o.grid_half_span_mhz, o.grid_spacing_mhz);
  const IonEnsemble e = prepare_two_hole(grid, o.medium, geo, o.hop_mhz);

  SolverOptions so;
  so.dt_us = o.dt_us;
  so.dz_mm = o.dz_mm;
  so.threads = o.threads;
  so.window_us = automatic_window(e, o.pulse) + 2.0 + 1e-3 * t_ns;
  const SimResult base = propagate(e, o.pulse, StarkDrive::none(), so);
  // Switch when the largest share of the pulse is inside the crystal.
  std::size_t best = 0;
  for (std::size_t n = 0; n < base.tau_us.size(); ++n)
    if (base.energy.entered[n] - base.energy.exited[n] > base.energy.entered[best] - base.energy.exited[best])
      best = n;
  const StarkDrive drive(o.hop_mhz, base.tau_us[best], 1e-3 * t_ns,
                         FieldProfile::uniform(geo.gap_mm, o.medium.length_mm));
  const SimResult hop = propagate(e, o.pulse, drive, so);
  return 1.0 - relative_efficiency(hop, base);
}

void write_spectrum_csv(const Spectrum& s, std::ostream& out) {
  out << "frequency_mhz,power\n";
  for (std::size_t i = 0; i < s.power.size(); ++i)
    out << format_number(s.frequency_mhz[i]) << ',' << format_number(s.power[i]) << '\n';
}

void write_trace_csv(const InstFreqTrace& t, std::ostream& out) {
  out << "tau_us,frequency_mhz,valid\n";
  for (std::size_t i = 0; i < t.times_us.size(); ++i)
    out << format_number(t.times_us[i]) << ',' << format_number(t.frequency_mhz[i]) << ',' << (t.valid[i] ? 1 : 0)
        << '\n';
}

void write_beat_csv(const std::vector<double>& tau, const std::vector<double>& beat, std::ostream& out) {
  out << "tau_us,intensity\n";
  for (std::size_t i = 0; i < tau.size(); ++i) out << format_number(tau[i]) << ',' << format_number(beat[i]) << '\n';
}

void write_map_csv(const ExcitationMap& m, std::ostream& out, std::size_t z_stride, double max_abs) {
  require(z_stride >= 1, ErrorKind::InvalidParameter, "z stride must be >= 1");
  const std::size_t G = m.detuning_mhz.size();
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < m.z_mm.size(); k += z_stride) cols.push_back(k);
  if (cols.back() + 1 != m.z_mm.size()) cols.push_back(m.z_mm.size() - 1);
  // Axis labels are rounded to 1e-9 so that k·dz prints as written.
  auto axis = [](double v) { return format_number(std::round(v * 1e9) / 1e9); };
  out << "detuning_mhz";
  for (auto k : cols) out << ",z_" << axis(m.z_mm[k]);
  out << '\n';
  for (std::size_t i = 0; i < G; ++i) {
    if (std::abs(m.detuning_mhz[i]) > max_abs) continue;
    out << axis(m.detuning_mhz[i]);
    for (auto k : cols) out << ',' << format_number(m.at(k, i));
    out << '\n';
  }
}

}  // namespace slowshift
