#include "slowshift/solver.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "bloch_kernel.hpp"
#include "slowshift/csv.hpp"
#include "slowshift/error.hpp"
#include "slowshift/oracle.hpp"

namespace slowshift {

// ---- pulse ----------------------------------------------------------------

void PulseSpec::validate() const {
  require(std::isfinite(peak_rabi_mhz) && peak_rabi_mhz >= 0.0, ErrorKind::InvalidParameter,
          "peak Rabi frequency must be non-negative");
  require(std::isfinite(center_detuning_mhz) && std::isfinite(chirp_mhz_per_us), ErrorKind::InvalidParameter,
          "pulse detuning and chirp must be finite");
  if (shape == PulseShape::Gaussian) {
    require(fwhm_us > 0.0 && std::isfinite(fwhm_us), ErrorKind::InvalidParameter, "pulse FWHM must be positive");
    require(std::isfinite(delay_us), ErrorKind::InvalidParameter, "pulse delay must be finite");
  } else {
    require(!samples.empty(), ErrorKind::InvalidParameter, "custom pulse has no samples");
    require(samples_dt_us > 0.0, ErrorKind::InvalidParameter, "custom pulse needs a positive sample step");
  }
}

cplx PulseSpec::envelope_mhz(double tau) const {
  if (shape == PulseShape::Samples) {
    const double p = tau / samples_dt_us;
    if (p < 0.0 || p > static_cast<double>(samples.size() - 1)) return 0.0;
    auto i = static_cast<std::size_t>(p);
    if (i + 1 >= samples.size()) return samples.back();
    const double t = p - static_cast<double>(i);
    return samples[i] * (1.0 - t) + samples[i + 1] * t;
  }
  const double u = tau - delay_us;
  const double amp = peak_rabi_mhz * std::exp(-2.0 * std::log(2.0) * u * u / (fwhm_us * fwhm_us));
  const double phase = kTwoPi * (center_detuning_mhz * u + 0.5 * chirp_mhz_per_us * u * u);
  return std::polar(amp, phase);
}

double SimResult::input_energy() const {
  double e = 0.0;
  for (const auto& v : input_mhz) e += std::norm(v);
  return e * kTwoPi * kTwoPi * dt_us;
}

double SimResult::transmitted_energy() const {
  double e = 0.0;
  for (const auto& v : transmitted_mhz) e += std::norm(v);
  return e * kTwoPi * kTwoPi * dt_us;
}

// ---- setup ----------------------------------------------------------------

namespace {

constexpr int kLanes = 64;
constexpr double kSkipDensity = 1e-14;

struct NodeBlock {
  alignas(64) double d0[kLanes];  // zero-field detuning, rad/µs
  alignas(64) double sg[kLanes];  // +1 group A, -1 group B
  alignas(64) double w[kLanes];   // trapezoid weight × density
  double density[kLanes];
  int group[kLanes];              // 0 = A, 1 = B, -1 = padding
  std::size_t index[kLanes];      // grid node
};

// Active ions of one profile slice plus the adiabatic response of the
// off-grid background.
struct SliceNodes {
  std::vector<NodeBlock> blocks;
  std::size_t active = 0;
  double tail_delay_per_mm = 0.0;  // µs/mm
  double tail_phase_per_mm = 0.0;  // rad/mm
  double tail_store = 0.0;         // ∫ g/(4Δ²) dΔ over the tails, Δ in rad/µs
};

SliceNodes build_nodes(const IonEnsemble& e, std::size_t slice) {
  const auto& s = e.slices[slice];
  const DetuningGrid& g = e.grid;
  const std::size_t n = g.size();
  SliceNodes out;
  std::vector<std::pair<int, std::size_t>> list;
  for (int grp = 0; grp < 2; ++grp) {
    const auto& dens = grp == 0 ? s.a.density : s.b.density;
    for (std::size_t i = 0; i < n; ++i)
      if (dens[i] > kSkipDensity) list.emplace_back(grp, i);
  }
  out.active = list.size();
  const std::size_t nb = (list.size() + kLanes - 1) / kLanes;
  out.blocks.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    NodeBlock& blk = out.blocks[b];
    for (int j = 0; j < kLanes; ++j) {
      const std::size_t k = b * kLanes + static_cast<std::size_t>(j);
      if (k < list.size()) {
        const auto [grp, i] = list[k];
        const auto& dens = grp == 0 ? s.a.density : s.b.density;
        const double c = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        blk.d0[j] = angular(g[i]);
        blk.sg[j] = grp == 0 ? 1.0 : -1.0;
        blk.w[j] = c * dens[i];
        blk.density[j] = dens[i];
        blk.group[j] = grp;
        blk.index[j] = i;
      } else {
        blk.d0[j] = 0.0;
        blk.sg[j] = 0.0;
        blk.w[j] = 0.0;
        blk.density[j] = 0.0;
        blk.group[j] = -1;
        blk.index[j] = 0;
      }
    }
  }
  // Far background, flat at the grid-edge densities out to ±cutoff.
  const double f_hi = s.a.density.back() + s.b.density.back();
  const double f_lo = s.a.density.front() + s.b.density.front();
  const double hi = g.back(), lo = -g.front(), cut = e.medium.tail_cutoff_mhz;
  const double q = f_hi * (1.0 / hi - 1.0 / cut) + f_lo * (1.0 / lo - 1.0 / cut);  // 1/MHz
  const double p0 = f_lo * std::log(cut / lo) - f_hi * std::log(cut / hi);
  const double a0 = e.medium.alpha0_per_mm;
  out.tail_delay_per_mm = a0 * q / (kTwoPi * kTwoPi);
  out.tail_phase_per_mm = a0 / kTwoPi * p0;
  out.tail_store = q / kTwoPi / 4.0;
  return out;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SLOWSHIFT_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<int>(v);
  }
  return std::max(1, omp_get_max_threads());
}

// Fixed-shape pairwise sum so the result does not depend on thread count.
double tree_sum(const double* p, std::size_t stride, std::size_t count) {
  if (count == 0) return 0.0;
  if (count == 1) return p[0];
  if (count == 2) return p[0] + p[stride];
  const std::size_t half = count / 2;
  return tree_sum(p, stride, half) + tree_sum(p + half * stride, stride, count - half);
}

// Ω at step midpoints by 4-point cubic interpolation.
void midpoints(const std::vector<cplx>& w, std::vector<cplx>& mid) {
  const std::size_t n = w.size() - 1;  // number of steps
  mid.resize(n);
  if (n == 1) {
    mid[0] = 0.5 * (w[0] + w[1]);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0)
      mid[i] = (3.0 * w[0] + 6.0 * w[1] - w[2]) / 8.0;
    else if (i + 1 == n)
      mid[i] = (3.0 * w[n] + 6.0 * w[n - 1] - w[n - 2]) / 8.0;
    else
      mid[i] = (-w[i - 1] + 9.0 * w[i] + 9.0 * w[i + 1] - w[i + 2]) / 16.0;
  }
}

// out(τ) = in(τ - delay) by cubic Lagrange interpolation; zero before τ = 0.
void fractional_delay(std::vector<cplx>& v, double delay_steps) {
  if (delay_steps == 0.0) return;
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  auto at = [&](std::ptrdiff_t i) -> cplx {
    if (i < 0) return 0.0;
    if (i >= n) return v[static_cast<std::size_t>(n - 1)];
    return v[static_cast<std::size_t>(i)];
  };
  std::vector<cplx> out(v.size());
  for (std::ptrdiff_t m = 0; m < n; ++m) {
    const double p = static_cast<double>(m) - delay_steps;
    const double fl = std::floor(p);
    const auto i = static_cast<std::ptrdiff_t>(fl);
    const double t = p - fl;
    const double lm = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double l0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double l1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double l2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    out[static_cast<std::size_t>(m)] = lm * at(i - 1) + l0 * at(i) + l1 * at(i + 1) + l2 * at(i + 2);
  }
  v.swap(out);
}

struct SnapshotTarget {
  std::size_t step;
  std::size_t slot;
};

struct SlabWork {
  std::size_t steps = 0;
  double dt = 0.0, g1 = 0.0, g2 = 0.0;
  const std::vector<cplx>* omega = nullptr;     // N+1, rad/µs
  const std::vector<cplx>* omega_mid = nullptr; // N
  std::vector<double> shift;                    // 2N+1 Stark shift (rad/µs) at half steps
  std::vector<double> partial;                  // [block][3][N+1]
};

// Advances every ion of the slab through the whole window and stores the
// per-block sums Σw·y, Σw·x, Σw·(1+z) at every step.
double integrate_slab(const SliceNodes& nodes, SlabWork& work, const std::vector<SnapshotTarget>& snaps,
                      std::vector<Snapshot>& snapshots, std::size_t row, std::size_t grid_size, int threads) {
  const std::size_t nb = nodes.blocks.size();
  const std::size_t N = work.steps;
  const std::size_t stride = N + 1;
  work.partial.assign(nb * 3 * stride, 0.0);
  double excess = -1.0;
  const auto nbl = static_cast<std::ptrdiff_t>(nb);

#pragma omp parallel for num_threads(threads) schedule(dynamic, 1) reduction(max : excess)
  for (std::ptrdiff_t b = 0; b < nbl; ++b) {
    const NodeBlock& blk = nodes.blocks[static_cast<std::size_t>(b)];
    alignas(64) double x[kLanes], y[kLanes], z[kLanes];
    for (int j = 0; j < kLanes; ++j) {
      x[j] = 0.0;
      y[j] = 0.0;
      z[j] = -1.0;
    }
    double* sy = work.partial.data() + static_cast<std::size_t>(b) * 3 * stride;
    double* sx = sy + stride;
    double* sw = sx + stride;
    std::size_t next_snap = 0;
    const auto& om = *work.omega;
    const auto& mid = *work.omega_mid;
    double local_excess = -1.0;
    for (std::size_t n = 0; n <= N; ++n) {
      if (n > 0) {
        const std::size_t m = n - 1;
        detail::StepInputs in{work.shift[2 * m], work.shift[2 * m + 1], work.shift[2 * m + 2],
                              om[m].real(), om[m].imag(), mid[m].real(), mid[m].imag(),
                              om[n].real(), om[n].imag(), work.g1, work.g2, work.dt};
        detail::rk4_lanes<kLanes>(x, y, z, blk.d0, blk.sg, in);
      }
      double ay = 0.0, ax = 0.0, aw = 0.0, nm = -1.0;
#pragma omp simd reduction(+ : ay, ax, aw) reduction(max : nm)
      for (int j = 0; j < kLanes; ++j) {
        ay += blk.w[j] * y[j];
        ax += blk.w[j] * x[j];
        aw += blk.w[j] * (1.0 + z[j]);
        const double r2 = x[j] * x[j] + y[j] * y[j] + z[j] * z[j];
        nm = std::max(nm, r2 - 1.0);
      }
      sy[n] = ay;
      sx[n] = ax;
      sw[n] = aw;
      local_excess = std::max(local_excess, nm);
      while (next_snap < snaps.size() && snaps[next_snap].step == n) {
        Snapshot& s = snapshots[snaps[next_snap].slot];
        for (int j = 0; j < kLanes; ++j) {
          if (blk.group[j] < 0) continue;
          const double ex = blk.density[j] * 0.5 * (1.0 + z[j]);
          auto& dst = blk.group[j] == 0 ? s.excitation_a : s.excitation_b;
          dst[row * grid_size + blk.index[j]] = ex;
        }
        ++next_snap;
      }
    }
    excess = std::max(excess, local_excess);
  }
  return excess;
}

}  // namespace

double automatic_window(const IonEnsemble& ensemble, const PulseSpec& pulse) {
  double transit = 0.0;
  if (ensemble.medium.alpha0_per_mm > 0.0)
    transit = std::max(0.0, group_delay_at(ensemble, pulse.center_detuning_mhz));
  if (pulse.shape == PulseShape::Samples) {
    const double len = pulse.samples_dt_us * static_cast<double>(pulse.samples.size() - 1);
    return len * 1.5 + transit;
  }
  return pulse.delay_us + transit + 5.0 * pulse.fwhm_us;
}

void check_preconditions(const IonEnsemble& ensemble, const PulseSpec& pulse, const StarkDrive& drive,
                         const SolverOptions& opt) {
  ensemble.validate();
  pulse.validate();
  require(opt.dt_us > 0.0 && std::isfinite(opt.dt_us), ErrorKind::InvalidParameter, "dt must be positive");
  require(opt.dz_mm > 0.0 && std::isfinite(opt.dz_mm), ErrorKind::InvalidParameter, "dz must be positive");
  require(opt.window_us >= 0.0, ErrorKind::InvalidParameter, "window must be non-negative");
  const double cfl = opt.dt_us * ensemble.grid.max_abs();
  require(cfl < 0.1, ErrorKind::Precondition,
          "time step does not resolve the detuning grid: dt*max|detuning| = " + format_number(cfl) +
              " (must be < 0.1); reduce dt_us below " + format_number(0.1 / ensemble.grid.max_abs()));
  const double adz = ensemble.medium.alpha0_per_mm * opt.dz_mm;
  require(adz < 0.2, ErrorKind::Precondition,
          "slab thickness does not resolve absorption: alpha0*dz = " + format_number(adz) + " (must be < 0.2)");
  const double guard = ensemble.guard_band();
  const double need = drive.max_abs_shift();
  require(need <= guard, ErrorKind::Precondition,
          "detuning grid guard band " + format_number(guard) + " MHz is smaller than the maximum Stark shift " +
              format_number(need) + " MHz; widen the grid");
  require(std::abs(drive.field().length_mm() - ensemble.medium.length_mm) < 1e-9 || drive.is_zero(),
          ErrorKind::Precondition, "drive field profile and crystal length disagree");
}

SimResult propagate(const IonEnsemble& ensemble, const PulseSpec& pulse, const StarkDrive& drive,
                    const SolverOptions& opt) {
  check_preconditions(ensemble, pulse, drive, opt);
  const double dt = opt.dt_us;
  const double window = opt.window_us > 0.0 ? opt.window_us : automatic_window(ensemble, pulse);
  const auto N = static_cast<std::size_t>(std::ceil(window / dt - 1e-9));
  require(N >= 4, ErrorKind::Precondition, "time window shorter than four steps");
  const double L = ensemble.medium.length_mm;
  const auto Nz = static_cast<std::size_t>(std::max(1.0, std::ceil(L / opt.dz_mm - 1e-9)));
  const double dz = L / static_cast<double>(Nz);
  const double a0 = ensemble.medium.alpha0_per_mm;
  const double h = ensemble.grid.spacing();
  const std::size_t G = ensemble.grid.size();
  const int threads = resolve_threads(opt.threads);

  for (double t : opt.snapshot_times_us)
    require(t >= 0.0 && t <= N * dt + 1e-12, ErrorKind::Precondition,
            "snapshot time " + format_number(t) + " us lies outside the window");

  SimResult res;
  res.dt_us = dt;
  res.grid = ensemble.grid;
  res.tau_us.resize(N + 1);
  res.input_mhz.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    res.tau_us[n] = dt * static_cast<double>(n);
    res.input_mhz[n] = pulse.envelope_mhz(res.tau_us[n]);
  }
  res.diagnostics.steps = N;
  res.diagnostics.slabs = Nz;
  res.diagnostics.threads = threads;
  res.diagnostics.transit_estimate_us = a0 > 0.0 ? group_delay_at(ensemble, pulse.center_detuning_mhz) : 0.0;

  // Snapshots, sorted by step.
  std::vector<SnapshotTarget> snaps;
  res.snapshots.resize(opt.snapshot_times_us.size());
  for (std::size_t s = 0; s < opt.snapshot_times_us.size(); ++s) {
    auto step = static_cast<std::size_t>(std::llround(opt.snapshot_times_us[s] / dt));
    step = std::min(step, N);
    snaps.push_back({step, s});
    Snapshot& snap = res.snapshots[s];
    snap.tau_us = dt * static_cast<double>(step);
    snap.stark_shift_mhz = drive.waveform(snap.tau_us);
    snap.z_mm.resize(Nz + 1);
    snap.spatial_scale.resize(Nz + 1);
    for (std::size_t k = 0; k <= Nz; ++k) {
      snap.z_mm[k] = dz * static_cast<double>(k);
      snap.spatial_scale[k] = drive.spatial_scale(snap.z_mm[k]);
    }
    snap.omega_mhz.assign(Nz + 1, cplx(0.0));
    snap.excitation_a.assign((Nz + 1) * G, 0.0);
    snap.excitation_b.assign((Nz + 1) * G, 0.0);
    snap.tail_excitation.assign(Nz + 1, 0.0);
  }
  std::stable_sort(snaps.begin(), snaps.end(),
                   [](const SnapshotTarget& a, const SnapshotTarget& b) { return a.step < b.step; });

  // Per-slice node tables.
  std::vector<SliceNodes> tables;
  tables.reserve(ensemble.slices.size());
  for (std::size_t k = 0; k < ensemble.slices.size(); ++k) tables.push_back(build_nodes(ensemble, k));
  res.diagnostics.active_nodes = tables.front().active;

  // Drive waveform on the half-step grid (reference position, MHz).
  std::vector<double> wave(2 * N + 1);
  for (std::size_t m = 0; m <= 2 * N; ++m) wave[m] = drive.waveform(0.5 * dt * static_cast<double>(m));

  SlabWork work;
  work.steps = N;
  work.dt = dt;
  work.g1 = std::isinf(ensemble.medium.t1_us) ? 0.0 : 1.0 / ensemble.medium.t1_us;
  work.g2 = std::isinf(ensemble.medium.t2_us) ? 0.0 : 1.0 / ensemble.medium.t2_us;

  std::vector<cplx> omega(N + 1), mid, f_prev, f_cur(N + 1), next(N + 1);
  for (std::size_t n = 0; n <= N; ++n) omega[n] = kTwoPi * res.input_mhz[n];
  std::vector<double> w_cur(N + 1);

  EnergyHistory& eh = res.energy;
  eh.tau_us = res.tau_us;
  eh.u_med.assign(N + 1, 0.0);
  eh.u_em.assign(N + 1, 0.0);
  const double n_over_c = ensemble.medium.refractive_index / kSpeedOfLight;
  double excess = -1.0;

  for (std::size_t k = 0; k <= Nz; ++k) {
    const double z = dz * static_cast<double>(k);
    const std::size_t slice = ensemble.slice_index(k == Nz ? L : z);
    const SliceNodes& nodes = tables[slice];
    const double wz = (k == 0 || k == Nz) ? 0.5 * dz : dz;

    if (a0 > 0.0) {
      const double scale = kTwoPi * drive.spatial_scale(z);
      work.shift.resize(2 * N + 1);
      for (std::size_t m = 0; m <= 2 * N; ++m) work.shift[m] = scale * wave[m];
      midpoints(omega, mid);
      work.omega = &omega;
      work.omega_mid = &mid;
      excess = std::max(excess, integrate_slab(nodes, work, snaps, res.snapshots, k, G, threads));

      const std::size_t nb = nodes.blocks.size();
      const std::size_t stride = N + 1;
      for (std::size_t n = 0; n <= N; ++n) {
        const double sy = tree_sum(work.partial.data() + n, 3 * stride, nb);
        const double sx = tree_sum(work.partial.data() + stride + n, 3 * stride, nb);
        const double sw = tree_sum(work.partial.data() + 2 * stride + n, 3 * stride, nb);
        f_cur[n] = a0 * h * cplx(sy, -sx);
        w_cur[n] = kPi * h * sw + nodes.tail_store * std::norm(omega[n]);
      }
      for (std::size_t n = 0; n <= N; ++n) {
        if (!std::isfinite(f_cur[n].real()) || !std::isfinite(f_cur[n].imag()) || !std::isfinite(w_cur[n]))
          fail(ErrorKind::NumericalFailure, "non-finite polarization at slab " + std::to_string(k) +
                                                " (z = " + format_number(z) + " mm), step " + std::to_string(n));
      }
    } else {
      std::fill(f_cur.begin(), f_cur.end(), cplx(0.0));
      std::fill(w_cur.begin(), w_cur.end(), 0.0);
    }

    for (std::size_t n = 0; n <= N; ++n) {
      eh.u_em[n] += wz * n_over_c * std::norm(omega[n]);
      eh.u_med[n] += wz * (2.0 * a0 / kPi) * w_cur[n];
    }
    for (const auto& t : snaps) {
      Snapshot& s = res.snapshots[t.slot];
      s.omega_mhz[k] = omega[t.step] / kTwoPi;
      s.tail_excitation[k] = nodes.tail_store * std::norm(omega[t.step]);
    }
    if (k == Nz) break;

    // Field march: Adams–Bashforth 2 in z (Euler on the first slab), then the
    // off-grid background as a pure delay and phase.
    for (std::size_t n = 0; n <= N; ++n)
      next[n] = f_prev.empty() ? omega[n] + dz * f_cur[n] : omega[n] + dz * (1.5 * f_cur[n] - 0.5 * f_prev[n]);
    fractional_delay(next, nodes.tail_delay_per_mm * dz / dt);
    const cplx rot = std::polar(1.0, nodes.tail_phase_per_mm * dz);
    if (nodes.tail_phase_per_mm != 0.0)
      for (auto& v : next) v *= rot;
    f_prev = f_cur;
    omega.swap(next);
  }

  res.transmitted_mhz.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) res.transmitted_mhz[n] = omega[n] / kTwoPi;
  res.diagnostics.max_norm_excess = excess;

  // Cumulative fluxes (trapezoid).
  eh.entered.assign(N + 1, 0.0);
  eh.exited.assign(N + 1, 0.0);
  const double k2 = kTwoPi * kTwoPi;
  for (std::size_t n = 1; n <= N; ++n) {
    eh.entered[n] = eh.entered[n - 1] + 0.5 * dt * k2 * (std::norm(res.input_mhz[n]) + std::norm(res.input_mhz[n - 1]));
    eh.exited[n] = eh.exited[n - 1] +
                   0.5 * dt * k2 * (std::norm(res.transmitted_mhz[n]) + std::norm(res.transmitted_mhz[n - 1]));
  }

  // Window adequacy.
  double total = 0.0, tail = 0.0;
  const std::size_t tail_start = N + 1 - std::max<std::size_t>(1, (N + 1) / 20);
  for (std::size_t n = 0; n <= N; ++n) {
    const double p = std::norm(res.transmitted_mhz[n]);
    total += p;
    if (n >= tail_start) tail += p;
  }
  res.diagnostics.window_tail_fraction = total > 0.0 ? tail / total : 0.0;
  if (opt.check_window && res.diagnostics.window_tail_fraction > 0.005)
    fail(ErrorKind::Precondition, "time window of " + format_number(N * dt) + " us is too short: " +
                                      format_number(100.0 * res.diagnostics.window_tail_fraction) +
                                      "% of the transmitted energy falls in its final 5%; increase window_us");
  return res;
}

// ---- energy ---------------------------------------------------------------

EnergyPartition energy_partition(const SimResult& r, double tau) {
  const auto& t = r.energy.tau_us;
  require(!t.empty(), ErrorKind::InvalidInput, "result has no energy history");
  require(tau >= t.front() && tau <= t.back(), ErrorKind::OutOfRange, "time outside the simulated window");
  const double p = (tau - t.front()) / r.dt_us;
  auto i = std::min(static_cast<std::size_t>(p), t.size() - 2);
  const double f = p - static_cast<double>(i);
  EnergyPartition e;
  e.u_med = r.energy.u_med[i] * (1.0 - f) + r.energy.u_med[i + 1] * f;
  e.u_em = r.energy.u_em[i] * (1.0 - f) + r.energy.u_em[i + 1] * f;
  return e;
}

EnergyPartition energy_partition(const Snapshot& s, const IonEnsemble& e) {
  const std::size_t G = e.grid.size();
  const std::size_t nz = s.z_mm.size();
  require(nz >= 2 && s.excitation_a.size() == nz * G && s.excitation_b.size() == nz * G, ErrorKind::InvalidInput,
          "snapshot does not match the ensemble grid");
  const double dz = s.z_mm[1] - s.z_mm[0];
  const double hang = kTwoPi * e.grid.spacing();
  const double a0 = e.medium.alpha0_per_mm;
  const double n_over_c = e.medium.refractive_index / kSpeedOfLight;
  EnergyPartition out;
  for (std::size_t k = 0; k < nz; ++k) {
    const double wz = (k == 0 || k + 1 == nz) ? 0.5 * dz : dz;
    double w = 0.0;
    for (std::size_t i = 0; i < G; ++i) {
      const double c = (i == 0 || i + 1 == G) ? 0.5 : 1.0;
      w += c * (s.excitation_a[k * G + i] + s.excitation_b[k * G + i]);
    }
    w = w * hang + (s.tail_excitation.empty() ? 0.0 : s.tail_excitation[k]);
    out.u_med += wz * (2.0 * a0 / kPi) * w;
    out.u_em += wz * n_over_c * std::norm(kTwoPi * s.omega_mhz[k]);
  }
  return out;
}

// ---- single ion -----------------------------------------------------------

std::array<double, 3> rabi_reference(double delta_mhz, double rabi_mhz, double t_us, double t1_us, double t2_us) {
  require(t1_us > 0.0 && t2_us > 0.0, ErrorKind::InvalidParameter, "relaxation times must be positive");
  require(t_us >= 0.0, ErrorKind::InvalidParameter, "time must be non-negative");
  const double g1 = std::isinf(t1_us) ? 0.0 : 1.0 / t1_us;
  const double g2 = std::isinf(t2_us) ? 0.0 : 1.0 / t2_us;
  const double D = angular(delta_mhz), W = angular(rabi_mhz);
  // Homogeneous part plus a constant drive toward the ground state: augment
  // to 4×4 so the exponential carries the inhomogeneous term exactly.
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(0, 0) = -g2;
  M(0, 1) = -D;
  M(1, 0) = D;
  M(1, 1) = -g2;
  M(1, 2) = W;
  M(2, 1) = -W;
  M(2, 2) = -g1;
  M(2, 3) = -g1;
  Eigen::Vector4d r0(0.0, 0.0, -1.0, 1.0);
  Eigen::Matrix4d E = (M * t_us).exp();
  Eigen::Vector4d r = E * r0;
  return {r(0), r(1), r(2)};
}

std::array<double, 3> rabi_rotation(double delta_mhz, double rabi_mhz, double t_us) {
  // dr/dt = ω × r with ω = (-Ωr, -Ωi, D).
  const double wx = -angular(rabi_mhz), wy = 0.0, wz = angular(delta_mhz);
  const double wn = std::sqrt(wx * wx + wy * wy + wz * wz);
  if (wn == 0.0) return {0.0, 0.0, -1.0};
  const double kx = wx / wn, ky = wy / wn, kz = wz / wn;
  const double th = wn * t_us, c = std::cos(th), s = std::sin(th);
  const double rx = 0.0, ry = 0.0, rz = -1.0;
  const double cx = ky * rz - kz * ry, cy = kz * rx - kx * rz, cz = kx * ry - ky * rx;
  const double dot = kx * rx + ky * ry + kz * rz;
  return {rx * c + cx * s + kx * dot * (1.0 - c), ry * c + cy * s + ky * dot * (1.0 - c),
          rz * c + cz * s + kz * dot * (1.0 - c)};
}

std::vector<std::array<double, 3>> integrate_single_ion(double delta_mhz, double rabi_mhz, double t_us, double dt_us,
                                                        double t1_us, double t2_us) {
  require(dt_us > 0.0 && t_us >= 0.0, ErrorKind::InvalidParameter, "need dt > 0 and t >= 0");
  const auto n = static_cast<std::size_t>(std::llround(t_us / dt_us));
  double x[1] = {0.0}, y[1] = {0.0}, z[1] = {-1.0};
  const double d0[1] = {angular(delta_mhz)}, sg[1] = {0.0};
  const double W = angular(rabi_mhz);
  detail::StepInputs in{0.0, 0.0, 0.0, W, 0.0, W, 0.0, W, 0.0,
                        std::isinf(t1_us) ? 0.0 : 1.0 / t1_us, std::isinf(t2_us) ? 0.0 : 1.0 / t2_us, dt_us};
  std::vector<std::array<double, 3>> out;
  out.reserve(n + 1);
  out.push_back({x[0], y[0], z[0]});
  for (std::size_t i = 0; i < n; ++i) {
    detail::rk4_lanes<1>(x, y, z, d0, sg, in);
    out.push_back({x[0], y[0], z[0]});
  }
  return out;
}

// ---- output ---------------------------------------------------------------

void write_envelope_csv(const std::vector<double>& tau, const std::vector<cplx>& env, std::ostream& out) {
  require(tau.size() == env.size(), ErrorKind::InvalidParameter, "time axis and envelope differ in length");
  out << "tau_us,re_omega_mhz,im_omega_mhz\n";
  for (std::size_t i = 0; i < tau.size(); ++i)
    out << format_number(tau[i]) << ',' << format_number(env[i].real()) << ',' << format_number(env[i].imag())
        << '\n';
}

void write_energy_csv(const EnergyHistory& h, std::ostream& out) {
  out << "tau_us,u_med,u_em,entered,exited\n";
  for (std::size_t i = 0; i < h.tau_us.size(); ++i)
    out << format_number(h.tau_us[i]) << ',' << format_number(h.u_med[i]) << ',' << format_number(h.u_em[i]) << ','
        << format_number(h.entered[i]) << ',' << format_number(h.exited[i]) << '\n';
}

}  // namespace slowshift
