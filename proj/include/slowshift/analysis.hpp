#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "slowshift/ensemble.hpp"
#include "slowshift/solver.hpp"
#include "slowshift/units.hpp"

namespace slowshift {

enum class Window { Hann, None };

struct Spectrum {
  std::vector<double> frequency_mhz;  // ascending
  std::vector<double> power;          // normalized to a peak of 1
  double df_mhz = 0.0;
  /// Power before normalization is power·scale, in |Ω|²·µs² per bin.
  double scale = 0.0;
  /// Peak location refined by a parabola through the top three bins.
  double peak_mhz = 0.0;
};

/// DFT of a complex envelope, zero padded to a power of two ≥ pad·N.
Spectrum spectrum(std::span<const cplx> envelope, double dt_us, Window window = Window::Hann, int pad = 8);

/// |E_sig + A·e^{i2π f_lo τ}|² on the envelope's time base.
std::vector<double> beat_pattern(std::span<const cplx> envelope, double dt_us, double lo_detuning_mhz,
                                 double lo_amplitude);

struct InstFreqTrace {
  std::vector<double> times_us;
  std::vector<double> frequency_mhz;
  std::vector<bool> valid;

  std::size_t valid_count() const;
};

/// f(τ) = (1/2π) d arg E/dτ by a centred phase difference; samples whose
/// amplitude is below threshold·max are masked out, as are the two ends.
InstFreqTrace instantaneous_frequency(std::span<const cplx> envelope, double dt_us, double threshold = 0.05);

/// Fourier-sideband demodulation of a real beat signal: isolates the
/// sideband at -f_lo, shifts it back to baseband and differentiates its phase.
InstFreqTrace instantaneous_frequency_from_beat(std::span<const double> beat, double dt_us, double lo_detuning_mhz,
                                                double threshold = 0.05);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);
/// Fit over the valid samples of a trace inside [t_lo, t_hi].
LineFit fit_trace(const InstFreqTrace& trace, double t_lo_us, double t_hi_us);

/// Energy of an envelope, ∫|E|² dτ (rectangle rule, envelope units).
double envelope_energy(std::span<const cplx> envelope, double dt_us);

/// Energy(V) / Energy(V = 0) of two transmitted envelopes.
double relative_efficiency(const SimResult& shifted, const SimResult& reference);
double relative_efficiency(std::span<const cplx> shifted, std::span<const cplx> reference, double dt_us);

/// Stored-excitation density over (z, lab-frame detuning). Each group's
/// g·(1+r_z)/2 is placed at its current resonance (A at Δ+s(z), B at Δ−s(z)).
struct ExcitationMap {
  std::vector<double> detuning_mhz;
  std::vector<double> z_mm;
  std::vector<double> values;  // z-major
  double tau_us = 0.0;

  double at(std::size_t iz, std::size_t id) const { return values[iz * detuning_mhz.size() + id]; }
};

ExcitationMap excitation_map(const Snapshot& snapshot, const DetuningGrid& grid);

/// ‖post(Δ) − pre(Δ − ds)‖ / ‖pre‖ over the whole map.
double translation_mismatch(const ExcitationMap& pre, const ExcitationMap& post, double ds_mhz);

/// Ion-stored energy represented by a map, in the solver's calibration
/// (off-grid tails excluded).
double map_energy(const ExcitationMap& map, const IonEnsemble& ensemble);

/// Length of the z interval holding the central `fraction` of the map's
/// energy (pulse extent inside the crystal).
double spatial_extent(const ExcitationMap& map, double fraction = 0.9);

enum class LossMethod { Eq5, Simulate };

struct ExtendedShiftOptions {
  double hop_mhz = 20.0;
  double grid_half_span_mhz = 70.0;
  double grid_spacing_mhz = 0.05;
  double dt_us = 0.00125;
  double dz_mm = 0.05;
  MediumParameters medium{};
  ShifterGeometry geometry{};
  PulseSpec pulse{};
  int threads = 0;
};

/// Loss of an extended (two-hole) frequency hop switched over T.
/// Eq5 is the closed form; Simulate runs the two-hole structure with and
/// without the hop and reports 1 - η_rel. gamma_mhz is the filter width.
double extended_shift_loss(double gamma_mhz, double t_ns, LossMethod method,
                           const ExtendedShiftOptions& options = {});

/// CSV writers with self-describing headers.
void write_spectrum_csv(const Spectrum& s, std::ostream& out);
void write_trace_csv(const InstFreqTrace& t, std::ostream& out);
void write_beat_csv(const std::vector<double>& tau_us, const std::vector<double>& beat, std::ostream& out);
/// Grid layout: one row per detuning, one column per kept z node.
void write_map_csv(const ExcitationMap& m, std::ostream& out, std::size_t z_stride = 1,
                   double max_abs_detuning_mhz = 1e300);

}  // namespace slowshift
