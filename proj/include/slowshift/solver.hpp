#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "slowshift/ensemble.hpp"
#include "slowshift/stark.hpp"
#include "slowshift/units.hpp"

namespace slowshift {

enum class PulseShape { Gaussian, Samples };

/// Input optical envelope. Rabi frequencies are cyclic (MHz); the envelope
/// convention is Ω(τ)·e^{+iωτ}, so a positive detuning is a positive frequency.
struct PulseSpec {
  PulseShape shape = PulseShape::Gaussian;
  double fwhm_us = 1.0;  // intensity FWHM of |Ω|²
  double center_detuning_mhz = 0.0;
  double peak_rabi_mhz = 0.01;
  double delay_us = 2.0;  // time of the peak
  double chirp_mhz_per_us = 0.0;
  /// Custom envelope (MHz) on a uniform step, starting at τ = 0; zero afterwards.
  std::vector<cplx> samples;
  double samples_dt_us = 0.0;

  void validate() const;
  /// Envelope Ω(τ) in MHz.
  cplx envelope_mhz(double tau_us) const;
};

struct SolverOptions {
  double dt_us = 0.002;
  double dz_mm = 0.05;
  /// Retarded-time window; 0 picks delay + oracle transit + 5·fwhm.
  double window_us = 0.0;
  std::vector<double> snapshot_times_us;
  /// Refuse results whose output has > 0.5% of its energy in the last 5% of the window.
  bool check_window = true;
  /// 0 uses SLOWSHIFT_THREADS or the OpenMP default.
  int threads = 0;
};

/// Excitation density at one instant over (z, Δ). Values are g·(1+r_z)/2 per
/// group at the ions' zero-field detunings; rows are z nodes.
struct Snapshot {
  double tau_us = 0.0;
  double stark_shift_mhz = 0.0;  // drive waveform at tau (reference position)
  std::vector<double> z_mm;
  std::vector<double> spatial_scale;  // 1 + ε(z) per row
  std::vector<cplx> omega_mhz;        // field per z node
  std::vector<double> excitation_a;   // z_mm.size() × grid.size()
  std::vector<double> excitation_b;
  /// Population held by the adiabatically eliminated off-grid ions, per z,
  /// as ∫ g(1+r_z)/2 dΔ with Δ in rad/µs.
  std::vector<double> tail_excitation;
};

struct EnergyHistory {
  std::vector<double> tau_us;
  std::vector<double> u_med;    // (2 alpha0 / π) ∫ W dz
  std::vector<double> u_em;     // (n / c) ∫ |Ω|² dz
  std::vector<double> entered;  // ∫_0^τ |Ω(0)|² dτ'
  std::vector<double> exited;   // ∫_0^τ |Ω(L)|² dτ'
};

struct SolverDiagnostics {
  std::size_t steps = 0;
  std::size_t slabs = 0;
  std::size_t active_nodes = 0;
  double max_norm_excess = 0.0;  // max(|r|² - 1) over nodes and steps
  double window_tail_fraction = 0.0;
  double transit_estimate_us = 0.0;
  int threads = 1;
};

struct SimResult {
  double dt_us = 0.0;
  DetuningGrid grid;
  std::vector<double> tau_us;
  std::vector<cplx> input_mhz;
  std::vector<cplx> transmitted_mhz;
  std::vector<Snapshot> snapshots;
  EnergyHistory energy;
  SolverDiagnostics diagnostics;

  /// Energies in the solver's flux units (rad²/µs): ∫|Ω|² dτ with Ω in rad/µs.
  double input_energy() const;
  double transmitted_energy() const;
};

/// Integrates the two-group Maxwell–Bloch system in retarded time.
SimResult propagate(const IonEnsemble& ensemble, const PulseSpec& pulse, const StarkDrive& drive,
                    const SolverOptions& options = {});

/// Window the solver would pick for this problem (µs).
double automatic_window(const IonEnsemble& ensemble, const PulseSpec& pulse);

/// Checks the stepping preconditions; throws Precondition with a diagnostic.
void check_preconditions(const IonEnsemble& ensemble, const PulseSpec& pulse, const StarkDrive& drive,
                         const SolverOptions& options);

struct EnergyPartition {
  double u_med = 0.0;
  double u_em = 0.0;
  double medium_fraction() const { return u_med / (u_med + u_em); }
};

/// Energy stored in the ions vs the field, interpolated from the run's history.
EnergyPartition energy_partition(const SimResult& result, double tau_us);
/// Same from a state snapshot, using the same calibration as the history.
EnergyPartition energy_partition(const Snapshot& snapshot, const IonEnsemble& ensemble);

/// Exact Bloch vector of one ion under a constant real Rabi frequency, from
/// the ground state. Infinite T1/T2 switch off relaxation.
std::array<double, 3> rabi_reference(double delta_mhz, double rabi_mhz, double t_us, double t1_us,
                                     double t2_us);
/// Undamped closed form (rotation about the generalized Rabi axis).
std::array<double, 3> rabi_rotation(double delta_mhz, double rabi_mhz, double t_us);

/// One ion through the solver's RK4 stepper under constant drive; returns the
/// Bloch vector at every step (n_steps + 1 values, starting at the ground state).
std::vector<std::array<double, 3>> integrate_single_ion(double delta_mhz, double rabi_mhz, double t_us,
                                                        double dt_us, double t1_us, double t2_us);

/// CSV: tau_us, re_omega_mhz, im_omega_mhz.
void write_envelope_csv(const std::vector<double>& tau_us, const std::vector<cplx>& env, std::ostream& out);
void write_energy_csv(const EnergyHistory& h, std::ostream& out);

}  // namespace slowshift
