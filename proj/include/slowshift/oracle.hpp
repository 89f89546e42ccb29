#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "slowshift/ensemble.hpp"
#include "slowshift/units.hpp"

namespace slowshift {

/// Complex field propagation exponent per mm: a weak probe at frequency f
/// leaves a slab of thickness dz as E·exp(-gamma(f)·dz).
/// Re gamma is the field absorption coefficient (alpha0 on a full background,
/// half the intensity coefficient); -Im gamma is the extra wavenumber k(f).
struct Susceptibility {
  std::vector<double> frequency_mhz;
  std::vector<cplx> gamma;

  double field_absorption(std::size_t i) const { return gamma[i].real(); }
  double intensity_absorption(std::size_t i) const { return 2.0 * gamma[i].real(); }
  double wavenumber(std::size_t i) const { return -gamma[i].imag(); }
};

/// Lorentzian-broadened response of one profile slice. The piecewise-linear
/// densities are convolved analytically with a Lorentzian of FWHM gamma_h,
/// and the flat background beyond the grid edges is carried out to the
/// medium's tail cutoff.
Susceptibility susceptibility(const IonEnsemble& ensemble, std::span<const double> frequency_mhz,
                              double gamma_h_khz, std::size_t slice = 0);
/// Same, sampled on the ensemble's own grid with its own gammaH.
Susceptibility susceptibility(const IonEnsemble& ensemble, std::size_t slice = 0);

/// Amplitude transmission through the whole crystal.
class TransferFunction {
 public:
  TransferFunction() = default;
  TransferFunction(std::vector<double> frequency_mhz, std::vector<cplx> h);

  const std::vector<double>& frequency_mhz() const { return freq_; }
  const std::vector<cplx>& values() const { return h_; }
  std::size_t size() const { return h_.size(); }

  double power(std::size_t i) const { return std::norm(h_[i]); }
  double log_magnitude(std::size_t i) const { return std::log(std::abs(h_[i])); }
  /// Phase unwrapped along the frequency axis.
  std::vector<double> phase() const;
  /// -d(phase)/d(omega) in µs by centred differences (one-sided at the ends).
  std::vector<double> group_delay() const;

 private:
  std::vector<double> freq_;
  std::vector<cplx> h_;
};

/// H(f) = exp(-∫ gamma(f, z) dz) for profiles translated by ds (group A by +ds, B by -ds).
TransferFunction linear_transfer(const IonEnsemble& ensemble, std::span<const double> frequency_mhz,
                                 double ds_mhz = 0.0);
TransferFunction linear_transfer(const IonEnsemble& ensemble, double ds_mhz = 0.0);

/// Group delay of the crystal at one frequency, from the analytic dispersion.
double group_delay_at(const IonEnsemble& ensemble, double frequency_mhz, double ds_mhz = 0.0);

/// 1 - |H(f)|²: intensity loss at a single frequency.
double intensity_loss_at(const IonEnsemble& ensemble, double frequency_mhz, double ds_mhz = 0.0);

/// Centre of the static passband: frequency of maximum |H| within ±search of `guess`.
double passband_center(const IonEnsemble& ensemble, double ds_mhz, double guess_mhz, double search_mhz = 1.5);

/// Weak-probe output for a sampled input envelope (uniform step dt in µs),
/// via the transfer function applied in the frequency domain.
std::vector<cplx> propagate_linear(const IonEnsemble& ensemble, std::span<const cplx> input, double dt_us,
                                   double ds_mhz = 0.0);

/// Maximum deviation between the analytic dispersive part of gamma and the
/// numerical Hilbert transform of its absorptive part (sampled on a grid
/// refined `refine` times), relative to the largest |Im gamma| over the
/// interior frequencies. Interior excludes `margin_mhz` at each grid edge.
double kramers_kronig_deviation(const IonEnsemble& ensemble, int refine = 10, double margin_mhz = 2.0,
                                std::size_t slice = 0);

/// v_g = (c/n)/(1 + U_med/U_em), in m/s.
double eq1_velocity(double refractive_index, double ratio_med_em);
/// v_g ≈ 2πΓ/(α/2) with Γ in MHz and α/2 in mm⁻¹, in m/s.
double eq4_velocity(double gamma_mhz, double alpha_half_per_mm);
/// η ≈ 1 - exp(-2πΓ·T) with Γ in MHz and T in ns.
double eq5_loss(double gamma_mhz, double t_ns);

}  // namespace slowshift
