#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slowshift {

/// Linear Stark coefficient of the positive-sign ion group, in MHz per (V/mm).
/// The negative-sign group always receives the opposite shift.
class StarkCoefficient {
 public:
  constexpr StarkCoefficient() = default;

  static constexpr StarkCoefficient mhz_per_v_per_mm(double value) {
    return StarkCoefficient(value);
  }
  /// Literature and fit values are quoted in kHz/(V/cm); 1 kHz/(V/cm) = 0.01 MHz/(V/mm).
  static constexpr StarkCoefficient khz_per_v_per_cm(double value) {
    return StarkCoefficient(value * 0.01);
  }

  constexpr double mhz_per_v_per_mm() const { return value_; }
  constexpr double khz_per_v_per_cm() const { return value_ * 100.0; }

 private:
  constexpr explicit StarkCoefficient(double v) : value_(v) {}
  double value_ = 0.0;
};

/// Permanent-dipole difference of the optical transition relative to the
/// applied field axis. All four site orientations share |δμ| and θ, so they
/// collapse onto two groups with coefficients ±|δμ|cos θ.
struct DipoleGeometry {
  double mu_over_hbar_khz_per_v_cm = 111.6;
  double theta_deg = 12.4;
};

StarkCoefficient effective_coefficient(const DipoleGeometry& geom);

/// Relative deviation ε(z) of the electrode field along the beam path.
/// Tabulated on increasing z; linear interpolation between nodes and the end
/// values beyond them.
class FieldProfile {
 public:
  FieldProfile() = default;
  FieldProfile(double gap_mm, double length_mm, std::vector<double> z_mm,
               std::vector<double> epsilon);

  static FieldProfile uniform(double gap_mm, double length_mm);
  /// Quadratic sag, zero at the crystal centre and -peak_to_peak at the faces.
  static FieldProfile quadratic(double gap_mm, double length_mm, double peak_to_peak = 0.002);
  /// Columns z_mm, epsilon. A header row is optional.
  static FieldProfile load_csv(const std::string& path, double gap_mm, double length_mm);
  static FieldProfile read_csv(std::istream& in, double gap_mm, double length_mm);

  double gap_mm() const { return gap_mm_; }
  double length_mm() const { return length_mm_; }
  const std::vector<double>& z_mm() const { return z_mm_; }
  const std::vector<double>& epsilon() const { return epsilon_; }

  double epsilon_at(double z_mm) const;
  bool is_uniform() const;
  double max_abs_epsilon() const;

 private:
  double gap_mm_ = 6.0;
  double length_mm_ = 10.0;
  std::vector<double> z_mm_;
  std::vector<double> epsilon_;
};

/// Resonance shift of the positive group at position z for applied voltage V.
double shift_at(double voltage_v, const FieldProfile& field, StarkCoefficient coeff, double z_mm);

/// Smooth 0 -> 1 transition used for finite rise times (raised cosine).
double raised_cosine_ramp(double u);

/// Time- and position-dependent shift Δs(τ, z) = amplitude · ramp((τ-τ0)/rise) · (1+ε(z)).
/// A zero rise time is an exact Heaviside step with Θ(0) = 1.
class StarkDrive {
 public:
  StarkDrive() = default;
  StarkDrive(double amplitude_mhz, double tau0_us, double rise_time_us, FieldProfile field);

  static StarkDrive none();

  double amplitude_mhz() const { return amplitude_mhz_; }
  double tau0_us() const { return tau0_us_; }
  double rise_time_us() const { return rise_time_us_; }
  const FieldProfile& field() const { return field_; }
  bool is_zero() const { return amplitude_mhz_ == 0.0; }

  /// Waveform at the reference position (ε = 0), in MHz.
  double waveform(double tau_us) const;
  /// Spatial multiplier 1 + ε(z).
  double spatial_scale(double z_mm) const;
  double at(double tau_us, double z_mm) const { return waveform(tau_us) * spatial_scale(z_mm); }
  /// Largest |Δs| reached anywhere in the crystal.
  double max_abs_shift() const;

 private:
  double amplitude_mhz_ = 0.0;
  double tau0_us_ = 0.0;
  double rise_time_us_ = 0.0;
  FieldProfile field_;
};

StarkDrive step_drive(double voltage_v, double tau0_us, double rise_time_us,
                      const FieldProfile& field, StarkCoefficient coeff);

}  // namespace slowshift
