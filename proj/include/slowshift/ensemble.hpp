#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "slowshift/stark.hpp"

namespace slowshift {

/// Uniform detuning axis in MHz relative to the optical carrier.
class DetuningGrid {
 public:
  DetuningGrid() = default;
  DetuningGrid(double first_mhz, double spacing_mhz, std::size_t count);

  /// Points -half_span ... +half_span; half_span is rounded to a whole number of spacings.
  static DetuningGrid symmetric(double half_span_mhz, double spacing_mhz);

  std::size_t size() const { return count_; }
  double spacing() const { return spacing_; }
  double front() const { return first_; }
  double back() const { return first_ + spacing_ * static_cast<double>(count_ - 1); }
  double operator[](std::size_t i) const { return first_ + spacing_ * static_cast<double>(i); }
  double max_abs() const;

  /// Fractional index of a detuning; may fall outside [0, size-1].
  double position(double detuning_mhz) const { return (detuning_mhz - first_) / spacing_; }
  bool contains(double detuning_mhz) const;
  std::vector<double> points() const;

  void validate() const;

  bool operator==(const DetuningGrid&) const = default;

 private:
  double first_ = 0.0;
  double spacing_ = 1.0;
  std::size_t count_ = 0;
};

/// Fraction of one Stark-sign group's unburned population left at each grid node.
struct GroupProfile {
  std::vector<double> density;
};

/// Ion profiles that apply over the crystal interval [z_begin, z_end).
struct ProfileSlice {
  double z_begin_mm = 0.0;
  double z_end_mm = 0.0;
  GroupProfile a;  // positive Stark sign
  GroupProfile b;  // negative Stark sign
};

struct MediumParameters {
  /// Field-amplitude absorption coefficient of the full two-group background.
  /// A single fully populated group absorbs intensity at this rate.
  double alpha0_per_mm = 2.0;
  double length_mm = 10.0;
  double refractive_index = 1.8;
  double t1_us = 164.0;
  double t2_us = 318.0;
  /// Homogeneous linewidth (FWHM); only the linear-response oracle uses it.
  double gamma_h_khz = 1.0;
  /// Gaussian FWHM of the inhomogeneous line for a tilted background; 0 keeps it flat.
  double tilt_fwhm_mhz = 0.0;
  /// Flat background assumed to extend to ±cutoff beyond the grid.
  double tail_cutoff_mhz = 2500.0;
};

struct IonEnsemble {
  DetuningGrid grid;
  std::vector<ProfileSlice> slices;
  MediumParameters medium;

  bool position_dependent() const { return slices.size() > 1; }
  const ProfileSlice& slice_at(double z_mm) const;
  std::size_t slice_index(double z_mm) const;

  /// Field absorption alpha0·(gA+gB)/2 at node i of a slice.
  double alpha_total(std::size_t slice, std::size_t i) const;
  double optical_depth() const { return medium.alpha0_per_mm * medium.length_mm; }

  /// Distance between the grid edges and the outermost structure feature.
  double guard_band() const;

  void validate() const;
};

/// One spectral hole-burning pass. The window is fixed in the lab frame while
/// the two groups are displaced by ±shift of the applied voltage.
struct BurnStep {
  double window_lo_mhz = -0.5;
  double window_hi_mhz = 0.5;
  double voltage_v = 0.0;
  double edge_width_mhz = 0.1;
  double depth = 1.0;
};

/// Smooth window indicator with error-function edges of length scale `edge_width`.
double window_edge(double x, double lo, double hi, double edge_width);

IonEnsemble new_background(const DetuningGrid& grid, const MediumParameters& medium);

IonEnsemble burn(const IonEnsemble& ensemble, const BurnStep& step, StarkCoefficient coeff,
                 double gap_mm, const FieldProfile* field = nullptr);

struct ShifterGeometry {
  double wide_hole_mhz = 18.0;
  double narrow_hole_mhz = 1.0;
  double prep_voltage_v = 88.0;
  double gap_mm = 6.0;
  double edge_width_mhz = 0.1;
  StarkCoefficient coefficient = StarkCoefficient::khz_per_v_per_cm(109.0);
};

/// Narrow transmission window at 0 MHz surrounded, over the wide-hole span,
/// only by positive-sign ions. A non-null prep_field makes the result
/// position dependent (one slice per field-profile node).
IonEnsemble prepare_frequency_shifter(const DetuningGrid& grid, const MediumParameters& medium,
                                      const ShifterGeometry& geometry = {},
                                      const FieldProfile* prep_field = nullptr);

/// A plain hole burned in both groups at zero field.
IonEnsemble prepare_hole(const DetuningGrid& grid, const MediumParameters& medium,
                         double center_mhz, double width_mhz, double edge_width_mhz);

/// Frequency shifter plus a wide hole at 2·hop, so that a Stark hop of `hop_mhz`
/// brings the negative group's hole onto the shifted filter.
IonEnsemble prepare_two_hole(const DetuningGrid& grid, const MediumParameters& medium,
                             const ShifterGeometry& geometry, double hop_mhz);

/// Profiles translated on the detuning axis: group A by +ds, group B by -ds.
IonEnsemble shift_profiles(const IonEnsemble& ensemble, double ds_mhz);

/// Combined relative absorption (gA+gB)/2 of a slice.
std::vector<double> combined_profile(const IonEnsemble& ensemble, std::size_t slice = 0);

/// Edges of the contiguous region around `center` where `profile` stays below `level`,
/// with linear interpolation of the crossings. Returns {center, center} if the
/// centre itself is above the level.
std::pair<double, double> transmission_window(const DetuningGrid& grid,
                                              const std::vector<double>& profile,
                                              double center_mhz, double level);

/// CSV columns: detuning_mhz, g_a, g_b, alpha_total_per_mm.
void write_profiles_csv(const IonEnsemble& ensemble, std::size_t slice, std::ostream& out);
/// Writes <dir>/<stem>.csv, or <stem>_z<k>.csv per slice when position dependent.
std::vector<std::string> write_profiles(const IonEnsemble& ensemble, const std::string& dir,
                                        const std::string& stem = "profiles");

}  // namespace slowshift
