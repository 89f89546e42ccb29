#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slowshift/analysis.hpp"
#include "slowshift/ensemble.hpp"
#include "slowshift/oracle.hpp"
#include "slowshift/solver.hpp"
#include "slowshift/stark.hpp"

namespace slowshift {

enum class ScenarioMode { Propagate, Readout, Extended };
enum class Structure { Shifter, Hole, Flat, TwoHole };
enum class Tau0Policy { Absolute, EnergyInside, MidExit };
enum class FieldShape { Uniform, Quadratic, File };
enum class CoefficientSource { Fit, Dipole };

/// Everything a run needs, with every default spelled out. Section and key
/// names of the text form are listed in the README.
struct ScenarioConfig {
  // [scenario]
  std::string name = "custom";
  std::string description;
  ScenarioMode mode = ScenarioMode::Propagate;

  // [ensemble]
  Structure structure = Structure::Shifter;
  double grid_half_span_mhz = 46.0;
  double grid_spacing_mhz = 0.02;
  MediumParameters medium{};
  double wide_hole_mhz = 18.0;
  double narrow_hole_mhz = 1.0;
  double prep_voltage_v = 88.0;
  double prep_coefficient_khz_per_v_per_cm = 109.0;
  double edge_width_mhz = 0.1;
  double hole_center_mhz = 0.0;
  double hop_mhz = 20.0;
  bool prep_uses_field_profile = false;

  // [stark]
  CoefficientSource coefficient_source = CoefficientSource::Fit;
  double coefficient_khz_per_v_per_cm = 116.7;
  DipoleGeometry dipole{};
  double gap_mm = 6.0;
  FieldShape field_shape = FieldShape::Uniform;
  double field_peak_to_peak = 0.002;
  std::string field_file;

  // [pulse]
  PulseSpec pulse{};

  // [drive]
  std::vector<double> voltages_v{0.0};
  Tau0Policy tau0_policy = Tau0Policy::EnergyInside;
  double tau0_us = 0.0;
  double inside_fraction = 0.99;
  double rise_time_us = 0.0;
  bool refine_tau0 = true;

  // [solver]
  double dt_us = 0.002;
  double dz_mm = 0.05;
  double window_us = 0.0;  // 0: automatic
  double drive_extra_window_us = 4.0;
  bool check_window = true;

  // [analysis]
  double threshold = 0.05;
  int spectrum_pad = 8;
  double lo_detuning_mhz = -5.0;
  double lo_amplitude_mhz = 0.0;  // 0: no beat output
  /// Excitation maps at the last step before tau0 - offset and the first
  /// step at or after tau0 + rise + offset.
  bool maps = false;
  double snapshot_offset_us = 0.0;
  double transfer_half_span_mhz = 8.0;
  double transfer_spacing_mhz = 0.005;
  double loss_gamma_mhz = 1.0;
  std::vector<double> switch_times_ns{0.0, 5.0, 100.0};

  // [output]
  std::string directory;
  int map_z_stride = 4;
  double map_max_detuning_mhz = 12.0;

  StarkCoefficient drive_coefficient() const;
  FieldProfile field_profile() const;
  ShifterGeometry shifter_geometry() const;
  DetuningGrid grid() const;
};

/// Parses the sectioned key = value text. Errors carry "source:line:column".
/// Relative file paths are resolved against base_dir.
ScenarioConfig parse_config(std::string_view text, const std::string& source = "<config>",
                            const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Fully resolved text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const ScenarioConfig& config);

/// Range and consistency checks that need no computation.
void validate_config(const ScenarioConfig& config);

struct ScenarioInfo {
  std::string name;
  std::string description;
};
/// Builtin scenarios in a fixed order.
std::vector<ScenarioInfo> list_scenarios();
ScenarioConfig builtin_scenario(const std::string& name);
bool is_builtin_scenario(const std::string& name);

/// Builds the spectral structure a config describes.
IonEnsemble build_ensemble(const ScenarioConfig& config);

struct Tau0Choice {
  double tau0_us = 0.0;
  /// Share of the input energy inside the crystal at tau0.
  double inside_fraction = 0.0;
  /// True if the requested inside fraction was never reached and the
  /// moment of largest inside fraction was used instead.
  bool fallback = false;
};

/// Switch time from entered/exited energy curves (same time base).
Tau0Choice choose_tau0(const ScenarioConfig& config, const std::vector<double>& tau_us,
                       const std::vector<double>& entered, const std::vector<double>& exited);

struct RunRecord {
  double voltage_v = 0.0;
  double shift_mhz = 0.0;
  Tau0Choice tau0;
  SimResult sim;
  Spectrum spectrum;
  InstFreqTrace trace;
  std::vector<double> beat;
  double passband_center_mhz = 0.0;
  double efficiency = 1.0;
  double transmission = 0.0;
  double peak_delay_us = 0.0;
  double centroid_delay_us = 0.0;
  double max_inside_fraction = 0.0;
  double medium_fraction = 0.0;  // at the time of largest inside fraction
  std::optional<ExcitationMap> map_pre;
  std::optional<ExcitationMap> map_post;
  double translation_mismatch = 0.0;
};

struct ReadoutRecord {
  double voltage_v = 0.0;
  double shift_mhz = 0.0;
  double passband_center_mhz = 0.0;
  TransferFunction transfer;
};

struct LossRecord {
  double switch_time_ns = 0.0;
  double eq5 = 0.0;
  double simulated = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  IonEnsemble ensemble;
  std::vector<RunRecord> runs;          // listed voltages, in config order
  std::optional<RunRecord> reference;   // V = 0 run when not listed
  std::vector<ReadoutRecord> readouts;
  std::vector<LossRecord> losses;
  std::vector<std::pair<std::string, std::string>> summary;

  const RunRecord& run_at(double voltage_v) const;
};

struct RunOptions {
  int threads = 0;  // 0: SLOWSHIFT_THREADS or the OpenMP default
};

/// Validates everything, then computes all runs in memory.
ScenarioResult execute_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Writes the bundle (CSVs, summary.txt, config.resolved.ini) to a fresh
/// directory. Files are staged next to it and renamed into place, so a
/// failure leaves no partial bundle. An existing directory is an Io error
/// unless overwrite is set.
void write_bundle(const ScenarioResult& result, const std::filesystem::path& dir, bool overwrite = false);

/// File-name label of a voltage, e.g. "p11V", "m22V", "0V".
std::string voltage_label(double voltage_v);

/// Transfer-function CSV: frequency_mhz, power, phase_rad, group_delay_us.
void write_transfer_csv(const TransferFunction& h, std::ostream& out);

}  // namespace slowshift
