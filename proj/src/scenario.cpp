#include "slowshift/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "slowshift/csv.hpp"
#include "slowshift/error.hpp"

namespace slowshift {

namespace {

template <class F>
auto in_context(const ScenarioConfig& c, const std::string& step, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), "scenario '" + c.name + "', " + step + ": " + e.what());
  }
}

// Static shift of the positive group at the field reference position.
double reference_shift(const ScenarioConfig& c, double voltage) {
  return c.drive_coefficient().mhz_per_v_per_mm() * voltage / c.gap_mm;
}

std::vector<double> cumulative_energy(const std::vector<cplx>& env, double dt) {
  std::vector<double> out(env.size(), 0.0);
  for (std::size_t n = 1; n < env.size(); ++n)
    out[n] = out[n - 1] + 0.5 * dt * (std::norm(env[n - 1]) + std::norm(env[n]));
  return out;
}

// Time of the intensity maximum, refined by a parabola.
double peak_time(const std::vector<double>& tau, const std::vector<cplx>& env) {
  std::size_t k = 0;
  for (std::size_t n = 1; n < env.size(); ++n)
    if (std::norm(env[n]) > std::norm(env[k])) k = n;
  if (k == 0 || k + 1 == env.size()) return tau[k];
  const double a = std::norm(env[k - 1]), b = std::norm(env[k]), c = std::norm(env[k + 1]);
  const double den = a - 2.0 * b + c;
  const double off = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
  return tau[k] + off * (tau[1] - tau[0]);
}

double centroid_time(const std::vector<double>& tau, const std::vector<cplx>& env) {
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < env.size(); ++n) {
    num += tau[n] * std::norm(env[n]);
    den += std::norm(env[n]);
  }
  return den > 0.0 ? num / den : 0.0;
}

std::string policy_name(Tau0Policy p) {
  switch (p) {
    case Tau0Policy::Absolute: return "absolute";
    case Tau0Policy::EnergyInside: return "energy-inside";
    case Tau0Policy::MidExit: return "mid-exit";
  }
  return "?";
}

RunRecord analyse_run(const ScenarioConfig& c, const IonEnsemble& e, double voltage, const Tau0Choice& tau0,
                      SimResult sim, const SimResult* reference) {
  RunRecord r;
  r.voltage_v = voltage;
  r.shift_mhz = reference_shift(c, voltage);
  r.tau0 = tau0;
  r.sim = std::move(sim);
  const auto& s = r.sim;
  r.spectrum = spectrum(s.transmitted_mhz, s.dt_us, Window::Hann, c.spectrum_pad);
  r.trace = instantaneous_frequency(s.transmitted_mhz, s.dt_us, c.threshold);
  if (c.lo_amplitude_mhz > 0.0) r.beat = beat_pattern(s.transmitted_mhz, s.dt_us, c.lo_detuning_mhz, c.lo_amplitude_mhz);
  r.passband_center_mhz = passband_center(e, r.shift_mhz, c.pulse.center_detuning_mhz + r.shift_mhz);
  r.efficiency = reference ? relative_efficiency(s, *reference) : 1.0;
  r.transmission = s.input_energy() > 0.0 ? s.transmitted_energy() / s.input_energy() : 0.0;
  r.peak_delay_us = peak_time(s.tau_us, s.transmitted_mhz) - peak_time(s.tau_us, s.input_mhz);
  r.centroid_delay_us = centroid_time(s.tau_us, s.transmitted_mhz) - centroid_time(s.tau_us, s.input_mhz);

  const auto& h = s.energy;
  const double total = h.entered.back();
  std::size_t best = 0;
  for (std::size_t n = 0; n < h.tau_us.size(); ++n)
    if (h.entered[n] - h.exited[n] > h.entered[best] - h.exited[best]) best = n;
  r.max_inside_fraction = total > 0.0 ? (h.entered[best] - h.exited[best]) / total : 0.0;
  r.medium_fraction = energy_partition(s, h.tau_us[best]).medium_fraction();

  if (s.snapshots.size() == 2) {
    r.map_pre = excitation_map(s.snapshots[0], e.grid);
    r.map_post = excitation_map(s.snapshots[1], e.grid);
    r.translation_mismatch = translation_mismatch(
        *r.map_pre, *r.map_post, s.snapshots[1].stark_shift_mhz - s.snapshots[0].stark_shift_mhz);
  }
  return r;
}

void add(std::vector<std::pair<std::string, std::string>>& s, const std::string& k, double v) {
  s.emplace_back(k, format_number(v));
}
void add(std::vector<std::pair<std::string, std::string>>& s, const std::string& k, const std::string& v) {
  s.emplace_back(k, v);
}

void summarize_run(std::vector<std::pair<std::string, std::string>>& s, const std::string& p, const RunRecord& r) {
  add(s, p + "voltage_v", r.voltage_v);
  add(s, p + "shift_mhz", r.shift_mhz);
  add(s, p + "tau0_us", r.tau0.tau0_us);
  add(s, p + "tau0_inside_fraction", r.tau0.inside_fraction);
  add(s, p + "spectrum_peak_mhz", r.spectrum.peak_mhz);
  add(s, p + "passband_center_mhz", r.passband_center_mhz);
  add(s, p + "relative_efficiency", r.efficiency);
  add(s, p + "transmission", r.transmission);
  add(s, p + "peak_delay_us", r.peak_delay_us);
  add(s, p + "centroid_delay_us", r.centroid_delay_us);
  add(s, p + "max_inside_fraction", r.max_inside_fraction);
  add(s, p + "medium_energy_fraction", r.medium_fraction);
  if (r.map_pre) {
    add(s, p + "map_pre_tau_us", r.map_pre->tau_us);
    add(s, p + "map_post_tau_us", r.map_post->tau_us);
    add(s, p + "translation_mismatch", r.translation_mismatch);
  }
  add(s, p + "window_tail_fraction", r.sim.diagnostics.window_tail_fraction);
  add(s, p + "max_norm_excess", r.sim.diagnostics.max_norm_excess);
}

void add_fit(std::vector<std::pair<std::string, std::string>>& s, const std::vector<double>& v,
             const std::vector<double>& f) {
  std::vector<double> distinct = v;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) return;
  const LineFit fit = fit_line(v, f);
  add(s, "shift_slope_mhz_per_v", fit.slope);
  add(s, "shift_intercept_mhz", fit.intercept);
  add(s, "shift_r_squared", fit.r_squared);
}

void execute_readout(const ScenarioConfig& c, ScenarioResult& res) {
  for (double v : c.voltages_v) {
    ReadoutRecord r;
    r.voltage_v = v;
    r.shift_mhz = reference_shift(c, v);
    const double center = c.pulse.center_detuning_mhz + r.shift_mhz;
    const auto n = static_cast<std::size_t>(std::llround(2.0 * c.transfer_half_span_mhz / c.transfer_spacing_mhz)) + 1;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
      f[i] = center - c.transfer_half_span_mhz + c.transfer_spacing_mhz * static_cast<double>(i);
    in_context(c, "readout at " + format_number(v) + " V", [&] {
      r.transfer = linear_transfer(res.ensemble, f, r.shift_mhz);
      r.passband_center_mhz = passband_center(res.ensemble, r.shift_mhz, center);
      return 0;
    });
    res.readouts.push_back(std::move(r));
  }
  std::vector<double> v, f;
  for (const auto& r : res.readouts) {
    v.push_back(r.voltage_v);
    f.push_back(r.passband_center_mhz);
    const std::string p = "readout." + voltage_label(r.voltage_v) + ".";
    add(res.summary, p + "voltage_v", r.voltage_v);
    add(res.summary, p + "shift_mhz", r.shift_mhz);
    add(res.summary, p + "passband_center_mhz", r.passband_center_mhz);
  }
  add_fit(res.summary, v, f);
}

void execute_extended(const ScenarioConfig& c, ScenarioResult& res, const RunOptions& ro) {
  ExtendedShiftOptions o;
  o.hop_mhz = c.hop_mhz;
  o.grid_half_span_mhz = c.grid_half_span_mhz;
  o.grid_spacing_mhz = c.grid_spacing_mhz;
  o.dt_us = c.dt_us;
  o.dz_mm = c.dz_mm;
  o.medium = c.medium;
  o.geometry = c.shifter_geometry();
  o.pulse = c.pulse;
  o.threads = ro.threads;
  for (double t : c.switch_times_ns) {
    LossRecord l;
    l.switch_time_ns = t;
    l.eq5 = extended_shift_loss(c.loss_gamma_mhz, t, LossMethod::Eq5, o);
    l.simulated = in_context(c, "extended hop with T = " + format_number(t) + " ns",
                             [&] { return extended_shift_loss(c.loss_gamma_mhz, t, LossMethod::Simulate, o); });
    res.losses.push_back(l);
    const std::string p = "loss.t" + format_number(t) + "ns.";
    add(res.summary, p + "eq5", l.eq5);
    add(res.summary, p + "simulated", l.simulated);
  }
}

void execute_propagate(const ScenarioConfig& c, ScenarioResult& res, const RunOptions& ro) {
  const IonEnsemble& e = res.ensemble;
  const FieldProfile field = in_context(c, "field profile", [&] { return c.field_profile(); });
  const bool driven = std::any_of(c.voltages_v.begin(), c.voltages_v.end(), [](double v) { return v != 0.0; });
  const double window = c.window_us > 0.0 ? c.window_us
                                          : in_context(c, "window", [&] { return automatic_window(e, c.pulse); }) +
                                                (driven ? c.drive_extra_window_us : 0.0);

  SolverOptions so;
  so.dt_us = c.dt_us;
  so.dz_mm = c.dz_mm;
  so.window_us = window;
  so.check_window = c.check_window;
  so.threads = ro.threads;

  // Everything is checked before the first solver run.
  for (double v : c.voltages_v) {
    const StarkDrive d = step_drive(v, 0.0, c.rise_time_us, field, c.drive_coefficient());
    in_context(c, "run at " + format_number(v) + " V", [&] {
      check_preconditions(e, c.pulse, d, so);
      return 0;
    });
  }

  // Linear pre-pass on the solver's time base.
  const auto N = static_cast<std::size_t>(std::ceil(window / c.dt_us - 1e-9));
  std::vector<double> tau(N + 1);
  std::vector<cplx> input(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    tau[n] = c.dt_us * static_cast<double>(n);
    input[n] = c.pulse.envelope_mhz(tau[n]);
  }
  Tau0Choice tau0 = in_context(c, "switch time", [&] {
    const auto out = propagate_linear(e, input, c.dt_us);
    return choose_tau0(c, tau, cumulative_energy(input, c.dt_us), cumulative_energy(out, c.dt_us));
  });

  SimResult base = in_context(c, "reference run at 0 V", [&] { return propagate(e, c.pulse, StarkDrive::none(), so); });
  if (c.refine_tau0 && c.tau0_policy != Tau0Policy::Absolute)
    tau0 = choose_tau0(c, base.tau_us, base.energy.entered, base.energy.exited);
  add(res.summary, "tau0_policy", policy_name(c.tau0_policy));
  add(res.summary, "tau0_us", tau0.tau0_us);
  add(res.summary, "tau0_inside_fraction", tau0.inside_fraction);
  add(res.summary, "tau0_fallback", tau0.fallback ? "true" : "false");
  add(res.summary, "window_us", window);

  for (double v : c.voltages_v) {
    if (v == 0.0) {
      res.runs.push_back(analyse_run(c, e, v, tau0, base, &base));
      continue;
    }
    const std::string step = "run at " + format_number(v) + " V";
    SolverOptions run_opt = so;
    if (c.maps) {
      const double before = std::ceil((tau0.tau0_us - c.snapshot_offset_us) / c.dt_us - 1e-9) - 1.0;
      const double after = std::ceil((tau0.tau0_us + c.rise_time_us + c.snapshot_offset_us) / c.dt_us - 1e-9);
      run_opt.snapshot_times_us = {std::max(before, 0.0) * c.dt_us, after * c.dt_us};
    }
    const StarkDrive d = step_drive(v, tau0.tau0_us, c.rise_time_us, field, c.drive_coefficient());
    SimResult sim = in_context(c, step, [&] { return propagate(e, c.pulse, d, run_opt); });
    res.runs.push_back(in_context(c, step, [&] { return analyse_run(c, e, v, tau0, std::move(sim), &base); }));
  }
  if (std::none_of(c.voltages_v.begin(), c.voltages_v.end(), [](double v) { return v == 0.0; }))
    res.reference = analyse_run(c, e, 0.0, tau0, std::move(base), nullptr);

  std::vector<double> v, f;
  for (const auto& r : res.runs) {
    summarize_run(res.summary, "run." + voltage_label(r.voltage_v) + ".", r);
    v.push_back(r.voltage_v);
    f.push_back(r.spectrum.peak_mhz);
  }
  if (res.reference) summarize_run(res.summary, "run.reference.", *res.reference);
  add_fit(res.summary, v, f);
}

}  // namespace

std::string voltage_label(double v) {
  if (v == 0.0) return "0V";
  std::string s = format_number(std::abs(v));
  std::replace(s.begin(), s.end(), '.', 'd');
  return (v > 0.0 ? "p" : "m") + s + "V";
}

IonEnsemble build_ensemble(const ScenarioConfig& c) {
  return in_context(c, "ensemble", [&] {
    const DetuningGrid grid = c.grid();
    switch (c.structure) {
      case Structure::Flat: return new_background(grid, c.medium);
      case Structure::Hole:
        return prepare_hole(grid, c.medium, c.hole_center_mhz, c.narrow_hole_mhz, c.edge_width_mhz);
      case Structure::TwoHole: return prepare_two_hole(grid, c.medium, c.shifter_geometry(), c.hop_mhz);
      case Structure::Shifter: break;
    }
    if (c.prep_uses_field_profile) {
      const FieldProfile f = c.field_profile();
      return prepare_frequency_shifter(grid, c.medium, c.shifter_geometry(), &f);
    }
    return prepare_frequency_shifter(grid, c.medium, c.shifter_geometry());
  });
}

Tau0Choice choose_tau0(const ScenarioConfig& c, const std::vector<double>& tau, const std::vector<double>& entered,
                       const std::vector<double>& exited) {
  require(!tau.empty() && entered.size() == tau.size() && exited.size() == tau.size(), ErrorKind::InvalidInput,
          "energy curves do not match the time base");
  const double total = entered.back();
  require(total > 0.0, ErrorKind::InvalidInput, "input pulse carries no energy");
  Tau0Choice out;
  auto inside = [&](std::size_t n) { return (entered[n] - exited[n]) / total; };
  switch (c.tau0_policy) {
    case Tau0Policy::Absolute: {
      out.tau0_us = c.tau0_us;
      const double p = std::clamp(c.tau0_us / (tau[1] - tau[0]), 0.0, static_cast<double>(tau.size() - 1));
      out.inside_fraction = inside(static_cast<std::size_t>(std::llround(p)));
      return out;
    }
    case Tau0Policy::EnergyInside: {
      std::size_t best = 0;
      for (std::size_t n = 0; n < tau.size(); ++n) {
        if (inside(n) >= c.inside_fraction) {
          out.tau0_us = tau[n];
          out.inside_fraction = inside(n);
          return out;
        }
        if (inside(n) > inside(best)) best = n;
      }
      out.tau0_us = tau[best];
      out.inside_fraction = inside(best);
      out.fallback = true;
      return out;
    }
    case Tau0Policy::MidExit: {
      const double half = 0.5 * exited.back();
      require(half > 0.0, ErrorKind::Precondition, "no energy leaves the crystal; mid-exit switch time undefined");
      std::size_t n = 0;
      while (n + 1 < tau.size() && exited[n] < half) ++n;
      out.tau0_us = tau[n];
      out.inside_fraction = inside(n);
      return out;
    }
  }
  return out;
}

const RunRecord& ScenarioResult::run_at(double v) const {
  for (const auto& r : runs)
    if (r.voltage_v == v) return r;
  if (v == 0.0 && reference) return *reference;
  fail(ErrorKind::InvalidParameter, "no run at " + format_number(v) + " V");
}

ScenarioResult execute_scenario(const ScenarioConfig& c, const RunOptions& ro) {
  validate_config(c);
  ScenarioResult res;
  res.config = c;
  res.ensemble = build_ensemble(c);
  const IonEnsemble& e = res.ensemble;

  add(res.summary, "scenario", c.name);
  add(res.summary, "description", c.description);
  std::string mode = c.mode == ScenarioMode::Propagate ? "propagate" : c.mode == ScenarioMode::Readout ? "readout" : "extended";
  add(res.summary, "mode", mode);
  add(res.summary, "optical_depth", e.optical_depth());
  add(res.summary, "stark_coefficient_khz_per_v_per_cm", c.drive_coefficient().khz_per_v_per_cm());
  if (c.mode != ScenarioMode::Extended) {
    add(res.summary, "guard_band_mhz", e.guard_band());
    in_context(c, "oracle", [&] {
      add(res.summary, "oracle_group_delay_us", group_delay_at(e, c.pulse.center_detuning_mhz));
      add(res.summary, "oracle_center_loss", intensity_loss_at(e, c.pulse.center_detuning_mhz));
      return 0;
    });
  }

  switch (c.mode) {
    case ScenarioMode::Readout: execute_readout(c, res); break;
    case ScenarioMode::Extended: execute_extended(c, res, ro); break;
    case ScenarioMode::Propagate: execute_propagate(c, res, ro); break;
  }
  return res;
}

void write_transfer_csv(const TransferFunction& h, std::ostream& out) {
  const auto phase = h.phase();
  const auto delay = h.group_delay();
  out << "frequency_mhz,power,phase_rad,group_delay_us\n";
  for (std::size_t i = 0; i < h.size(); ++i)
    out << format_number(h.frequency_mhz()[i]) << ',' << format_number(h.power(i)) << ',' << format_number(phase[i])
        << ',' << format_number(delay[i]) << '\n';
}

namespace {

void write_run(const ScenarioConfig& c, const RunRecord& r, const std::filesystem::path& dir, const std::string& stem) {
  const auto& s = r.sim;
  {
    auto out = open_output(dir / (stem + "_transmitted.csv"));
    write_envelope_csv(s.tau_us, s.transmitted_mhz, out);
  }
  {
    auto out = open_output(dir / (stem + "_spectrum.csv"));
    write_spectrum_csv(r.spectrum, out);
  }
  {
    auto out = open_output(dir / (stem + "_inst_freq.csv"));
    write_trace_csv(r.trace, out);
  }
  {
    auto out = open_output(dir / (stem + "_energy.csv"));
    write_energy_csv(s.energy, out);
  }
  if (!r.beat.empty()) {
    auto out = open_output(dir / (stem + "_beat.csv"));
    write_beat_csv(s.tau_us, r.beat, out);
  }
  if (r.map_pre) {
    auto pre = open_output(dir / (stem + "_map_pre.csv"));
    write_map_csv(*r.map_pre, pre, static_cast<std::size_t>(c.map_z_stride), c.map_max_detuning_mhz);
    auto post = open_output(dir / (stem + "_map_post.csv"));
    write_map_csv(*r.map_post, post, static_cast<std::size_t>(c.map_z_stride), c.map_max_detuning_mhz);
  }
}

void write_contents(const ScenarioResult& res, const std::filesystem::path& dir) {
  const auto& c = res.config;
  {
    auto out = open_output(dir / "config.resolved.ini");
    out << render_config(c);
  }
  {
    auto out = open_output(dir / "summary.txt");
    for (const auto& [k, v] : res.summary) out << k << ": " << v << '\n';
  }
  write_profiles(res.ensemble, dir.string(), "profiles");

  if (c.mode == ScenarioMode::Propagate && !res.runs.empty()) {
    const auto& s = res.runs.front().sim;
    auto in = open_output(dir / "input.csv");
    write_envelope_csv(s.tau_us, s.input_mhz, in);
    std::vector<double> f;
    const auto n = static_cast<std::size_t>(std::llround(2.0 * c.transfer_half_span_mhz / c.transfer_spacing_mhz)) + 1;
    for (std::size_t i = 0; i < n; ++i)
      f.push_back(c.pulse.center_detuning_mhz - c.transfer_half_span_mhz + c.transfer_spacing_mhz * static_cast<double>(i));
    auto tf = open_output(dir / "transfer.csv");
    write_transfer_csv(linear_transfer(res.ensemble, f), tf);
  }
  for (const auto& r : res.runs) write_run(c, r, dir, "run_" + voltage_label(r.voltage_v));
  if (res.reference) write_run(c, *res.reference, dir, "reference");
  for (const auto& r : res.readouts) {
    auto out = open_output(dir / ("transfer_" + voltage_label(r.voltage_v) + ".csv"));
    write_transfer_csv(r.transfer, out);
  }
  if (!res.losses.empty()) {
    auto out = open_output(dir / "loss.csv");
    out << "switch_time_ns,eq5_loss,simulated_loss\n";
    for (const auto& l : res.losses)
      out << format_number(l.switch_time_ns) << ',' << format_number(l.eq5) << ',' << format_number(l.simulated) << '\n';
  }
}

}  // namespace

void write_bundle(const ScenarioResult& res, const std::filesystem::path& dir_in, bool overwrite) {
  namespace fs = std::filesystem;
  const fs::path dir = dir_in.lexically_normal();
  require(!dir.empty() && dir.filename() != "." && dir.filename() != "..", ErrorKind::Io,
          "invalid output directory '" + dir_in.string() + "'");
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    require(overwrite, ErrorKind::Io, "output directory " + dir.string() + " already exists");
    require(fs::exists(dir / "config.resolved.ini", ec), ErrorKind::Io,
            "refusing to replace " + dir.string() + ": it is not a result bundle");
  }
  fs::path stage = dir;
  stage += ".partial";
  fs::remove_all(stage, ec);
  if (!dir.parent_path().empty()) fs::create_directories(dir.parent_path(), ec);
  if (!fs::create_directory(stage, ec))
    fail(ErrorKind::Io, "cannot create " + stage.string() + (ec ? ": " + ec.message() : ""));
  try {
    write_contents(res, stage);
    if (fs::exists(dir)) fs::remove_all(dir);
    fs::rename(stage, dir);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(stage, ec);
    fail(ErrorKind::Io, e.what());
  } catch (...) {
    fs::remove_all(stage, ec);
    throw;
  }
}

}  // namespace slowshift
