#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "slowshift/csv.hpp"
#include "slowshift/error.hpp"
#include "slowshift/scenario.hpp"

namespace slowshift {

namespace {

struct Token {
  std::string_view text;
  int line = 0;
  int column = 0;
};

struct Context {
  const std::string& source;
  const std::filesystem::path& base_dir;
};

[[noreturn]] void parse_error(const Context& ctx, int line, int column, const std::string& msg) {
  fail(ErrorKind::Parse, ctx.source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_number(const Context& ctx, const Token& t) {
  double v = 0.0;
  if (!parse_number(t.text, v) || !std::isfinite(v))
    parse_error(ctx, t.line, t.column, "expected a number, got '" + std::string(t.text) + "'");
  return v;
}

std::vector<double> to_list(const Context& ctx, const Token& t) {
  std::vector<double> out;
  if (trim(t.text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = t.text.find(',', start);
    const auto raw = t.text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    std::size_t lead = 0;
    while (lead < raw.size() && (raw[lead] == ' ' || raw[lead] == '\t')) ++lead;
    out.push_back(to_number(ctx, Token{trim(raw), t.line, t.column + static_cast<int>(start + lead)}));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string render_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  return s;
}

using Setter = std::function<void(ScenarioConfig&, const Token&, const Context&)>;
using Getter = std::function<std::string(const ScenarioConfig&)>;

struct Field {
  std::string section;
  std::string key;
  Setter set;
  Getter get;
};

template <class T>
using Ref = T& (*)(ScenarioConfig&);

template <class T>
T& at(Ref<T> ref, const ScenarioConfig& c) {
  return ref(const_cast<ScenarioConfig&>(c));
}

Field number(std::string section, std::string key, Ref<double> ref) {
  return {std::move(section), std::move(key),
          [ref](ScenarioConfig& c, const Token& t, const Context& x) { ref(c) = to_number(x, t); },
          [ref](const ScenarioConfig& c) { return format_number(at(ref, c)); }};
}

Field integer(std::string section, std::string key, Ref<int> ref) {
  return {std::move(section), std::move(key),
          [ref](ScenarioConfig& c, const Token& t, const Context& x) {
            const double v = to_number(x, t);
            if (v != std::floor(v) || std::abs(v) > 1e9)
              parse_error(x, t.line, t.column, "expected an integer, got '" + std::string(t.text) + "'");
            ref(c) = static_cast<int>(v);
          },
          [ref](const ScenarioConfig& c) { return std::to_string(at(ref, c)); }};
}

Field boolean(std::string section, std::string key, Ref<bool> ref) {
  return {std::move(section), std::move(key),
          [ref](ScenarioConfig& c, const Token& t, const Context& x) {
            if (t.text == "true") ref(c) = true;
            else if (t.text == "false") ref(c) = false;
            else parse_error(x, t.line, t.column, "expected true or false, got '" + std::string(t.text) + "'");
          },
          [ref](const ScenarioConfig& c) { return std::string(at(ref, c) ? "true" : "false"); }};
}

Field text(std::string section, std::string key, Ref<std::string> ref) {
  return {std::move(section), std::move(key),
          [ref](ScenarioConfig& c, const Token& t, const Context&) { ref(c) = std::string(t.text); },
          [ref](const ScenarioConfig& c) { return at(ref, c); }};
}

Field path(std::string section, std::string key, Ref<std::string> ref) {
  return {std::move(section), std::move(key),
          [ref](ScenarioConfig& c, const Token& t, const Context& x) {
            std::filesystem::path p(std::string(t.text));
            if (!t.text.empty() && p.is_relative() && !x.base_dir.empty()) p = x.base_dir / p;
            ref(c) = t.text.empty() ? std::string() : p.lexically_normal().string();
          },
          [ref](const ScenarioConfig& c) { return at(ref, c); }};
}

Field list(std::string section, std::string key, Ref<std::vector<double>> ref) {
  return {std::move(section), std::move(key),
          [ref](ScenarioConfig& c, const Token& t, const Context& x) { ref(c) = to_list(x, t); },
          [ref](const ScenarioConfig& c) { return render_list(at(ref, c)); }};
}

template <class E>
Field choice(std::string section, std::string key, Ref<E> ref, std::vector<std::pair<std::string, E>> names) {
  return {std::move(section), std::move(key),
          [ref, names](ScenarioConfig& c, const Token& t, const Context& x) {
            for (const auto& [n, v] : names)
              if (t.text == n) {
                ref(c) = v;
                return;
              }
            std::string allowed;
            for (const auto& [n, v] : names) allowed += (allowed.empty() ? "" : ", ") + n;
            parse_error(x, t.line, t.column, "unknown value '" + std::string(t.text) + "' (expected one of " + allowed + ")");
          },
          [ref, names](const ScenarioConfig& c) {
            for (const auto& [n, v] : names)
              if (at(ref, c) == v) return n;
            return std::string("?");
          }};
}

const std::vector<std::pair<std::string, ScenarioMode>> kModes = {
    {"propagate", ScenarioMode::Propagate}, {"readout", ScenarioMode::Readout}, {"extended", ScenarioMode::Extended}};
const std::vector<std::pair<std::string, Structure>> kStructures = {{"shifter", Structure::Shifter},
                                                                    {"hole", Structure::Hole},
                                                                    {"flat", Structure::Flat},
                                                                    {"two-hole", Structure::TwoHole}};
const std::vector<std::pair<std::string, Tau0Policy>> kPolicies = {{"absolute", Tau0Policy::Absolute},
                                                                   {"energy-inside", Tau0Policy::EnergyInside},
                                                                   {"mid-exit", Tau0Policy::MidExit}};
const std::vector<std::pair<std::string, FieldShape>> kShapes = {
    {"uniform", FieldShape::Uniform}, {"quadratic", FieldShape::Quadratic}, {"file", FieldShape::File}};
const std::vector<std::pair<std::string, CoefficientSource>> kSources = {{"fit", CoefficientSource::Fit},
                                                                         {"dipole", CoefficientSource::Dipole}};

#define REF(T, expr) [](ScenarioConfig & c) -> T& { return c.expr; }

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      text("scenario", "name", REF(std::string, name)),
      text("scenario", "description", REF(std::string, description)),
      choice<ScenarioMode>("scenario", "mode", REF(ScenarioMode, mode), kModes),

      choice<Structure>("ensemble", "structure", REF(Structure, structure), kStructures),
      number("ensemble", "grid_half_span_mhz", REF(double, grid_half_span_mhz)),
      number("ensemble", "grid_spacing_mhz", REF(double, grid_spacing_mhz)),
      number("ensemble", "alpha0_per_mm", REF(double, medium.alpha0_per_mm)),
      number("ensemble", "length_mm", REF(double, medium.length_mm)),
      number("ensemble", "refractive_index", REF(double, medium.refractive_index)),
      number("ensemble", "t1_us", REF(double, medium.t1_us)),
      number("ensemble", "t2_us", REF(double, medium.t2_us)),
      number("ensemble", "gamma_h_khz", REF(double, medium.gamma_h_khz)),
      number("ensemble", "tilt_fwhm_mhz", REF(double, medium.tilt_fwhm_mhz)),
      number("ensemble", "tail_cutoff_mhz", REF(double, medium.tail_cutoff_mhz)),
      number("ensemble", "wide_hole_mhz", REF(double, wide_hole_mhz)),
      number("ensemble", "narrow_hole_mhz", REF(double, narrow_hole_mhz)),
      number("ensemble", "prep_voltage_v", REF(double, prep_voltage_v)),
      number("ensemble", "prep_coefficient_khz_per_v_per_cm", REF(double, prep_coefficient_khz_per_v_per_cm)),
      number("ensemble", "edge_width_mhz", REF(double, edge_width_mhz)),
      number("ensemble", "hole_center_mhz", REF(double, hole_center_mhz)),
      number("ensemble", "hop_mhz", REF(double, hop_mhz)),
      boolean("ensemble", "prep_uses_field_profile", REF(bool, prep_uses_field_profile)),

      choice<CoefficientSource>("stark", "coefficient_source", REF(CoefficientSource, coefficient_source), kSources),
      number("stark", "coefficient_khz_per_v_per_cm", REF(double, coefficient_khz_per_v_per_cm)),
      number("stark", "dipole_khz_per_v_per_cm", REF(double, dipole.mu_over_hbar_khz_per_v_cm)),
      number("stark", "dipole_angle_deg", REF(double, dipole.theta_deg)),
      number("stark", "gap_mm", REF(double, gap_mm)),
      choice<FieldShape>("stark", "field_profile", REF(FieldShape, field_shape), kShapes),
      number("stark", "field_peak_to_peak", REF(double, field_peak_to_peak)),
      path("stark", "field_file", REF(std::string, field_file)),

      number("pulse", "fwhm_us", REF(double, pulse.fwhm_us)),
      number("pulse", "center_detuning_mhz", REF(double, pulse.center_detuning_mhz)),
      number("pulse", "peak_rabi_mhz", REF(double, pulse.peak_rabi_mhz)),
      number("pulse", "delay_us", REF(double, pulse.delay_us)),
      number("pulse", "chirp_mhz_per_us", REF(double, pulse.chirp_mhz_per_us)),

      list("drive", "voltages_v", REF(std::vector<double>, voltages_v)),
      choice<Tau0Policy>("drive", "tau0_policy", REF(Tau0Policy, tau0_policy), kPolicies),
      number("drive", "tau0_us", REF(double, tau0_us)),
      number("drive", "inside_fraction", REF(double, inside_fraction)),
      number("drive", "rise_time_us", REF(double, rise_time_us)),
      boolean("drive", "refine_tau0", REF(bool, refine_tau0)),

      number("solver", "dt_us", REF(double, dt_us)),
      number("solver", "dz_mm", REF(double, dz_mm)),
      number("solver", "window_us", REF(double, window_us)),
      number("solver", "drive_extra_window_us", REF(double, drive_extra_window_us)),
      boolean("solver", "check_window", REF(bool, check_window)),

      number("analysis", "threshold", REF(double, threshold)),
      integer("analysis", "spectrum_pad", REF(int, spectrum_pad)),
      number("analysis", "lo_detuning_mhz", REF(double, lo_detuning_mhz)),
      number("analysis", "lo_amplitude_mhz", REF(double, lo_amplitude_mhz)),
      boolean("analysis", "maps", REF(bool, maps)),
      number("analysis", "snapshot_offset_us", REF(double, snapshot_offset_us)),
      number("analysis", "transfer_half_span_mhz", REF(double, transfer_half_span_mhz)),
      number("analysis", "transfer_spacing_mhz", REF(double, transfer_spacing_mhz)),
      number("analysis", "loss_gamma_mhz", REF(double, loss_gamma_mhz)),
      list("analysis", "switch_times_ns", REF(std::vector<double>, switch_times_ns)),

      path("output", "directory", REF(std::string, directory)),
      integer("output", "map_z_stride", REF(int, map_z_stride)),
      number("output", "map_max_detuning_mhz", REF(double, map_max_detuning_mhz)),
  };
  return fields;
}

#undef REF

struct Entry {
  std::string section;
  Token key;
  Token value;
};

}  // namespace

StarkCoefficient ScenarioConfig::drive_coefficient() const {
  if (coefficient_source == CoefficientSource::Dipole) return effective_coefficient(dipole);
  return StarkCoefficient::khz_per_v_per_cm(coefficient_khz_per_v_per_cm);
}

FieldProfile ScenarioConfig::field_profile() const {
  switch (field_shape) {
    case FieldShape::Uniform: return FieldProfile::uniform(gap_mm, medium.length_mm);
    case FieldShape::Quadratic: return FieldProfile::quadratic(gap_mm, medium.length_mm, field_peak_to_peak);
    case FieldShape::File: return FieldProfile::load_csv(field_file, gap_mm, medium.length_mm);
  }
  return FieldProfile::uniform(gap_mm, medium.length_mm);
}

ShifterGeometry ScenarioConfig::shifter_geometry() const {
  ShifterGeometry g;
  g.wide_hole_mhz = wide_hole_mhz;
  g.narrow_hole_mhz = narrow_hole_mhz;
  g.prep_voltage_v = prep_voltage_v;
  g.gap_mm = gap_mm;
  g.edge_width_mhz = edge_width_mhz;
  g.coefficient = StarkCoefficient::khz_per_v_per_cm(prep_coefficient_khz_per_v_per_cm);
  return g;
}

DetuningGrid ScenarioConfig::grid() const { return DetuningGrid::symmetric(grid_half_span_mhz, grid_spacing_mhz); }

ScenarioConfig parse_config(std::string_view input, const std::string& source, const std::filesystem::path& base_dir) {
  const Context ctx{source, base_dir};
  static const std::set<std::string> sections = {"scenario", "ensemble", "stark",    "pulse",
                                                 "drive",    "solver",   "analysis", "output"};
  std::vector<Entry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  bool any_section = false;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= input.size()) {
    const auto nl = input.find('\n', start);
    const std::string_view raw =
        input.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? input.size() + 1 : nl + 1;
    ++line_no;

    std::size_t lead = 0;
    while (lead < raw.size() && (raw[lead] == ' ' || raw[lead] == '\t')) ++lead;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const int col0 = static_cast<int>(lead) + 1;

    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) parse_error(ctx, line_no, col0, "missing ']' in section header");
      const auto rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest.front() != '#')
        parse_error(ctx, line_no, col0 + static_cast<int>(close) + 1, "unexpected text after section header");
      section = std::string(trim(line.substr(1, close - 1)));
      if (!sections.count(section)) parse_error(ctx, line_no, col0 + 1, "unknown section [" + section + "]");
      any_section = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(ctx, line_no, col0, "expected 'key = value'");
    if (section.empty()) parse_error(ctx, line_no, col0, "key outside of any section");
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) parse_error(ctx, line_no, col0, "missing key before '='");
    std::string_view value = line.substr(eq + 1);
    std::size_t vlead = 0;
    while (vlead < value.size() && (value[vlead] == ' ' || value[vlead] == '\t')) ++vlead;
    value.remove_prefix(vlead);
    for (std::size_t i = 1; i < value.size(); ++i)
      if (value[i] == '#' && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
        value = value.substr(0, i);
        break;
      }
    if (!value.empty() && value.front() == '#') value = {};
    value = trim(value);
    const int key_col = col0;
    const int value_col = col0 + static_cast<int>(eq + 1 + vlead);
    if (!seen.insert({section, std::string(key)}).second)
      parse_error(ctx, line_no, key_col, "duplicate key '" + std::string(key) + "' in [" + section + "]");
    entries.push_back({section, Token{key, line_no, key_col}, Token{value, line_no, value_col}});
  }
  if (entries.empty() && !any_section) fail(ErrorKind::Parse, source + ":1:1: configuration is empty");

  ScenarioConfig cfg;
  for (const auto& e : entries)
    if (e.section == "scenario" && e.key.text == "base") {
      const std::string base(e.value.text);
      if (!is_builtin_scenario(base))
        parse_error(ctx, e.value.line, e.value.column, "unknown base scenario '" + base + "'");
      cfg = builtin_scenario(base);
    }

  const auto& fields = schema();
  for (const auto& e : entries) {
    if (e.section == "scenario" && e.key.text == "base") continue;
    const auto it = std::find_if(fields.begin(), fields.end(),
                                 [&](const Field& f) { return f.section == e.section && f.key == e.key.text; });
    if (it == fields.end())
      parse_error(ctx, e.key.line, e.key.column, "unknown key '" + std::string(e.key.text) + "' in [" + e.section + "]");
    it->set(cfg, e.value, ctx);
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read configuration " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), p.string(), p.parent_path());
}

std::string render_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "# resolved configuration\n";
  std::string section;
  for (const auto& f : schema()) {
    if (f.section != section) {
      out << (section.empty() ? "" : "\n") << '[' << f.section << "]\n";
      section = f.section;
    }
    out << f.key << " = " << f.get(c) << '\n';
  }
  return out.str();
}

namespace {

void check(bool ok, const ScenarioConfig& c, const std::string& where, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidParameter, "scenario '" + c.name + "': " + where + " " + what);
}

bool text_is_renderable(const std::string& s) {
  if (s.find('\n') != std::string::npos || s.find('\r') != std::string::npos) return false;
  if (!s.empty() && (s.front() == ' ' || s.back() == ' ' || s.front() == '#')) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] == '#' && (s[i - 1] == ' ' || s[i - 1] == '\t')) return false;
  return true;
}

}  // namespace

void validate_config(const ScenarioConfig& c) {
  check(!c.name.empty() && text_is_renderable(c.name), c, "[scenario] name", "must be a non-empty single line");
  check(text_is_renderable(c.description), c, "[scenario] description", "must be a single line without comments");
  check(c.grid_spacing_mhz > 0.0, c, "[ensemble] grid_spacing_mhz", "must be > 0");
  check(c.grid_half_span_mhz >= 2.0 * c.grid_spacing_mhz, c, "[ensemble] grid_half_span_mhz",
        "must cover at least two spacings");
  check(c.medium.alpha0_per_mm >= 0.0, c, "[ensemble] alpha0_per_mm", "must be >= 0");
  check(c.medium.length_mm > 0.0, c, "[ensemble] length_mm", "must be > 0");
  check(c.medium.refractive_index >= 1.0, c, "[ensemble] refractive_index", "must be >= 1");
  check(c.medium.t1_us > 0.0 && c.medium.t2_us > 0.0, c, "[ensemble] t1_us/t2_us", "must be > 0");
  check(c.medium.gamma_h_khz > 0.0, c, "[ensemble] gamma_h_khz", "must be > 0");
  check(c.medium.tilt_fwhm_mhz >= 0.0, c, "[ensemble] tilt_fwhm_mhz", "must be >= 0");
  check(c.medium.tail_cutoff_mhz > c.grid_half_span_mhz, c, "[ensemble] tail_cutoff_mhz",
        "must exceed the grid half span");
  check(c.narrow_hole_mhz > 0.0, c, "[ensemble] narrow_hole_mhz", "must be > 0");
  check(c.wide_hole_mhz > 0.0, c, "[ensemble] wide_hole_mhz", "must be > 0");
  check(c.edge_width_mhz >= 0.0, c, "[ensemble] edge_width_mhz", "must be >= 0");
  check(c.hop_mhz > 0.0, c, "[ensemble] hop_mhz", "must be > 0");

  check(c.gap_mm > 0.0, c, "[stark] gap_mm", "must be > 0");
  check(c.field_peak_to_peak >= 0.0 && c.field_peak_to_peak < 0.5, c, "[stark] field_peak_to_peak",
        "must lie in [0, 0.5)");
  check(c.field_shape != FieldShape::File || !c.field_file.empty(), c, "[stark] field_file",
        "is required when field_profile = file");

  try {
    c.pulse.validate();
  } catch (const Error& e) {
    fail(e.kind(), "scenario '" + c.name + "': [pulse] " + e.what());
  }

  check(!c.voltages_v.empty() || c.mode == ScenarioMode::Extended, c, "[drive] voltages_v", "must not be empty");
  check(c.inside_fraction > 0.0 && c.inside_fraction <= 1.0, c, "[drive] inside_fraction", "must lie in (0, 1]");
  check(c.rise_time_us >= 0.0, c, "[drive] rise_time_us", "must be >= 0");
  check(c.tau0_us >= 0.0, c, "[drive] tau0_us", "must be >= 0");

  check(c.dt_us > 0.0, c, "[solver] dt_us", "must be > 0");
  check(c.dz_mm > 0.0, c, "[solver] dz_mm", "must be > 0");
  check(c.window_us >= 0.0, c, "[solver] window_us", "must be >= 0");
  check(c.drive_extra_window_us >= 0.0, c, "[solver] drive_extra_window_us", "must be >= 0");

  check(c.threshold > 0.0 && c.threshold < 1.0, c, "[analysis] threshold", "must lie in (0, 1)");
  check(c.spectrum_pad >= 1 && c.spectrum_pad <= 64, c, "[analysis] spectrum_pad", "must lie in [1, 64]");
  check(c.lo_amplitude_mhz >= 0.0, c, "[analysis] lo_amplitude_mhz", "must be >= 0");
  check(c.lo_amplitude_mhz == 0.0 || std::abs(c.lo_detuning_mhz) < 0.25 / c.dt_us, c, "[analysis] lo_detuning_mhz",
        "is not resolvable at this dt");
  check(c.snapshot_offset_us >= 0.0, c, "[analysis] snapshot_offset_us", "must be >= 0");
  check(c.transfer_half_span_mhz > 0.0 && c.transfer_spacing_mhz > 0.0 &&
            c.transfer_half_span_mhz / c.transfer_spacing_mhz <= 1e6,
        c, "[analysis] transfer_half_span_mhz/transfer_spacing_mhz", "must be > 0 with at most 1e6 points");
  check(c.loss_gamma_mhz > 0.0, c, "[analysis] loss_gamma_mhz", "must be > 0");
  check(!c.switch_times_ns.empty() || c.mode != ScenarioMode::Extended, c, "[analysis] switch_times_ns",
        "must not be empty");
  for (double t : c.switch_times_ns) check(t >= 0.0, c, "[analysis] switch_times_ns", "entries must be >= 0");

  check(text_is_renderable(c.directory), c, "[output] directory", "must be a single line");
  check(c.map_z_stride >= 1, c, "[output] map_z_stride", "must be >= 1");
  check(c.map_max_detuning_mhz > 0.0, c, "[output] map_max_detuning_mhz", "must be > 0");
}

namespace {

struct Builtin {
  const char* name;
  const char* description;
  const char* text;
};

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> table = {
      {"fig3a", "static passband of the frequency shifter under -22, -11, 0, 11, 22 V",
       "[scenario]\nmode = readout\n[drive]\nvoltages_v = -22, -11, 0, 11, 22\n"},
      {"fig3b", "1 us pulse shifted by -22, -11, 0, 11, 22 V applied while it is inside the crystal",
       "[drive]\nvoltages_v = -22, -11, 0, 11, 22\ntau0_policy = energy-inside\ninside_fraction = 0.99\n"},
      {"fig4", "excitation maps just before and after a 22 V switch",
       "[drive]\nvoltages_v = 22\ntau0_policy = energy-inside\n[analysis]\nmaps = true\n"},
      {"fig5", "11 V switched with a 0.2 us rise when half the pulse has exited; beat and instantaneous frequency",
       "[drive]\nvoltages_v = 11\ntau0_policy = mid-exit\nrise_time_us = 0.2\n"
       "[analysis]\nlo_detuning_mhz = -5\nlo_amplitude_mhz = 0.01\n"},
      {"fig6-sweep", "relative efficiency over a -22 ... 22 V sweep",
       "[drive]\nvoltages_v = -22, -18, -15, -12, -9, -6, -3, 0, 3, 6, 9, 12, 15, 18, 22\n"
       "tau0_policy = energy-inside\n"},
      {"fig7-extended", "loss of a 20 MHz two-hole hop against its switching time",
       "[scenario]\nmode = extended\n[ensemble]\nstructure = two-hole\ngrid_half_span_mhz = 70\n"
       "grid_spacing_mhz = 0.05\nhop_mhz = 20\n[solver]\ndt_us = 0.00125\n"
       "[analysis]\nloss_gamma_mhz = 1\nswitch_times_ns = 0, 5, 50, 100\n"},
      {"transit", "unshifted 1 us pulse through the shifter: delay and energy partition",
       "[drive]\nvoltages_v = 0\n"},
  };
  return table;
}

}  // namespace

std::vector<ScenarioInfo> list_scenarios() {
  std::vector<ScenarioInfo> out;
  for (const auto& b : builtins()) out.push_back({b.name, b.description});
  return out;
}

bool is_builtin_scenario(const std::string& name) {
  return std::any_of(builtins().begin(), builtins().end(), [&](const Builtin& b) { return name == b.name; });
}

ScenarioConfig builtin_scenario(const std::string& name) {
  for (const auto& b : builtins())
    if (name == b.name) {
      ScenarioConfig c = parse_config(b.text, "builtin:" + name);
      c.name = b.name;
      c.description = b.description;
      return c;
    }
  fail(ErrorKind::InvalidParameter, "unknown scenario '" + name + "'");
}

}  // namespace slowshift
