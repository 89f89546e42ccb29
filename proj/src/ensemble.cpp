#include "slowshift/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "slowshift/csv.hpp"
#include "slowshift/error.hpp"

namespace slowshift {

// ---- grid -----------------------------------------------------------------

DetuningGrid::DetuningGrid(double first_mhz, double spacing_mhz, std::size_t count)
    : first_(first_mhz), spacing_(spacing_mhz), count_(count) {
  validate();
}

DetuningGrid DetuningGrid::symmetric(double half_span_mhz, double spacing_mhz) {
  require(spacing_mhz > 0.0 && std::isfinite(spacing_mhz), ErrorKind::InvalidParameter,
          "grid spacing must be positive");
  require(half_span_mhz > 0.0 && std::isfinite(half_span_mhz), ErrorKind::InvalidParameter,
          "grid half span must be positive");
  auto m = static_cast<std::size_t>(std::llround(half_span_mhz / spacing_mhz));
  require(m >= 1, ErrorKind::InvalidParameter, "grid half span is below one spacing");
  return DetuningGrid(-static_cast<double>(m) * spacing_mhz, spacing_mhz, 2 * m + 1);
}

double DetuningGrid::max_abs() const { return std::max(std::abs(front()), std::abs(back())); }

bool DetuningGrid::contains(double d) const { return d >= front() && d <= back(); }

std::vector<double> DetuningGrid::points() const {
  std::vector<double> p(count_);
  for (std::size_t i = 0; i < count_; ++i) p[i] = (*this)[i];
  return p;
}

void DetuningGrid::validate() const {
  require(spacing_ > 0.0 && std::isfinite(spacing_), ErrorKind::InvalidParameter,
          "grid spacing must be positive");
  require(std::isfinite(first_), ErrorKind::InvalidParameter, "grid origin must be finite");
  require(count_ >= 3, ErrorKind::InvalidParameter, "grid needs at least three points");
  require(std::abs(front() + back()) <= spacing_ * (1.0 + 1e-9), ErrorKind::InvalidParameter,
          "grid must be symmetric about 0 within one spacing");
}

// ---- ensemble -------------------------------------------------------------

namespace {

double background_level(const MediumParameters& m, double detuning) {
  if (m.tilt_fwhm_mhz <= 0.0) return 1.0;
  double x = detuning / m.tilt_fwhm_mhz;
  return std::exp(-4.0 * std::log(2.0) * x * x);
}

void validate_medium(const MediumParameters& m) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  require(m.alpha0_per_mm >= 0.0 && std::isfinite(m.alpha0_per_mm), ErrorKind::InvalidParameter,
          "alpha0 must be non-negative");
  require(positive(m.length_mm), ErrorKind::InvalidParameter, "crystal length must be positive");
  require(m.refractive_index >= 1.0 && std::isfinite(m.refractive_index), ErrorKind::InvalidParameter,
          "refractive index must be >= 1");
  require(positive(m.t1_us), ErrorKind::InvalidParameter, "T1 must be positive");
  require(positive(m.t2_us), ErrorKind::InvalidParameter, "T2 must be positive");
  require(m.t2_us <= 2.0 * m.t1_us, ErrorKind::InvalidParameter, "T2 must not exceed 2*T1");
  require(positive(m.gamma_h_khz), ErrorKind::InvalidParameter, "gammaH must be positive");
  require(m.tilt_fwhm_mhz >= 0.0 && std::isfinite(m.tilt_fwhm_mhz), ErrorKind::InvalidParameter,
          "tilt FWHM must be non-negative");
  require(positive(m.tail_cutoff_mhz), ErrorKind::InvalidParameter, "tail cutoff must be positive");
}

// Linear interpolation on the grid, constant extrapolation. Positions within
// 1e-9 of a node snap to it so grid-aligned shifts are exact.
double sample(const std::vector<double>& g, double pos) {
  const double last = static_cast<double>(g.size() - 1);
  if (pos <= 0.0) return g.front();
  if (pos >= last) return g.back();
  double r = std::round(pos);
  if (std::abs(pos - r) < 1e-9) return g[static_cast<std::size_t>(r)];
  auto j = static_cast<std::size_t>(pos);
  double t = pos - static_cast<double>(j);
  return g[j] + t * (g[j + 1] - g[j]);
}

// Inserts slice boundaries at the given positions, copying profiles.
std::vector<ProfileSlice> split_slices(const std::vector<ProfileSlice>& slices,
                                       const std::vector<double>& cuts) {
  std::vector<ProfileSlice> out;
  for (const auto& s : slices) {
    double begin = s.z_begin_mm;
    for (double c : cuts) {
      if (c > begin + 1e-12 && c < s.z_end_mm - 1e-12) {
        ProfileSlice part = s;
        part.z_begin_mm = begin;
        part.z_end_mm = c;
        out.push_back(std::move(part));
        begin = c;
      }
    }
    ProfileSlice last = s;
    last.z_begin_mm = begin;
    out.push_back(std::move(last));
  }
  return out;
}

}  // namespace

std::size_t IonEnsemble::slice_index(double z_mm) const {
  for (std::size_t k = 0; k + 1 < slices.size(); ++k)
    if (z_mm < slices[k].z_end_mm) return k;
  return slices.size() - 1;
}

const ProfileSlice& IonEnsemble::slice_at(double z_mm) const { return slices[slice_index(z_mm)]; }

double IonEnsemble::alpha_total(std::size_t slice, std::size_t i) const {
  const auto& s = slices.at(slice);
  return medium.alpha0_per_mm * 0.5 * (s.a.density.at(i) + s.b.density.at(i));
}

double IonEnsemble::guard_band() const {
  const std::size_t n = grid.size();
  std::size_t lo = n, hi = 0;
  auto scan = [&](const std::vector<double>& g) {
    const double g0 = g.front() / background_level(medium, grid.front());
    const double g1 = g.back() / background_level(medium, grid.back());
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(g[i] / background_level(medium, grid[i]) - g0) > 1e-6) {
        lo = std::min(lo, i);
        break;
      }
    }
    for (std::size_t i = n; i-- > 0;) {
      if (std::abs(g[i] / background_level(medium, grid[i]) - g1) > 1e-6) {
        hi = std::max(hi, i);
        break;
      }
    }
  };
  for (const auto& s : slices) {
    scan(s.a.density);
    scan(s.b.density);
  }
  if (lo == n) return grid.back() - grid.front();  // featureless
  return std::min(grid[lo] - grid.front(), grid.back() - grid[hi]);
}

void IonEnsemble::validate() const {
  grid.validate();
  validate_medium(medium);
  require(!slices.empty(), ErrorKind::InvalidParameter, "ensemble has no profile slices");
  const double tol = 1e-9 * medium.length_mm;
  require(std::abs(slices.front().z_begin_mm) <= tol &&
              std::abs(slices.back().z_end_mm - medium.length_mm) <= tol,
          ErrorKind::InvalidParameter, "profile slices must cover [0, length]");
  require(medium.tail_cutoff_mhz > grid.max_abs(), ErrorKind::InvalidParameter,
          "tail cutoff must lie beyond the detuning grid");
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const auto& s = slices[k];
    require(s.z_end_mm > s.z_begin_mm, ErrorKind::InvalidParameter, "empty profile slice");
    if (k > 0)
      require(std::abs(s.z_begin_mm - slices[k - 1].z_end_mm) <= tol, ErrorKind::InvalidParameter,
              "profile slices must be contiguous");
    for (const auto* g : {&s.a.density, &s.b.density}) {
      require(g->size() == grid.size(), ErrorKind::InvalidParameter,
              "profile length does not match the grid");
      for (double v : *g)
        require(v >= 0.0 && v <= 1.0, ErrorKind::InvalidParameter, "profile density outside [0, 1]");
    }
  }
}

double window_edge(double x, double lo, double hi, double w) {
  if (w == 0.0) return (x >= lo && x <= hi) ? 1.0 : 0.0;
  return 0.5 * (std::erf((x - lo) / w) - std::erf((x - hi) / w));
}

IonEnsemble new_background(const DetuningGrid& grid, const MediumParameters& medium) {
  grid.validate();
  validate_medium(medium);
  IonEnsemble e;
  e.grid = grid;
  e.medium = medium;
  ProfileSlice s;
  s.z_begin_mm = 0.0;
  s.z_end_mm = medium.length_mm;
  s.a.density.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s.a.density[i] = background_level(medium, grid[i]);
  s.b = s.a;
  e.slices.push_back(std::move(s));
  e.validate();
  return e;
}

IonEnsemble burn(const IonEnsemble& ensemble, const BurnStep& step, StarkCoefficient coeff,
                 double gap_mm, const FieldProfile* field) {
  require(std::isfinite(step.window_lo_mhz) && std::isfinite(step.window_hi_mhz) &&
              step.window_lo_mhz < step.window_hi_mhz,
          ErrorKind::InvalidParameter, "burn window needs lo < hi");
  require(step.edge_width_mhz >= 0.0 && std::isfinite(step.edge_width_mhz),
          ErrorKind::InvalidParameter, "edge width must be non-negative");
  require(step.depth >= 0.0 && step.depth <= 1.0, ErrorKind::InvalidParameter,
          "burn depth must lie in [0, 1]");
  require(std::isfinite(step.voltage_v), ErrorKind::InvalidParameter, "burn voltage must be finite");
  require(gap_mm > 0.0 && std::isfinite(gap_mm), ErrorKind::InvalidParameter,
          "electrode gap must be positive");

  IonEnsemble out = ensemble;
  const bool graded = field != nullptr && !field->is_uniform() && step.voltage_v != 0.0;
  if (graded) out.slices = split_slices(out.slices, field->z_mm());

  auto shift_for = [&](const ProfileSlice& s) {
    if (field == nullptr) return coeff.mhz_per_v_per_mm() * step.voltage_v / gap_mm;
    double zc = 0.5 * (s.z_begin_mm + s.z_end_mm);
    return coeff.mhz_per_v_per_mm() * step.voltage_v / gap_mm * (1.0 + field->epsilon_at(zc));
  };

  // The burnt zero-field detunings are window -/+ s; they, plus three edge
  // widths, must sit on the grid.
  const double margin = 3.0 * step.edge_width_mhz;
  for (const auto& s : out.slices) {
    double sh = std::abs(shift_for(s));
    require(step.window_lo_mhz - sh - margin >= ensemble.grid.front() &&
                step.window_hi_mhz + sh + margin <= ensemble.grid.back(),
            ErrorKind::OutOfRange, "burn window plus Stark displacement falls outside the grid");
  }
  if (step.depth == 0.0) return out;

  for (auto& s : out.slices) {
    const double sh = shift_for(s);
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
      const double d = out.grid[i];
      s.a.density[i] *= 1.0 - step.depth * window_edge(d + sh, step.window_lo_mhz, step.window_hi_mhz,
                                                       step.edge_width_mhz);
      s.b.density[i] *= 1.0 - step.depth * window_edge(d - sh, step.window_lo_mhz, step.window_hi_mhz,
                                                       step.edge_width_mhz);
    }
  }
  return out;
}

IonEnsemble prepare_frequency_shifter(const DetuningGrid& grid, const MediumParameters& medium,
                                      const ShifterGeometry& geo, const FieldProfile* prep_field) {
  require(geo.narrow_hole_mhz > 0.0 && geo.wide_hole_mhz > geo.narrow_hole_mhz,
          ErrorKind::InvalidPreparation, "frequency shifter needs wide_hole > narrow_hole > 0");
  require(geo.gap_mm > 0.0, ErrorKind::InvalidParameter, "electrode gap must be positive");
  const double s = geo.coefficient.mhz_per_v_per_mm() * geo.prep_voltage_v / geo.gap_mm;
  require(std::abs(s) > 0.5 * geo.wide_hole_mhz, ErrorKind::InvalidPreparation,
          "preparation shift " + format_number(s) + " MHz cannot separate the groups over a " +
              format_number(geo.wide_hole_mhz) + " MHz hole");

  IonEnsemble e = new_background(grid, medium);
  BurnStep wide{-s - 0.5 * geo.wide_hole_mhz, -s + 0.5 * geo.wide_hole_mhz, geo.prep_voltage_v,
                geo.edge_width_mhz, 1.0};
  e = burn(e, wide, geo.coefficient, geo.gap_mm, prep_field);
  BurnStep narrow{-0.5 * geo.narrow_hole_mhz, 0.5 * geo.narrow_hole_mhz, 0.0, geo.edge_width_mhz, 1.0};
  return burn(e, narrow, geo.coefficient, geo.gap_mm);
}

IonEnsemble prepare_hole(const DetuningGrid& grid, const MediumParameters& medium, double center_mhz,
                         double width_mhz, double edge_width_mhz) {
  require(width_mhz > 0.0, ErrorKind::InvalidPreparation, "hole width must be positive");
  IonEnsemble e = new_background(grid, medium);
  BurnStep step{center_mhz - 0.5 * width_mhz, center_mhz + 0.5 * width_mhz, 0.0, edge_width_mhz, 1.0};
  return burn(e, step, StarkCoefficient{}, 1.0);
}

IonEnsemble prepare_two_hole(const DetuningGrid& grid, const MediumParameters& medium,
                             const ShifterGeometry& geo, double hop_mhz) {
  require(hop_mhz > 0.5 * geo.wide_hole_mhz, ErrorKind::InvalidPreparation,
          "hop must exceed half the wide hole so the second hole clears the filter");
  IonEnsemble e = prepare_frequency_shifter(grid, medium, geo);
  BurnStep second{2.0 * hop_mhz - 0.5 * geo.wide_hole_mhz, 2.0 * hop_mhz + 0.5 * geo.wide_hole_mhz, 0.0,
                  geo.edge_width_mhz, 1.0};
  return burn(e, second, geo.coefficient, geo.gap_mm);
}

IonEnsemble shift_profiles(const IonEnsemble& ensemble, double ds_mhz) {
  require(std::isfinite(ds_mhz), ErrorKind::InvalidParameter, "shift must be finite");
  if (ds_mhz == 0.0) return ensemble;
  const double guard = ensemble.guard_band();
  require(std::abs(ds_mhz) < guard, ErrorKind::OutOfRange,
          "shift " + format_number(ds_mhz) + " MHz exceeds the grid guard band of " +
              format_number(guard) + " MHz");
  IonEnsemble out = ensemble;
  const double step = ds_mhz / ensemble.grid.spacing();
  for (std::size_t k = 0; k < out.slices.size(); ++k) {
    const auto& src = ensemble.slices[k];
    auto& dst = out.slices[k];
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
      const double p = static_cast<double>(i);
      dst.a.density[i] = sample(src.a.density, p - step);
      dst.b.density[i] = sample(src.b.density, p + step);
    }
  }
  return out;
}

std::vector<double> combined_profile(const IonEnsemble& ensemble, std::size_t slice) {
  const auto& s = ensemble.slices.at(slice);
  std::vector<double> g(ensemble.grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.5 * (s.a.density[i] + s.b.density[i]);
  return g;
}

std::pair<double, double> transmission_window(const DetuningGrid& grid, const std::vector<double>& profile,
                                              double center_mhz, double level) {
  require(profile.size() == grid.size(), ErrorKind::InvalidParameter, "profile length mismatch");
  require(grid.contains(center_mhz), ErrorKind::OutOfRange, "window centre outside grid");
  if (sample(profile, grid.position(center_mhz)) >= level) return {center_mhz, center_mhz};
  const auto n = profile.size();
  auto c = static_cast<std::size_t>(std::llround(grid.position(center_mhz)));
  // Step to a node below the level next to the centre.
  if (profile[c] >= level) c = (grid[c] > center_mhz) ? c - 1 : c + 1;
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    double t = (level - profile[inside]) / (profile[outside] - profile[inside]);
    return grid[inside] + t * (grid[outside] - grid[inside]);
  };
  double lo = grid.front(), hi = grid.back();
  for (std::size_t i = c; i > 0; --i)
    if (profile[i - 1] >= level) {
      lo = crossing(i, i - 1);
      break;
    }
  for (std::size_t i = c; i + 1 < n; ++i)
    if (profile[i + 1] >= level) {
      hi = crossing(i, i + 1);
      break;
    }
  return {lo, hi};
}

void write_profiles_csv(const IonEnsemble& ensemble, std::size_t slice, std::ostream& out) {
  const auto& s = ensemble.slices.at(slice);
  out << "detuning_mhz,g_a,g_b,alpha_total_per_mm\n";
  for (std::size_t i = 0; i < ensemble.grid.size(); ++i) {
    out << format_number(ensemble.grid[i]) << ',' << format_number(s.a.density[i]) << ','
        << format_number(s.b.density[i]) << ',' << format_number(ensemble.alpha_total(slice, i)) << '\n';
  }
}

std::vector<std::string> write_profiles(const IonEnsemble& ensemble, const std::string& dir,
                                        const std::string& stem) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory " + dir + ": " + ec.message());
  std::vector<std::string> written;
  for (std::size_t k = 0; k < ensemble.slices.size(); ++k) {
    std::string name = ensemble.position_dependent() ? stem + "_z" + std::to_string(k) + ".csv" : stem + ".csv";
    fs::path path = fs::path(dir) / name;
    auto out = open_output(path);
    if (ensemble.position_dependent())
      out << "# z_begin_mm=" << format_number(ensemble.slices[k].z_begin_mm)
          << " z_end_mm=" << format_number(ensemble.slices[k].z_end_mm) << '\n';
    write_profiles_csv(ensemble, k, out);
    written.push_back(path.string());
  }
  return written;
}

}  // namespace slowshift
