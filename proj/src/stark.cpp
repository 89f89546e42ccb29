#include "slowshift/stark.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "slowshift/csv.hpp"
#include "slowshift/error.hpp"
#include "slowshift/units.hpp"

namespace slowshift {

StarkCoefficient effective_coefficient(const DipoleGeometry& geom) {
  require(geom.mu_over_hbar_khz_per_v_cm > 0.0 && std::isfinite(geom.mu_over_hbar_khz_per_v_cm),
          ErrorKind::InvalidParameter, "mu_over_hbar must be positive");
  require(geom.theta_deg >= 0.0 && geom.theta_deg < 90.0, ErrorKind::InvalidParameter,
          "theta must lie in [0, 90) degrees");
  if (geom.theta_deg == 0.0) return StarkCoefficient::khz_per_v_per_cm(geom.mu_over_hbar_khz_per_v_cm);
  double c = std::cos(geom.theta_deg * kPi / 180.0);
  return StarkCoefficient::khz_per_v_per_cm(geom.mu_over_hbar_khz_per_v_cm * c);
}

FieldProfile::FieldProfile(double gap_mm, double length_mm, std::vector<double> z_mm,
                           std::vector<double> epsilon)
    : gap_mm_(gap_mm), length_mm_(length_mm), z_mm_(std::move(z_mm)), epsilon_(std::move(epsilon)) {
  require(gap_mm_ > 0.0 && std::isfinite(gap_mm_), ErrorKind::InvalidParameter,
          "electrode gap must be positive");
  require(length_mm_ > 0.0 && std::isfinite(length_mm_), ErrorKind::InvalidParameter,
          "crystal length must be positive");
  require(z_mm_.size() == epsilon_.size(), ErrorKind::InvalidParameter,
          "field profile needs one epsilon per z node");
  require(!z_mm_.empty(), ErrorKind::InvalidParameter, "field profile is empty");
  for (std::size_t i = 0; i < z_mm_.size(); ++i) {
    require(std::isfinite(z_mm_[i]) && std::isfinite(epsilon_[i]), ErrorKind::InvalidParameter,
            "field profile contains a non-finite value");
    require(std::abs(epsilon_[i]) < 0.5, ErrorKind::InvalidParameter,
            "field deviation |epsilon| must be small");
    if (i > 0)
      require(z_mm_[i] > z_mm_[i - 1], ErrorKind::InvalidParameter,
              "field profile z nodes must be strictly increasing");
  }
  const double tol = 1e-9 * length_mm_;
  require(z_mm_.front() <= tol && z_mm_.back() >= length_mm_ - tol, ErrorKind::InvalidParameter,
          "field profile must cover the whole crystal length");
}

FieldProfile FieldProfile::uniform(double gap_mm, double length_mm) {
  return FieldProfile(gap_mm, length_mm, {0.0, length_mm}, {0.0, 0.0});
}

FieldProfile FieldProfile::quadratic(double gap_mm, double length_mm, double peak_to_peak) {
  constexpr int kNodes = 21;
  std::vector<double> z(kNodes), eps(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    z[i] = length_mm * i / (kNodes - 1);
    double u = 2.0 * z[i] / length_mm - 1.0;
    eps[i] = -peak_to_peak * u * u;
  }
  z.back() = length_mm;
  return FieldProfile(gap_mm, length_mm, std::move(z), std::move(eps));
}

FieldProfile FieldProfile::read_csv(std::istream& in, double gap_mm, double length_mm) {
  std::vector<double> z, eps;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    double a = 0, b = 0;
    bool ok = fields.size() == 2 && parse_number(fields[0], a) && parse_number(fields[1], b);
    if (!ok) {
      if (z.empty() && lineno == 1) continue;  // header
      fail(ErrorKind::Parse, "field profile line " + std::to_string(lineno) +
                                 ": expected two numeric columns z_mm, epsilon");
    }
    z.push_back(a);
    eps.push_back(b);
  }
  return FieldProfile(gap_mm, length_mm, std::move(z), std::move(eps));
}

FieldProfile FieldProfile::load_csv(const std::string& path, double gap_mm, double length_mm) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read field profile " + path);
  return read_csv(in, gap_mm, length_mm);
}

double FieldProfile::epsilon_at(double z) const {
  if (z_mm_.empty()) return 0.0;
  if (z <= z_mm_.front()) return epsilon_.front();
  if (z >= z_mm_.back()) return epsilon_.back();
  auto it = std::upper_bound(z_mm_.begin(), z_mm_.end(), z);
  std::size_t j = static_cast<std::size_t>(it - z_mm_.begin());
  double t = (z - z_mm_[j - 1]) / (z_mm_[j] - z_mm_[j - 1]);
  return epsilon_[j - 1] + t * (epsilon_[j] - epsilon_[j - 1]);
}

bool FieldProfile::is_uniform() const {
  return std::all_of(epsilon_.begin(), epsilon_.end(), [](double e) { return e == 0.0; });
}

double FieldProfile::max_abs_epsilon() const {
  double m = 0.0;
  for (double e : epsilon_) m = std::max(m, std::abs(e));
  return m;
}

double shift_at(double voltage_v, const FieldProfile& field, StarkCoefficient coeff, double z_mm) {
  const double tol = 1e-9 * field.length_mm();
  if (z_mm < -tol || z_mm > field.length_mm() + tol || !std::isfinite(z_mm))
    fail(ErrorKind::OutOfRange, "position z = " + format_number(z_mm) + " mm is outside the crystal");
  return coeff.mhz_per_v_per_mm() * (voltage_v / field.gap_mm()) * (1.0 + field.epsilon_at(z_mm));
}

double raised_cosine_ramp(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * u));
}

StarkDrive::StarkDrive(double amplitude_mhz, double tau0_us, double rise_time_us, FieldProfile field)
    : amplitude_mhz_(amplitude_mhz), tau0_us_(tau0_us), rise_time_us_(rise_time_us), field_(std::move(field)) {
  require(std::isfinite(amplitude_mhz_), ErrorKind::InvalidParameter, "drive amplitude must be finite");
  require(std::isfinite(tau0_us_), ErrorKind::InvalidParameter, "switch time must be finite");
  require(rise_time_us_ >= 0.0 && std::isfinite(rise_time_us_), ErrorKind::InvalidParameter,
          "rise time must be non-negative");
}

StarkDrive StarkDrive::none() { return StarkDrive(0.0, 0.0, 0.0, FieldProfile::uniform(6.0, 10.0)); }

double StarkDrive::waveform(double tau_us) const {
  if (amplitude_mhz_ == 0.0) return 0.0;
  if (rise_time_us_ == 0.0) return tau_us >= tau0_us_ ? amplitude_mhz_ : 0.0;
  return amplitude_mhz_ * raised_cosine_ramp((tau_us - tau0_us_) / rise_time_us_);
}

double StarkDrive::spatial_scale(double z_mm) const { return 1.0 + field_.epsilon_at(z_mm); }

double StarkDrive::max_abs_shift() const {
  double s = 1.0;
  for (double e : field_.epsilon()) s = std::max(s, std::abs(1.0 + e));
  return std::abs(amplitude_mhz_) * s;
}

StarkDrive step_drive(double voltage_v, double tau0_us, double rise_time_us, const FieldProfile& field,
                      StarkCoefficient coeff) {
  require(std::isfinite(voltage_v), ErrorKind::InvalidParameter, "voltage must be finite");
  double amplitude = coeff.mhz_per_v_per_mm() * voltage_v / field.gap_mm();
  return StarkDrive(amplitude, tau0_us, rise_time_us, field);
}

}  // namespace slowshift
