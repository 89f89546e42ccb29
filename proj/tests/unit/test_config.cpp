#include <doctest.h>

#include <string>

#include "slowshift/error.hpp"
#include "slowshift/scenario.hpp"

using namespace slowshift;

namespace {

std::string parse_message(const std::string& text) {
  try {
    parse_config(text, "t.ini");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    return e.what();
  }
  FAIL("no parse error");
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("every builtin survives a render/parse round trip") {
  for (const auto& info : list_scenarios()) {
    const ScenarioConfig c = builtin_scenario(info.name);
    const std::string text = render_config(c);
    CHECK(render_config(parse_config(text)) == text);
    CHECK_NOTHROW(validate_config(c));
  }
}

TEST_CASE("builtin listing") {
  const auto list = list_scenarios();
  std::vector<std::string> names;
  for (const auto& s : list) names.push_back(s.name);
  CHECK(names == std::vector<std::string>{"fig3a", "fig3b", "fig4", "fig5", "fig6-sweep", "fig7-extended", "transit"});
  for (const auto& s : list) CHECK_FALSE(s.description.empty());
  CHECK(is_builtin_scenario("fig3b"));
  CHECK_FALSE(is_builtin_scenario("fig9"));
  CHECK_THROWS_AS(builtin_scenario("fig9"), Error);
}

TEST_CASE("values, lists and comments") {
  const auto c = parse_config(
      "# leading comment\n"
      "[scenario]\n"
      "name = demo   # trailing\n"
      "; another comment\n"
      "[drive]\n"
      "voltages_v = -22, 0, 11.5\n"
      "tau0_policy = absolute\n"
      "tau0_us = 4.25\n"
      "[solver]\n"
      "check_window = false\n"
      "[ensemble]\n"
      "structure = hole\n");
  CHECK(c.name == "demo");
  CHECK(c.voltages_v == std::vector<double>{-22.0, 0.0, 11.5});
  CHECK(c.tau0_policy == Tau0Policy::Absolute);
  CHECK(c.tau0_us == 4.25);
  CHECK_FALSE(c.check_window);
  CHECK(c.structure == Structure::Hole);
  CHECK(c.dt_us == 0.002);  // untouched default
}

TEST_CASE("errors name the line and column") {
  CHECK(parse_message("") == "t.ini:1:1: configuration is empty");
  CHECK(parse_message("# nothing\n\n") == "t.ini:1:1: configuration is empty");
  CHECK(parse_message("[drive]\nvoltage = 3\n").starts_with("t.ini:2:1: unknown key 'voltage'"));
  CHECK(parse_message("[drivee]\n").starts_with("t.ini:1:2: unknown section"));
  CHECK(parse_message("[drive]\nrise_time_us = 1\n  rise_time_us = 2\n").starts_with("t.ini:3:3: duplicate key"));
  CHECK(parse_message("dt_us = 1\n").starts_with("t.ini:1:1: key outside"));
  CHECK(parse_message("[solver]\ndt_us = fast\n").starts_with("t.ini:2:9:"));
  CHECK(parse_message("[drive]\ntau0_policy = sometimes\n").starts_with("t.ini:2:15:"));
  CHECK(parse_message("[solver]\ndt_us\n").starts_with("t.ini:2:1: expected 'key = value'"));
}

TEST_CASE("a base scenario is inherited and overridden") {
  const auto c = parse_config("[scenario]\nbase = fig5\n[drive]\nvoltages_v = 22\n");
  const auto ref = builtin_scenario("fig5");
  CHECK(c.voltages_v == std::vector<double>{22.0});
  CHECK(c.tau0_policy == ref.tau0_policy);
  CHECK(c.rise_time_us == ref.rise_time_us);
  CHECK(c.lo_amplitude_mhz == ref.lo_amplitude_mhz);
  CHECK(parse_message("[scenario]\nbase = nope\n").starts_with("t.ini:2:8: unknown base scenario"));
}

TEST_CASE("validation rejects out-of-range values") {
  ScenarioConfig c;
  c.dt_us = -1.0;
  CHECK_THROWS_AS(validate_config(c), Error);
  c = {};
  c.voltages_v.clear();
  CHECK_THROWS_AS(validate_config(c), Error);
  c = {};
  c.inside_fraction = 1.5;
  try {
    validate_config(c);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
    CHECK(std::string(e.what()).find("inside_fraction") != std::string::npos);
  }
}

TEST_CASE("stark coefficient sources") {
  ScenarioConfig c;
  CHECK(c.drive_coefficient().khz_per_v_per_cm() == doctest::Approx(116.7));
  c.coefficient_source = CoefficientSource::Dipole;
  CHECK(c.drive_coefficient().khz_per_v_per_cm() == doctest::Approx(109.0).epsilon(1e-3));
}

TEST_CASE("voltage labels") {
  CHECK(voltage_label(0.0) == "0V");
  CHECK(voltage_label(11.0) == "p11V");
  CHECK(voltage_label(-22.0) == "m22V");
  CHECK(voltage_label(2.5) == "p2d5V");
}

TEST_CASE("switch-time policies") {
  // Input energy 1 enters linearly over [0, 2]; output leaves over [3, 5].
  std::vector<double> tau, in, out;
  for (int n = 0; n <= 600; ++n) {
    const double t = 0.01 * n;
    tau.push_back(t);
    in.push_back(std::clamp(t / 2.0, 0.0, 1.0));
    out.push_back(std::clamp((t - 3.0) / 2.0, 0.0, 1.0));
  }
  ScenarioConfig c;
  c.tau0_policy = Tau0Policy::EnergyInside;
  c.inside_fraction = 0.99;
  auto t0 = choose_tau0(c, tau, in, out);
  CHECK(t0.tau0_us == doctest::Approx(1.98).epsilon(0.01));
  CHECK_FALSE(t0.fallback);

  // Never fully inside: falls back to the moment of largest inside share.
  std::vector<double> leaky;
  for (double t : tau) leaky.push_back(std::clamp((t - 1.0) / 2.0, 0.0, 1.0));
  t0 = choose_tau0(c, tau, in, leaky);
  CHECK(t0.fallback);
  CHECK(t0.inside_fraction == doctest::Approx(0.5));

  c.tau0_policy = Tau0Policy::MidExit;
  t0 = choose_tau0(c, tau, in, out);
  CHECK(t0.tau0_us == doctest::Approx(4.0).epsilon(0.01));

  c.tau0_policy = Tau0Policy::Absolute;
  c.tau0_us = 2.5;
  t0 = choose_tau0(c, tau, in, out);
  CHECK(t0.tau0_us == 2.5);
  CHECK(t0.inside_fraction == doctest::Approx(1.0));
}

}
