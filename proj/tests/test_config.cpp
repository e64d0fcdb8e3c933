#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qdspin/config.hpp"
#include "qdspin/units.hpp"

using namespace qdspin;

TEST_CASE("unit-suffixed scalar parsing") {
  CHECK(*parse_quantity("25GHz", Dimension::Frequency) == doctest::Approx(25.0));
  CHECK(*parse_quantity("25000MHz", Dimension::Frequency) == doctest::Approx(25.0));
  CHECK(*parse_quantity("10Hz", Dimension::Frequency) == doctest::Approx(1e-8));
  CHECK(*parse_quantity("60ns", Dimension::Time) == doctest::Approx(60.0));
  CHECK(*parse_quantity("21us", Dimension::Time) == doctest::Approx(21000.0));
  CHECK(*parse_quantity("1ms", Dimension::Time) == doctest::Approx(1e6));
  CHECK(*parse_quantity("2.9T", Dimension::Field) == doctest::Approx(2.9));
  CHECK(*parse_quantity("1mW", Dimension::Power) == doctest::Approx(1.0));
  CHECK(*parse_quantity("pi/4", Dimension::Angle) == doctest::Approx(pi / 4));
  CHECK(*parse_quantity("0.45", Dimension::Scalar) == doctest::Approx(0.45));
  CHECK(*parse_quantity("0", Dimension::Frequency) == 0.0);  // zero needs no unit
  CHECK_FALSE(parse_quantity("25", Dimension::Frequency).has_value());
  CHECK_FALSE(parse_quantity("25GHz", Dimension::Time).has_value());
  CHECK_FALSE(parse_quantity("fast", Dimension::Time).has_value());
}

TEST_CASE("default config parses with zero violations") {
  const auto tree = parse_config_text(default_config_text());
  const auto violations = validate_config(tree);
  int hard = 0;
  for (const auto& v : violations)
    if (!v.warning) ++hard;
  CHECK(hard == 0);

  const World w = world_from_config(tree);
  CHECK(w.cavity.finesse == 500.0);
  CHECK(w.spin.zeeman_ghz == doctest::Approx(5.8));
  CHECK(w.bath.sigma_ghz == doctest::Approx(8.04e-3).epsilon(1e-3));
  // the calibration block pins the 95 MHz operating point
  CHECK(spin_rabi_frequency_ghz(w.raman, w.cavity) == doctest::Approx(0.095));
  // the noise block is calibrated against the Hahn target on load
  CHECK(w.noise.amplitude > 0.0);
}

TEST_CASE("unknown keys are rejected") {
  auto tree = parse_config_text(default_config_text());
  tree["cavity.quality"] = "10";
  CHECK_THROWS_AS(world_from_config(tree), ConfigError);
}

TEST_CASE("malformed blocks are rejected") {
  CHECK_THROWS_AS(parse_config_text("cavity {\n finesse = 500\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("cavity {\n finesse 500\n}\n"), ConfigError);
}

TEST_CASE("config hash is semantic") {
  const auto base = parse_config_text(default_config_text());
  const std::string h0 = config_hash(base);

  SUBCASE("whitespace and comments do not change the hash") {
    std::string text = default_config_text();
    text += "\n# trailing comment\n\n";
    const auto tree = parse_config_text(text);
    CHECK(config_hash(tree) == h0);
  }
  SUBCASE("unit respelling does not change the hash") {
    auto tree = base;
    apply_override(tree, "cavity.linewidth=25000MHz");
    CHECK(config_hash(tree) == h0);
  }
  SUBCASE("a meaningful change does change the hash") {
    auto tree = base;
    apply_override(tree, "cavity.finesse=501");
    CHECK(config_hash(tree) != h0);
  }
  SUBCASE("engine switches are meaningful") {
    auto tree = base;
    apply_override(tree, "engine.flips=0");
    CHECK(config_hash(tree) != h0);
  }
}

TEST_CASE("validation report lists violations with config paths") {
  SUBCASE("degenerate mirrors name the cavity block") {
    auto tree = parse_config_text(default_config_text());
    apply_override(tree, "cavity.mirror_r1=1.0");
    apply_override(tree, "cavity.mirror_r2=1.0");
    const auto violations = validate_config(tree);
    bool found = false;
    for (const auto& v : violations)
      if (!v.warning && v.path == "cavity") found = true;
    CHECK(found);
  }
  SUBCASE("tau ordering names the protocol block") {
    auto tree = parse_config_text(default_config_text());
    apply_override(tree, "protocol.tau_min=700ns");
    const auto violations = validate_config(tree);
    bool found = false;
    for (const auto& v : violations)
      if (!v.warning && v.path == "protocol") found = true;
    CHECK(found);
  }
  SUBCASE("zeeman inconsistent with the g-factor names the spin block") {
    auto tree = parse_config_text(default_config_text());
    apply_override(tree, "spin.zeeman=6.1GHz");
    const auto violations = validate_config(tree);
    bool found = false;
    for (const auto& v : violations)
      if (!v.warning && v.path == "spin") found = true;
    CHECK(found);
  }
  SUBCASE("flip coefficient outside the measured band is a warning") {
    auto tree = parse_config_text(default_config_text());
    apply_override(tree, "spin.flip_coefficient=2.0e-4");
    const auto violations = validate_config(tree);
    bool warned = false;
    for (const auto& v : violations)
      if (v.warning && v.path == "spin.flip_coefficient") warned = true;
    CHECK(warned);
  }
}

TEST_CASE("shipped default config file matches the embedded defaults") {
  const auto file_tree = parse_config_file(std::string(QDSPIN_SOURCE_DIR) +
                                           "/configs/default.cfg");
  const auto embedded = parse_config_text(default_config_text());
  CHECK(config_hash(file_tree) == config_hash(embedded));
}
