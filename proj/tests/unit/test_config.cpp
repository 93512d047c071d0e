#include <catch_amalgamated.hpp>

#include <qpump/config.hpp>

#include <cmath>

using namespace qpump;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string config_error(const ConfigFile& cfg) {
  try {
    resolve(cfg);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  FAIL("expected a Config error");
  return {};
}

}  // namespace

TEST_CASE("fig3 preset resolves to internal units", "[config]") {
  const ResolvedConfig r = resolve(ConfigFile::preset("fig3"));
  const SystemParams ref = fig3_params();
  CHECK_THAT(r.params.omega1, WithinRel(kTwoPi * 4.0, 1e-15));
  CHECK_THAT(r.params.omega2, WithinRel(kTwoPi * 0.04, 1e-15));
  CHECK_THAT(r.params.delta, WithinRel(kTwoPi * 200.0, 1e-15));
  CHECK_THAT(r.params.gamma1, WithinRel(kTwoPi * 0.23, 1e-15));
  CHECK(r.params.tau == 3.19);
  CHECK_THAT(r.params.c6, WithinRel(kTwoPi * -4160e3, 1e-15));
  CHECK_THAT(r.params.c6_cross, WithinRel(kTwoPi * -4213e3, 1e-15));
  CHECK_THAT(r.params.r_pair.r12, WithinRel(ref.r_pair.r12, 1e-15));
  CHECK_THAT(r.params.r_pair.r23, WithinAbs(5.255, 1e-3));
  CHECK(r.run.model == Model::effective);
  CHECK(r.run.n_cycles == 30);
  CHECK(r.errors.delta_r == 0.0);
  CHECK(r.workers == 1);
  CHECK_FALSE(r.axis1.has_value());
  CHECK_FALSE(r.two_photon.has_value());
  CHECK(r.echo.at("r12_um").starts_with("5.255"));
  CHECK(r.echo.size() == kConfigKeys.size());
  CHECK_THROWS_AS(ConfigFile::preset("fig4"), Error);
}

TEST_CASE("config text parsing", "[config]") {
  const ConfigFile cfg = ConfigFile::parse("# comment\n\n omega2_mhz = 0.05  # trailing\nmodel=full\n", "run.cfg");
  CHECK(cfg.value("omega2_mhz") == "0.05");
  CHECK(cfg.entry("model").origin == "run.cfg:4");
  CHECK(cfg.entry("tau_us").origin == "preset fig3");
  const ResolvedConfig r = resolve(cfg);
  CHECK(r.run.model == Model::full);
  CHECK_THAT(r.params.omega2, WithinRel(kTwoPi * 0.05, 1e-15));

  SECTION("unknown keys name the line") {
    try {
      ConfigFile::parse("tau_us = 1\nomega3_mhz = 2\n", "bad.cfg");
      FAIL("expected Config error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Config);
      CHECK_THAT(std::string(e.what()), ContainsSubstring("bad.cfg:2") && ContainsSubstring("omega3_mhz"));
    }
  }
  SECTION("malformed lines") {
    CHECK_THROWS_AS(ConfigFile::parse("tau_us 1\n", "x"), Error);
    CHECK_THROWS_AS(ConfigFile::parse("tau_us =\n", "x"), Error);
    CHECK_THROWS_AS(ConfigFile::parse("preset = fig9\n", "x"), Error);
  }
}

TEST_CASE("overrides and their provenance in errors", "[config][error]") {
  ConfigFile cfg = ConfigFile::preset("fig3");
  cfg.set("cycles=5");
  CHECK(resolve(cfg).run.n_cycles == 5);
  CHECK_THROWS_AS(cfg.set("nonsense=1"), Error);
  CHECK_THROWS_AS(cfg.set("cycles"), Error);

  struct Case {
    const char* assignment;
    const char* why;
  };
  for (const Case& c : {Case{"omega1_mhz=-4", "positive"}, Case{"gamma1_mhz=-0.1", "non-negative"},
                        Case{"tau_us=abc", "finite number"}, Case{"cycles=2.5", "integer"},
                        Case{"model=exact", "full or effective"}, Case{"initial_state=pure", "initial_state"},
                        Case{"record=sometimes", "per_step"}, Case{"drives=yes", "true or false"},
                        Case{"delta_t_rel=0.9", "[-0.5, 0.5]"}, Case{"delta_r_um=-6", "non-positive"},
                        Case{"workers=0", "positive integer"}, Case{"omega_a_mhz=40", "two-photon"},
                        Case{"sweep_axis1=tau=1,2", "unknown sweep axis"}, Case{"sweep_axis2=delta_r=0", "sweep_axis1"},
                        Case{"delta_mhz=nan", "finite"}}) {
    ConfigFile bad = ConfigFile::preset("fig3");
    bad.set(c.assignment);
    const std::string msg = config_error(bad);
    INFO(c.assignment << " -> " << msg);
    CHECK_THAT(msg, ContainsSubstring("--set") && ContainsSubstring(c.why));
  }
}

TEST_CASE("auto distances need matching signs", "[config][error]") {
  ConfigFile cfg = ConfigFile::preset("fig3");
  cfg.set("c6_cross_ghz_um6=4213");
  CHECK_THAT(config_error(cfg), ContainsSubstring("r12_um"));
  const ResolvedConfig lenient = resolve(cfg, false);
  CHECK_THAT(lenient.params.r_pair.r12, WithinAbs(5.255, 1e-3));
  cfg.set("r12_um=6");
  cfg.set("r13_um=6");
  cfg.set("r23_um=6");
  CHECK(resolve(cfg).params.r_pair.r13 == 6.0);
}

TEST_CASE("sweep axis specs", "[config]") {
  const SweepAxis list = parse_axis_spec("delta_r=-0.02,0,0.02");
  CHECK(list.name == SweepAxisName::delta_r);
  CHECK(list.values == std::vector<double>{-0.02, 0.0, 0.02});
  const SweepAxis range = parse_axis_spec("doppler=0:0.1:5");
  REQUIRE(range.values.size() == 5);
  CHECK_THAT(range.values[1], WithinRel(kTwoPi * 0.025, 1e-14));
  CHECK_THAT(range.values[4], WithinRel(kTwoPi * 0.1, 1e-14));
  CHECK(parse_axis_spec("n_cycles=7:7:1").values == std::vector<double>{7.0});
  CHECK_THAT(parse_axis_spec("omega2=0.04").values[0], WithinRel(kTwoPi * 0.04, 1e-15));
  for (const char* bad : {"delta_r", "tau=1", "delta_r=1,,2", "delta_r=0:1", "delta_r=0:1:0", "delta_r=0:1:2.5", "delta_r="})
    CHECK_THROWS_AS(parse_axis_spec(bad), Error);

  ConfigFile cfg = ConfigFile::preset("fig3");
  cfg.set("sweep_axis1=delta_t_rel=-0.1:0.1:3");
  cfg.set("sweep_axis2=omega2=0.03,0.05");
  const ResolvedConfig r = resolve(cfg);
  REQUIRE(r.axis1.has_value());
  REQUIRE(r.axis2.has_value());
  CHECK(r.axis1->values.size() == 3);
  CHECK(r.axis2->name == SweepAxisName::omega2);
}

TEST_CASE("two-photon inputs", "[config]") {
  ConfigFile cfg = ConfigFile::preset("fig3");
  cfg.set("omega_a_mhz=40");
  cfg.set("omega_b_mhz=2");
  cfg.set("delta1_mhz=50");
  cfg.set("delta2_mhz=1000");
  const ResolvedConfig r = resolve(cfg);
  REQUIRE(r.two_photon.has_value());
  CHECK_THAT(effective_rabi_2(r.two_photon->omega_b, r.two_photon->delta1), WithinRel(kTwoPi * 0.04, 1e-12));
  CHECK_THAT(r.two_photon->delta, WithinRel(kTwoPi * 200.0, 1e-15));
}

TEST_CASE("number formatting round-trips", "[config]") {
  for (double v : {5.2552523, -4213.0, 1e-300, 0.1 + 0.2, kTwoPi}) {
    const std::string s = detail::format_number(v);
    CHECK(detail::parse_number(s) == v);
  }
  CHECK(detail::parse_number("+1.5") == 1.5);
  CHECK_FALSE(detail::parse_number("1.5x").has_value());
  CHECK_FALSE(detail::parse_number("inf").has_value());
  CHECK_FALSE(detail::parse_number("").has_value());
}

TEST_CASE("shipped config files resolve", "[config]") {
  const std::string dir = QPUMP_CONFIG_DIR;
  const ResolvedConfig fig3 = resolve(ConfigFile::load(dir + "/fig3.cfg"));
  CHECK(fig3.run.model == Model::effective);
  CHECK(fig3.run.n_cycles == 30);
  const ResolvedConfig fig4 = resolve(ConfigFile::load(dir + "/fig4_distance_sweep.cfg"));
  REQUIRE(fig4.axis1.has_value());
  CHECK(fig4.axis1->values.size() == 5);
  CHECK(fig4.workers == 4);
  const ResolvedConfig fig5 = resolve(ConfigFile::load(dir + "/fig5_doppler.cfg"));
  REQUIRE(fig5.axis2.has_value());
  CHECK(fig5.axis2->name == SweepAxisName::n_cycles);
  CHECK_THROWS_AS(ConfigFile::load(dir + "/missing.cfg"), Error);
}
