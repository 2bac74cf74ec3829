#include <doctest.h>

#include <filesystem>

#include "netgrad/config.hpp"
#include "netgrad/experiment.hpp"

using namespace netgrad;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = NETGRAD_CONFIG_DIR;

int error_line(const std::string& text) {
  try {
    config_from_toml(parse_toml(text, "t.toml"), "t.toml");
  } catch (const ConfigParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("TOML subset values") {
  const auto doc = parse_toml(
      "top = 1\n"
      "[a]\n"
      "s = \"x # not a comment\"  # comment\n"
      "f = -2.5e-3\n"
      "b = true\n"
      "arr = [[1, 2.5], [3, 4]]\n"
      "[a.b]\n"
      "c.d = \"deep\"\n");
  CHECK(doc.at("top").as_int() == 1);
  CHECK(doc.at("a.s").as_string() == "x # not a comment");
  CHECK(doc.at("a.f").as_double() == -2.5e-3);
  CHECK(std::get<bool>(doc.at("a.b").data));
  CHECK(doc.at("a.arr").as_array()[0].as_array()[1].as_double() == 2.5);
  CHECK(doc.at("a.b.c.d").as_string() == "deep");
  CHECK(doc.at("a.f").line == 4);
}

TEST_CASE("syntax errors carry line numbers") {
  try {
    parse_toml("[graph]\nkind = \"cycle\"\nn = [1, 2\n", "bad.toml");
    FAIL("expected an error");
  } catch (const ConfigParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).rfind("bad.toml:3:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_toml("[x\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_toml("just words\n"), ConfigParseError);
}

TEST_CASE("semantic errors carry line numbers") {
  CHECK(error_line("[graph]\nkind = \"cycle\"\nn = 4\ncolour = 3\n") == 4);
  CHECK(error_line("[run]\nsteps = 0\n") == 2);
  CHECK(error_line("\n[weights.alpha]\nlaw = \"power\"\nc = -1\n") > 0);
  CHECK(error_line("[graph]\nkind = \"torus\"\n") == 2);
  CHECK(error_line("[init]\nkind = \"fixed\"\npoint = [0.5]\n[run]\nform = \"sideways\"\n") == 5);
}

TEST_CASE("bundled configs load and round-trip") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".toml") continue;
    ++seen;
    CAPTURE(entry.path().string());
    const auto cfg = load_config(entry.path());
    const auto text = serialize_config(cfg);
    const auto again = config_from_toml(parse_toml(text));
    CHECK(again == cfg);
    CHECK(serialize_config(again) == text);
    CHECK(config_fingerprint(again) == config_fingerprint(cfg));
    const auto built = build_sim_config(cfg);
    CHECK(built.report.passed);
  }
  CHECK(seen >= 8);
}

TEST_CASE("round trip keeps awkward doubles exact") {
  auto cfg = load_config(kConfigs / "regression_cycle4.toml");
  cfg.weights.alpha = Schedule::exponential(0.1 + 0.2, 0.998);
  cfg.data.noise_std = 1.0 / 3.0;
  cfg.radius = 1e-300;
  const auto again = config_from_toml(parse_toml(serialize_config(cfg)));
  CHECK(again == cfg);
  CHECK(again.weights.alpha.c() == 0.1 + 0.2);
}

TEST_CASE("edge-list file graphs resolve relative to the config") {
  const auto cfg = load_config(kConfigs / "regression_edges.toml");
  CHECK(cfg.graph.kind == "edges");
  CHECK(cfg.graph.build() == make_petersen());
  // inline edges survive serialization
  CHECK(config_from_toml(parse_toml(serialize_config(cfg))) == cfg);
}

TEST_CASE("overrides") {
  const auto base = load_config(kConfigs / "regression_cycle4.toml");
  const auto off = apply_overrides(base, {"weights.gamma.law=constant", "weights.gamma.c=0"});
  CHECK(off.weights.gamma.is_zero());
  CHECK(config_fingerprint(off) != config_fingerprint(base));
  CHECK(apply_overrides(base, {}) == base);

  const auto pet = apply_overrides(base, {"graph.kind=petersen"});
  CHECK(pet.graph.build() == make_petersen());
  const auto c6 = apply_overrides(base, {"graph.kind=cycle6"});
  CHECK(c6.graph.build() == make_cycle(6));
  CHECK(apply_overrides(base, {"experiment.runs=7"}).runs == 7);

  CHECK_THROWS_AS(apply_overrides(base, {"weights.delta.c=1"}), ConfigParseError);
  CHECK_THROWS_AS(apply_overrides(base, {"experiment.runs"}), ConfigParseError);
  CHECK_THROWS_AS(apply_overrides(base, {"experiment.runs=0"}), ConfigError);
}

TEST_CASE("strict mode rejects a disconnected graph") {
  auto cfg = load_config(kConfigs / "consensus_cycle4.toml");
  cfg.graph.kind = "edges";
  cfg.graph.edges = {{0, 1}, {2, 3}};
  cfg.validation = ValidationMode::strict;
  auto built = build_sim_config(cfg);
  CHECK_FALSE(built.report.passed);
  bool cited = false;
  for (const auto& e : built.report.errors)
    cited = cited || e.find("undirected and connected") != std::string::npos;
  CHECK(cited);
  cfg.validation = ValidationMode::permissive;
  built = build_sim_config(cfg);
  CHECK(built.report.passed);
  CHECK_FALSE(built.report.warnings.empty());
}

TEST_CASE("strict schedule validation") {
  auto cfg = load_config(kConfigs / "regression_cycle4.toml");
  cfg.validation = ValidationMode::strict;
  CHECK_FALSE(build_sim_config(cfg).report.passed);
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.weights.alpha = Schedule::power(0.05, 1.0);
  cfg.weights.gamma = Schedule::annealing(0.5);
  CHECK(build_sim_config(cfg).report.passed);
}

TEST_CASE("regression configs build per-agent risks") {
  const auto cfg = load_config(kConfigs / "regression_petersen.toml");
  const auto built = build_sim_config(cfg);
  CHECK(built.sim.objectives.size() == 10);
  CHECK(std::holds_alternative<RegressionSampling>(built.sim.gradient));
  CHECK(built.sim.form == UpdateForm::step_scaled);
  CHECK(built.sim.fingerprint == config_fingerprint(cfg));
  CHECK(cfg.anchors.size() == 2);
}
