#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "ergokit/lab.hpp"

using namespace ergokit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig small_genericity(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.experiment = "genericity";
  cfg.seed = 99;
  cfg.out = out.string();
  cfg.system.kind = "shift";
  cfg.genericity.lengths = {4, 8, 16};
  cfg.genericity.trials = 8;
  cfg.genericity.depth = 6;
  return cfg;
}

}  // namespace

TEST_CASE("toml parse and canonical round trip") {
  const std::string text = R"(
# comment
experiment = "suite"
seed = 31
[system]
kind = "shift"
alphabet = 2
sided = "two"
[measure]
kind = "markov"
P = [[0.5, 0.5], [1.0, 0.0]]
pi = [0.6666666666666666, 0.3333333333333333]
[grid]
epsilons = [0.5, 0.25]
n_max = 12
)";
  const auto cfg = parse_config(text);
  CHECK(cfg.seed == 31);
  CHECK(cfg.system.sided == "two");
  CHECK(cfg.measure.P.size() == 2);
  CHECK(cfg.measure.P[1][0] == 1.0);
  CHECK(cfg.grid.n_max == 12);

  // parse . serialize is the identity on serialized configs
  const std::string canon = serialize_config(cfg);
  const auto cfg2 = parse_config(canon);
  CHECK(serialize_config(cfg2) == canon);
}

TEST_CASE("shipped configs round trip") {
  for (const auto& name :
       {"default.toml", "bernoulli_q.toml", "genericity.toml", "markov_entropy.toml",
        "doubling_recurrence.toml", "expansive.toml"}) {
    const fs::path p = fs::path(PROJECT_SOURCE_DIR) / "configs" / name;
    INFO(name);
    const auto cfg = parse_config(slurp(p));
    const std::string canon = serialize_config(cfg);
    CHECK(serialize_config(parse_config(canon)) == canon);
  }
}

TEST_CASE("genericity experiment: shrinking W1, zero indicators") {
  const fs::path out = fs::temp_directory_path() / "ergokit_test_genericity";
  fs::remove_all(out);
  const auto cfg = small_genericity(out);
  const auto art = run_genericity_experiment(cfg);

  CHECK(art.summary["all_entropies_zero"].get<bool>());
  CHECK(art.summary["all_defects_zero"].get<bool>());
  const auto& med = art.summary["median_w1"];
  REQUIRE(med.size() == 3);
  CHECK(med[0]["median_w1"].get<double>() > med[2]["median_w1"].get<double>());

  // every CSV referenced by the summary exists and is non-empty
  for (const auto& f : art.summary["csv"]) {
    const auto path = art.dir / f.get<std::string>();
    CHECK(fs::exists(path));
    CHECK(fs::file_size(path) > 0);
  }
  // every plotted point appears in the CSV: spot-check the file is parseable
  const auto csv = slurp(art.dir / "approximants.csv");
  CHECK(csv.find("w1") != std::string::npos);
}

TEST_CASE("genericity determinism: byte-identical artifacts") {
  const fs::path out1 = fs::temp_directory_path() / "ergokit_det_a";
  const fs::path out2 = fs::temp_directory_path() / "ergokit_det_b";
  fs::remove_all(out1);
  fs::remove_all(out2);
  auto cfg = small_genericity(out1);
  cfg.genericity.lengths = {4, 8};
  cfg.genericity.trials = 4;
  const auto a = run_genericity_experiment(cfg);
  cfg.out = out2.string();
  const auto b = run_genericity_experiment(cfg);
  CHECK(slurp(a.dir / "approximants.csv") == slurp(b.dir / "approximants.csv"));
  CHECK(slurp(a.dir / "summary.json") == slurp(b.dir / "summary.json"));
  CHECK(slurp(a.dir / "w1_vs_entropy.svg") == slurp(b.dir / "w1_vs_entropy.svg"));
}

TEST_CASE("suite: planted mollifier bug is detected") {
  ExperimentConfig cfg;
  cfg.seed = 3;
  cfg.out = (fs::temp_directory_path() / "ergokit_sabotage").string();
  fs::remove_all(cfg.out);
  cfg.suite.checks = {"mollifier-sandwich"};
  cfg.suite.sabotage = "mollifier_ramp_half";
  const auto art = run_inequality_suite(cfg);
  CHECK(art.summary["total_failures"].get<std::size_t>() > 0);
}

TEST_CASE("suite: clean mollifier check passes") {
  ExperimentConfig cfg;
  cfg.seed = 3;
  cfg.out = (fs::temp_directory_path() / "ergokit_clean").string();
  fs::remove_all(cfg.out);
  cfg.suite.checks = {"mollifier-sandwich", "cylinder-consistency", "metric-axioms"};
  const auto art = run_inequality_suite(cfg);
  CHECK(art.summary["total_failures"].get<std::size_t>() == 0);
}

TEST_CASE("suite: empty selection gives an empty artifact") {
  ExperimentConfig cfg;
  cfg.seed = 3;
  cfg.out = (fs::temp_directory_path() / "ergokit_empty").string();
  fs::remove_all(cfg.out);
  cfg.suite.checks = {};
  const auto art = run_inequality_suite(cfg);
  CHECK(art.summary["total_failures"].get<std::size_t>() == 0);
  CHECK(art.summary["checks"].empty());
  CHECK(fs::exists(art.dir / "summary.json"));
}

TEST_CASE("spectrum run emits the spec'd CSV header") {
  ExperimentConfig cfg;
  cfg.experiment = "entropy-spectrum";
  cfg.seed = 1;
  cfg.out = (fs::temp_directory_path() / "ergokit_spectrum").string();
  fs::remove_all(cfg.out);
  cfg.system.kind = "shift";
  cfg.measure.kind = "bernoulli";
  cfg.measure.p = {0.5, 0.5};
  cfg.grid.n_max = 8;
  cfg.grid.s = 3;
  cfg.grid.q_values = {0.5, 1.0, 2.0};
  const auto art = run_entropy_spectrum(cfg);
  const auto csv = slurp(art.dir / "spectrum.csv");
  CHECK(csv.rfind("q,H_lower,H_upper,converged\n", 0) == 0);
}

TEST_CASE("measure json shapes") {
  const auto sys = make_shift(2, Sided::One);
  const auto atomic = periodize(sys, {0, 1});
  const auto ja = measure_to_json(atomic);
  CHECK(ja.contains("atoms"));
  CHECK(ja.contains("weights"));
  const auto jb = measure_to_json(make_bernoulli({0.25, 0.75}));
  CHECK(jb.contains("bernoulli"));
  const auto jm = measure_to_json(make_markov({{0.5, 0.5}, {1.0, 0.0}}, {2. / 3, 1. / 3}));
  CHECK(jm.contains("markov"));
  CHECK(jm["markov"].contains("P"));
  CHECK(jm["markov"].contains("pi"));
}
