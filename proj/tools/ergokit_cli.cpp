// ergokit command line: runs the indicator estimators and experiments
// described by a TOML config and writes artifacts (summary.json, CSV
// tables, SVG plots) under the output directory.
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical failure
// (NotConverged promoted by --strict, or an estimator error).

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ergokit/lab.hpp"

using namespace ergokit;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::int64_t seed = -1;
  std::string format = "json";
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "TOML config file")->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--out", args.out, "override the output directory");
  cmd->add_option("--format", args.format, "summary format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--strict", args.strict, "exit 2 when an estimate is flagged NotConverged");
}

ExperimentConfig load(const CommonArgs& args, const std::string& experiment) {
  std::ifstream f(args.config_path);
  if (!f) throw ConfigError("cannot read config: " + args.config_path);
  std::stringstream ss;
  ss << f.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str());
  cfg.experiment = experiment;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.out.empty()) cfg.out = args.out;
  return cfg;
}

int finish(const RunArtifact& art, const CommonArgs& args) {
  if (args.format == "json") {
    std::cout << art.summary.dump(2) << "\n";
  } else {
    for (const auto& f : art.csv_files) std::cout << (art.dir / f).string() << "\n";
  }
  if (args.strict && !art.converged) {
    std::cerr << "not converged\n";
    return 2;
  }
  return 0;
}

// Re-renders SVG plots from the CSV tables of an existing artifact dir.
int plot_artifact(const std::string& dir_str) {
  namespace fs = std::filesystem;
  const fs::path dir(dir_str);
  if (!fs::exists(dir / "summary.json")) {
    std::cerr << "no summary.json under " << dir << "\n";
    return 1;
  }
  std::ifstream f(dir / "summary.json");
  json summary = json::parse(f);
  int made = 0;
  if (summary.contains("spectrum")) {
    PlotSeries lo{"H_lower", {}, true}, hi{"H_upper", {}, true};
    for (const auto& r : summary["spectrum"]) {
      lo.points.emplace_back(r["q"].get<double>(), r["H_lower"].get<double>());
      hi.points.emplace_back(r["q"].get<double>(), r["H_upper"].get<double>());
    }
    write_text(dir / "spectrum.svg", svg_plot({lo, hi}, "q", "correlation entropy"));
    ++made;
  }
  if (summary.contains("median_w1")) {
    PlotSeries med{"median W1", {}, true};
    for (const auto& r : summary["median_w1"])
      med.points.emplace_back(r["L"].get<double>(), r["median_w1"].get<double>());
    write_text(dir / "median_w1.svg", svg_plot({med}, "word length L", "median W1"));
    ++made;
  }
  if (summary.contains("profiles")) {
    PlotSeries pts{"log tau vs -log r", {}, false};
    std::ifstream csv(dir / "profiles.csv");
    std::string line;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
      std::stringstream row(line);
      std::string idx, r, tau, found;
      std::getline(row, idx, ',');
      std::getline(row, r, ',');
      std::getline(row, tau, ',');
      std::getline(row, found, ',');
      if (found == "1")
        pts.points.emplace_back(-std::log(std::stod(r)), std::log(std::stod(tau)));
    }
    write_text(dir / "loglog.svg", svg_plot({pts}, "-log r", "log tau"));
    ++made;
  }
  std::cout << made << " plot(s) written under " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergokit: finite-scale entropy, recurrence, dimension and expansivity indicators"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* entropy = app.add_subcommand("entropy", "local entropy and correlation spectra");
  entropy->require_subcommand(1);
  auto* ent_local = entropy->add_subcommand("local", "essential local entropy of a measure");
  add_common(ent_local, args);
  auto* ent_spec = entropy->add_subcommand("spectrum", "correlation entropy q-spectrum");
  add_common(ent_spec, args);

  auto* rec = app.add_subcommand("recurrence", "return-time profiles and rates");
  add_common(rec, args);
  auto* dim = app.add_subcommand("dimension", "local dimension and packing surrogate");
  add_common(dim, args);
  auto* exp = app.add_subcommand("expansive", "expansivity classification");
  add_common(exp, args);
  auto* approx = app.add_subcommand("approx", "periodic approximation of a target measure");
  add_common(approx, args);
  auto* suite = app.add_subcommand("suite", "inequality suite");
  add_common(suite, args);

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "render SVG plots from an artifact directory");
  plot->add_option("--in", plot_dir, "artifact directory (out/<experiment>/fixed)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << app.help() << "\n";
    return 1;
  }

  try {
    if (plot->parsed()) return plot_artifact(plot_dir);
    std::string experiment;
    if (ent_local->parsed()) experiment = "entropy-local";
    else if (ent_spec->parsed()) experiment = "entropy-spectrum";
    else if (rec->parsed()) experiment = "recurrence";
    else if (dim->parsed()) experiment = "dimension";
    else if (exp->parsed()) experiment = "expansive";
    else if (approx->parsed()) experiment = "genericity";
    else if (suite->parsed()) experiment = "suite";
    const auto cfg = load(args, experiment);
    return finish(run_experiment(cfg), args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
