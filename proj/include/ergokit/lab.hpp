#pragma once

// Experiment harness: the periodic-approximation experiment, the inequality
// suite, per-indicator runs, and artifact emission (summary.json + CSV
// tables + SVG plots under out/<experiment>/fixed/).

#include <filesystem>
#include <functional>
#include <map>

#include "ergokit/config.hpp"
#include "ergokit/dimension.hpp"
#include "ergokit/expansive.hpp"
#include "ergokit/recurrence.hpp"

namespace ergokit {

struct RunArtifact {
  std::filesystem::path dir;
  json summary;
  std::vector<std::string> csv_files;
  std::vector<std::string> svg_files;
  bool converged = true;

  void write_summary() const {
    write_text(dir / "summary.json", summary.dump(2) + "\n");
  }
};

inline RunArtifact make_artifact(const ExperimentConfig& cfg, const std::string& name) {
  RunArtifact art;
  art.dir = std::filesystem::path(cfg.out) / name / "fixed";
  std::filesystem::create_directories(art.dir);
  art.summary["experiment"] = name;
  art.summary["seed"] = cfg.seed;
  return art;
}

// --------------------------------------------------------------------------
// Shared random generators for the suite

namespace labdetail {

inline std::vector<SystemHandle> suite_zoo() {
  return {make_doubling(), make_tent(), make_shift(2, Sided::One), make_shift(3, Sided::Two)};
}

inline AtomicMeasure random_atomic(const SystemHandle& sys, Rng& rng, std::size_t max_atoms = 12) {
  const std::size_t n = 1 + rng.index(max_atoms);
  SamplingOptions opt;
  opt.periodic_word = sys.is_shift() ? 19 : 0;
  std::vector<Point> pts;
  std::vector<double> w;
  double sw = 0;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(random_point(sys, rng, opt));
    w.push_back(0.05 + rng.uniform());
    sw += w.back();
  }
  for (auto& v : w) v /= sw;
  return make_atomic(sys, pts, w, false);
}

inline AtomicMeasure random_periodic(const SystemHandle& sys, Rng& rng, std::int64_t max_len) {
  if (sys.is_shift()) {
    const auto len = 2 + rng.index(static_cast<std::size_t>(max_len - 1));
    std::vector<std::uint8_t> w(len);
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(sys.alphabet));
    return periodize(sys, w);
  }
  // Rationals with odd denominator are eventually periodic under the exact
  // integer dynamics of doubling and tent; walk into the cycle and read off
  // its entry point and length.
  const auto k = 3 + rng.index(5);
  const std::uint64_t den = (1ULL << k) - 1;  // 7 .. 127, odd
  Point p(CirclePoint::rational(1 + rng.below(den - 1), den));
  std::map<std::uint64_t, std::int64_t> seen;
  std::vector<Point> orbit;
  for (std::int64_t i = 0;; ++i) {
    const auto cur = p.circle().num;
    if (auto it = seen.find(cur); it != seen.end())
      return periodic_measure(sys, orbit[static_cast<std::size_t>(it->second)],
                              i - it->second);
    seen.emplace(cur, i);
    orbit.push_back(p);
    p = sys.apply(p);
  }
}

struct CheckResult {
  std::string name;
  std::size_t pass = 0;
  std::size_t fail = 0;
  json failures = json::array();

  void record(bool ok, const std::function<json()>& dump) {
    if (ok) {
      ++pass;
    } else {
      ++fail;
      if (failures.size() < 16) failures.push_back(dump());
    }
  }
};

}  // namespace labdetail

// --------------------------------------------------------------------------
// Inequality suite

inline labdetail::CheckResult check_mollifier_sandwich(const ExperimentConfig& cfg,
                                                       std::size_t trials = 1000) {
  labdetail::CheckResult res{"mollifier-sandwich"};
  Rng rng = substream(cfg.seed, "suite/mollifier-sandwich");
  const auto zoo = labdetail::suite_zoo();
  const bool sabotage = cfg.suite.sabotage == "mollifier_ramp_half";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& sys = zoo[t % zoo.size()];
    const auto mu = labdetail::random_atomic(sys, rng);
    SamplingOptions opt;
    opt.periodic_word = sys.is_shift() ? 19 : 0;
    const Point x = rng.uniform() < 0.5 && !mu.atoms.empty()
                        ? mu.atoms[rng.index(mu.size())]
                        : random_point(sys, rng, opt);
    const double eps = 0.01 + 0.4 * rng.uniform();
    const auto n = static_cast<std::int64_t>(1 + rng.index(10));
    const double m1 = ball_mass(sys, open_ball(x, n, eps), mu);
    const double m2 = ball_mass(sys, open_ball(x, n, 2 * eps), mu);
    double g;
    if (!sabotage) {
      g = mollified_mass(sys, open_ball(x, n, eps), mu);
    } else {
      // test fixture: ramp slope halved, extends past 2 eps
      g = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const double d = dn(sys, x, mu.atoms[i], n);
        g += mu.weights[i] * std::max(0.0, std::min(1.0, 1.5 - d / (2 * eps)));
      }
    }
    const bool ok = m1 <= g && g <= m2;
    res.record(ok, [&] {
      return json{{"system", sys.name}, {"eps", eps}, {"n", n},
                  {"m1", m1}, {"g", g}, {"m2", m2}};
    });
  }
  return res;
}

inline labdetail::CheckResult check_beta_gamma(const ExperimentConfig& cfg,
                                               std::size_t trials = 500) {
  labdetail::CheckResult res{"beta-gamma"};
  Rng rng = substream(cfg.seed, "suite/beta-gamma");
  const auto zoo = labdetail::suite_zoo();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& sys = zoo[t % zoo.size()];
    const auto mu = labdetail::random_atomic(sys, rng);
    const MeasureView view(mu);
    const Point x = mu.atoms[rng.index(mu.size())];
    const double eps = 0.02 + 0.3 * rng.uniform();
    const auto s = static_cast<std::int64_t>(2 + rng.index(4));
    const std::int64_t n_max = 12;
    const double b1 = beta_lower(sys, view, x, eps, s, n_max);
    const double b2 = beta_lower(sys, view, x, 2 * eps, s, n_max);
    const double g = gamma_lower(sys, view, x, eps, s + 1, n_max);
    // corrected sandwich over the shared tail + monotonicity in s and eps
    bool ok = (b2 <= g) && (g <= b1);
    ok = ok && beta_lower(sys, view, x, eps, s + 1, n_max) >= b1;
    ok = ok && b2 <= b1;
    res.record(ok, [&] {
      return json{{"system", sys.name}, {"eps", eps}, {"s", s},
                  {"beta_eps", b1}, {"gamma", g}, {"beta_2eps", b2}};
    });
  }
  return res;
}

inline labdetail::CheckResult check_fractal_chain(const ExperimentConfig& cfg,
                                                  std::size_t trials = 200) {
  labdetail::CheckResult res{"fractal-chain"};
  Rng rng = substream(cfg.seed, "suite/fractal-chain");
  const auto sys = make_shift(2, Sided::One);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto mu = labdetail::random_periodic(sys, rng, 10);
    const double s = 0.2 + 0.6 * rng.uniform();
    const double r = 0.05 + 0.2 * rng.uniform();
    const auto n = static_cast<std::int64_t>(2 + rng.index(6));
    const double I = correlation_integral(sys, mu, s, 2 * r, n);
    const auto cov = generating_set_sums(sys, mu, s, r, n, cfg.seed);
    double S2r = 0.0;
    for (const auto c : cov.cover)
      S2r += std::pow(ball_mass(sys, open_ball(mu.atoms[c], n, 2 * r), mu), s);
    const bool ok = I <= cov.S + 1e-9 && cov.S <= cov.W + 1e-12 && cov.W <= S2r + 1e-12;
    res.record(ok, [&] {
      return json{{"s", s}, {"r", r}, {"n", n},
                  {"I", I}, {"S", cov.S}, {"W", cov.W}, {"S2r", S2r}};
    });
  }
  return res;
}

inline labdetail::CheckResult check_ball_nesting(const ExperimentConfig& cfg,
                                                 std::size_t trials = 300) {
  labdetail::CheckResult res{"ball-nesting"};
  Rng rng = substream(cfg.seed, "suite/ball-nesting");
  const auto zoo = labdetail::suite_zoo();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& sys = zoo[t % zoo.size()];
    const auto mu = labdetail::random_atomic(sys, rng);
    SamplingOptions opt;
    opt.periodic_word = sys.is_shift() ? 19 : 0;
    const Point x = random_point(sys, rng, opt);
    const double eps = 0.02 + 0.3 * rng.uniform();
    bool ok = true;
    double prev = 1.0 + 1e-9;
    for (std::int64_t n = 1; n <= 9; ++n) {
      const double m = ball_mass(sys, open_ball(x, n, eps), mu);
      ok = ok && m <= prev;
      prev = m;
    }
    ok = ok && ball_mass(sys, open_ball(x, 4, eps), mu) <=
                   ball_mass(sys, open_ball(x, 4, 1.5 * eps), mu);
    if (sys.invertible) {
      double vprev = 1.0 + 1e-9;
      for (std::int64_t n = 0; n <= 6; ++n) {
        const double m = ball_mass(sys, two_sided_ball(x, n, eps), mu);
        ok = ok && m <= vprev;
        vprev = m;
      }
    }
    if (sys.lipschitz && sys.is_circle()) {
      // B(x, r Lambda^-n) inside B_n(x, r)
      const double r = 0.05 + 0.3 * rng.uniform();
      const auto n = static_cast<std::int64_t>(1 + rng.index(6));
      const double small = r * std::pow(*sys.lipschitz, -double(n));
      const auto off = static_cast<std::uint64_t>(rng.uniform() * small * 0x1.0p64);
      const Point y(CirclePoint::fixed(x.circle().num + off));
      if (sys.metric(x, y) < small) ok = ok && ball_contains(sys, open_ball(x, n, r), y);
    }
    res.record(ok, [&] { return json{{"system", sys.name}, {"eps", eps}}; });
  }
  return res;
}

inline labdetail::CheckResult check_wasserstein_axioms(const ExperimentConfig& cfg,
                                                       std::size_t trials = 60) {
  labdetail::CheckResult res{"wasserstein-axioms"};
  Rng rng = substream(cfg.seed, "suite/wasserstein");
  const auto zoo = labdetail::suite_zoo();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& sys = zoo[t % zoo.size()];
    const auto A = labdetail::random_atomic(sys, rng, 6);
    const auto B = labdetail::random_atomic(sys, rng, 6);
    const auto C = labdetail::random_atomic(sys, rng, 6);
    const double ab = wasserstein1(sys, A, B).value;
    const double ba = wasserstein1(sys, B, A).value;
    const double ac = wasserstein1(sys, A, C).value;
    const double cb = wasserstein1(sys, C, B).value;
    const double aa = wasserstein1(sys, A, A).value;
    const bool ok = std::abs(ab - ba) <= 1e-9 && ab <= ac + cb + 1e-9 && aa <= 1e-9;
    res.record(ok, [&] {
      return json{{"system", sys.name}, {"ab", ab}, {"ba", ba},
                  {"ac", ac}, {"cb", cb}, {"aa", aa}};
    });
  }
  return res;
}

inline labdetail::CheckResult check_periodic_zero(const ExperimentConfig& cfg,
                                                  std::size_t trials = 50) {
  labdetail::CheckResult res{"periodic-zero"};
  Rng rng = substream(cfg.seed, "suite/periodic-zero");
  const auto zoo = labdetail::suite_zoo();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& sys = zoo[t % zoo.size()];
    const auto mu = labdetail::random_periodic(sys, rng, 8);
    const auto period = static_cast<std::int64_t>(mu.size());
    // grid past the separation scale
    ScaleGrid grid = cfg.grid;
    grid.s = std::max<std::int64_t>(period, 2);
    grid.n_max = grid.s + 8;
    const auto ent = essential_local_entropy(sys, mu, mu.atoms, grid);
    bool ok = ent.value == 0.0;

    double sep = sys.diameter();
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        sep = std::min(sep, sys.metric(mu.atoms[i], mu.atoms[j]));
    RecurrenceConfig rc;
    rc.ladder.r0 = 0.45 * sep;
    rc.ladder.rungs = 6;
    rc.horizon = static_cast<std::uint64_t>(4 * period + 16);
    const auto prof = recurrence_rates(sys, mu.atoms[0], rc);
    ok = ok && prof.lower_rate == 0.0 && prof.upper_rate == 0.0;
    const auto wprof =
        waiting_rates(sys, mu.atoms[0], mu.atoms[rng.index(mu.size())], rc);
    ok = ok && wprof.upper_rate == 0.0;

    RadiusLadder dl;
    dl.r0 = 0.45 * sep;
    dl.rungs = 4;
    ok = ok && local_dimension(sys, mu, mu.atoms[0], dl).value == 0.0;

    ScaleGrid sgrid = grid;
    sgrid.q_values = {0.5, 2.0};
    for (const auto& row : correlation_entropy_spectrum(sys, mu, sgrid))
      ok = ok && row.H_lower == 0.0 && row.H_upper == 0.0;

    ok = ok && invariance_defect(sys, mu) == 0.0;
    res.record(ok, [&] {
      return json{{"system", sys.name}, {"period", period},
                  {"entropy", ent.value}, {"rate", prof.upper_rate}};
    });
  }
  return res;
}

inline labdetail::CheckResult check_varandas(const ExperimentConfig& cfg,
                                             std::size_t samples = 200) {
  labdetail::CheckResult res{"varandas"};
  Rng rng = substream(cfg.seed, "suite/varandas");
  const auto sys = make_doubling();
  SamplingOptions so;
  so.long_orbit = true;
  // the rate checks sample Lebesgue-random points; the dimension surrogate
  // needs a dense carrier, so it runs on a long-orbit empirical measure
  const auto leb = empirical_measure(sys, random_point(sys, rng, so), 4096);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < 2 * samples; ++i) pts.push_back(random_point(sys, rng, so));
  std::vector<Point> dim_sample;
  for (std::size_t i = 0; i < samples; ++i) dim_sample.push_back(leb.atoms[rng.index(leb.size())]);

  ExpandingBoundOptions opt;
  opt.recurrence.ladder.rungs = 16;
  opt.recurrence.fit_fraction = 0.3;
  const double bound = std::log(2.0) / std::log(sys.expanding->lambda);

  std::vector<double> rrate(samples), wrate(samples);
  parallel_for(samples, [&](std::size_t i) {
    rrate[i] = recurrence_rates(sys, pts[i], opt.recurrence).upper_rate;
    wrate[i] = waiting_rates(sys, pts[i], pts[samples + i], opt.recurrence).upper_rate;
  });
  std::size_t rok = 0, wok = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    rok += (rrate[i] <= bound + opt.return_slack);
    wok += (wrate[i] <= bound + opt.waiting_slack);
  }
  PackingDimensionOptions dopt;
  dopt.ladder.r0 = 0.0625;
  dopt.ladder.rungs = 4;
  const double surrogate = packing_dimension_estimate(sys, leb, dim_sample, dopt).surrogate;

  const bool ok = rok * 100 >= samples * 95 && wok * 100 >= samples * 95 &&
                  surrogate <= bound + opt.dimension_slack;
  res.record(ok, [&] {
    return json{{"return_ok", rok},
                {"waiting_ok", wok},
                {"samples", samples},
                {"dimension", surrogate}};
  });
  return res;
}

inline labdetail::CheckResult check_expansive(const ExperimentConfig& cfg) {
  labdetail::CheckResult res{"expansive"};
  Rng rng = substream(cfg.seed, "suite/expansive");
  const auto sys = make_shift(2, Sided::Two);
  ExpansivityOptions opt = cfg.expansivity;
  opt.n_max = 10;

  const auto dfix = periodize(sys, {0});
  for (const double d : {0.05, 0.25, 0.5}) {
    const auto v = classify_expansive(sys, dfix, dfix.atoms, d, opt);
    res.record(v.verdict == ExpansivityClass::NotExpansive,
               [&] { return json{{"case", "fixed-point"}, {"delta", d}}; });
  }
  const auto mu = make_bernoulli({0.5, 0.5});
  std::vector<Point> sample;
  for (int i = 0; i < 32; ++i) sample.push_back(sample_point(sys, mu, rng, 64));
  const auto v = classify_expansive(sys, mu, sample, 0.25, opt);
  res.record(v.verdict == ExpansivityClass::Expansive && v.mass_quantile < 1e-4,
             [&] { return json{{"case", "bernoulli"}, {"quantile", v.mass_quantile}}; });
  return res;
}

inline labdetail::CheckResult check_cylinder_consistency(const ExperimentConfig& cfg,
                                                         std::size_t trials = 1000) {
  labdetail::CheckResult res{"cylinder-consistency"};
  Rng rng = substream(cfg.seed, "suite/cylinder");
  const auto bern = make_bernoulli({0.25, 0.75});
  const auto markov = make_markov({{0.5, 0.5}, {1.0, 0.0}}, {2.0 / 3.0, 1.0 / 3.0});
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& mu = (t % 2 == 0) ? bern : markov;
    const auto w = sample_word(mu, rng, 1 + static_cast<std::int64_t>(rng.index(10)));
    double total = 0;
    for (std::uint8_t a = 0; a < 2; ++a) {
      auto ext = w;
      ext.push_back(a);
      total += mu.cylinder_mass(ext);
    }
    res.record(std::abs(total - mu.cylinder_mass(w)) <= 1e-12,
               [&] { return json{{"len", w.size()}, {"total", total}}; });
  }
  return res;
}

inline labdetail::CheckResult check_metric_axioms(const ExperimentConfig& cfg) {
  labdetail::CheckResult res{"metric-axioms"};
  for (const auto& sys : {make_doubling(), make_tent(), make_rotation(),
                          make_shift(2, Sided::One), make_shift(2, Sided::Two)}) {
    const auto rep = verify_metric_axioms(sys, 1000, cfg.seed);
    res.record(rep.ok(), [&] {
      return json{{"system", sys.name},
                  {"triangle", rep.triangle_violations},
                  {"expanding", rep.expanding_violations},
                  {"lipschitz", rep.lipschitz_violations}};
    });
  }
  return res;
}

inline RunArtifact run_inequality_suite(const ExperimentConfig& cfg) {
  RunArtifact art = make_artifact(cfg, "suite");
  const std::vector<std::string> all = {
      "mollifier-sandwich", "beta-gamma",      "fractal-chain",
      "ball-nesting",       "wasserstein-axioms", "periodic-zero",
      "varandas",           "expansive",       "cylinder-consistency",
      "metric-axioms"};
  // checks = ["all"] (the default) selects everything; an explicitly empty
  // list runs nothing and produces an empty artifact
  std::vector<std::string> wanted = cfg.suite.checks;
  if (wanted.size() == 1 && wanted[0] == "all") wanted = all;

  CsvTable table;
  table.header = {"check", "pass", "fail"};
  json checks = json::array();
  std::size_t total_fail = 0;
  for (const auto& name : wanted) {
    labdetail::CheckResult r;
    if (name == "mollifier-sandwich") r = check_mollifier_sandwich(cfg);
    else if (name == "beta-gamma") r = check_beta_gamma(cfg);
    else if (name == "fractal-chain") r = check_fractal_chain(cfg);
    else if (name == "ball-nesting") r = check_ball_nesting(cfg);
    else if (name == "wasserstein-axioms") r = check_wasserstein_axioms(cfg);
    else if (name == "periodic-zero") r = check_periodic_zero(cfg);
    else if (name == "varandas") r = check_varandas(cfg);
    else if (name == "expansive") r = check_expansive(cfg);
    else if (name == "cylinder-consistency") r = check_cylinder_consistency(cfg);
    else if (name == "metric-axioms") r = check_metric_axioms(cfg);
    else throw ConfigError("unknown suite check: " + name);
    table.add_row({r.name, std::to_string(r.pass), std::to_string(r.fail)});
    checks.push_back(json{{"name", r.name},
                          {"pass", r.pass},
                          {"fail", r.fail},
                          {"failures", r.failures}});
    total_fail += r.fail;
  }
  table.write(art.dir / "checks.csv");
  art.csv_files.push_back("checks.csv");
  art.summary["checks"] = checks;
  art.summary["total_failures"] = total_fail;
  art.summary["csv"] = art.csv_files;
  art.write_summary();
  return art;
}

// --------------------------------------------------------------------------
// Genericity experiment: periodized words approximate an analytic target in
// W1 while every indicator stays at its periodic (zero) value.

inline RunArtifact run_genericity_experiment(const ExperimentConfig& cfg) {
  const auto sys = build_system(cfg.system);
  if (!sys.is_shift()) throw ConfigError("the genericity experiment needs a full shift");
  const auto target = build_analytic(cfg.measure);
  const auto disc = discretize(sys, target, cfg.genericity.depth);

  RunArtifact art = make_artifact(cfg, "genericity");
  CsvTable table;
  table.header = {"L",          "trial",       "period",
                  "w1",         "entropy",     "invariance_defect",
                  "recurrence_rate", "local_dimension", "expansive_tail_mass"};

  json medians = json::array();
  bool all_zero_entropy = true, all_zero_defect = true;
  std::vector<PlotSeries> scatter(1);
  scatter[0].label = "approximants";
  PlotSeries median_line;
  median_line.label = "median W1";
  median_line.line = true;

  for (const auto L : cfg.genericity.lengths) {
    std::vector<double> w1s;
    for (std::int64_t trial = 0; trial < cfg.genericity.trials; ++trial) {
      Rng rng = substream(cfg.seed, "genericity/L=" + std::to_string(L) + "/t=" +
                                         std::to_string(trial));
      const auto word = sample_word(target, rng, L);
      const auto nu = periodize(sys, word);
      const auto period = static_cast<std::int64_t>(nu.size());

      const double w1 = wasserstein1(sys, nu, disc.measure).value;
      ScaleGrid grid = cfg.grid;
      grid.s = std::max<std::int64_t>(cfg.grid.s, period);
      grid.n_max = grid.s + 10;
      const double ent = essential_local_entropy(sys, nu, nu.atoms, grid).value;
      const double defect = invariance_defect(sys, nu);

      double sep = sys.diameter();
      for (std::size_t i = 0; i < nu.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
          sep = std::min(sep, sys.metric(nu.atoms[i], nu.atoms[j]));
      RecurrenceConfig rc;
      rc.ladder.r0 = 0.45 * sep;
      rc.ladder.rungs = 6;
      rc.horizon = static_cast<std::uint64_t>(4 * period + 16);
      const double rate = recurrence_rates(sys, nu.atoms[0], rc).upper_rate;
      RadiusLadder dl;
      dl.r0 = 0.45 * sep;
      dl.rungs = 4;
      const double dim = local_dimension(sys, nu, nu.atoms[0], dl).value;
      const double tail = gamma_set_mass(sys, nu, nu.atoms[0], 0.45 * sep, period + 4);

      all_zero_entropy = all_zero_entropy && ent == 0.0;
      all_zero_defect = all_zero_defect && defect == 0.0;
      w1s.push_back(w1);
      scatter[0].points.emplace_back(w1, ent);
      table.add_row({std::to_string(L), std::to_string(trial), std::to_string(period),
                     fmt_double(w1), fmt_double(ent), fmt_double(defect), fmt_double(rate),
                     fmt_double(dim), fmt_double(tail)});
    }
    const double med = quantile_element(w1s, 0.5);
    medians.push_back(json{{"L", L}, {"median_w1", med}});
    median_line.points.emplace_back(static_cast<double>(L), med);
  }

  table.write(art.dir / "approximants.csv");
  art.csv_files.push_back("approximants.csv");
  art.summary["median_w1"] = medians;
  art.summary["all_entropies_zero"] = all_zero_entropy;
  art.summary["all_defects_zero"] = all_zero_defect;
  art.summary["discretization_bound"] = disc.diameter_bound;
  art.summary["target"] = measure_to_json(target);
  art.summary["csv"] = art.csv_files;

  write_text(art.dir / "w1_vs_entropy.svg", svg_plot(scatter, "W1 to target", "entropy estimate"));
  write_text(art.dir / "median_w1.svg", svg_plot({median_line}, "word length L", "median W1"));
  art.svg_files = {"w1_vs_entropy.svg", "median_w1.svg"};
  art.summary["svg"] = art.svg_files;
  art.write_summary();
  return art;
}

// --------------------------------------------------------------------------
// Indicator runs backing the CLI subcommands

inline std::vector<Point> config_sample(const SystemHandle& sys, const ExperimentConfig& cfg,
                                        const AnalyticMeasure* analytic) {
  Rng rng = substream(cfg.seed, "sample");
  std::vector<Point> out;
  const std::int64_t span = cfg.grid.n_max + 8;
  for (std::int64_t i = 0; i < cfg.sample; ++i) {
    if (analytic) {
      out.push_back(sample_point(sys, *analytic, rng, span));
    } else {
      SamplingOptions so;
      so.long_orbit = sys.kind != SystemKind::Rotation;
      out.push_back(random_point(sys, rng, so));
    }
  }
  return out;
}

inline RunArtifact run_entropy_local(const ExperimentConfig& cfg) {
  const auto sys = build_system(cfg.system);
  const auto mu = build_analytic(cfg.measure);
  const auto sample = config_sample(sys, cfg, &mu);
  const auto rep = essential_local_entropy(sys, mu, sample, cfg.grid);

  RunArtifact art = make_artifact(cfg, "entropy-local");
  CsvTable t;
  t.header = {"point", "local_entropy"};
  for (const auto& row : rep.per_scale)
    t.add_row({fmt_double(row.n), fmt_double(row.raw)});
  t.write(art.dir / "per_point.csv");
  art.csv_files.push_back("per_point.csv");
  art.converged = rep.converged;
  art.summary["estimate"] = report_to_json(rep);
  art.summary["oracle_entropy"] = oracle_entropy(mu);
  art.summary["csv"] = art.csv_files;
  art.write_summary();
  return art;
}

inline RunArtifact run_entropy_spectrum(const ExperimentConfig& cfg) {
  const auto sys = build_system(cfg.system);
  const auto mu = build_analytic(cfg.measure);
  const auto rows = correlation_entropy_spectrum(sys, mu, cfg.grid);

  RunArtifact art = make_artifact(cfg, "entropy-spectrum");
  CsvTable t;
  t.header = {"q", "H_lower", "H_upper", "converged"};
  for (const auto& r : rows) {
    t.add_row({fmt_double(r.q), fmt_double(r.H_lower), fmt_double(r.H_upper),
               r.converged ? "1" : "0"});
    art.converged = art.converged && r.converged;
  }
  t.write(art.dir / "spectrum.csv");
  art.csv_files.push_back("spectrum.csv");
  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back(json{{"q", r.q}, {"H_lower", r.H_lower}, {"H_upper", r.H_upper},
                         {"converged", r.converged}});
  art.summary["spectrum"] = jrows;
  art.summary["csv"] = art.csv_files;
  art.write_summary();
  return art;
}

inline RunArtifact run_recurrence(const ExperimentConfig& cfg) {
  const auto sys = build_system(cfg.system);
  const AnalyticMeasure* analytic = nullptr;
  AnalyticMeasure mu_store;
  if (sys.is_shift()) {
    mu_store = build_analytic(cfg.measure);
    analytic = &mu_store;
  }
  const auto sample = config_sample(sys, cfg, analytic);

  RunArtifact art = make_artifact(cfg, "recurrence");
  CsvTable t;
  t.header = {"point", "r", "tau", "found"};
  json rates = json::array();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto prof = recurrence_rates(sys, sample[i], cfg.recurrence);
    for (std::size_t j = 0; j < prof.radii.size(); ++j) {
      const bool found = prof.times[j] != kNotFound;
      t.add_row({std::to_string(i), fmt_double(prof.radii[j]),
                 found ? std::to_string(prof.times[j]) : "", found ? "1" : "0"});
    }
    rates.push_back(profile_to_json(prof));
  }
  t.write(art.dir / "profiles.csv");
  art.csv_files.push_back("profiles.csv");
  art.summary["profiles"] = rates;
  art.summary["csv"] = art.csv_files;
  art.write_summary();
  return art;
}

inline RunArtifact run_dimension(const ExperimentConfig& cfg) {
  const auto sys = build_system(cfg.system);
  AnalyticMeasure mu_analytic;
  std::vector<Point> sample;
  PackingDimensionOptions opt;
  opt.ladder = cfg.dimension_ladder;
  RunArtifact art = make_artifact(cfg, "dimension");
  PackingDimensionReport rep;
  if (sys.is_shift()) {
    mu_analytic = build_analytic(cfg.measure);
    sample = config_sample(sys, cfg, &mu_analytic);
    rep = packing_dimension_estimate(sys, mu_analytic, sample, opt);
  } else {
    // Lebesgue-empirical measure of a long generic orbit
    Rng rng = substream(cfg.seed, "dimension/orbit");
    SamplingOptions so;
    so.long_orbit = sys.kind != SystemKind::Rotation;
    const auto mu = empirical_measure(sys, random_point(sys, rng, so), 4096);
    for (std::int64_t i = 0; i < cfg.sample; ++i)
      sample.push_back(mu.atoms[rng.index(mu.size())]);
    rep = packing_dimension_estimate(sys, mu, sample, opt);
  }
  CsvTable t;
  t.header = {"point", "local_dimension"};
  for (std::size_t i = 0; i < rep.per_point.size(); ++i)
    t.add_row({std::to_string(i), fmt_double(rep.per_point[i])});
  t.write(art.dir / "per_point.csv");
  art.csv_files.push_back("per_point.csv");
  art.summary["surrogate"] = rep.surrogate;
  art.summary["surrogate_label"] = "surrogate";
  art.summary["lower_heuristic"] = rep.lower_heuristic;
  art.summary["lower_heuristic_label"] = "heuristic";
  if (!std::isnan(rep.varandas_bound)) art.summary["varandas_bound"] = rep.varandas_bound;
  art.summary["csv"] = art.csv_files;
  art.write_summary();
  return art;
}

inline RunArtifact run_expansive(const ExperimentConfig& cfg) {
  const auto sys = build_system(cfg.system);
  AnalyticMeasure mu = build_analytic(cfg.measure);
  Rng rng = substream(cfg.seed, "expansive/sample");
  std::vector<Point> sample;
  for (std::int64_t i = 0; i < cfg.sample; ++i)
    sample.push_back(sample_point(sys, mu, rng, cfg.expansivity.n_max + 4));
  RunArtifact art = make_artifact(cfg, "expansive");
  json verdicts = json::array();
  for (const double d : cfg.deltas) {
    const auto v = classify_expansive(sys, mu, sample, d, cfg.expansivity);
    json jv;
    jv["delta"] = v.delta;
    jv["verdict"] = to_string(v.verdict);
    jv["mass_quantile"] = v.mass_quantile;
    jv["per_point_eta"] = v.per_point_eta;
    jv["per_point_masses"] = v.per_point_masses;
    verdicts.push_back(jv);
  }
  art.summary["verdicts"] = verdicts;
  art.write_summary();
  return art;
}

inline RunArtifact run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "genericity" || cfg.experiment == "approx")
    return run_genericity_experiment(cfg);
  if (cfg.experiment == "suite") return run_inequality_suite(cfg);
  if (cfg.experiment == "entropy-local") return run_entropy_local(cfg);
  if (cfg.experiment == "entropy-spectrum") return run_entropy_spectrum(cfg);
  if (cfg.experiment == "recurrence") return run_recurrence(cfg);
  if (cfg.experiment == "dimension") return run_dimension(cfg);
  if (cfg.experiment == "expansive") return run_expansive(cfg);
  throw ConfigError("unknown experiment: " + cfg.experiment);
}

}  // namespace ergokit
