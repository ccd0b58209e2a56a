#pragma once

// Packing premeasure at finite scale, local dimension of measures, and the
// percentile surrogate for the packing dimension of a measure.

#include <cmath>
#include <vector>

#include "ergokit/entropy.hpp"

namespace ergokit {

struct PackingGauge {
  double alpha = 1.0;  // gauge phi(t) = t^alpha
};

struct DeltaPacking {
  std::vector<std::size_t> centers;  // indices into the point set
  std::vector<double> radii;
};

struct PackingPremeasure {
  double value = 0.0;
  double trivial_bound = 0.0;  // |E| * delta^alpha
  DeltaPacking packing;
};

// sup over delta-packings of sum phi(2 r_k), with radii restricted to the
// grid {delta/2, delta/4, delta/8, delta/16} and centers in E. Exhaustive
// search up to 8 points, greedy insertion in decreasing-gauge order with a
// pairwise exchange pass beyond that (an upper-bound certificate comes from
// the trivial bound).
inline PackingPremeasure packing_premeasure(const SystemHandle& sys,
                                            const std::vector<Point>& E,
                                            const PackingGauge& gauge, double delta) {
  if (E.empty()) return {};
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
  const std::size_t n = E.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = sys.metric(E[i], E[j]);
  const std::vector<double> grid = {delta / 2, delta / 4, delta / 8, delta / 16};
  auto phi = [&](double r) { return std::pow(2.0 * r, gauge.alpha); };

  PackingPremeasure out;
  out.trivial_bound = static_cast<double>(n) * std::pow(delta, gauge.alpha);

  if (n <= 8) {
    // 5 options per point: unused or one of the four grid radii
    std::vector<int> choice(n, -1), best_choice;
    double best = -1.0;
    std::vector<int> stack(n, -1);
    const auto total = static_cast<std::size_t>(std::pow(5.0, static_cast<double>(n)));
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t t = code;
      bool ok = true;
      double value = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        stack[i] = static_cast<int>(t % 5) - 1;
        t /= 5;
      }
      for (std::size_t i = 0; i < n && ok; ++i) {
        if (stack[i] < 0) continue;
        value += phi(grid[static_cast<std::size_t>(stack[i])]);
        for (std::size_t j = 0; j < i && ok; ++j) {
          if (stack[j] < 0) continue;
          if (!(d[i][j] > grid[static_cast<std::size_t>(stack[i])] +
                              grid[static_cast<std::size_t>(stack[j])]))
            ok = false;
        }
      }
      if (ok && value > best) {
        best = value;
        best_choice = stack;
      }
    }
    out.value = std::max(best, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (best_choice[i] >= 0) {
        out.packing.centers.push_back(i);
        out.packing.radii.push_back(grid[static_cast<std::size_t>(best_choice[i])]);
      }
    return out;
  }

  // greedy in decreasing gauge order
  struct Cand {
    std::size_t point;
    double r;
    double phi;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < n; ++i)
    for (double r : grid) cands.push_back({i, r, phi(r)});
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.phi > b.phi; });
  std::vector<int> chosen_radius(n, -1);  // index into grid per point, or -1
  auto radius_of = [&](std::size_t i) {
    return chosen_radius[i] < 0 ? -1.0 : grid[static_cast<std::size_t>(chosen_radius[i])];
  };
  auto conflicts = [&](const Cand& c, std::vector<std::size_t>& out_conf) {
    out_conf.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (chosen_radius[j] < 0 || j == c.point) continue;
      if (!(d[c.point][j] > c.r + radius_of(j))) out_conf.push_back(j);
    }
    if (chosen_radius[c.point] >= 0) out_conf.push_back(c.point);
  };
  std::vector<std::size_t> conf;
  for (const auto& c : cands) {
    if (chosen_radius[c.point] >= 0) continue;
    conflicts(c, conf);
    if (conf.empty())
      chosen_radius[c.point] = static_cast<int>(std::find(grid.begin(), grid.end(), c.r) -
                                                grid.begin());
  }
  // pairwise exchange: adopt a candidate when its gauge beats its conflicts
  for (int pass = 0; pass < 10; ++pass) {
    bool improved = false;
    for (const auto& c : cands) {
      if (radius_of(c.point) == c.r) continue;
      conflicts(c, conf);
      double lost = 0.0;
      for (auto j : conf) lost += phi(radius_of(j));
      if (c.phi > lost + 1e-15) {
        for (auto j : conf) chosen_radius[j] = -1;
        chosen_radius[c.point] = static_cast<int>(std::find(grid.begin(), grid.end(), c.r) -
                                                  grid.begin());
        improved = true;
      }
    }
    if (!improved) break;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (chosen_radius[i] >= 0) {
      out.packing.centers.push_back(i);
      out.packing.radii.push_back(radius_of(i));
      out.value += phi(radius_of(i));
    }
  return out;
}

// --------------------------------------------------------------------------
// Local dimension

struct RadiusLadder {
  double r0 = 0.0625;
  int rungs = 5;
  double factor = 0.5;

  std::vector<double> radii() const {
    std::vector<double> out;
    double r = r0;
    for (int i = 0; i < rungs; ++i) {
      out.push_back(r);
      r *= factor;
    }
    return out;
  }
};

// Least-squares slope of log mu(B(x,r)) against log r over the ladder.
// Atom masses stop decaying below the atom separation, giving exactly 0.
inline EstimateReport local_dimension(const SystemHandle& sys, const MeasureView& mu,
                                      const Point& x, const RadiusLadder& ladder) {
  EstimateReport rep;
  rep.method = "loglog-ls-slope";
  std::vector<double> xs, ys;
  for (const double r : ladder.radii()) {
    const double m = mass_value(sys, open_ball(x, 1, r), mu);
    rep.per_scale.push_back({r, 1.0, m});
    if (m <= 0.0) break;  // deeper rungs are zero too
    xs.push_back(std::log(r));
    ys.push_back(std::log(m));
  }
  if (xs.size() < 3)
    throw InsufficientDataError("local_dimension: fewer than 3 rungs with positive mass");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  rep.value = num / den;
  rep.converged = xs.size() == ladder.radii().size();
  return rep;
}

// --------------------------------------------------------------------------
// Packing dimension surrogate for measures

struct PackingDimensionReport {
  double surrogate = 0.0;       // 95th percentile of per-point dimensions
  double lower_heuristic = 0.0; // 5th percentile; heuristic stand-in for dim_P^-
  bool labelled_surrogate = true;
  double varandas_bound = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> per_point;
};

struct PackingDimensionOptions {
  RadiusLadder ladder;
  double quantile = 0.95;
};

// Percentile of per-point local dimensions: a finite-scale surrogate for
// dim_P^+(mu) (exact-dimensional measures make the surrogate agree). When
// the system carries an expanding constant, the h/log(lambda) bound is
// attached for comparison (h from the analytic oracle when available).
inline PackingDimensionReport packing_dimension_estimate(const SystemHandle& sys,
                                                         const MeasureView& mu,
                                                         const std::vector<Point>& sample,
                                                         const PackingDimensionOptions& opt = {}) {
  if (sample.empty()) throw InsufficientDataError("packing_dimension_estimate: empty sample");
  PackingDimensionReport rep;
  rep.per_point.resize(sample.size());
  parallel_for(sample.size(), [&](std::size_t i) {
    rep.per_point[i] = local_dimension(sys, mu, sample[i], opt.ladder).value;
  });
  rep.surrogate = quantile_element(rep.per_point, opt.quantile);
  rep.lower_heuristic = quantile_element(rep.per_point, 1.0 - opt.quantile);
  if (sys.expanding && !mu.is_atomic())
    rep.varandas_bound = oracle_entropy(mu.analytic()) / std::log(sys.expanding->lambda);
  return rep;
}

}  // namespace ergokit
