#pragma once

// Expansivity diagnostics: two-sided (or forward-closed) ball mass tails
// and the classification protocol built on liminf_n mu(V[x,n,delta]) = 0.

#include <string>
#include <vector>

#include "ergokit/entropy.hpp"

namespace ergokit {

// Closed-ball flavor: two-sided for invertible systems, forward-only for
// the positively-expansive variant on non-invertible ones.
inline BallQuery expansivity_ball(const SystemHandle& sys, const Point& x, std::int64_t n,
                                  double delta) {
  return sys.invertible ? two_sided_ball(x, n, delta) : forward_closed_ball(x, n, delta);
}

// mu(V[x,n,delta]): an upper bound for the Gamma_delta(x) mass,
// non-increasing in n.
inline double gamma_set_mass(const SystemHandle& sys, const MeasureView& mu, const Point& x,
                             double delta, std::int64_t n,
                             const CylinderSearchOptions& opt = {}) {
  return mass_value(sys, expansivity_ball(sys, x, n, delta), mu, opt);
}

// eta(x, s) = inf_{s <= n <= n_max} mu(V[x,n,delta]).
inline double eta_lower(const SystemHandle& sys, const MeasureView& mu, const Point& x,
                        double delta, std::int64_t s, std::int64_t n_max,
                        const CylinderSearchOptions& opt = {}) {
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t n = s; n <= n_max; ++n)
    best = std::min(best, gamma_set_mass(sys, mu, x, delta, n, opt));
  return best;
}

// theta(x, s) = inf_{s <= n <= n_max} g_{x,delta,n}(mu) with the two-sided
// (or forward-closed) distance in the mollifier. The mollified masses are
// non-increasing in n (nested distances), so the infimum is the value at
// n_max; the atomic path scans the whole tail anyway since it is exact and
// cheap.
inline double theta_lower(const SystemHandle& sys, const MeasureView& mu, const Point& x,
                          double delta, std::int64_t s, std::int64_t n_max,
                          const CylinderSearchOptions& opt = {}) {
  if (mu.is_atomic()) {
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t n = s; n <= n_max; ++n)
      best = std::min(best, mollified_mass(sys, expansivity_ball(sys, x, n, delta), mu.atomic()));
    return best;
  }
  const auto q = expansivity_ball(sys, x, n_max, delta);
  CylinderSearchOptions mopt = opt;
  CylinderSearchOptions coarse;
  coarse.bracket_tol = 1e-6;
  const double scale =
      ball_mass_bracket(sys, {x, n_max, 2 * delta, q.kind}, mu.analytic(), coarse).upper;
  mopt.bracket_tol = std::max({opt.bracket_tol, 1e-3 * scale, 1e-13});
  return mollified_mass(sys, q, mu.analytic(), mopt);
}

// --------------------------------------------------------------------------
// Classification

enum class ExpansivityClass { Expansive, NotExpansive, Inconclusive };

inline std::string to_string(ExpansivityClass c) {
  switch (c) {
    case ExpansivityClass::Expansive: return "expansive";
    case ExpansivityClass::NotExpansive: return "not-expansive";
    case ExpansivityClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct ExpansivityVerdict {
  double delta = 0.0;
  std::vector<double> per_point_eta;          // tail mass at n_max per sample point
  std::vector<std::vector<double>> per_point_masses;  // full mass tables
  ExpansivityClass verdict = ExpansivityClass::Inconclusive;
  double mass_quantile = 0.0;  // sample quantile of per-point tail masses
};

struct ExpansivityOptions {
  std::int64_t s = 1;
  std::int64_t n_max = 10;
  double threshold = 1e-3;      // expansive vote: tail mass below this, still decreasing
  double floor = 1e-2;          // not-expansive vote: all masses at or above this
  double expansive_quantile = 0.95;
  double positive_fraction = 0.05;
};

// Per delta: a point votes expansive when its tail mass at n_max has fallen
// below the threshold and the sequence is still decreasing; it votes
// not-expansive when masses stay bounded away from zero across the whole
// tail. Verdicts need the configured fractions; anything else is
// inconclusive (finite n cannot decide expansiveness in general).
inline ExpansivityVerdict classify_expansive(const SystemHandle& sys, const MeasureView& mu,
                                             const std::vector<Point>& sample, double delta,
                                             const ExpansivityOptions& opt = {}) {
  if (sample.empty()) throw InsufficientDataError("classify_expansive: empty sample");
  ExpansivityVerdict v;
  v.delta = delta;
  v.per_point_eta.resize(sample.size());
  v.per_point_masses.resize(sample.size());
  std::vector<char> vote_exp(sample.size(), 0), vote_not(sample.size(), 0);
  // uniform product measures have center-independent masses: one table
  const bool shared =
      !mu.is_atomic() && detail::is_uniform_bernoulli(mu.analytic()) && sample.size() > 1;
  std::vector<double> shared_masses;
  if (shared)
    for (std::int64_t n = opt.s; n <= opt.n_max; ++n)
      shared_masses.push_back(gamma_set_mass(sys, mu, sample[0], delta, n));
  parallel_for(sample.size(), [&](std::size_t i) {
    std::vector<double> masses = shared_masses;
    if (!shared)
      for (std::int64_t n = opt.s; n <= opt.n_max; ++n)
        masses.push_back(gamma_set_mass(sys, mu, sample[i], delta, n));
    const double last = masses.back();
    const double first = masses.front();
    double min_mass = masses.front();
    for (double m : masses) min_mass = std::min(min_mass, m);
    vote_exp[i] = (last < opt.threshold && last < first) ? 1 : 0;
    vote_not[i] = (min_mass >= opt.floor) ? 1 : 0;
    v.per_point_eta[i] = last;
    v.per_point_masses[i] = std::move(masses);
  });
  std::size_t exp_votes = 0, not_votes = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    exp_votes += vote_exp[i];
    not_votes += vote_not[i];
  }
  v.mass_quantile = quantile_element(v.per_point_eta, opt.expansive_quantile);
  const double n_d = static_cast<double>(sample.size());
  if (static_cast<double>(exp_votes) >= opt.expansive_quantile * n_d)
    v.verdict = ExpansivityClass::Expansive;
  else if (static_cast<double>(not_votes) >= opt.positive_fraction * n_d)
    v.verdict = ExpansivityClass::NotExpansive;
  else
    v.verdict = ExpansivityClass::Inconclusive;
  return v;
}

inline std::vector<ExpansivityVerdict> classify_expansive(const SystemHandle& sys,
                                                          const MeasureView& mu,
                                                          const std::vector<Point>& sample,
                                                          const std::vector<double>& deltas,
                                                          const ExpansivityOptions& opt = {}) {
  std::vector<ExpansivityVerdict> out;
  for (const double d : deltas) out.push_back(classify_expansive(sys, mu, sample, d, opt));
  return out;
}

}  // namespace ergokit
