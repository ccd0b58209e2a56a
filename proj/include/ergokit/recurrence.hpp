#pragma once

// Return times, waiting times, recurrence/waiting rates, and the expanding
// upper-bound checks (rate and dimension against h / log lambda).

#include <cmath>
#include <optional>
#include <vector>

#include "ergokit/dimension.hpp"

namespace ergokit {

inline constexpr std::uint64_t kNotFound = ~std::uint64_t{0};

struct RecurrenceLadder {
  double r0 = 0.1;
  int rungs = 10;
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

struct RecurrenceConfig {
  RecurrenceLadder ladder;
  std::uint64_t horizon = 1'000'000;
  double fit_fraction = 0.5;  // smallest-radii fraction used by the fit
};

struct RecurrenceProfile {
  std::vector<double> radii;          // strictly decreasing
  std::vector<std::uint64_t> times;   // kNotFound when unseen within horizon
  std::uint64_t horizon = 0;
  double lower_rate = 0.0;
  double upper_rate = 0.0;
  double slope_min = 0.0;             // pairwise-slope extremes, diagnostics
  double slope_max = 0.0;
  bool unreliable = false;            // > 30% NotFound: rates not extrapolated
  std::size_t not_found = 0;
};

// Least k in [1, horizon] with f^k x in B(target, r).
inline std::uint64_t waiting_time(const SystemHandle& sys, const Point& x, const Point& target,
                                  double r, std::uint64_t horizon) {
  if (!(r > 0)) throw Error("radius must be positive");
  if (horizon < 1) throw Error("horizon must be >= 1");
  Point p = x;
  for (std::uint64_t k = 1; k <= horizon; ++k) {
    p = sys.apply(p);
    if (sys.metric(p, target) < r) return k;
  }
  return kNotFound;
}

inline std::uint64_t return_time(const SystemHandle& sys, const Point& x, double r,
                                 std::uint64_t horizon) {
  return waiting_time(sys, x, x, r, horizon);
}

namespace detail {

// One orbit pass filling first-hit times for every rung (radii decreasing,
// so times are non-decreasing by construction).
inline std::vector<std::uint64_t> first_hit_times(const SystemHandle& sys, const Point& x,
                                                  const Point& target,
                                                  const std::vector<double>& radii,
                                                  std::uint64_t horizon) {
  std::vector<std::uint64_t> times(radii.size(), kNotFound);
  std::size_t next_unfound = 0;  // rungs [0, next_unfound) are found
  Point p = x;
  for (std::uint64_t k = 1; k <= horizon && next_unfound < radii.size(); ++k) {
    p = sys.apply(p);
    const double d = sys.metric(p, target);
    while (next_unfound < radii.size() && d < radii[next_unfound])
      times[next_unfound++] = k;
  }
  return times;
}

// Rates from the defining ratios log tau_r / (-log r) over the
// smallest-radii fit window: lower rate = min, upper rate = max. A time
// profile that is constant across the window certifies a stabilized tau
// (periodic orbits below their separation), where the defining ratio tends
// to 0 as r -> 0, so both rates are exactly 0. Pairwise log-log slopes are
// recorded as diagnostics only: their noise at desk scales is several times
// the ratio noise.
inline void fit_rates(RecurrenceProfile& prof, double fit_fraction) {
  std::vector<std::pair<double, std::uint64_t>> pts;  // (-log r, tau)
  for (std::size_t i = 0; i < prof.radii.size(); ++i)
    if (prof.times[i] != kNotFound)
      pts.emplace_back(-std::log(prof.radii[i]), prof.times[i]);
  if (pts.size() < 3) throw InsufficientDataError("recurrence fit needs >= 3 finite times");
  const auto keep = std::max<std::size_t>(3, static_cast<std::size_t>(
                                                 fit_fraction * static_cast<double>(pts.size())));
  const std::size_t start = pts.size() - keep;

  std::vector<double> slopes;
  for (std::size_t i = start; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dy = std::log(static_cast<double>(pts[j].second)) -
                        std::log(static_cast<double>(pts[i].second));
      slopes.push_back(dy == 0.0 ? 0.0 : dy / (pts[j].first - pts[i].first));
    }
  prof.slope_min = *std::min_element(slopes.begin(), slopes.end());
  prof.slope_max = *std::max_element(slopes.begin(), slopes.end());

  bool constant = true;
  for (std::size_t i = start + 1; i < pts.size(); ++i)
    constant = constant && (pts[i].second == pts[start].second);
  if (constant) {
    prof.lower_rate = 0.0;
    prof.upper_rate = 0.0;
    return;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = start; i < pts.size(); ++i) {
    const double ratio = std::log(static_cast<double>(pts[i].second)) / pts[i].first;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  prof.lower_rate = lo;
  prof.upper_rate = hi;
}

inline RecurrenceProfile profile_from_times(const std::vector<double>& radii,
                                            std::vector<std::uint64_t> times,
                                            const RecurrenceConfig& cfg) {
  RecurrenceProfile prof;
  prof.radii = radii;
  prof.times = std::move(times);
  prof.horizon = cfg.horizon;
  for (auto t : prof.times) prof.not_found += (t == kNotFound);
  prof.unreliable = 10 * prof.not_found > 3 * prof.times.size();
  if (prof.unreliable) {
    prof.lower_rate = prof.upper_rate = std::numeric_limits<double>::quiet_NaN();
    return prof;
  }
  fit_rates(prof, cfg.fit_fraction);
  return prof;
}

}  // namespace detail

inline RecurrenceProfile recurrence_rates(const SystemHandle& sys, const Point& x,
                                          const RecurrenceConfig& cfg = {}) {
  const auto radii = cfg.ladder.radii();
  return detail::profile_from_times(
      radii, detail::first_hit_times(sys, x, x, radii, cfg.horizon), cfg);
}

inline RecurrenceProfile waiting_rates(const SystemHandle& sys, const Point& x, const Point& y,
                                       const RecurrenceConfig& cfg = {}) {
  const auto radii = cfg.ladder.radii();
  return detail::profile_from_times(
      radii, detail::first_hit_times(sys, x, y, radii, cfg.horizon), cfg);
}

// --------------------------------------------------------------------------
// Expanding-map upper bound checks

struct ExpandingBoundReport {
  double bound = 0.0;             // h / log(lambda)
  double h_reference = 0.0;
  double return_slack = 0.0;
  double waiting_slack = 0.0;
  std::size_t return_samples = 0;
  std::size_t return_ok = 0;      // upper rate <= bound + slack
  std::size_t waiting_pairs = 0;
  std::size_t waiting_ok = 0;
  double dimension_surrogate = 0.0;
  bool dimension_ok = false;
  double return_fraction() const {
    return return_samples ? double(return_ok) / double(return_samples) : 1.0;
  }
  double waiting_fraction() const {
    return waiting_pairs ? double(waiting_ok) / double(waiting_pairs) : 1.0;
  }
};

struct ExpandingBoundOptions {
  RecurrenceConfig recurrence;
  PackingDimensionOptions dimension;
  double return_slack = 0.1;
  double waiting_slack = 0.15;
  double dimension_slack = 0.15;
};

// Checks the three h/log(lambda) upper bounds on a sample: upper recurrence
// rates, upper waiting rates on consecutive sample pairs, and the packing
// dimension surrogate. h comes from the analytic oracle when available,
// otherwise from the supplied reference value.
inline ExpandingBoundReport varandas_check(const SystemHandle& sys, const MeasureView& mu,
                                           const std::vector<Point>& sample,
                                           double h_reference,
                                           const ExpandingBoundOptions& opt = {}) {
  if (!sys.expanding) throw NoExpandingConstantError(sys.name + " has no expanding constant");
  ExpandingBoundReport rep;
  rep.h_reference = mu.is_atomic() ? h_reference : oracle_entropy(mu.analytic());
  rep.bound = rep.h_reference / std::log(sys.expanding->lambda);
  rep.return_slack = opt.return_slack;
  rep.waiting_slack = opt.waiting_slack;

  std::vector<double> rates(sample.size());
  parallel_for(sample.size(), [&](std::size_t i) {
    rates[i] = recurrence_rates(sys, sample[i], opt.recurrence).upper_rate;
  });
  rep.return_samples = sample.size();
  for (double r : rates) rep.return_ok += (r <= rep.bound + opt.return_slack);

  const std::size_t pairs = sample.size() / 2;
  std::vector<double> wrates(pairs);
  parallel_for(pairs, [&](std::size_t i) {
    wrates[i] =
        waiting_rates(sys, sample[2 * i], sample[2 * i + 1], opt.recurrence).upper_rate;
  });
  rep.waiting_pairs = pairs;
  for (double r : wrates) rep.waiting_ok += (r <= rep.bound + opt.waiting_slack);

  rep.dimension_surrogate = packing_dimension_estimate(sys, mu, sample, opt.dimension).surrogate;
  rep.dimension_ok = rep.dimension_surrogate <= rep.bound + opt.dimension_slack;
  return rep;
}

}  // namespace ergokit
