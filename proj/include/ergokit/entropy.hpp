#pragma once

// Local-entropy functionals, correlation entropies, generating-set sums and
// topological entropy estimates.
//
// The double limits (eps -> 0, n -> infinity) become a declared finite
// protocol: per epsilon, decay rates are extracted as the difference
// quotient of log-masses between the tail anchor s and n_max (constants in
// log mu(B_n) cancel, and stabilized mass sequences yield exactly zero);
// the epsilon limit is realized by requiring the last two epsilon values to
// agree within a relative tolerance, otherwise the estimate is flagged
// NotConverged.

#include <cmath>
#include <string>
#include <vector>

#include "ergokit/bowen.hpp"

namespace ergokit {

// --------------------------------------------------------------------------
// Grids and reports

struct ScaleGrid {
  std::vector<double> epsilons = {0.5, 0.25};  // strictly decreasing
  std::int64_t n_min = 1;
  std::int64_t n_max = 14;
  std::int64_t s = 4;  // tail start
  std::vector<double> q_values = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  double converge_rtol = 0.05;

  void validate() const {
    if (epsilons.empty()) throw ConfigError("grid needs at least one epsilon");
    for (std::size_t i = 1; i < epsilons.size(); ++i)
      if (epsilons[i] >= epsilons[i - 1]) throw ConfigError("epsilons must be strictly decreasing");
    if (n_min < 1) throw ConfigError("n_min must be >= 1");
    if (s < 1 || s >= n_max) throw ConfigError("tail start s must satisfy 1 <= s < n_max");
  }
};

struct ScaleRow {
  double epsilon;
  double n;
  double raw;
};

struct EstimateReport {
  double value = 0.0;
  bool converged = false;
  std::string method;
  std::vector<ScaleRow> per_scale;
};

inline bool values_agree(double a, double b, double rtol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= std::max(rtol * std::max(std::abs(a), std::abs(b)), 1e-9);
}

// --------------------------------------------------------------------------
// Measure view: estimators accept atomic or analytic measures uniformly

class MeasureView {
 public:
  MeasureView(const AtomicMeasure& m) : atomic_(&m) {}
  MeasureView(const AnalyticMeasure& m) : analytic_(&m) {}

  bool is_atomic() const { return atomic_ != nullptr; }
  const AtomicMeasure& atomic() const { return *atomic_; }
  const AnalyticMeasure& analytic() const { return *analytic_; }

 private:
  const AtomicMeasure* atomic_ = nullptr;
  const AnalyticMeasure* analytic_ = nullptr;
};

inline MassBracket mass_bracket(const SystemHandle& sys, const BallQuery& q,
                                const MeasureView& mu, const CylinderSearchOptions& opt = {}) {
  if (mu.is_atomic()) {
    const double m = ball_mass(sys, q, mu.atomic());
    return {m, m};
  }
  return ball_mass_bracket(sys, q, mu.analytic(), opt);
}

inline double mass_value(const SystemHandle& sys, const BallQuery& q, const MeasureView& mu,
                         const CylinderSearchOptions& opt = {}) {
  if (mu.is_atomic()) return ball_mass(sys, q, mu.atomic());
  return ball_mass(sys, q, mu.analytic(), opt);
}

inline double mollified_value(const SystemHandle& sys, const BallQuery& q, const MeasureView& mu,
                              const CylinderSearchOptions& opt = {}) {
  if (mu.is_atomic()) return mollified_mass(sys, q, mu.atomic());
  return mollified_mass(sys, q, mu.analytic(), opt);
}

// --------------------------------------------------------------------------
// beta / gamma functionals (as defined, raw infima of log-mass ratios)

// beta(x, s) = inf_{s < n <= n_max} log mu(B_n(x,eps)) / (-n);
// +infinity when a tail mass vanishes (x outside the support).
inline double beta_lower(const SystemHandle& sys, const MeasureView& mu, const Point& x,
                         double epsilon, std::int64_t s, std::int64_t n_max) {
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t n = s + 1; n <= n_max; ++n) {
    const double m = mass_value(sys, open_ball(x, n, epsilon), mu);
    if (m <= 0.0) return std::numeric_limits<double>::infinity();
    best = std::min(best, std::log(m) / static_cast<double>(-n));
  }
  return best;
}

// gamma(x, s) = inf_{s <= n <= n_max} log g_{x,eps,n}(mu) / (-n).
inline double gamma_lower(const SystemHandle& sys, const MeasureView& mu, const Point& x,
                          double epsilon, std::int64_t s, std::int64_t n_max) {
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t n = s; n <= n_max; ++n) {
    CylinderSearchOptions opt;
    if (!mu.is_atomic()) {
      // aim for ~1% relative accuracy of g, which floors at the ball mass
      const double floor_mass =
          mass_bracket(sys, open_ball(x, std::max<std::int64_t>(n, 1), epsilon), mu).lower;
      opt.bracket_tol = std::max(1e-2 * floor_mass, 1e-13);
    }
    const double g = mollified_value(sys, open_ball(x, std::max<std::int64_t>(n, 1), epsilon),
                                     mu, opt);
    if (g <= 0.0) return std::numeric_limits<double>::infinity();
    best = std::min(best, std::log(g) / static_cast<double>(-n));
  }
  return best;
}

// --------------------------------------------------------------------------
// Local entropy and its essential infimum

// Per epsilon: (log m_s - log m_{n_max}) / (n_max - s). Constant mass
// sequences (periodic measures past their separation scale) give exactly 0.
inline EstimateReport local_entropy(const SystemHandle& sys, const MeasureView& mu,
                                    const Point& x, const ScaleGrid& grid) {
  grid.validate();
  EstimateReport rep;
  rep.method = "tail-log-mass-difference";
  std::vector<double> per_eps;
  for (const double eps : grid.epsilons) {
    double log_anchor = 0.0, log_end = 0.0;
    bool dead = false;
    for (std::int64_t n = grid.s; n <= grid.n_max; ++n) {
      const double m = mass_value(sys, open_ball(x, n, eps), mu);
      rep.per_scale.push_back({eps, static_cast<double>(n),
                               m > 0 ? std::log(m) / static_cast<double>(-n)
                                     : std::numeric_limits<double>::infinity()});
      if (m <= 0.0) {
        dead = true;
        break;
      }
      if (n == grid.s) log_anchor = std::log(m);
      if (n == grid.n_max) log_end = std::log(m);
    }
    const double value = dead ? std::numeric_limits<double>::infinity()
                              : (log_anchor - log_end) / static_cast<double>(grid.n_max - grid.s);
    per_eps.push_back(value);
    rep.per_scale.push_back({eps, -1.0, value});
  }
  rep.value = per_eps.back();
  rep.converged = per_eps.size() < 2 ||
                  values_agree(per_eps[per_eps.size() - 1], per_eps[per_eps.size() - 2],
                               grid.converge_rtol);
  return rep;
}

struct EssentialOptions {
  // Trimmed mean over the sample stands in for the essential infimum: the
  // trim discards null-set spikes on both sides, all-zero samples stay
  // exactly zero, and unlike a plain quantile the statistic is unbiased on
  // the skewed per-point distributions non-uniform measures produce at
  // small n. trim = 0.5 degenerates to the median.
  double trim = 0.10;
};

inline EstimateReport essential_local_entropy(const SystemHandle& sys, const MeasureView& mu,
                                              const std::vector<Point>& sample,
                                              const ScaleGrid& grid,
                                              const EssentialOptions& opt = {}) {
  grid.validate();
  if (sample.empty()) throw InsufficientDataError("essential_local_entropy: empty sample");
  std::vector<double> values(sample.size());
  std::vector<char> conv(sample.size());
  parallel_for(sample.size(), [&](std::size_t i) {
    const auto r = local_entropy(sys, mu, sample[i], grid);
    values[i] = r.value;
    conv[i] = r.converged ? 1 : 0;
  });
  EstimateReport rep;
  rep.method = "essential-trimmed-mean";
  for (std::size_t i = 0; i < values.size(); ++i)
    rep.per_scale.push_back({0.0, static_cast<double>(i), values[i]});
  rep.value = trimmed_mean(values, opt.trim);
  std::size_t ok = 0;
  for (char c : conv) ok += c;
  rep.converged = ok * 10 >= conv.size() * 9;
  return rep;
}

// --------------------------------------------------------------------------
// Correlation integrals and the q-spectrum

namespace detail {

// Periodic representative of the cylinder [w] that stays inside the support
// of mu (the periodic wrap may need a bridge of admissible transitions).
inline SymbolicPoint admissible_periodic_rep(const AnalyticMeasure& mu,
                                             const std::vector<std::uint8_t>& w) {
  if (mu.kind == AnalyticMeasure::Kind::Bernoulli) return make_periodic_point(w);
  const int k = mu.alphabet();
  const auto last = w.back(), first = w.front();
  if (mu.P[last][first] > 0) return make_periodic_point(w);
  // BFS for a shortest positive-probability path last -> first
  std::vector<int> prev(static_cast<std::size_t>(k), -1);
  std::vector<std::uint8_t> frontier = {last};
  prev[last] = last;
  while (!frontier.empty()) {
    std::vector<std::uint8_t> next;
    for (auto a : frontier)
      for (int b = 0; b < k; ++b)
        if (mu.P[a][static_cast<std::size_t>(b)] > 0 && prev[static_cast<std::size_t>(b)] < 0) {
          prev[static_cast<std::size_t>(b)] = a;
          if (b == first) {
            std::vector<std::uint8_t> bridge;
            for (std::uint8_t c = first; c != last; c = static_cast<std::uint8_t>(prev[c]))
              bridge.push_back(c);
            std::reverse(bridge.begin(), bridge.end());
            bridge.pop_back();  // drop `first`: the wrap supplies it
            auto ext = w;
            ext.insert(ext.end(), bridge.begin(), bridge.end());
            return make_periodic_point(ext);
          }
          next.push_back(static_cast<std::uint8_t>(b));
        }
    frontier = std::move(next);
  }
  throw Error("measure support admits no periodic representative for this cylinder");
}

}  // namespace detail

// Integral over supp(mu) of mu(B_n(x,eps))^{q-1} (q != 1), or of
// log mu(B_n(x,eps)) (q == 1). Exact finite sum for atomic measures; for
// analytic measures, an exact sum over cylinders of depth n + extra with
// admissible periodic representatives as centers.
inline double correlation_integral(const SystemHandle& sys, const MeasureView& mu, double q,
                                   double epsilon, std::int64_t n,
                                   const CylinderSearchOptions& opt = {}) {
  const bool log_form = q == 1.0;
  if (mu.is_atomic()) {
    const auto& m = mu.atomic();
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double b = ball_mass(sys, open_ball(m.atoms[i], n, epsilon), m);
      acc += m.weights[i] * (log_form ? std::log(b) : std::pow(b, q - 1.0));
    }
    return acc;
  }
  const auto& an = mu.analytic();
  const int extra = std::max<int>(3, static_cast<int>(std::ceil(std::log2(4.0 / epsilon))));
  const auto depth = static_cast<std::size_t>(n + extra);
  const int k = sys.alphabet;
  std::size_t count = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    count *= static_cast<std::size_t>(k);
    if (count > (1u << 24)) throw DepthCapExceededError("correlation integral cylinder count");
  }
  if (detail::is_uniform_bernoulli(an)) {
    // mass is center-independent: one inner evaluation suffices
    std::vector<std::uint8_t> w(depth, 0);
    const double b = ball_mass_bracket(sys, open_ball(Point(make_periodic_point(w)), n, epsilon),
                                       an, opt).lower;
    return log_form ? std::log(b) : std::pow(b, q - 1.0);
  }
  std::vector<double> partial(worker_count(), 0.0);
  const std::size_t chunks = partial.size();
  parallel_for(chunks, [&](std::size_t c) {
    double acc = 0.0;
    std::vector<std::uint8_t> w(depth);
    for (std::size_t idx = c; idx < count; idx += chunks) {
      std::size_t t = idx;
      for (std::size_t i = 0; i < depth; ++i) {
        w[i] = static_cast<std::uint8_t>(t % static_cast<std::size_t>(k));
        t /= static_cast<std::size_t>(k);
      }
      const double outer = an.cylinder_mass(w);
      if (outer <= 0.0) continue;
      const Point rep(detail::admissible_periodic_rep(an, w));
      const double b = ball_mass_bracket(sys, open_ball(rep, n, epsilon), an, opt).lower;
      acc += outer * (log_form ? std::log(b) : std::pow(b, q - 1.0));
    }
    partial[c] = acc;
  });
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc;
}

// The fixed-scale correlation functional
//   F(q,eps,n) = -log I / ((q-1) n)   (q != 1)
//   F(1,eps,n) = -(1/n) integral log mu(B_n) dmu,
// non-increasing in q at fixed (eps, n).
inline double correlation_functional(const SystemHandle& sys, const MeasureView& mu, double q,
                                     double epsilon, std::int64_t n) {
  const double I = correlation_integral(sys, mu, q, epsilon, n);
  if (q == 1.0) return -I / static_cast<double>(n);
  return -std::log(I) / ((q - 1.0) * static_cast<double>(n));
}

struct SpectrumRow {
  double q;
  double H_lower;
  double H_upper;
  bool converged;
};

// Lower/upper correlation entropies: anchored difference quotients of
// log I(q,eps,n) over the tail, min for liminf and max for limsup, then the
// epsilon-agreement rule.
inline std::vector<SpectrumRow> correlation_entropy_spectrum(const SystemHandle& sys,
                                                             const MeasureView& mu,
                                                             const ScaleGrid& grid) {
  grid.validate();
  // shared mass table: per (eps, n) the correlation integrals for all q
  struct Cell {
    std::vector<double> I;  // per q
    double L = 0;           // q = 1 integrand
  };
  const auto n_count = static_cast<std::size_t>(grid.n_max - grid.s + 1);
  std::vector<std::vector<Cell>> table(grid.epsilons.size(), std::vector<Cell>(n_count));
  for (std::size_t e = 0; e < grid.epsilons.size(); ++e) {
    std::vector<Cell>& row = table[e];
    parallel_for(n_count, [&](std::size_t i) {
      const std::int64_t n = grid.s + static_cast<std::int64_t>(i);
      Cell cell;
      for (const double q : grid.q_values)
        if (q != 1.0)
          cell.I.push_back(correlation_integral(sys, mu, q, grid.epsilons[e], n));
        else
          cell.I.push_back(0.0);
      cell.L = correlation_integral(sys, mu, 1.0, grid.epsilons[e], n);
      row[i] = std::move(cell);
    });
  }
  std::vector<SpectrumRow> out;
  for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi) {
    const double q = grid.q_values[qi];
    std::vector<double> lowers, uppers;
    for (std::size_t e = 0; e < grid.epsilons.size(); ++e) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      const auto& row = table[e];
      for (std::size_t i = 1; i < n_count; ++i) {
        const double dn = static_cast<double>(i);
        double dq;
        if (q == 1.0)
          dq = -(row[i].L - row[0].L) / dn;
        else
          dq = -(std::log(row[i].I[qi]) - std::log(row[0].I[qi])) / ((q - 1.0) * dn);
        lo = std::min(lo, dq);
        hi = std::max(hi, dq);
      }
      lowers.push_back(lo);
      uppers.push_back(hi);
    }
    SpectrumRow r{q, lowers.back(), uppers.back(), true};
    if (lowers.size() >= 2)
      r.converged = values_agree(lowers[lowers.size() - 1], lowers[lowers.size() - 2],
                                 grid.converge_rtol) &&
                    values_agree(uppers[uppers.size() - 1], uppers[uppers.size() - 2],
                                 grid.converge_rtol);
    out.push_back(r);
  }
  return out;
}

// --------------------------------------------------------------------------
// Generating-set sums (greedy covers)

struct GeneratingSetSums {
  double S = 0.0;  // sum of ball masses^s over the cover
  double W = 0.0;  // sum of mollified masses^s over the same cover
  std::vector<std::size_t> cover;  // atom indices
};

// Greedy (n,r)-cover of the atom set seeded at the highest-mass uncovered
// atom, 8 random restarts, keeping the smallest S. Atoms carry the measure;
// the rest of the space is coverable by zero-mass balls which contribute
// nothing, so the sums are over the returned centers only. The values are
// upper bounds for the true infima.
inline GeneratingSetSums generating_set_sums(const SystemHandle& sys, const AtomicMeasure& mu,
                                             double s, double r, std::int64_t n,
                                             std::uint64_t seed = 0, int restarts = 8) {
  if (!(s > 0.0 && s < 1.0)) throw Error("generating sums need s in (0,1)");
  const std::size_t A = mu.size();
  // pairwise Bowen distances and per-atom ball masses
  std::vector<std::vector<double>> d(A, std::vector<double>(A, 0.0));
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = i + 1; j < A; ++j) d[i][j] = d[j][i] = dn(sys, mu.atoms[i], mu.atoms[j], n);
  std::vector<double> mass(A, 0.0), gmass(A, 0.0);
  for (std::size_t i = 0; i < A; ++i) {
    for (std::size_t j = 0; j < A; ++j) {
      if (d[i][j] < r) mass[i] += mu.weights[j];
      gmass[i] += mu.weights[j] * mollifier_value(d[i][j], r);
    }
  }
  GeneratingSetSums best;
  best.S = std::numeric_limits<double>::infinity();
  Rng rng = substream(seed, "generating-cover");
  for (int attempt = 0; attempt <= restarts; ++attempt) {
    std::vector<bool> covered(A, false);
    std::vector<std::size_t> cover;
    double S = 0.0, W = 0.0;
    for (;;) {
      // highest-mass uncovered atom; restarts jitter ties
      std::size_t pick = A;
      double best_mass = -1.0;
      for (std::size_t i = 0; i < A; ++i) {
        if (covered[i]) continue;
        double m = mass[i];
        if (attempt > 0) m *= 0.9 + 0.2 * rng.uniform();
        if (m > best_mass) {
          best_mass = m;
          pick = i;
        }
      }
      if (pick == A) break;
      cover.push_back(pick);
      S += std::pow(mass[pick], s);
      W += std::pow(gmass[pick], s);
      for (std::size_t j = 0; j < A; ++j)
        if (d[pick][j] < r) covered[j] = true;
    }
    if (S < best.S) {
      best.S = S;
      best.W = W;
      best.cover = std::move(cover);
    }
  }
  return best;
}

// liminf_n log W(s,r,n) / ((1-s) n) via the anchored difference quotient.
inline double fractal_rate_lower(const std::vector<std::pair<std::int64_t, double>>& log_values,
                                 double s) {
  if (log_values.size() < 2) throw InsufficientDataError("fractal rate needs >= 2 scales");
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < log_values.size(); ++i) {
    const double dq = (log_values[i].second - log_values[0].second) /
                      ((1.0 - s) * static_cast<double>(log_values[i].first - log_values[0].first));
    lo = std::min(lo, dq);
  }
  return lo;
}

// --------------------------------------------------------------------------
// Topological entropy via spanning-net counts

struct TopologicalEntropyOptions {
  std::int64_t n_max = 9;
  std::int64_t n_min = 2;
  std::vector<double> epsilons = {0.2, 0.1};
  std::size_t budget = 200'000'000;  // pairwise distance evaluations
};

namespace detail {

// Minimal covering count by d_n-balls for circle systems whose Bowen balls
// are arcs of position-independent width (doubling: eps * 2^-(n-1) below
// the wrap scale; rotation: eps).
inline std::uint64_t circle_net_count(const SystemHandle& sys, std::int64_t n, double eps) {
  double arc;
  if (sys.kind == SystemKind::Rotation) {
    arc = eps;
  } else if (sys.kind == SystemKind::Doubling) {
    arc = eps * std::ldexp(1.0, static_cast<int>(-(n - 1)));
  } else {
    throw Error("no arc formula for this system");
  }
  arc = std::min(arc, 0.5);
  return static_cast<std::uint64_t>(std::ceil(1.0 / (2.0 * arc)));
}

// Greedy net over periodic-word candidates for shifts. For eps <= 1/2 a
// center can only cover candidates sharing its first n symbols (any earlier
// difference already costs 1/2), so candidates are bucketed by prefix.
inline std::uint64_t shift_net_count(const SystemHandle& sys, std::int64_t n, double eps,
                                     std::size_t budget) {
  const int k = sys.alphabet;
  const int extra = std::max<int>(2, static_cast<int>(std::ceil(std::log2(2.0 / eps))));
  const auto depth = static_cast<std::size_t>(n + extra);
  std::size_t count = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    count *= static_cast<std::size_t>(k);
    if (count > (1u << 22)) throw CoverSearchBudgetExceededError("shift net candidate count");
  }
  const bool bucketed = eps <= 0.5;
  std::unordered_map<std::string, std::vector<SymbolicPoint>> buckets;
  std::vector<SymbolicPoint> flat;
  std::uint64_t total = 0;
  std::vector<std::uint8_t> w(depth);
  std::size_t work = 0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t t = idx;
    for (std::size_t i = 0; i < depth; ++i) {
      w[i] = static_cast<std::uint8_t>(t % static_cast<std::size_t>(k));
      t /= static_cast<std::size_t>(k);
    }
    Point cand(make_periodic_point(w));
    auto* centers = &flat;
    if (bucketed) {
      std::string key(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n));
      centers = &buckets[key];
    }
    bool covered = false;
    for (const auto& c : *centers) {
      if (++work > budget) throw CoverSearchBudgetExceededError("shift net budget");
      if (dn(sys, Point(c), cand, n) < eps) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      centers->push_back(cand.symbolic());
      ++total;
    }
  }
  return total;
}

// Generic greedy net over a fixed-resolution circle grid (tent map).
inline std::uint64_t grid_net_count(const SystemHandle& sys, std::int64_t n, double eps,
                                    std::size_t budget) {
  const auto grid = static_cast<std::uint64_t>(
      std::min(1.0 / eps * std::ldexp(8.0, static_cast<int>(n)), 2.0e6));
  std::vector<CirclePoint> centers;
  std::size_t work = 0;
  for (std::uint64_t g = 0; g < grid; ++g) {
    const CirclePoint cand = CirclePoint::fixed(static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(g) << 64) / grid));
    bool covered = false;
    for (const auto& c : centers) {
      if (++work > budget) throw CoverSearchBudgetExceededError("grid net budget");
      if (dn(sys, Point(c), Point(cand), n) < eps) {
        covered = true;
        break;
      }
    }
    if (!covered) centers.push_back(cand);
  }
  return centers.size();
}

}  // namespace detail

// Spanning-set growth rate: least-squares slope of log N(n, eps) against n,
// with the epsilon-agreement convergence flag.
inline EstimateReport topological_entropy_estimate(const SystemHandle& sys,
                                                   const TopologicalEntropyOptions& opt = {}) {
  EstimateReport rep;
  rep.method = "spanning-net-growth";
  std::vector<double> per_eps;
  for (const double eps : opt.epsilons) {
    std::vector<double> xs, ys;
    for (std::int64_t n = opt.n_min; n <= opt.n_max; ++n) {
      std::uint64_t N;
      if (sys.is_shift())
        N = detail::shift_net_count(sys, n, eps, opt.budget);
      else if (sys.kind == SystemKind::Tent)
        N = detail::grid_net_count(sys, n, eps, opt.budget);
      else
        N = detail::circle_net_count(sys, n, eps);
      rep.per_scale.push_back({eps, static_cast<double>(n), static_cast<double>(N)});
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(static_cast<double>(N)));
    }
    // least squares slope
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
    per_eps.push_back(num / den);
  }
  rep.value = per_eps.back();
  rep.converged =
      per_eps.size() < 2 ||
      values_agree(per_eps[per_eps.size() - 1], per_eps[per_eps.size() - 2], 0.1);
  return rep;
}

}  // namespace ergokit
