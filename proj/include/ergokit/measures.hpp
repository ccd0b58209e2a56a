#pragma once

// Probability measures: atomic measures with exact 1-Wasserstein transport,
// analytic (Bernoulli/Markov) shift measures with exact cylinder masses,
// periodic and empirical measures, and word periodization.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "ergokit/systems.hpp"

namespace ergokit {

inline constexpr double kAtomMergeTol = 1e-12;
inline constexpr double kWeightSumTol = 1e-12;
inline constexpr std::size_t kAtomCountCap = 4096;

// --------------------------------------------------------------------------
// AtomicMeasure

struct AtomicMeasure {
  std::vector<Point> atoms;
  std::vector<double> weights;

  std::size_t size() const { return atoms.size(); }
  double total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

// Merges duplicate atoms (metric below kAtomMergeTol, or exact symbolic
// equality) accumulating weights; keeps first-seen atom order.
inline AtomicMeasure make_atomic(const SystemHandle& sys, std::vector<Point> atoms,
                                 std::vector<double> weights, bool check_total = true) {
  if (atoms.size() != weights.size()) throw Error("atoms/weights size mismatch");
  if (atoms.empty()) throw Error("measure needs at least one atom");
  AtomicMeasure mu;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(weights[i] > 0)) throw Error("weights must be positive");
    bool merged = false;
    for (std::size_t j = 0; j < mu.atoms.size(); ++j) {
      const bool same = point_equal(atoms[i], mu.atoms[j]) ||
                        sys.metric(atoms[i], mu.atoms[j]) < kAtomMergeTol;
      if (same) {
        mu.weights[j] += weights[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      mu.atoms.push_back(std::move(atoms[i]));
      mu.weights.push_back(weights[i]);
    }
  }
  if (mu.size() > kAtomCountCap)
    throw SizeCapExceededError("atom count " + std::to_string(mu.size()) + " exceeds cap");
  if (check_total && std::abs(mu.total_mass() - 1.0) > kWeightSumTol)
    throw Error("weights must sum to 1");
  return mu;
}

inline AtomicMeasure push_forward(const SystemHandle& sys, const AtomicMeasure& mu) {
  std::vector<Point> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms) atoms.push_back(sys.apply(a));
  return make_atomic(sys, std::move(atoms), mu.weights, false);
}

// --------------------------------------------------------------------------
// Periodic / empirical measures, periodization

inline AtomicMeasure periodic_measure(const SystemHandle& sys, const Point& x,
                                      std::int64_t period) {
  if (period < 1) throw Error("period must be >= 1");
  if (sys.is_shift()) {
    const auto& s = x.symbolic();
    if (s.periodic) {
      if (period % s.period() != 0)
        throw NotPeriodicError("word period " + std::to_string(s.period()) +
                               " does not divide " + std::to_string(period));
    } else {
      // A window point is accepted when its visible span is period-periodic;
      // it is then rebuilt as a periodic point from one period of symbols.
      const std::int64_t lo = s.window_lo - s.time;
      const auto len = static_cast<std::int64_t>(s.word->size());
      if (len < 2 * period) throw NotPeriodicError("window too short to certify periodicity");
      for (std::int64_t i = 0; i + period < len; ++i)
        if ((*s.word)[static_cast<std::size_t>(i)] !=
            (*s.word)[static_cast<std::size_t>(i + period)])
          throw NotPeriodicError("window is not periodic with the requested period");
      std::vector<std::uint8_t> w(s.word->begin(), s.word->begin() + period);
      // rotate so that coordinate 0 of the point is preserved
      std::int64_t shift = ((0 - lo) % period + period) % period;
      std::rotate(w.begin(), w.begin() + shift, w.end());
      return periodic_measure(sys, Point(make_periodic_point(std::move(w))), period);
    }
  } else {
    const Point back = iterate(sys, x, period);
    if (sys.metric(back, x) > 1e-9) throw NotPeriodicError("orbit does not close within 1e-9");
  }
  std::vector<Point> atoms;
  std::vector<double> w(static_cast<std::size_t>(period), 1.0 / static_cast<double>(period));
  Point p = x;
  for (std::int64_t i = 0; i < period; ++i) {
    atoms.push_back(p);
    p = sys.apply(p);
  }
  return make_atomic(sys, std::move(atoms), std::move(w));
}

inline AtomicMeasure empirical_measure(const SystemHandle& sys, const Point& x,
                                       std::int64_t length) {
  if (length < 1) throw Error("length must be >= 1");
  std::vector<Point> atoms;
  std::vector<double> w(static_cast<std::size_t>(length), 1.0 / static_cast<double>(length));
  Point p = x;
  for (std::int64_t i = 0; i < length; ++i) {
    atoms.push_back(p);
    p = sys.apply(p);
  }
  return make_atomic(sys, std::move(atoms), std::move(w));
}

inline AtomicMeasure periodize(const SystemHandle& sys, const std::vector<std::uint8_t>& word) {
  if (!sys.is_shift()) throw NotAShiftError(sys.name + " is not a full shift");
  if (word.empty()) throw Error("word must be non-empty");
  for (auto c : word)
    if (c >= sys.alphabet) throw Error("word symbol outside alphabet");
  const auto p = make_periodic_point(word);
  const std::int64_t k = p.period();
  return periodic_measure(sys, Point(p), k);
}

// --------------------------------------------------------------------------
// Analytic measures on shifts

struct AnalyticMeasure {
  enum class Kind { Bernoulli, Markov };
  Kind kind = Kind::Bernoulli;
  std::vector<double> p;                // Bernoulli weights
  std::vector<std::vector<double>> P;   // Markov rows
  std::vector<double> pi;               // Markov stationary vector

  int alphabet() const {
    return static_cast<int>(kind == Kind::Bernoulli ? p.size() : pi.size());
  }

  // Exact mass of the cylinder fixing `word` at consecutive coordinates
  // (stationarity makes the anchor position irrelevant).
  double cylinder_mass(std::span<const std::uint8_t> word) const {
    if (word.empty()) return 1.0;
    if (kind == Kind::Bernoulli) {
      double m = 1.0;
      for (auto c : word) m *= p[c];
      return m;
    }
    double m = pi[word[0]];
    for (std::size_t i = 1; i < word.size(); ++i) m *= P[word[i - 1]][word[i]];
    return m;
  }
};

inline AnalyticMeasure make_bernoulli(std::vector<double> p) {
  if (p.size() < 2) throw Error("bernoulli needs >= 2 symbols");
  double s = 0;
  for (double v : p) {
    if (v < 0) throw Error("bernoulli weights must be >= 0");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw Error("bernoulli weights must sum to 1");
  AnalyticMeasure mu;
  mu.kind = AnalyticMeasure::Kind::Bernoulli;
  mu.p = std::move(p);
  return mu;
}

inline AnalyticMeasure make_markov(std::vector<std::vector<double>> P, std::vector<double> pi) {
  const std::size_t k = P.size();
  if (k < 2 || pi.size() != k) throw Error("markov needs a square matrix and matching pi");
  for (const auto& row : P) {
    if (row.size() != k) throw Error("markov matrix must be square");
    double s = 0;
    for (double v : row) {
      if (v < 0) throw Error("markov entries must be >= 0");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw Error("markov rows must sum to 1");
  }
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < k; ++i) s += pi[i] * P[i][j];
    if (std::abs(s - pi[j]) > 1e-12) throw Error("pi is not stationary for P");
  }
  AnalyticMeasure mu;
  mu.kind = AnalyticMeasure::Kind::Markov;
  mu.P = std::move(P);
  mu.pi = std::move(pi);
  return mu;
}

// Exact closed-form Kolmogorov-Sinai entropy.
inline double oracle_entropy(const AnalyticMeasure& mu) {
  double h = 0;
  if (mu.kind == AnalyticMeasure::Kind::Bernoulli) {
    for (double v : mu.p)
      if (v > 0) h -= v * std::log(v);
    return h;
  }
  for (std::size_t i = 0; i < mu.pi.size(); ++i)
    for (double v : mu.P[i])
      if (v > 0) h -= mu.pi[i] * v * std::log(v);
  return h;
}

inline std::vector<std::uint8_t> sample_word(const AnalyticMeasure& mu, Rng& rng,
                                             std::int64_t length) {
  std::vector<std::uint8_t> w(static_cast<std::size_t>(length));
  auto draw = [&](const std::vector<double>& dist) {
    const double u = rng.uniform();
    double acc = 0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
      acc += dist[i];
      if (u < acc) return static_cast<std::uint8_t>(i);
    }
    return static_cast<std::uint8_t>(dist.size() - 1);
  };
  if (mu.kind == AnalyticMeasure::Kind::Bernoulli) {
    for (auto& c : w) c = draw(mu.p);
  } else {
    w[0] = draw(mu.pi);
    for (std::size_t i = 1; i < w.size(); ++i) w[i] = draw(mu.P[w[i - 1]]);
  }
  return w;
}

// Samples a window point covering every coordinate a query of Bowen depth
// `depth` may touch (metric tail included).
inline Point sample_point(const SystemHandle& sys, const AnalyticMeasure& mu, Rng& rng,
                          std::int64_t depth) {
  if (!sys.is_shift()) throw NotAShiftError("analytic measures live on shifts");
  const std::int64_t span = depth + kMetricDepth + 4;
  if (sys.sided == Sided::One) return Point(make_window_point(sample_word(mu, rng, span), 0));
  return Point(make_window_point(sample_word(mu, rng, 2 * span + 1), -span));
}

// Depth-d cylinder discretization: one periodic representative per cylinder,
// weighted by the exact cylinder mass. One-sided cylinders fix [0, depth);
// two-sided fix [-h, h] with h = depth/2.
struct DiscretizedMeasure {
  AtomicMeasure measure;
  double diameter_bound = 0.0;  // sup over cylinders of their metric diameter
};

inline DiscretizedMeasure discretize(const SystemHandle& sys, const AnalyticMeasure& mu,
                                     int depth) {
  if (!sys.is_shift()) throw NotAShiftError("analytic measures live on shifts");
  if (depth < 1 || depth > 24) throw Error("discretization depth out of range");
  const int k = sys.alphabet;
  std::size_t count = 1;
  for (int i = 0; i < depth; ++i) {
    count *= static_cast<std::size_t>(k);
    if (count > kAtomCountCap) throw SizeCapExceededError("discretization exceeds atom cap");
  }
  std::vector<Point> atoms;
  std::vector<double> weights;
  std::vector<std::uint8_t> w(static_cast<std::size_t>(depth), 0);
  const std::int64_t h = sys.sided == Sided::Two ? depth / 2 : 0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t t = idx;
    for (int i = 0; i < depth; ++i) {
      w[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(t % static_cast<std::size_t>(k));
      t /= static_cast<std::size_t>(k);
    }
    const double m = mu.cylinder_mass(w);
    if (m <= 0) continue;
    // representative: periodic extension of w, anchored so the cylinder
    // window carries the word
    atoms.emplace_back(make_periodic_point(w, h));
    weights.push_back(m);
  }
  DiscretizedMeasure out{make_atomic(sys, std::move(atoms), std::move(weights)), 0.0};
  // two points in a cylinder agree on the fixed window; remaining weight:
  // one-sided tail 2^-depth, two-sided 2 * 2^-(h+1) = 2^-h
  out.diameter_bound =
      sys.sided == Sided::One ? std::ldexp(1.0, -depth) : std::ldexp(1.0, -static_cast<int>(h));
  return out;
}

// --------------------------------------------------------------------------
// Exact 1-Wasserstein distance (successive shortest paths with potentials)

struct TransportArc {
  std::size_t from, to;
  double mass;
};

struct WeakDistanceReport {
  double value = 0.0;
  std::vector<TransportArc> transport_plan;
};

namespace detail {

// Dense min-cost transport between weight vectors a (sources) and b (sinks)
// with cost matrix c. Costs are metric distances (non-negative); potentials
// keep reduced costs non-negative so Dijkstra applies.
inline WeakDistanceReport min_cost_transport(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<std::vector<double>>& c) {
  const std::size_t m = a.size(), n = b.size();
  std::vector<double> ra = a, rb = b;        // residual supplies/demands
  std::vector<double> pot_a(m, 0), pot_b(n, 0);
  std::vector<std::vector<double>> flow(m, std::vector<double>(n, 0.0));
  WeakDistanceReport rep;

  const double inf = std::numeric_limits<double>::infinity();
  for (;;) {
    double remaining = 0;
    for (double v : ra) remaining += v;
    if (remaining <= 1e-15) break;

    // Dijkstra over the bipartite residual graph from all unsaturated sources.
    std::vector<double> dist_a(m, inf), dist_b(n, inf);
    std::vector<int> prev_b(n, -1);          // source feeding each sink
    std::vector<int> prev_a(m, -1);          // sink feeding each source (via residual arc)
    std::vector<bool> done_a(m, false), done_b(n, false);
    for (std::size_t i = 0; i < m; ++i)
      if (ra[i] > 1e-15) dist_a[i] = 0;

    for (;;) {
      // pick closest unfinished node on either side
      double best = inf;
      int side = -1;
      std::size_t idx = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (!done_a[i] && dist_a[i] < best) best = dist_a[i], side = 0, idx = i;
      for (std::size_t j = 0; j < n; ++j)
        if (!done_b[j] && dist_b[j] < best) best = dist_b[j], side = 1, idx = j;
      if (side < 0) break;
      if (side == 0) {
        done_a[idx] = true;
        for (std::size_t j = 0; j < n; ++j) {
          if (done_b[j]) continue;
          const double red = c[idx][j] + pot_a[idx] - pot_b[j];
          const double nd = dist_a[idx] + std::max(red, 0.0);
          if (nd < dist_b[j]) {
            dist_b[j] = nd;
            prev_b[j] = static_cast<int>(idx);
          }
        }
      } else {
        done_b[idx] = true;
        for (std::size_t i = 0; i < m; ++i) {
          if (done_a[i]) continue;
          if (flow[i][idx] <= 0) continue;  // residual arc sink -> source
          const double red = -(c[i][idx] + pot_a[i] - pot_b[idx]);
          const double nd = dist_b[idx] + std::max(red, 0.0);
          if (nd < dist_a[i]) {
            dist_a[i] = nd;
            prev_a[i] = static_cast<int>(idx);
          }
        }
      }
    }

    // closest unsaturated sink
    int target = -1;
    double bestd = inf;
    for (std::size_t j = 0; j < n; ++j)
      if (rb[j] > 1e-15 && dist_b[j] < bestd) bestd = dist_b[j], target = static_cast<int>(j);
    if (target < 0) throw Error("transport: no augmenting path (unbalanced measures?)");

    // trace path, find bottleneck
    double push = rb[static_cast<std::size_t>(target)];
    {
      int j = target;
      for (;;) {
        const int i = prev_b[static_cast<std::size_t>(j)];
        if (prev_a[static_cast<std::size_t>(i)] == -1 || ra[static_cast<std::size_t>(i)] > 1e-15) {
          push = std::min(push, ra[static_cast<std::size_t>(i)]);
          break;
        }
        const int jj = prev_a[static_cast<std::size_t>(i)];
        push = std::min(push, flow[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)]);
        j = jj;
      }
    }
    // apply
    {
      int j = target;
      for (;;) {
        const int i = prev_b[static_cast<std::size_t>(j)];
        flow[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += push;
        if (prev_a[static_cast<std::size_t>(i)] == -1 || ra[static_cast<std::size_t>(i)] > 1e-15) {
          ra[static_cast<std::size_t>(i)] -= push;
          break;
        }
        const int jj = prev_a[static_cast<std::size_t>(i)];
        flow[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)] -= push;
        j = jj;
      }
      rb[static_cast<std::size_t>(target)] -= push;
    }
    // update potentials
    for (std::size_t i = 0; i < m; ++i)
      if (dist_a[i] < inf) pot_a[i] += dist_a[i];
    for (std::size_t j = 0; j < n; ++j)
      if (dist_b[j] < inf) pot_b[j] += dist_b[j];
  }

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (flow[i][j] > 0) {
        rep.transport_plan.push_back({i, j, flow[i][j]});
        rep.value += flow[i][j] * c[i][j];
      }
  return rep;
}

}  // namespace detail

inline WeakDistanceReport wasserstein1(const SystemHandle& sys, const AtomicMeasure& mu,
                                       const AtomicMeasure& nu) {
  if (mu.size() > kAtomCountCap || nu.size() > kAtomCountCap)
    throw SizeCapExceededError("wasserstein1 atom cap exceeded");
  std::vector<std::vector<double>> c(mu.size(), std::vector<double>(nu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) c[i][j] = sys.metric(mu.atoms[i], nu.atoms[j]);
  return detail::min_cost_transport(mu.weights, nu.weights, c);
}

// W1 distance between mu and its push-forward; 0 exactly for invariant
// atomic measures (periodic orbits permute their atoms).
inline double invariance_defect(const SystemHandle& sys, const AtomicMeasure& mu) {
  return wasserstein1(sys, mu, push_forward(sys, mu)).value;
}

}  // namespace ergokit
