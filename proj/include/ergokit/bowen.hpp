#pragma once

// Bowen balls, ball masses, and the piecewise-linear mollifier.
//
// Conventions follow the source definitions exactly: forward balls
// B_n(x,eps) are open (strict <) over iterates 0 <= i < n; two-sided balls
// V[x,n,delta] are closed (<=) over -n <= i <= n. A closed forward variant
// over 0 <= i <= n serves non-invertible systems.
//
// Analytic masses on shifts are computed by certified cylinder refinement:
// each partially-assigned cylinder carries per-shift partial sums and tail
// bounds, so every cylinder is classified inside/outside or split. The
// initial window heuristic m(eps,n) = n + ceil(log2(4/eps)) comes from the
// tail bound sum_{|i|>m} 2^{-|i|} < eps/2; refinement continues adaptively
// until the unresolved boundary mass drops below tolerance.

#include <cmath>
#include <cstring>
#include <unordered_map>
#include <vector>

#include "ergokit/measures.hpp"

namespace ergokit {

enum class BallKind { OpenForward, ClosedTwoSided, ClosedForward };

struct BallQuery {
  Point center;
  std::int64_t n = 1;
  double epsilon = 0.1;
  BallKind kind = BallKind::OpenForward;
};

inline BallQuery open_ball(Point center, std::int64_t n, double epsilon) {
  if (n < 1) throw Error("open Bowen ball needs n >= 1");
  if (!(epsilon > 0)) throw Error("epsilon must be positive");
  return {std::move(center), n, epsilon, BallKind::OpenForward};
}

inline BallQuery two_sided_ball(Point center, std::int64_t n, double delta) {
  if (n < 0) throw Error("two-sided ball needs n >= 0");
  if (!(delta > 0)) throw Error("delta must be positive");
  return {std::move(center), n, delta, BallKind::ClosedTwoSided};
}

inline BallQuery forward_closed_ball(Point center, std::int64_t n, double delta) {
  if (n < 0) throw Error("closed forward ball needs n >= 0");
  if (!(delta > 0)) throw Error("delta must be positive");
  return {std::move(center), n, delta, BallKind::ClosedForward};
}

inline double ball_distance(const SystemHandle& sys, const BallQuery& q, const Point& y) {
  switch (q.kind) {
    case BallKind::OpenForward:
      return dn(sys, q.center, y, q.n);
    case BallKind::ClosedTwoSided:
      return two_sided_dn(sys, q.center, y, q.n);
    case BallKind::ClosedForward:
      return forward_closed_dn(sys, q.center, y, q.n);
  }
  throw Error("unreachable");
}

// Exact up to the cap, +infinity beyond it (early exit on partial sums).
inline double ball_distance_capped(const SystemHandle& sys, const BallQuery& q, const Point& y,
                                   double cap) {
  switch (q.kind) {
    case BallKind::OpenForward:
      return dn_capped(sys, q.center, y, q.n, cap);
    case BallKind::ClosedTwoSided:
      return two_sided_dn_capped(sys, q.center, y, q.n, cap);
    case BallKind::ClosedForward:
      return dn_capped(sys, q.center, y, q.n + 1, cap);
  }
  throw Error("unreachable");
}

inline bool ball_contains(const SystemHandle& sys, const BallQuery& q, const Point& y) {
  const double d = ball_distance_capped(sys, q, y, q.epsilon);
  return q.kind == BallKind::OpenForward ? d < q.epsilon : d <= q.epsilon;
}

// g(d): 1 on [0,eps], linear ramp on [eps,2eps], 0 beyond. The boundary
// branches return exact 0/1 so indicator sandwiches hold in floating point.
inline double mollifier_value(double d, double eps) {
  if (d <= eps) return 1.0;
  if (d >= 2.0 * eps) return 0.0;
  const double v = 2.0 - d / eps;
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

inline double mollifier(const SystemHandle& sys, const BallQuery& q, const Point& y) {
  return mollifier_value(ball_distance_capped(sys, q, y, 2.0 * q.epsilon), q.epsilon);
}

// --------------------------------------------------------------------------
// Atomic masses (exact finite sums; accumulation order is the atom order, so
// pointwise-dominated integrands give exactly ordered sums)

inline double ball_mass(const SystemHandle& sys, const BallQuery& q, const AtomicMeasure& mu) {
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (ball_contains(sys, q, mu.atoms[i])) m += mu.weights[i];
  return m;
}

inline double mollified_mass(const SystemHandle& sys, const BallQuery& q,
                             const AtomicMeasure& mu) {
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    m += mu.weights[i] * mollifier(sys, q, mu.atoms[i]);
  return m;
}

// --------------------------------------------------------------------------
// Analytic masses via certified cylinder refinement

struct CylinderSearchOptions {
  std::int64_t depth_cap = 192;     // coordinates examined beyond the shift hull
  double bracket_tol = 1e-12;       // certified bracket width target
  std::size_t node_budget = 20'000'000;
};

struct MassBracket {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

namespace detail {

struct CylinderDfs {
  const SystemHandle& sys;
  const AnalyticMeasure& mu;
  const SymbolicPoint& center;
  std::vector<std::int64_t> shifts;   // iterate indices of the max
  std::vector<std::int64_t> order;    // coordinate expansion order
  const CylinderSearchOptions& opt;
  int k = 0;
  std::size_t nodes = 0;

  // Markov transition powers P^t for bridging gaps between fixed coordinates.
  std::vector<std::vector<std::vector<double>>> ppow;

  // value bounds callback: given certified d-range, return value bounds
  double (*value_lo)(double d_hi, double eps);
  double (*value_hi)(double d_lo, double eps);
  double eps;

  double sum_lo = 0.0, sum_hi = 0.0;

  std::vector<double> rho;      // per-shift partial sums
  std::vector<double> tail;     // per-shift remaining weight
  std::vector<std::pair<std::int64_t, std::uint8_t>> assigned;  // sorted by index

  static double weight(std::int64_t rel) {
    return std::ldexp(1.0, static_cast<int>(-std::llabs(rel) - 1));
  }

  double side_total(std::int64_t shift) const {
    // total metric weight reachable from this shift, including the infinite tail
    if (sys.sided == Sided::One) return 1.0;
    (void)shift;
    return 1.5;
  }

  void init(BallKind kind, std::int64_t n) {
    k = sys.alphabet;
    switch (kind) {
      case BallKind::OpenForward:
        for (std::int64_t i = 0; i < n; ++i) shifts.push_back(i);
        break;
      case BallKind::ClosedForward:
        for (std::int64_t i = 0; i <= n; ++i) shifts.push_back(i);
        break;
      case BallKind::ClosedTwoSided:
        if (!sys.invertible) throw NotInvertibleError("two-sided balls need an invertible shift");
        for (std::int64_t i = -n; i <= n; ++i) shifts.push_back(i);
        break;
    }
    // coordinate expansion order: descending max weight over shifts
    const std::int64_t hull_lo = shifts.front(), hull_hi = shifts.back();
    std::vector<std::pair<double, std::int64_t>> coords;
    const std::int64_t lo =
        sys.sided == Sided::One ? 0 : hull_lo - opt.depth_cap;
    const std::int64_t hi = hull_hi + opt.depth_cap;
    for (std::int64_t j = lo; j <= hi; ++j) {
      const std::int64_t rel = j < hull_lo ? hull_lo - j : (j > hull_hi ? j - hull_hi : 0);
      coords.emplace_back(-weight(rel), j);
    }
    std::stable_sort(coords.begin(), coords.end());
    order.reserve(coords.size());
    for (auto& [w, j] : coords) order.push_back(j);

    rho.assign(shifts.size(), 0.0);
    tail.clear();
    for (std::size_t s = 0; s < shifts.size(); ++s) tail.push_back(side_total(shifts[s]));

    if (mu.kind == AnalyticMeasure::Kind::Markov) {
      const std::size_t span = order.size() + 2;
      ppow.resize(span);
      const std::size_t kk = static_cast<std::size_t>(k);
      ppow[0].assign(kk, std::vector<double>(kk, 0.0));
      for (std::size_t i = 0; i < kk; ++i) ppow[0][i][i] = 1.0;
      for (std::size_t t = 1; t < span; ++t) {
        ppow[t].assign(kk, std::vector<double>(kk, 0.0));
        for (std::size_t a = 0; a < kk; ++a)
          for (std::size_t b = 0; b < kk; ++b)
            for (std::size_t c = 0; c < kk; ++c)
              ppow[t][a][b] += ppow[t - 1][a][c] * mu.P[c][b];
      }
    }
  }

  // Multiplicative factor the new coordinate contributes to the cylinder
  // mass, given the already-assigned neighbours (computed before insertion).
  double mass_factor(std::int64_t j, std::uint8_t sym) const {
    if (mu.kind == AnalyticMeasure::Kind::Bernoulli) return mu.p[sym];
    auto it = std::lower_bound(assigned.begin(), assigned.end(),
                               std::make_pair(j, std::uint8_t{0}));
    const bool has_right = it != assigned.end();
    const bool has_left = it != assigned.begin();
    if (!has_left && !has_right) return mu.pi[sym];
    if (!has_left) {
      const auto gap = static_cast<std::size_t>(it->first - j);
      return mu.pi[sym] * ppow[gap][sym][it->second] / mu.pi[it->second];
    }
    const auto lt = std::prev(it);
    if (!has_right) {
      const auto gap = static_cast<std::size_t>(j - lt->first);
      return ppow[gap][lt->second][sym];
    }
    const auto a = static_cast<std::size_t>(j - lt->first);
    const auto b = static_cast<std::size_t>(it->first - j);
    const double bridge = ppow[a + b][lt->second][it->second];
    if (bridge <= 0.0) return 0.0;  // parent mass was zero; caller prunes
    return ppow[a][lt->second][sym] * ppow[b][sym][it->second] / bridge;
  }

  void insert_assigned(std::int64_t j, std::uint8_t sym) {
    auto it = std::lower_bound(assigned.begin(), assigned.end(),
                               std::make_pair(j, std::uint8_t{0}));
    assigned.insert(it, {j, sym});
  }

  void erase_assigned(std::int64_t j) {
    auto it = std::lower_bound(assigned.begin(), assigned.end(),
                               std::make_pair(j, std::uint8_t{0}));
    assigned.erase(it);
  }

  // Budgeted refinement: each child inherits budget/k, so the accepted
  // brackets form an antichain whose total width is at most the root budget
  // (plus whatever survives to the depth cap, which decays geometrically).
  void recurse(std::size_t depth, double budget, double mass) {
    if (++nodes > opt.node_budget)
      throw DepthCapExceededError("cylinder search exceeded the node budget");
    double d_lo = 0.0, d_hi = 0.0;
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      d_lo = std::max(d_lo, rho[s]);
      d_hi = std::max(d_hi, rho[s] + tail[s]);
    }
    const double v_lo = value_lo(d_hi, eps);
    const double v_hi = value_hi(d_lo, eps);
    const double width = v_hi - v_lo;
    if (width <= 0.0 || mass * width <= budget || depth >= order.size()) {
      sum_lo += mass * v_lo;
      sum_hi += mass * v_hi;
      return;
    }
    const std::int64_t j = order[depth];
    const std::uint8_t cx = center.coordinate(j);
    for (std::uint8_t sym = 0; sym < static_cast<std::uint8_t>(k); ++sym) {
      const double child_mass = mass * mass_factor(j, sym);
      if (child_mass <= 0.0) continue;
      const bool diff = sym != cx;
      for (std::size_t s = 0; s < shifts.size(); ++s) {
        const std::int64_t rel = j - shifts[s];
        if (sys.sided == Sided::One && rel < 0) continue;
        const double w = weight(rel);
        tail[s] -= w;
        if (diff) rho[s] += w;
      }
      insert_assigned(j, sym);
      recurse(depth + 1, budget / k, child_mass);
      erase_assigned(j);
      for (std::size_t s = 0; s < shifts.size(); ++s) {
        const std::int64_t rel = j - shifts[s];
        if (sys.sided == Sided::One && rel < 0) continue;
        const double w = weight(rel);
        tail[s] += w;
        if (diff) rho[s] -= w;
      }
    }
  }
};

// Uniform product measures admit a far cheaper evaluation: the mass of a
// cylinder depends only on its agree/diff pattern, so states are keyed by
// their still-undecided per-shift partial sums. A component whose sum can
// no longer cross the radius is dropped from the key, and a component past
// the radius kills the whole state; the surviving keys collide heavily,
// which keeps the frontier at tie radii polynomial. Partial sums are dyadic
// with span below 52 bits at depth <= 48, so double keys compare exactly.
struct UniformPatternBfs {
  const SystemHandle& sys;
  const CylinderSearchOptions& opt;
  bool closed;   // closed balls use <=, open use <
  double eps;
  double p_agree = 0, p_diff = 0;
  std::vector<std::int64_t> shifts;
  std::vector<std::int64_t> order;
  double sum_lo = 0.0, sum_hi = 0.0;

  // state: sorted (shift index, partial sum) pairs, undecided components only
  using Component = std::pair<std::uint32_t, double>;
  using State = std::vector<Component>;

  static double weight(std::int64_t rel) {
    return std::ldexp(1.0, static_cast<int>(-std::llabs(rel) - 1));
  }

  void init(BallKind kind, std::int64_t n, int k) {
    p_agree = 1.0 / k;
    p_diff = 1.0 - p_agree;
    switch (kind) {
      case BallKind::OpenForward:
        for (std::int64_t i = 0; i < n; ++i) shifts.push_back(i);
        break;
      case BallKind::ClosedForward:
        for (std::int64_t i = 0; i <= n; ++i) shifts.push_back(i);
        break;
      case BallKind::ClosedTwoSided:
        if (!sys.invertible) throw NotInvertibleError("two-sided balls need an invertible shift");
        for (std::int64_t i = -n; i <= n; ++i) shifts.push_back(i);
        break;
    }
    const std::int64_t hull_lo = shifts.front(), hull_hi = shifts.back();
    const std::int64_t cap = std::min<std::int64_t>(opt.depth_cap, 48);
    std::vector<std::pair<double, std::int64_t>> coords;
    const std::int64_t lo = sys.sided == Sided::One ? 0 : hull_lo - cap;
    for (std::int64_t j = lo; j <= hull_hi + cap; ++j) {
      const std::int64_t rel = j < hull_lo ? hull_lo - j : (j > hull_hi ? j - hull_hi : 0);
      coords.emplace_back(-weight(rel), j);
    }
    std::stable_sort(coords.begin(), coords.end());
    for (auto& [w, j] : coords) order.push_back(j);
  }

  bool component_inside(double rho, double t) const {
    return closed ? rho + t <= eps : rho + t < eps;
  }
  bool component_outside(double rho) const { return closed ? rho > eps : rho >= eps; }

  void run() {
    struct KeyHash {
      std::size_t operator()(const State& v) const {
        std::size_t h = 1469598103934665603ULL;
        for (const auto& [s, x] : v) {
          std::uint64_t b;
          std::memcpy(&b, &x, 8);
          h = (h ^ s) * 1099511628211ULL;
          h = (h ^ b) * 1099511628211ULL;
        }
        return h;
      }
    };
    const double side_total = sys.sided == Sided::One ? 1.0 : 1.5;
    std::vector<double> tail(shifts.size(), side_total);

    std::unordered_map<State, double, KeyHash> states;
    {
      State root;
      for (std::uint32_t s = 0; s < shifts.size(); ++s) {
        if (component_inside(0.0, tail[s])) continue;
        root.emplace_back(s, 0.0);
      }
      if (root.empty()) {
        sum_lo = sum_hi = 1.0;
        return;
      }
      states.emplace(std::move(root), 1.0);
    }

    std::size_t visited = 0;
    for (std::size_t level = 0; level < order.size(); ++level) {
      double undecided = 0.0;
      for (auto& [st, mass] : states) undecided += mass;
      if (undecided <= opt.bracket_tol * 0.5 || states.empty()) break;

      const std::int64_t j = order[level];
      std::vector<double> w(shifts.size(), 0.0);
      for (std::size_t s = 0; s < shifts.size(); ++s) {
        const std::int64_t rel = j - shifts[s];
        if (sys.sided == Sided::One && rel < 0) continue;
        w[s] = weight(rel);
        tail[s] -= w[s];
      }

      std::unordered_map<State, double, KeyHash> next;
      next.reserve(states.size() * 2);
      auto push = [&](State&& st, double mass) {
        // re-classify components under the new tails
        State out;
        out.reserve(st.size());
        for (const auto& [s, rho] : st) {
          if (component_outside(rho)) return;  // state dead, mass outside
          if (component_inside(rho, tail[s])) continue;
          out.emplace_back(s, rho);
        }
        if (out.empty()) {  // every component certified inside
          sum_lo += mass;
          sum_hi += mass;
          return;
        }
        auto it = next.find(out);
        if (it == next.end()) next.emplace(std::move(out), mass);
        else it->second += mass;
      };
      for (auto& [st, mass] : states) {
        visited += 2;
        if (visited > opt.node_budget)
          throw DepthCapExceededError("uniform pattern search exceeded the node budget");
        State agree = st;
        push(std::move(agree), mass * p_agree);
        State diff = st;
        for (auto& [s, rho] : diff) rho += w[s];
        push(std::move(diff), mass * p_diff);
      }
      states = std::move(next);
    }
    // whatever is left is an unresolved sliver: bracket [0, mass] each
    for (auto& [st, mass] : states) sum_hi += mass;
  }
};

inline bool is_uniform_bernoulli(const AnalyticMeasure& mu) {
  if (mu.kind != AnalyticMeasure::Kind::Bernoulli) return false;
  for (double v : mu.p)
    if (v != mu.p.front()) return false;
  return true;
}

inline MassBracket analytic_bracket(const SystemHandle& sys, const BallQuery& q,
                                    const AnalyticMeasure& mu,
                                    double (*vlo)(double, double), double (*vhi)(double, double),
                                    const CylinderSearchOptions& opt) {
  if (!sys.is_shift()) throw NotAShiftError("analytic masses need a shift system");
  if (mu.alphabet() != sys.alphabet) throw Error("measure alphabet mismatch");
  if (is_uniform_bernoulli(mu)) {
    UniformPatternBfs bfs{sys, opt, q.kind != BallKind::OpenForward, q.epsilon};
    bfs.init(q.kind, q.n, sys.alphabet);
    bfs.run();
    return {bfs.sum_lo, bfs.sum_hi};
  }
  CylinderDfs dfs{sys, mu, q.center.symbolic(), {}, {}, opt};
  dfs.value_lo = vlo;
  dfs.value_hi = vhi;
  dfs.eps = q.epsilon;
  dfs.init(q.kind, q.n);
  dfs.recurse(0, opt.bracket_tol, 1.0);
  return {dfs.sum_lo, dfs.sum_hi};
}

inline double indicator_lo_open(double d_hi, double eps) { return d_hi < eps ? 1.0 : 0.0; }
inline double indicator_hi_open(double d_lo, double eps) { return d_lo >= eps ? 0.0 : 1.0; }
inline double indicator_lo_closed(double d_hi, double eps) { return d_hi <= eps ? 1.0 : 0.0; }
inline double indicator_hi_closed(double d_lo, double eps) { return d_lo > eps ? 0.0 : 1.0; }

}  // namespace detail

// Certified bracket [lower, upper] around the true analytic ball mass.
inline MassBracket ball_mass_bracket(const SystemHandle& sys, const BallQuery& q,
                                     const AnalyticMeasure& mu,
                                     const CylinderSearchOptions& opt = {}) {
  const bool open = q.kind == BallKind::OpenForward;
  return detail::analytic_bracket(
      sys, q, mu, open ? detail::indicator_lo_open : detail::indicator_lo_closed,
      open ? detail::indicator_hi_open : detail::indicator_hi_closed, opt);
}

inline double ball_mass(const SystemHandle& sys, const BallQuery& q, const AnalyticMeasure& mu,
                        const CylinderSearchOptions& opt = {}) {
  const MassBracket b = ball_mass_bracket(sys, q, mu, opt);
  if (b.width() > 4 * opt.bracket_tol)
    throw DepthCapExceededError("ball mass unresolved: bracket width " +
                                std::to_string(b.width()));
  return b.lower;
}

// Analytic mollified mass via the radius representation
//   integral g dmu = (1/eps) * integral_eps^{2eps} mu{d < t} dt,
// bracketed by lower/upper Riemann sums of certified ball masses. The mass
// function is monotone in t, so closed-ball evaluations bound the open-ball
// integrand from both sides at shifted grid points.
inline MassBracket mollified_mass_bracket(const SystemHandle& sys, const BallQuery& q,
                                          const AnalyticMeasure& mu,
                                          const CylinderSearchOptions& opt = {}) {
  CylinderSearchOptions inner = opt;
  inner.bracket_tol = std::max(opt.bracket_tol * 0.125, 1e-14);
  auto mass_at = [&](double t) {
    BallQuery qt = q;
    qt.epsilon = t;
    return ball_mass_bracket(sys, qt, mu, inner);
  };
  const MassBracket at_eps = mass_at(q.epsilon);
  const MassBracket at_2eps = mass_at(2.0 * q.epsilon);
  const double variation = std::max(at_2eps.upper - at_eps.lower, 0.0);
  std::size_t K = 8;
  if (variation > opt.bracket_tol) {
    const double want = variation / std::max(opt.bracket_tol, 1e-13);
    K = std::min<std::size_t>(4096, std::max<std::size_t>(8, static_cast<std::size_t>(want)));
  }
  std::vector<MassBracket> grid(K + 1);
  grid[0] = at_eps;
  grid[K] = at_2eps;
  for (std::size_t i = 1; i < K; ++i)
    grid[i] = mass_at(q.epsilon * (1.0 + static_cast<double>(i) / static_cast<double>(K)));
  MassBracket out;
  const double dt = 1.0 / static_cast<double>(K);  // times eps, divided back out
  for (std::size_t i = 0; i < K; ++i) {
    out.lower += grid[i].lower * dt;
    out.upper += grid[i + 1].upper * dt;
  }
  out.lower = std::min(out.lower, 1.0);
  out.upper = std::min(out.upper, 1.0);
  return out;
}

// Analytic mollified masses refine the whole ramp, so the practical
// tolerance is coarser than for indicator masses; callers needing relative
// accuracy should scale bracket_tol by a ball-mass estimate first.
inline double mollified_mass(const SystemHandle& sys, const BallQuery& q,
                             const AnalyticMeasure& mu,
                             const CylinderSearchOptions& opt = {}) {
  const MassBracket b = mollified_mass_bracket(sys, q, mu, opt);
  if (b.width() > 4 * opt.bracket_tol)
    throw DepthCapExceededError("mollified mass unresolved: bracket width " +
                                std::to_string(b.width()));
  return 0.5 * (b.lower + b.upper);
}

}  // namespace ergokit
