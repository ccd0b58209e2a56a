#pragma once

// Dynamical systems: points, metrics, the system zoo, and Bowen distances.
//
// Circle points are exact rationals num/den (den == 0 encodes 2^64, the
// fixed-point lattice). Doubling, tent and rotation act by exact integer
// arithmetic, so orbits are reproducible at any length: seeds with odd
// denominator give exact orbits of the doubling map forever, while the
// fixed-point lattice is exact for rotation and for Bowen windows up to
// ~60 iterates of the expanding maps.
//
// Symbolic points are finite windows (or periodic words) over a finite
// alphabet; the product metric is summed to depth kMetricDepth, beyond which
// contributions are below 2^-61 and cannot move any comparison made here.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergokit/core.hpp"

namespace ergokit {

// --------------------------------------------------------------------------
// Points

struct CirclePoint {
  std::uint64_t num = 0;
  std::uint64_t den = 1;  // den == 0 means 2^64

  static CirclePoint fixed(std::uint64_t frac) { return {frac, 0}; }
  static CirclePoint rational(std::uint64_t p, std::uint64_t q) {
    if (q == 0 || q >= (1ULL << 63)) throw Error("circle denominator must be in [1, 2^63)");
    return {p % q, q};
  }
  static CirclePoint from_double(double x) {
    x -= std::floor(x);
    return fixed(static_cast<std::uint64_t>(x * 0x1.0p64));
  }

  double value() const {
    const long double d = den == 0 ? 0x1.0p64L : static_cast<long double>(den);
    return static_cast<double>(static_cast<long double>(num) / d);
  }
};

inline unsigned __int128 circle_den128(const CirclePoint& p) {
  return p.den == 0 ? (static_cast<unsigned __int128>(1) << 64)
                    : static_cast<unsigned __int128>(p.den);
}

inline bool operator==(const CirclePoint& a, const CirclePoint& b) {
  return static_cast<unsigned __int128>(a.num) * circle_den128(b) ==
         static_cast<unsigned __int128>(b.num) * circle_den128(a);
}

// Exact circle metric min(|x-y|, 1-|x-y|).
inline double circle_metric(const CirclePoint& a, const CirclePoint& b) {
  if (a.den == 0 && b.den == 0) {
    const std::uint64_t diff = a.num - b.num;  // wraps mod 2^64
    const std::uint64_t d = std::min(diff, 0 - diff);
    return static_cast<double>(static_cast<long double>(d) / 0x1.0p64L);
  }
  // At most one denominator is 2^64, so da*db <= 2^127 fits in 128 bits.
  const unsigned __int128 da = circle_den128(a), db = circle_den128(b);
  const unsigned __int128 denom = da * db;
  const unsigned __int128 xa = static_cast<unsigned __int128>(a.num) * db;
  const unsigned __int128 xb = static_cast<unsigned __int128>(b.num) * da;
  const unsigned __int128 diff = xa > xb ? xa - xb : xb - xa;
  const unsigned __int128 comp = denom - diff;
  const unsigned __int128 d = diff < comp ? diff : comp;
  return static_cast<double>(static_cast<long double>(d) / static_cast<long double>(denom));
}

struct SymbolicPoint {
  std::shared_ptr<const std::vector<std::uint8_t>> word;
  bool periodic = false;
  std::int64_t window_lo = 0;  // absolute index of word[0] (windows only)
  std::int64_t time = 0;       // accumulated shift offset

  std::int64_t period() const { return static_cast<std::int64_t>(word->size()); }

  bool has_coordinate(std::int64_t i) const {
    if (periodic) return true;
    const std::int64_t a = time + i;
    return a >= window_lo && a < window_lo + static_cast<std::int64_t>(word->size());
  }

  std::uint8_t coordinate(std::int64_t i) const {
    if (periodic) {
      const std::int64_t L = period();
      std::int64_t r = (time + i) % L;
      if (r < 0) r += L;
      return (*word)[static_cast<std::size_t>(r)];
    }
    const std::int64_t a = time + i;
    if (a < window_lo || a >= window_lo + static_cast<std::int64_t>(word->size()))
      throw WindowTooShortError("symbolic window does not cover coordinate " + std::to_string(a));
    return (*word)[static_cast<std::size_t>(a - window_lo)];
  }
};

// Reduces a word to its primitive period.
inline std::vector<std::uint8_t> primitive_word(const std::vector<std::uint8_t>& w) {
  const std::size_t L = w.size();
  for (std::size_t p = 1; p <= L / 2; ++p) {
    if (L % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < L && ok; ++i) ok = (w[i] == w[i - p]);
    if (ok) return std::vector<std::uint8_t>(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return w;
}

inline SymbolicPoint make_periodic_point(std::vector<std::uint8_t> word, std::int64_t time = 0) {
  if (word.empty()) throw Error("empty word");
  auto prim = primitive_word(word);
  SymbolicPoint p;
  p.word = std::make_shared<const std::vector<std::uint8_t>>(std::move(prim));
  p.periodic = true;
  p.time = time % p.period();
  return p;
}

inline SymbolicPoint make_window_point(std::vector<std::uint8_t> word, std::int64_t window_lo = 0) {
  if (word.empty()) throw Error("empty word");
  SymbolicPoint p;
  p.word = std::make_shared<const std::vector<std::uint8_t>>(std::move(word));
  p.periodic = false;
  p.window_lo = window_lo;
  return p;
}

inline bool symbolic_equal(const SymbolicPoint& a, const SymbolicPoint& b) {
  if (a.periodic != b.periodic) return false;
  if (a.periodic) {
    if (a.period() != b.period()) return false;
    for (std::int64_t i = 0; i < a.period(); ++i)
      if (a.coordinate(i) != b.coordinate(i)) return false;
    return true;
  }
  const std::int64_t alo = a.window_lo - a.time, blo = b.window_lo - b.time;
  if (alo != blo || a.word->size() != b.word->size()) return false;
  return *a.word == *b.word;
}

struct Point {
  std::variant<CirclePoint, SymbolicPoint> rep;

  Point() : rep(CirclePoint{}) {}
  Point(CirclePoint c) : rep(c) {}
  Point(SymbolicPoint s) : rep(std::move(s)) {}

  bool is_circle() const { return std::holds_alternative<CirclePoint>(rep); }
  const CirclePoint& circle() const { return std::get<CirclePoint>(rep); }
  const SymbolicPoint& symbolic() const { return std::get<SymbolicPoint>(rep); }
};

inline bool point_equal(const Point& a, const Point& b) {
  if (a.is_circle() != b.is_circle()) return false;
  if (a.is_circle()) return a.circle() == b.circle();
  return symbolic_equal(a.symbolic(), b.symbolic());
}

// --------------------------------------------------------------------------
// Systems

enum class SystemKind { Doubling, Tent, Rotation, Shift };
enum class Sided { One, Two };

struct ExpandingInfo {
  double lambda;
  double radius;  // validity radius eps0
};

// Rotation angle: golden ratio conjugate (sqrt(5)-1)/2 on the 2^64 lattice.
inline constexpr std::uint64_t kGoldenFixed = 11400714819323198485ULL;

// Largest prime below 2^62 with 2 as a primitive root; doubling orbits of
// rationals p/q* are exact with period q*-1, far beyond any horizon used here.
inline constexpr std::uint64_t kDoublingModulus = 4611686018427387787ULL;

// Product-metric contributions are summed for |i| <= kMetricDepth; the
// discarded tail is below 2^-61.
inline constexpr std::int64_t kMetricDepth = 60;

struct SystemHandle {
  std::string name;
  SystemKind kind = SystemKind::Doubling;
  int alphabet = 0;      // shifts only
  Sided sided = Sided::One;
  bool invertible = false;
  std::optional<ExpandingInfo> expanding;
  std::optional<double> lipschitz;

  bool is_shift() const { return kind == SystemKind::Shift; }
  bool is_circle() const { return !is_shift(); }

  Point apply(const Point& x) const;
  Point apply_inverse(const Point& x) const;
  double metric(const Point& x, const Point& y) const;
  double diameter() const { return is_shift() ? 1.5 : 0.5; }
};

inline SystemHandle make_doubling() {
  SystemHandle s;
  s.name = "doubling";
  s.kind = SystemKind::Doubling;
  s.expanding = ExpandingInfo{2.0, 0.25};
  s.lipschitz = 2.0;
  return s;
}

inline SystemHandle make_tent() {
  SystemHandle s;
  s.name = "tent";
  s.kind = SystemKind::Tent;
  s.lipschitz = 2.0;  // no expanding constant: not injective near the peak
  return s;
}

inline SystemHandle make_rotation() {
  SystemHandle s;
  s.name = "rotation";
  s.kind = SystemKind::Rotation;
  s.lipschitz = 1.0;
  s.invertible = true;
  return s;
}

inline SystemHandle make_shift(int alphabet, Sided sided) {
  if (alphabet < 2 || alphabet > 255) throw Error("shift alphabet must be in [2, 255]");
  SystemHandle s;
  s.name = sided == Sided::One ? "shift-one" : "shift-two";
  s.kind = SystemKind::Shift;
  s.alphabet = alphabet;
  s.sided = sided;
  s.invertible = (sided == Sided::Two);
  s.lipschitz = 2.0;
  if (sided == Sided::One) s.expanding = ExpandingInfo{2.0, 0.25};
  return s;
}

// --- circle dynamics, exact integer arithmetic ---

inline CirclePoint circle_apply(SystemKind kind, const CirclePoint& p) {
  switch (kind) {
    case SystemKind::Doubling: {
      if (p.den == 0) return CirclePoint::fixed(p.num << 1);
      std::uint64_t t = p.num << 1;  // den < 2^63, so no overflow
      if (t >= p.den) t -= p.den;
      return {t, p.den};
    }
    case SystemKind::Tent: {
      if (p.den == 0) {
        const std::uint64_t t = p.num << 1;
        return CirclePoint::fixed(p.num < (1ULL << 63) ? t : (0 - t));
      }
      const std::uint64_t t = p.num << 1;
      if (t < p.den) return {t, p.den};
      return {(2 * p.den - t) % p.den, p.den};
    }
    case SystemKind::Rotation: {
      // Rationals are coerced to the fixed-point lattice once; the rotation
      // angle is irrational so no exact rational orbit exists anyway.
      std::uint64_t frac = p.den == 0
          ? p.num
          : static_cast<std::uint64_t>((static_cast<unsigned __int128>(p.num) << 64) / p.den);
      return CirclePoint::fixed(frac + kGoldenFixed);
    }
    default:
      throw Error("not a circle system");
  }
}

// --- shift metric ---

// rho(x,y) = sum_i 2^{-|i|-1} [x_i != y_i]; one-sided shifts sum i >= 0.
inline double shift_metric(const SystemHandle& sys, const SymbolicPoint& a,
                           const SymbolicPoint& b) {
  if (a.word == b.word && a.periodic == b.periodic &&
      (a.periodic ? (a.time - b.time) % a.period() == 0
                  : a.window_lo - a.time == b.window_lo - b.time))
    return 0.0;
  double d = 0.0;
  for (std::int64_t i = 0; i <= kMetricDepth; ++i) {
    const double w = std::ldexp(1.0, static_cast<int>(-i - 1));
    if (a.coordinate(i) != b.coordinate(i)) d += w;
    if (sys.sided == Sided::Two && i > 0) {
      if (a.coordinate(-i) != b.coordinate(-i)) d += w;
    }
  }
  return d;
}

inline Point SystemHandle::apply(const Point& x) const {
  if (is_shift()) {
    SymbolicPoint s = x.symbolic();
    s.time += 1;
    return Point(std::move(s));
  }
  return Point(circle_apply(kind, x.circle()));
}

inline Point SystemHandle::apply_inverse(const Point& x) const {
  if (!invertible) throw NotInvertibleError(name + " is not invertible");
  if (is_shift()) {
    SymbolicPoint s = x.symbolic();
    s.time -= 1;
    return Point(std::move(s));
  }
  // rotation
  std::uint64_t frac = x.circle().den == 0
      ? x.circle().num
      : static_cast<std::uint64_t>((static_cast<unsigned __int128>(x.circle().num) << 64) /
                                   x.circle().den);
  return Point(CirclePoint::fixed(frac - kGoldenFixed));
}

inline double SystemHandle::metric(const Point& x, const Point& y) const {
  if (is_shift()) return shift_metric(*this, x.symbolic(), y.symbolic());
  return circle_metric(x.circle(), y.circle());
}

// --------------------------------------------------------------------------
// Orbits and Bowen distances

inline Point iterate(const SystemHandle& sys, const Point& x, std::int64_t n) {
  if (n < 0) throw Error("iterate: n must be >= 0");
  if (sys.is_shift()) {
    SymbolicPoint s = x.symbolic();
    s.time += n;
    return Point(std::move(s));
  }
  Point p = x;
  for (std::int64_t i = 0; i < n; ++i) p = sys.apply(p);
  return p;
}

// d_n(x,y) = max{ d(f^i x, f^i y) : 0 <= i < n }.
inline double dn(const SystemHandle& sys, const Point& x, const Point& y, std::int64_t n) {
  if (n < 1) throw Error("dn: n must be >= 1");
  double best = 0.0;
  Point a = x, b = y;
  for (std::int64_t i = 0; i < n; ++i) {
    if (i > 0) {
      a = sys.apply(a);
      b = sys.apply(b);
    }
    best = std::max(best, sys.metric(a, b));
  }
  return best;
}

// d_n with an early exit: returns the exact value when d_n <= cap, and
// +infinity as soon as a partial sum exceeds cap. Partial sums accumulate
// positive terms in the same order as the full evaluation, and floating
// point addition of non-negative terms is monotone, so the early exit is
// exact: values <= cap are never cut short.
inline double shift_metric_capped(const SystemHandle& sys, const SymbolicPoint& a,
                                  const SymbolicPoint& b, double cap) {
  if (a.word == b.word && a.periodic == b.periodic &&
      (a.periodic ? (a.time - b.time) % a.period() == 0
                  : a.window_lo - a.time == b.window_lo - b.time))
    return 0.0;
  double d = 0.0;
  for (std::int64_t i = 0; i <= kMetricDepth; ++i) {
    const double w = std::ldexp(1.0, static_cast<int>(-i - 1));
    if (a.coordinate(i) != b.coordinate(i)) d += w;
    if (sys.sided == Sided::Two && i > 0) {
      if (a.coordinate(-i) != b.coordinate(-i)) d += w;
    }
    if (d > cap) return std::numeric_limits<double>::infinity();
  }
  return d;
}

inline double dn_capped(const SystemHandle& sys, const Point& x, const Point& y, std::int64_t n,
                        double cap) {
  if (n < 1) throw Error("dn_capped: n must be >= 1");
  double best = 0.0;
  if (sys.is_shift()) {
    SymbolicPoint a = x.symbolic(), b = y.symbolic();
    for (std::int64_t i = 0; i < n; ++i) {
      const double d = shift_metric_capped(sys, a, b, cap);
      if (d > cap) return std::numeric_limits<double>::infinity();
      best = std::max(best, d);
      a.time += 1;
      b.time += 1;
    }
    return best;
  }
  Point a = x, b = y;
  for (std::int64_t i = 0; i < n; ++i) {
    if (i > 0) {
      a = sys.apply(a);
      b = sys.apply(b);
    }
    const double d = sys.metric(a, b);
    if (d > cap) return std::numeric_limits<double>::infinity();
    best = std::max(best, d);
  }
  return best;
}

// Two-sided D_n(x,y) = max{ d(f^i x, f^i y) : -n <= i <= n }; needs an inverse.
inline double two_sided_dn(const SystemHandle& sys, const Point& x, const Point& y,
                           std::int64_t n) {
  if (!sys.invertible) throw NotInvertibleError(sys.name + " has no inverse");
  if (n < 0) throw Error("two_sided_dn: n must be >= 0");
  double best = sys.metric(x, y);
  Point a = x, b = y;
  for (std::int64_t i = 1; i <= n; ++i) {
    a = sys.apply(a);
    b = sys.apply(b);
    best = std::max(best, sys.metric(a, b));
  }
  a = x;
  b = y;
  for (std::int64_t i = 1; i <= n; ++i) {
    a = sys.apply_inverse(a);
    b = sys.apply_inverse(b);
    best = std::max(best, sys.metric(a, b));
  }
  return best;
}

inline double two_sided_dn_capped(const SystemHandle& sys, const Point& x, const Point& y,
                                  std::int64_t n, double cap) {
  if (!sys.invertible) throw NotInvertibleError(sys.name + " has no inverse");
  if (n < 0) throw Error("two_sided_dn_capped: n must be >= 0");
  const double fwd = dn_capped(sys, x, y, n + 1, cap);
  if (fwd > cap) return std::numeric_limits<double>::infinity();
  double best = fwd;
  Point a = x, b = y;
  for (std::int64_t i = 1; i <= n; ++i) {
    a = sys.apply_inverse(a);
    b = sys.apply_inverse(b);
    const double d = sys.is_shift()
                         ? shift_metric_capped(sys, a.symbolic(), b.symbolic(), cap)
                         : sys.metric(a, b);
    if (d > cap) return std::numeric_limits<double>::infinity();
    best = std::max(best, d);
  }
  return best;
}

// Forward closed variant max{ d(f^i x, f^i y) : 0 <= i <= n } used by the
// positively-expansive machinery on non-invertible systems.
inline double forward_closed_dn(const SystemHandle& sys, const Point& x, const Point& y,
                                std::int64_t n) {
  if (n < 0) throw Error("forward_closed_dn: n must be >= 0");
  return dn(sys, x, y, n + 1);
}

// --------------------------------------------------------------------------
// Random points

struct SamplingOptions {
  // Circle systems: rational seeds p/kDoublingModulus give exact long orbits
  // for doubling/tent; the fixed-point lattice is used otherwise.
  bool long_orbit = false;
  // Shifts: window length for non-periodic samples.
  std::int64_t window = 160;
  // Shifts: if > 0, sample a periodic point with this word length instead.
  std::int64_t periodic_word = 0;
};

inline Point random_point(const SystemHandle& sys, Rng& rng, const SamplingOptions& opt = {}) {
  if (sys.is_circle()) {
    if (opt.long_orbit && sys.kind != SystemKind::Rotation)
      return Point(CirclePoint::rational(1 + rng.below(kDoublingModulus - 1), kDoublingModulus));
    return Point(CirclePoint::fixed(rng.bits()));
  }
  const auto k = static_cast<std::uint64_t>(sys.alphabet);
  if (opt.periodic_word > 0) {
    std::vector<std::uint8_t> w(static_cast<std::size_t>(opt.periodic_word));
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(k));
    return Point(make_periodic_point(std::move(w)));
  }
  std::vector<std::uint8_t> w(static_cast<std::size_t>(opt.window));
  for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(k));
  const std::int64_t lo = sys.sided == Sided::Two ? -opt.window / 2 : 0;
  return Point(make_window_point(std::move(w), lo));
}

// --------------------------------------------------------------------------
// Metric axiom verification

struct MetricAxiomReport {
  std::size_t samples = 0;
  std::size_t symmetry_violations = 0;
  std::size_t identity_violations = 0;
  std::size_t triangle_violations = 0;
  std::size_t expanding_pairs = 0;
  std::size_t expanding_violations = 0;
  std::size_t lipschitz_pairs = 0;
  std::size_t lipschitz_violations = 0;
  double worst_triangle_defect = 0.0;
  double worst_expanding_defect = 0.0;
  double worst_lipschitz_defect = 0.0;

  bool ok() const {
    return symmetry_violations == 0 && identity_violations == 0 && triangle_violations == 0 &&
           expanding_violations == 0 && lipschitz_violations == 0;
  }
};

inline MetricAxiomReport verify_metric_axioms(const SystemHandle& sys, std::size_t samples,
                                              std::uint64_t seed) {
  if (samples < 1) throw Error("verify_metric_axioms: samples must be >= 1");
  MetricAxiomReport rep;
  rep.samples = samples;
  Rng rng = substream(seed, "metric-axioms/" + sys.name);
  constexpr double tol = 1e-12;
  SamplingOptions opt;
  opt.periodic_word = sys.is_shift() ? 61 : 0;  // prime length: primitive whp
  for (std::size_t t = 0; t < samples; ++t) {
    const Point x = random_point(sys, rng, opt);
    const Point y = random_point(sys, rng, opt);
    const Point z = random_point(sys, rng, opt);
    const double dxy = sys.metric(x, y), dyx = sys.metric(y, x);
    const double dxz = sys.metric(x, z), dyz = sys.metric(y, z);
    if (dxy != dyx) ++rep.symmetry_violations;
    if (sys.metric(x, x) != 0.0) ++rep.identity_violations;
    const double defect = dxz - (dxy + dyz);
    if (defect > tol) {
      ++rep.triangle_violations;
      rep.worst_triangle_defect = std::max(rep.worst_triangle_defect, defect);
    }
    const double dfx = sys.metric(sys.apply(x), sys.apply(y));
    if (sys.expanding && dxy < sys.expanding->radius && dxy > 0) {
      ++rep.expanding_pairs;
      const double e = sys.expanding->lambda * dxy - dfx;
      if (e > tol) {
        ++rep.expanding_violations;
        rep.worst_expanding_defect = std::max(rep.worst_expanding_defect, e);
      }
    }
    if (sys.lipschitz) {
      ++rep.lipschitz_pairs;
      const double e = dfx - *sys.lipschitz * dxy;
      if (e > tol) {
        ++rep.lipschitz_violations;
        rep.worst_lipschitz_defect = std::max(rep.worst_lipschitz_defect, e);
      }
    }
  }
  return rep;
}

}  // namespace ergokit
