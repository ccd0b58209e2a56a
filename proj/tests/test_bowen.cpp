#include <catch2/catch_amalgamated.hpp>

#include "ergokit/bowen.hpp"
#include "oracles.hpp"

using namespace ergokit;

namespace {

// Independent oracle for uniform Bernoulli two-sided balls: explores
// agree/diff patterns outward from the shift hull, tracking exact interval
// bounds on the Bowen distance. Masses depend only on the number of decided
// coordinates, which keeps this implementation separate from the library's
// symbol-level search.
struct PatternOracle {
  int n;
  double delta;
  int max_extra;
  double lo = 0, hi = 0;

  double weight(std::int64_t rel) const { return std::ldexp(1.0, int(-std::llabs(rel) - 1)); }

  void run() {
    std::vector<double> rho(static_cast<std::size_t>(2 * n + 1), 0.0);
    std::vector<double> tail(static_cast<std::size_t>(2 * n + 1), 1.5);
    // decide coordinates 0, +-1, ..., +-(n+max_extra)
    step(0, rho, tail, 1.0);
  }

  void step(int level, std::vector<double>& rho, std::vector<double>& tail, double mass) {
    double dlo = 0, dhi = 0;
    for (std::size_t s = 0; s < rho.size(); ++s) {
      dlo = std::max(dlo, rho[s]);
      dhi = std::max(dhi, rho[s] + tail[s]);
    }
    if (dlo > delta) return;                   // certainly outside (closed ball)
    if (dhi <= delta) {                        // certainly inside
      lo += mass;
      hi += mass;
      return;
    }
    const int total_levels = 2 * (n + max_extra) + 1;
    if (level >= total_levels) {
      hi += mass;  // unresolved sliver
      return;
    }
    // level -> coordinate: 0, 1, -1, 2, -2, ...
    const std::int64_t j = (level % 2 == 1) ? (level + 1) / 2 : -(level / 2);
    for (int diff = 0; diff < 2; ++diff) {
      auto r2 = rho;
      auto t2 = tail;
      for (std::size_t s = 0; s < rho.size(); ++s) {
        const std::int64_t shift = static_cast<std::int64_t>(s) - n;
        const double w = weight(j - shift);
        t2[s] -= w;
        if (diff) r2[s] += w;
      }
      step(level + 1, r2, t2, mass * 0.5);
    }
  }
};

}  // namespace

TEST_CASE("ball membership on the doubling map") {
  const auto sys = make_doubling();
  const Point zero(CirclePoint::rational(0, 1));
  const Point x(CirclePoint::from_double(0.1));
  CHECK(ball_contains(sys, open_ball(zero, 2, 0.25), x));   // d_2 = 0.2 < 0.25
  CHECK(!ball_contains(sys, open_ball(zero, 2, 0.15), x));  // d_2 = 0.2 >= 0.15
  CHECK(ball_contains(sys, open_ball(zero, 2, 0.25), zero));
}

TEST_CASE("mollifier values") {
  const auto sys = make_doubling();
  const Point zero(CirclePoint::rational(0, 1));
  const double eps = 0.0625;  // dyadic: the ramp midpoint is exact
  // center: g = 1
  CHECK(mollifier(sys, open_ball(zero, 1, eps), zero) == 1.0);
  CHECK(mollifier_value(1.5 * eps, eps) == 0.5);
  CHECK(mollifier_value(3.0 * eps, eps) == 0.0);
  CHECK(mollifier_value(2.0 * eps, eps) == 0.0);
  CHECK(mollifier_value(eps, eps) == 1.0);
}

TEST_CASE("atomic masses and the exact sandwich") {
  std::vector<SystemHandle> zoo = {make_doubling(), make_tent(), make_shift(2, Sided::One),
                                   make_shift(3, Sided::Two)};
  Rng rng = substream(2025, "sandwich");
  for (const auto& sys : zoo) {
    SamplingOptions opt;
    opt.periodic_word = sys.is_shift() ? 23 : 0;
    for (int t = 0; t < 150; ++t) {
      // random atomic measure
      const std::size_t na = 1 + rng.index(12);
      std::vector<Point> pts;
      std::vector<double> w;
      double sw = 0;
      for (std::size_t i = 0; i < na; ++i) {
        pts.push_back(random_point(sys, rng, opt));
        w.push_back(0.05 + rng.uniform());
        sw += w.back();
      }
      for (auto& v : w) v /= sw;
      const auto mu = make_atomic(sys, pts, w, false);
      const Point x = random_point(sys, rng, opt);
      const double eps = 0.01 + 0.4 * rng.uniform();
      const auto n = static_cast<std::int64_t>(1 + rng.index(10));
      const auto q1 = open_ball(x, n, eps);
      const auto q2 = open_ball(x, n, 2 * eps);
      const double m1 = ball_mass(sys, q1, mu);
      const double g = mollified_mass(sys, q1, mu);
      const double m2 = ball_mass(sys, q2, mu);
      CHECK(m1 <= g);
      CHECK(g <= m2);
    }
  }
}

TEST_CASE("ball mass nesting in n and eps, atomic") {
  const auto sys = make_doubling();
  Rng rng = substream(4, "nesting");
  for (int t = 0; t < 60; ++t) {
    std::vector<Point> pts;
    for (int i = 0; i < 9; ++i) pts.emplace_back(CirclePoint::fixed(rng.bits()));
    const auto mu = make_atomic(sys, pts, std::vector<double>(9, 1.0 / 9), false);
    const Point x(CirclePoint::fixed(rng.bits()));
    const double eps = 0.02 + 0.2 * rng.uniform();
    double prev = 1.0;
    for (std::int64_t n = 1; n <= 10; ++n) {
      const double m = ball_mass(sys, open_ball(x, n, eps), mu);
      CHECK(m <= prev);
      prev = m;
    }
    CHECK(ball_mass(sys, open_ball(x, 3, eps), mu) <=
          ball_mass(sys, open_ball(x, 3, 1.5 * eps), mu));
  }
}

TEST_CASE("two-sided nesting and whole-space balls") {
  const auto sys = make_shift(2, Sided::Two);
  const auto mu = periodize(sys, {0, 1, 1, 0, 1, 0, 0});
  const Point x = mu.atoms[0];
  double prev = 1.0;
  for (std::int64_t n = 0; n <= 8; ++n) {
    const double m = ball_mass(sys, two_sided_ball(x, n, 0.2), mu);
    CHECK(m <= prev);
    prev = m;
  }
  // delta >= diam: everything inside (up to fp dust in the weight sum)
  CHECK(ball_mass(sys, two_sided_ball(x, 3, 1.6), mu) ==
        Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("lipschitz inclusion B(x, r Lambda^-n) inside B_n(x, r)") {
  for (const auto& sys : {make_doubling(), make_tent()}) {
    Rng rng = substream(17, "lipschitz");
    const double lam = *sys.lipschitz;
    for (int t = 0; t < 300; ++t) {
      const Point x(CirclePoint::fixed(rng.bits()));
      const double r = 0.05 + 0.3 * rng.uniform();
      const auto n = static_cast<std::int64_t>(1 + rng.index(6));
      const double small = r * std::pow(lam, -double(n));
      // sample y within the small ball
      const auto off = static_cast<std::uint64_t>(rng.uniform() * small * 0x1.0p64);
      const Point y(CirclePoint::fixed(x.circle().num + off));
      if (sys.metric(x, y) >= small) continue;
      CHECK(ball_contains(sys, open_ball(x, n, r), y));
    }
  }
}

TEST_CASE("periodic measure carries at least 1/k in its own ball") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = periodize(sys, {0, 1, 1, 0, 1});
  for (std::int64_t n = 1; n <= 10; ++n)
    CHECK(ball_mass(sys, open_ball(mu.atoms[0], n, 0.3), mu) >= 1.0 / 5.0);
}

TEST_CASE("analytic ball mass: bernoulli cylinder oracle") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(88, "cyl-mass");
  // eps = 1/2: B_n(x, 1/2) equals the length-n cylinder up to a null set
  for (std::int64_t n = 1; n <= 12; ++n) {
    const Point x = sample_point(sys, mu, rng, 256);
    const auto br = ball_mass_bracket(sys, open_ball(x, n, 0.5), mu);
    CHECK(br.width() <= 1e-11);
    const double want = std::ldexp(1.0, int(-n));
    CHECK(br.lower <= want + 1e-12);
    CHECK(br.upper >= want - 1e-12);
  }
  // non-uniform: cylinder mass of the center's own prefix
  const auto mu2 = make_bernoulli({0.25, 0.75});
  for (std::int64_t n = 1; n <= 10; ++n) {
    const Point x = sample_point(sys, mu2, rng, 256);
    std::vector<std::uint8_t> w;
    for (std::int64_t i = 0; i < n; ++i) w.push_back(x.symbolic().coordinate(i));
    const double want = mu2.cylinder_mass(w);
    const auto br = ball_mass_bracket(sys, open_ball(x, n, 0.5), mu2);
    CHECK(br.width() <= 1e-10);
    CHECK(br.lower <= want + 1e-11);
    CHECK(br.upper >= want - 1e-11);
  }
}

TEST_CASE("analytic ball mass: markov matches dynamic programming oracle") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_markov({{0.5, 0.5}, {1.0, 0.0}}, {2.0 / 3.0, 1.0 / 3.0});
  Rng rng = substream(89, "markov-mass");
  for (std::int64_t n = 2; n <= 10; ++n) {
    Point x = sample_point(sys, mu, rng, 256);
    std::vector<std::uint8_t> w;
    for (std::int64_t i = 0; i < n; ++i) w.push_back(x.symbolic().coordinate(i));
    const double want = mu.cylinder_mass(w);
    const auto br = ball_mass_bracket(sys, open_ball(x, n, 0.5), mu);
    CHECK(br.width() <= 1e-10);
    CHECK(br.lower <= want + 1e-11);
    CHECK(br.upper >= want - 1e-11);
  }
}

TEST_CASE("two-sided closed ball matches the pattern oracle") {
  const auto sys = make_shift(2, Sided::Two);
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(90, "two-sided-oracle");
  double prev = 1.0;
  for (int n = 0; n <= 4; ++n) {
    const Point x = sample_point(sys, mu, rng, 64);
    const auto br = ball_mass_bracket(sys, two_sided_ball(x, n, 0.25), mu);
    PatternOracle oracle{n, 0.25, 12};
    oracle.run();
    CHECK(br.lower >= oracle.lo - 1e-9);
    CHECK(br.lower <= oracle.hi + 1e-9);
    CHECK(br.width() <= 1e-9);
    // mass decays by roughly 1/4 per extra shift
    CHECK(br.lower < prev);
    prev = br.lower;
  }
}

TEST_CASE("analytic mollified mass bracket and sandwich") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(91, "mol-analytic");
  for (std::int64_t n = 2; n <= 8; ++n) {
    const Point x = sample_point(sys, mu, rng, 256);
    const double eps = 0.25;
    CylinderSearchOptions mopt;
    mopt.bracket_tol = 1e-3 * std::ldexp(1.0, int(-n));
    const auto g = mollified_mass_bracket(sys, open_ball(x, n, eps), mu, mopt);
    const auto m1 = ball_mass_bracket(sys, open_ball(x, n, eps), mu);
    const auto m2 = ball_mass_bracket(sys, open_ball(x, n, 2 * eps), mu);
    CHECK(m1.lower <= g.upper + 1e-12);
    CHECK(g.lower <= m2.upper + 1e-12);
    CHECK(g.width() <= 0.01 * std::ldexp(1.0, int(-n)));
  }
}

TEST_CASE("window too short propagates from analytic masses") {
  const auto sys = make_shift(2, Sided::One);
  // uniform measures never consult the center, so use a skewed one
  const auto mu = make_bernoulli({0.25, 0.75});
  const Point x(make_window_point({0, 1, 0, 1}, 0));
  CHECK_THROWS_AS(ball_mass(sys, open_ball(x, 3, 0.25), mu), WindowTooShortError);
}

TEST_CASE("mollified mass is (1/eps)-lipschitz in the center") {
  // |g(x) - g(x')| <= d_n(x,x') / eps: the joint-continuity witness
  const auto sys = make_doubling();
  Rng rng = substream(92, "continuity");
  for (int t = 0; t < 200; ++t) {
    std::vector<Point> pts;
    for (int i = 0; i < 8; ++i) pts.emplace_back(CirclePoint::fixed(rng.bits()));
    const auto mu = make_atomic(sys, pts, std::vector<double>(8, 0.125), false);
    const Point x(CirclePoint::fixed(rng.bits()));
    const Point xp(CirclePoint::fixed(x.circle().num + rng.below(1ULL << 52)));
    const double eps = 0.05 + 0.3 * rng.uniform();
    const auto n = static_cast<std::int64_t>(1 + rng.index(6));
    const double g1 = mollified_mass(sys, open_ball(x, n, eps), mu);
    const double g2 = mollified_mass(sys, open_ball(xp, n, eps), mu);
    CHECK(std::abs(g1 - g2) <= dn(sys, x, xp, n) / eps + 1e-12);
  }
}

TEST_CASE("closed forward ball for non-invertible systems") {
  const auto sys = make_doubling();
  const Point x(CirclePoint::rational(1, 3));
  const auto mu = periodic_measure(sys, x, 2);
  CHECK(ball_mass(sys, forward_closed_ball(x, 4, 0.05), mu) == 0.5);
  CHECK_THROWS_AS(two_sided_dn(sys, x, x, 2), NotInvertibleError);
}
