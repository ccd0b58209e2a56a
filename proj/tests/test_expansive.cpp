#include <catch2/catch_amalgamated.hpp>

#include "ergokit/expansive.hpp"
#include "oracles.hpp"

using namespace ergokit;

TEST_CASE("gamma set mass basics") {
  const auto sys = make_shift(2, Sided::Two);
  // delta at a fixed point: mass 1 at every scale
  const auto dfix = periodize(sys, {0});
  for (std::int64_t n = 0; n <= 6; ++n)
    CHECK(gamma_set_mass(sys, dfix, dfix.atoms[0], 0.2, n) == 1.0);

  // whole space at large delta
  const auto mu = periodize(sys, {0, 1, 1, 0, 1});
  CHECK(gamma_set_mass(sys, mu, mu.atoms[0], 1.6, 3) == Catch::Approx(1.0).margin(1e-12));

  // monotone: non-increasing in n, non-decreasing in delta
  Rng rng = substream(61, "gamma-mono");
  for (int t = 0; t < 30; ++t) {
    const auto wlen = 2 + rng.index(8);
    std::vector<std::uint8_t> w(wlen);
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(2));
    const auto nu = periodize(sys, w);
    const Point x = nu.atoms[rng.index(nu.size())];
    const double delta = 0.05 + 0.4 * rng.uniform();
    double prev = 1.0;
    for (std::int64_t n = 0; n <= 8; ++n) {
      const double m = gamma_set_mass(sys, nu, x, delta, n);
      CHECK(m <= prev);
      prev = m;
    }
    CHECK(gamma_set_mass(sys, nu, x, delta, 4) <= gamma_set_mass(sys, nu, x, 1.4 * delta, 4));
  }
}

TEST_CASE("eta is monotone in s and theta sandwiches it, exact on atomic") {
  const auto sys = make_shift(2, Sided::Two);
  Rng rng = substream(62, "eta");
  for (int t = 0; t < 40; ++t) {
    const auto wlen = 2 + rng.index(8);
    std::vector<std::uint8_t> w(wlen);
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(2));
    const auto nu = periodize(sys, w);
    const Point x = nu.atoms[rng.index(nu.size())];
    const double delta = 0.05 + 0.3 * rng.uniform();
    // monotone in s
    double prev = -1.0;
    for (std::int64_t s = 0; s <= 5; ++s) {
      const double e = eta_lower(sys, nu, x, delta, s, 8);
      CHECK(e >= prev);
      prev = e;
    }
    // sandwich: eta(delta) <= theta(delta) <= eta(2 delta), same tails
    const double e1 = eta_lower(sys, nu, x, delta, 2, 8);
    const double th = theta_lower(sys, nu, x, delta, 2, 8);
    const double e2 = eta_lower(sys, nu, x, 2 * delta, 2, 8);
    CHECK(e1 <= th);
    CHECK(th <= e2);
  }
}

TEST_CASE("bernoulli two-sided tail masses vanish at delta = 1/4") {
  const auto sys = make_shift(2, Sided::Two);
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(63, "bern-eta");
  const Point x = sample_point(sys, mu, rng, 64);
  const double e10 = eta_lower(sys, mu, x, 0.25, 1, 10);
  CHECK(e10 < 1e-5);
  const double th = theta_lower(sys, mu, x, 0.25, 1, 10);
  CHECK(th < 1e-4);
  CHECK(e10 <= th + 1e-9);
}

TEST_CASE("classification verdicts") {
  const auto sys = make_shift(2, Sided::Two);
  ExpansivityOptions opt;
  opt.n_max = 10;

  // delta at the fixed point: not-expansive at every delta
  const auto dfix = periodize(sys, {0});
  for (const double d : {0.05, 0.25, 0.5}) {
    const auto v = classify_expansive(sys, dfix, dfix.atoms, d, opt);
    CHECK(v.verdict == ExpansivityClass::NotExpansive);
  }

  // Bernoulli(1/2) at delta = 1/4: expansive
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(64, "classify");
  std::vector<Point> sample;
  for (int i = 0; i < 40; ++i) sample.push_back(sample_point(sys, mu, rng, 64));
  const auto v = classify_expansive(sys, mu, sample, 0.25, opt);
  CHECK(v.verdict == ExpansivityClass::Expansive);
  CHECK(v.mass_quantile < 1e-4);

  // periodic measure below its separation: masses pinned at 1/k
  const auto per = periodize(sys, {0, 1, 1, 0, 1});
  double sep = 1.0;
  for (std::size_t i = 0; i < per.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) sep = std::min(sep, sys.metric(per.atoms[i], per.atoms[j]));
  const auto pv = classify_expansive(sys, per, per.atoms, 0.5 * sep, opt);
  CHECK(pv.verdict == ExpansivityClass::NotExpansive);
  for (double m : pv.per_point_eta) CHECK(m == Catch::Approx(0.2).margin(1e-12));
}

TEST_CASE("positively expansive variant covers the doubling map") {
  const auto sys = make_doubling();
  const auto mu = periodic_measure(sys, Point(CirclePoint::rational(1, 3)), 2);
  // forward closed balls shrink onto the atom below separation
  const double m = gamma_set_mass(sys, mu, mu.atoms[0], 0.05, 6);
  CHECK(m == 0.5);
  ExpansivityOptions opt;
  opt.n_max = 8;
  const auto v = classify_expansive(sys, mu, mu.atoms, 0.05, opt);
  CHECK(v.verdict == ExpansivityClass::NotExpansive);
}
