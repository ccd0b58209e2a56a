#include <catch2/catch_amalgamated.hpp>

#include "ergokit/entropy.hpp"
#include "oracles.hpp"

using namespace ergokit;

namespace {
ScaleGrid default_grid() {
  ScaleGrid g;
  g.epsilons = {0.5, 0.25};
  g.s = 4;
  g.n_max = 14;
  return g;
}
}  // namespace

TEST_CASE("beta_lower basics") {
  const auto sys = make_doubling();
  const auto d0 = periodic_measure(sys, Point(CirclePoint::rational(0, 1)), 1);
  // fixed point: mass 1 at every scale
  for (double eps : {0.3, 0.1, 0.01})
    CHECK(beta_lower(sys, d0, d0.atoms[0], eps, 4, 14) == 0.0);

  // periodic of period k: beta <= log k / (s+1)
  const auto shift = make_shift(2, Sided::One);
  const auto mu = periodize(shift, {0, 1, 1, 0, 1});
  CHECK(beta_lower(shift, mu, mu.atoms[0], 0.1, 4, 14) <= std::log(5.0) / 5.0 + 1e-12);
}

TEST_CASE("beta_lower matches the cylinder oracle on Bernoulli(1/2)") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(301, "beta");
  const Point x = sample_point(sys, mu, rng, 64);
  // masses are exactly 2^-n at eps = 1/2: the ratio is log 2 at every n
  CHECK(beta_lower(sys, mu, x, 0.5, 4, 14) == Catch::Approx(std::log(2.0)).margin(0.02));
}

TEST_CASE("beta monotone in s and eps, exact") {
  const auto sys = make_shift(2, Sided::One);
  Rng rng = substream(302, "beta-mono");
  for (int t = 0; t < 40; ++t) {
    const auto wlen = 3 + rng.index(9);
    std::vector<std::uint8_t> w(wlen);
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(2));
    const auto mu = periodize(sys, w);
    const Point x = mu.atoms[rng.index(mu.size())];
    const double eps = 0.02 + 0.4 * rng.uniform();
    const MeasureView view(mu);
    double prev = -std::numeric_limits<double>::infinity();
    for (std::int64_t s = 2; s <= 8; ++s) {
      const double b = beta_lower(sys, view, x, eps, s, 12);
      CHECK(b >= prev);
      prev = b;
    }
    CHECK(beta_lower(sys, view, x, 2 * eps, 4, 12) <= beta_lower(sys, view, x, eps, 4, 12));
  }
}

TEST_CASE("beta/gamma sandwich with aligned tails, exact on atomic") {
  // pointwise masses give beta(2eps, s) <= gamma(eps, s+1) <= beta(eps, s)
  // over the common tail {s+1..n_max}
  std::vector<SystemHandle> zoo = {make_doubling(), make_shift(2, Sided::One)};
  Rng rng = substream(303, "sandwich");
  for (const auto& sys : zoo) {
    SamplingOptions sopt;
    sopt.periodic_word = sys.is_shift() ? 17 : 0;
    for (int t = 0; t < 60; ++t) {
      const std::size_t na = 1 + rng.index(10);
      std::vector<Point> pts;
      std::vector<double> w;
      double sw = 0;
      for (std::size_t i = 0; i < na; ++i) {
        pts.push_back(random_point(sys, rng, sopt));
        w.push_back(0.1 + rng.uniform());
        sw += w.back();
      }
      for (auto& v : w) v /= sw;
      const auto mu = make_atomic(sys, pts, w, false);
      const MeasureView view(mu);
      const Point x = mu.atoms[rng.index(mu.size())];
      const double eps = 0.02 + 0.3 * rng.uniform();
      const std::int64_t s = 2 + static_cast<std::int64_t>(rng.index(4));
      const double b1 = beta_lower(sys, view, x, eps, s, 12);
      const double b2 = beta_lower(sys, view, x, 2 * eps, s, 12);
      const double g = gamma_lower(sys, view, x, eps, s + 1, 12);
      CHECK(b2 <= g);
      CHECK(g <= b1);
    }
  }
}

TEST_CASE("gamma_lower on Bernoulli(1/2)") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(304, "gamma");
  const Point x = sample_point(sys, mu, rng, 64);
  CHECK(gamma_lower(sys, mu, x, 0.25, 4, 10) ==
        Catch::Approx(std::log(2.0)).margin(0.05));
}

TEST_CASE("local entropy: periodic measures vanish exactly past separation") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = periodize(sys, {0, 1, 1});
  ScaleGrid g = default_grid();
  g.s = 4;  // beyond the period 3
  const auto rep = local_entropy(sys, mu, mu.atoms[0], g);
  CHECK(rep.value == 0.0);
  CHECK(rep.converged);
}

TEST_CASE("local entropy oracle: Bernoulli(1/2)") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(305, "local");
  const Point x = sample_point(sys, mu, rng, 64);
  const auto rep = local_entropy(sys, mu, x, default_grid());
  CHECK(rep.converged);
  CHECK(rep.value == Catch::Approx(std::log(2.0)).epsilon(0.05));
}

TEST_CASE("essential local entropy oracles") {
  const auto sys = make_shift(2, Sided::One);
  Rng rng = substream(306, "essential");
  const auto grid = default_grid();

  const auto fair = make_bernoulli({0.5, 0.5});
  std::vector<Point> sample;
  for (int i = 0; i < 64; ++i) sample.push_back(sample_point(sys, fair, rng, 64));
  auto rep = essential_local_entropy(sys, fair, sample, grid);
  CHECK(rep.value == Catch::Approx(oracle::entropy_bernoulli({0.5, 0.5})).epsilon(0.05));

  const auto skew = make_bernoulli({0.25, 0.75});
  sample.clear();
  for (int i = 0; i < 64; ++i) sample.push_back(sample_point(sys, skew, rng, 64));
  rep = essential_local_entropy(sys, skew, sample, grid);
  CHECK(rep.value ==
        Catch::Approx(oracle::entropy_bernoulli({0.25, 0.75})).epsilon(0.05));

  const auto markov = make_markov({{0.5, 0.5}, {1.0, 0.0}}, {2.0 / 3.0, 1.0 / 3.0});
  sample.clear();
  for (int i = 0; i < 64; ++i) sample.push_back(sample_point(sys, markov, rng, 64));
  rep = essential_local_entropy(sys, markov, sample, grid);
  CHECK(rep.value == Catch::Approx(oracle::entropy_markov({{0.5, 0.5}, {1.0, 0.0}},
                                                          {2.0 / 3.0, 1.0 / 3.0}))
                         .epsilon(0.07));
}

TEST_CASE("essential local entropy of periodic measures is exactly zero") {
  const auto sys = make_shift(2, Sided::One);
  Rng rng = substream(307, "essential-periodic");
  for (int t = 0; t < 10; ++t) {
    const auto wlen = 2 + rng.index(7);
    std::vector<std::uint8_t> w(wlen);
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(2));
    const auto mu = periodize(sys, w);
    ScaleGrid g = default_grid();
    g.s = static_cast<std::int64_t>(mu.size());  // past the separation scale
    g.n_max = g.s + 10;
    const auto rep = essential_local_entropy(sys, mu, mu.atoms, g);
    CHECK(rep.value == 0.0);
  }
}

TEST_CASE("correlation integral basics") {
  const auto sys = make_doubling();
  const auto dx = periodic_measure(sys, Point(CirclePoint::rational(0, 1)), 1);
  CHECK(correlation_integral(sys, dx, 2.0, 0.1, 3) == 1.0);

  // q = 1 on a periodic measure: all masses bounded below, integral of logs
  const auto shift = make_shift(2, Sided::One);
  const auto mu = periodize(shift, {0, 1});
  ScaleGrid g = default_grid();
  g.s = 2;
  const auto spec = correlation_entropy_spectrum(shift, mu, g);
  for (const auto& row : spec) {
    CHECK(row.H_lower == 0.0);
    CHECK(row.H_upper == 0.0);
  }
}

TEST_CASE("renyi-2 oracle on Bernoulli(1/4,3/4)") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.25, 0.75});
  ScaleGrid g;
  g.epsilons = {0.5, 0.25};
  g.s = 3;
  g.n_max = 9;
  g.q_values = {2.0};
  const auto spec = correlation_entropy_spectrum(sys, mu, g);
  const double want = oracle::renyi_entropy_bernoulli({0.25, 0.75}, 2.0);
  CHECK(spec[0].H_lower == Catch::Approx(want).epsilon(0.05));
  CHECK(spec[0].H_upper == Catch::Approx(want).epsilon(0.05));
  CHECK(spec[0].converged);
}

TEST_CASE("uniform Bernoulli spectrum is flat at log k") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.5, 0.5});
  ScaleGrid g;
  g.epsilons = {0.5, 0.25};
  g.s = 3;
  g.n_max = 10;
  g.q_values = {0.5, 1.0, 2.0};
  const auto spec = correlation_entropy_spectrum(sys, mu, g);
  for (const auto& row : spec) {
    CHECK(row.H_lower == Catch::Approx(std::log(2.0)).epsilon(0.05));
    CHECK(row.H_upper == Catch::Approx(std::log(2.0)).epsilon(0.05));
  }
}

TEST_CASE("spectrum brackets the oracle entropy across q") {
  // ergodic Bernoulli: lower spectrum for q < 1 sits above h, upper
  // spectrum for q > 1 below h, within 10% relative
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.25, 0.75});
  const double h = oracle::entropy_bernoulli({0.25, 0.75});
  ScaleGrid g;
  g.epsilons = {0.5, 0.25};
  g.s = 3;
  g.n_max = 10;
  g.q_values = {0.25, 0.5, 0.75, 1.5, 2.0, 3.0};
  for (const auto& row : correlation_entropy_spectrum(sys, mu, g)) {
    CHECK(row.H_upper >= row.H_lower);
    if (row.q < 1.0) CHECK(row.H_lower >= h * 0.9);
    if (row.q > 1.0) CHECK(row.H_upper <= h * 1.1);
  }
}

TEST_CASE("local entropy is f-invariant on invariant atomic measures") {
  const auto sys = make_shift(2, Sided::One);
  Rng rng = substream(310, "finv");
  for (int t = 0; t < 10; ++t) {
    std::vector<std::uint8_t> w(2 + rng.index(8));
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(2));
    const auto mu = periodize(sys, w);
    ScaleGrid g = default_grid();
    g.s = static_cast<std::int64_t>(mu.size());
    g.n_max = g.s + 8;
    const Point x = mu.atoms[rng.index(mu.size())];
    const double at_x = local_entropy(sys, mu, x, g).value;
    const double at_fx = local_entropy(sys, mu, sys.apply(x), g).value;
    CHECK(std::abs(at_x - at_fx) <= g.converge_rtol);
  }
}

TEST_CASE("q-monotonicity of the fixed-scale functional, atomic") {
  const auto sys = make_shift(2, Sided::One);
  Rng rng = substream(308, "qmono");
  const std::vector<double> qs = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  for (int t = 0; t < 15; ++t) {
    const auto wlen = 3 + rng.index(8);
    std::vector<std::uint8_t> w(wlen);
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(2));
    const auto mu = periodize(sys, w);
    const double eps = 0.05 + 0.3 * rng.uniform();
    const auto n = static_cast<std::int64_t>(2 + rng.index(8));
    double prev = std::numeric_limits<double>::infinity();
    for (const double q : qs) {
      const double f = correlation_functional(sys, mu, q, eps, n);
      CHECK(f <= prev + 1e-9);
      prev = f;
    }
  }
}

TEST_CASE("generating set sums") {
  const auto sys = make_shift(2, Sided::One);
  // delta measure: S = W = 1
  const auto shift_delta = periodize(sys, {0});
  const auto one = generating_set_sums(sys, shift_delta, 0.5, 0.1, 4);
  CHECK(one.S == 1.0);
  CHECK(one.W == 1.0);

  // periodic of period k at separating n: S <= k^{1-s}
  const auto mu = periodize(sys, {0, 1, 1, 0, 1});
  const double s = 0.5;
  const auto res = generating_set_sums(sys, mu, s, 0.1, 12);
  CHECK(res.S <= std::pow(5.0, 1.0 - s) + 1e-12);

  // chain I(s,2r,n) <= S(s,r,n) <= W(s,r,n) <= S over the same cover at 2r
  Rng rng = substream(309, "chain");
  for (int t = 0; t < 40; ++t) {
    const auto wlen = 2 + rng.index(9);
    std::vector<std::uint8_t> w(wlen);
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(2));
    const auto nu = periodize(sys, w);
    const double r = 0.05 + 0.2 * rng.uniform();
    const auto n = static_cast<std::int64_t>(2 + rng.index(6));
    const double I = correlation_integral(sys, nu, s, 2 * r, n);
    const auto cov = generating_set_sums(sys, nu, s, r, n);
    double S2r = 0.0;
    for (const auto c : cov.cover)
      S2r += std::pow(ball_mass(sys, open_ball(nu.atoms[c], n, 2 * r), nu), s);
    CHECK(I <= cov.S + 1e-9);
    CHECK(cov.S <= cov.W + 1e-12);
    CHECK(cov.W <= S2r + 1e-12);
  }
}

TEST_CASE("topological entropy estimates") {
  TopologicalEntropyOptions opt;
  opt.n_min = 3;
  opt.n_max = 10;
  const auto shift = topological_entropy_estimate(make_shift(2, Sided::One), opt);
  CHECK(shift.value == Catch::Approx(std::log(2.0)).epsilon(0.05));

  const auto db = topological_entropy_estimate(make_doubling(), opt);
  CHECK(db.value == Catch::Approx(std::log(2.0)).epsilon(0.10));

  const auto rot = topological_entropy_estimate(make_rotation(), opt);
  CHECK(rot.value <= 0.05);
}
