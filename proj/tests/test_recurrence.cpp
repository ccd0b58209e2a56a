#include <catch2/catch_amalgamated.hpp>

#include "ergokit/recurrence.hpp"
#include "oracles.hpp"

using namespace ergokit;

TEST_CASE("return and waiting time basics") {
  const auto sys = make_doubling();
  const Point third(CirclePoint::rational(1, 3));
  // period-2 point, radius below orbit separation
  CHECK(return_time(sys, third, 0.05, 100) == 2);
  // fixed point returns immediately
  CHECK(return_time(sys, Point(CirclePoint::rational(0, 1)), 0.1, 10) == 1);
  // y = fx found at the first step
  const Point x(CirclePoint::rational(7, 31));
  CHECK(waiting_time(sys, x, sys.apply(x), 0.01, 10) == 1);
  // disjoint target: not found
  const auto mu = periodic_measure(sys, third, 2);
  CHECK(waiting_time(sys, third, Point(CirclePoint::rational(1, 10)), 0.01, 1000) == kNotFound);
}

TEST_CASE("return time by exhaustive scan on the doubling map") {
  const auto sys = make_doubling();
  Rng rng = substream(21, "scan");
  for (int t = 0; t < 20; ++t) {
    SamplingOptions so;
    so.long_orbit = true;
    const Point x = random_point(sys, rng, so);
    const double r = 1.0 / 256.0;
    const auto got = return_time(sys, x, r, 100000);
    // oracle: direct orbit scan
    Point p = x;
    std::uint64_t want = kNotFound;
    for (std::uint64_t k = 1; k <= 100000; ++k) {
      p = sys.apply(p);
      if (sys.metric(p, x) < r) {
        want = k;
        break;
      }
    }
    CHECK(got == want);
    CHECK(got != kNotFound);
  }
}

TEST_CASE("waiting time on the shift: first run of zeros") {
  const auto sys = make_shift(2, Sided::One);
  const auto mu = make_bernoulli({0.5, 0.5});
  Rng rng = substream(22, "zeros");
  for (int t = 0; t < 10; ++t) {
    const auto w = sample_word(mu, rng, 3000);
    const Point x(make_window_point(w, 0));
    const Point target(make_periodic_point({0}));
    // r resolving 6 coordinates: membership iff the next 6 symbols vanish
    const double r = 1.0 / 64.0;
    const auto got = waiting_time(sys, x, target, r, 2000);
    // oracle: direct substring scan for a run of >= 6 zeros
    std::uint64_t want = kNotFound;
    for (std::size_t k = 1; k + 6 <= w.size() && k <= 2000; ++k) {
      bool all = true;
      for (std::size_t i = 0; i < 6; ++i) all = all && (w[k + i] == 0);
      if (all) {
        want = k;
        break;
      }
    }
    CHECK(got == want);
  }
}

TEST_CASE("times are non-decreasing as radii shrink") {
  const auto sys = make_doubling();
  Rng rng = substream(23, "mono");
  RecurrenceConfig cfg;
  cfg.ladder.rungs = 12;
  for (int t = 0; t < 25; ++t) {
    SamplingOptions so;
    so.long_orbit = true;
    const auto prof = recurrence_rates(sys, random_point(sys, rng, so), cfg);
    for (std::size_t i = 1; i < prof.times.size(); ++i) {
      if (prof.times[i] == kNotFound) break;
      CHECK(prof.times[i] >= prof.times[i - 1]);
    }
    CHECK(prof.lower_rate <= prof.upper_rate);
  }
}

TEST_CASE("periodic rates vanish exactly below the separation") {
  const auto sys = make_doubling();
  RecurrenceConfig cfg;
  cfg.ladder.r0 = 0.05;  // below the separation 1/3 of the period-2 orbit
  cfg.ladder.rungs = 8;
  const auto prof = recurrence_rates(sys, Point(CirclePoint::rational(1, 3)), cfg);
  CHECK(prof.lower_rate == 0.0);
  CHECK(prof.upper_rate == 0.0);

  // waiting rate with the target on the orbit
  const auto wprof = waiting_rates(sys, Point(CirclePoint::rational(1, 3)),
                                   Point(CirclePoint::rational(2, 3)), cfg);
  CHECK(wprof.upper_rate == 0.0);

  // fixed point
  const auto fprof = recurrence_rates(sys, Point(CirclePoint::rational(0, 1)), cfg);
  CHECK(fprof.upper_rate == 0.0);
}

TEST_CASE("recurrence rates are deterministic") {
  const auto sys = make_doubling();
  const Point x(CirclePoint::rational(123456789, kDoublingModulus));
  RecurrenceConfig cfg;
  const auto a = recurrence_rates(sys, x, cfg);
  const auto b = recurrence_rates(sys, x, cfg);
  CHECK(a.upper_rate == b.upper_rate);
  CHECK(a.times == b.times);
}

TEST_CASE("lebesgue-random doubling rates are near 1") {
  const auto sys = make_doubling();
  Rng rng = substream(24, "rate1");
  RecurrenceConfig cfg;
  cfg.ladder.rungs = 16;
  cfg.fit_fraction = 0.3;
  int within = 0;
  const int N = 40;
  for (int t = 0; t < N; ++t) {
    SamplingOptions so;
    so.long_orbit = true;
    const auto prof = recurrence_rates(sys, random_point(sys, rng, so), cfg);
    if (std::abs(prof.upper_rate - 1.0) <= 0.15) ++within;
  }
  CHECK(within >= N * 3 / 4);
}

TEST_CASE("unreliable profile when the horizon is too short") {
  const auto sys = make_doubling();
  RecurrenceConfig cfg;
  cfg.horizon = 1;
  cfg.ladder.rungs = 6;
  cfg.ladder.r0 = 1e-6;
  // a point far from the fixed point: one step cannot return
  const Point x(CirclePoint::rational(kDoublingModulus / 3, kDoublingModulus));
  const auto prof = recurrence_rates(sys, x, cfg);
  CHECK(prof.unreliable);
  CHECK(std::isnan(prof.upper_rate));
}

TEST_CASE("varandas bounds on the doubling map") {
  const auto sys = make_doubling();
  Rng rng = substream(25, "varandas");
  SamplingOptions so;
  so.long_orbit = true;
  std::vector<Point> pts;
  for (int i = 0; i < 80; ++i) pts.push_back(random_point(sys, rng, so));
  const auto mu = make_atomic(sys, pts, std::vector<double>(pts.size(), 1.0 / pts.size()), false);

  ExpandingBoundOptions opt;
  opt.recurrence.ladder.rungs = 16;
  opt.recurrence.fit_fraction = 0.3;
  opt.dimension.ladder.r0 = 0.0625;
  opt.dimension.ladder.rungs = 4;
  const auto rep = varandas_check(sys, mu, pts, std::log(2.0), opt);
  CHECK(rep.bound == Catch::Approx(1.0));
  CHECK(rep.return_fraction() >= 0.95);
  CHECK(rep.waiting_fraction() >= 0.95);

  auto no_lambda = make_tent();
  CHECK_THROWS_AS(varandas_check(no_lambda, mu, pts, 1.0, opt), NoExpandingConstantError);
}

TEST_CASE("periodic measures pass the bound check trivially") {
  const auto sys = make_doubling();
  const auto mu = periodic_measure(sys, Point(CirclePoint::rational(1, 5)), 4);
  ExpandingBoundOptions opt;
  opt.recurrence.ladder.r0 = 0.01;
  opt.recurrence.ladder.rungs = 6;
  opt.dimension.ladder.r0 = 0.01;
  opt.dimension.ladder.rungs = 4;
  const auto rep = varandas_check(sys, mu, mu.atoms, 0.0, opt);
  CHECK(rep.return_fraction() == 1.0);
  CHECK(rep.waiting_fraction() == 1.0);
  CHECK(rep.dimension_surrogate == 0.0);
}
