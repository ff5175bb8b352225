#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mdev/tail_function.hpp"

using namespace mdev;

TEST_CASE("step and piecewise evaluation is right-continuous") {
  const auto g = TailFunction::step(1.0);
  CHECK(g(0.0) == 1.0);
  CHECK(g(0.999) == 1.0);
  CHECK(g(1.0) == 0.0);  // right-continuous at the jump
  CHECK(g.left_limit(1.0) == 1.0);
  CHECK(g(5.0) == 0.0);
  CHECK(g.upper_support() == 1.0);

  const auto pw = TailFunction::piecewise({1.0, 2.0}, {1.0, 0.5, 0.0});
  CHECK(pw(0.5) == 1.0);
  CHECK(pw(1.0) == 0.5);
  CHECK(pw(1.5) == 0.5);
  CHECK(pw(2.0) == 0.0);
  CHECK(pw.left_limit(2.0) == 0.5);
}

TEST_CASE("piecewise construction rejects bad data") {
  CHECK_THROWS_AS(TailFunction::piecewise({1.0}, {0.5, 0.9}), std::invalid_argument);  // increasing
  CHECK_THROWS_AS(TailFunction::piecewise({2.0, 1.0}, {1.0, 0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(TailFunction::piecewise({1.0}, {1.5, 0.0}), std::invalid_argument);  // > 1
  CHECK_THROWS_AS(TailFunction::step(0.0), std::invalid_argument);
}

TEST_CASE("empirical tails match the counting definition") {
  const double s1[] = {1.0, 1.0, 1.0};
  CHECK(TailFunction::from_samples(s1)(0.5) == 1.0);
  const double s2[] = {1.0, 2.0, 3.0};
  const auto g = TailFunction::from_samples(s2);
  CHECK(g(2.0) == Catch::Approx(1.0 / 3.0));
  CHECK(g(0.0) == 1.0);
  CHECK(g(3.0) == 0.0);
  const double s3[] = {0.0};
  CHECK(TailFunction::from_samples(s3)(0.5) == 0.0);
  CHECK_THROWS_AS(TailFunction::from_samples(std::span<const double>{}), std::invalid_argument);
  CHECK(g.is_empirical());
}

TEST_CASE("analytic kinds are non-increasing and [0,1] on a 1e3 grid") {
  const TailFunction tails[] = {
      TailFunction::pareto(1.8, 1.0),
      TailFunction::exponential(0.7),
      TailFunction::iid_max(TailFunction::pareto(2.5, 0.5), 16),
      TailFunction::piecewise({0.5, 1.5, 2.0}, {1.0, 0.75, 0.25, 0.0}),
      TailFunction::one(),
      TailFunction::zero(),
  };
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back(std::pow(10.0, -6.0 + 12.0 * i / 999.0));
  for (const auto& g : tails) CHECK(tail_is_monotone_01(g, grid));
}

TEST_CASE("iid_max matches the direct formula") {
  const auto base = TailFunction::pareto(2.0, 1.0);
  const auto m = TailFunction::iid_max(base, 8);
  for (double t : {0.5, 1.0, 2.0, 7.3}) {
    const double expect = 1.0 - std::pow(1.0 - base(t), 8);
    CHECK(m(t) == Catch::Approx(expect).epsilon(1e-12));
  }
  CHECK(m.power_envelope().has_value());
  CHECK(m.power_envelope()->A == Catch::Approx(8.0));
}

TEST_CASE("pareto moments in closed form") {
  const auto g = TailFunction::pareto(1.8, 1.0);
  CHECK(g.moment(1.5) == Catch::Approx(6.0).epsilon(1e-12));  // alpha/(alpha-p)
  CHECK_THROWS_AS(g.moment(1.8), std::domain_error);
  CHECK_THROWS_AS(TailFunction::pareto(1.5, 1.0).moment(1.5), std::domain_error);

  // E[Z^p 1{Z >= theta}] = theta^{p-alpha} alpha/(alpha-p) for theta >= scale
  const double theta = std::exp2(10.0 / 3.0);
  CHECK(g.moment_above(1.5, theta) == Catch::Approx(3.0).epsilon(1e-12));
  // below + above = full moment when both converge
  CHECK(g.moment_below(1.5, theta) + g.moment_above(1.5, theta) ==
        Catch::Approx(6.0).epsilon(1e-12));
  // truncated q-moment stays finite even though the full one diverges
  CHECK(g.moment_below(3.0, theta) == Catch::Approx(22.5).epsilon(1e-12));
}

TEST_CASE("step and exponential moments") {
  CHECK(TailFunction::step(2.0).moment(2.0) == Catch::Approx(4.0));
  CHECK(TailFunction::exponential(2.0).moment(1.0) == Catch::Approx(0.5).epsilon(1e-12));
  // E[Z^2] = 2/rate^2 for exponential
  CHECK(TailFunction::exponential(0.5).moment(2.0) == Catch::Approx(8.0).epsilon(1e-10));
  CHECK_THROWS_AS(TailFunction::one().moment(1.0), std::domain_error);
}
