#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mdev/processes.hpp"
#include "mdev/quadrature.hpp"

using namespace mdev;

TEST_CASE("sample_path support checks") {
  std::vector<double> path;
  RngStream rng(11, 0);
  sample_path(MartingaleModel::sign(2.0), 3, rng, path);
  REQUIRE(path.size() == 3);
  for (double v : path) CHECK((v == 1.0 || v == -1.0));

  RngStream rng2(11, 1);
  sample_path(MartingaleModel::vol_switch(0.0, 0.0, 2.0), 5, rng2, path);
  for (double v : path) CHECK(v == 0.0);

  RngStream rng3(11, 2);
  CHECK_THROWS_AS(sample_path(MartingaleModel::sign(2.0), 0, rng3, path), std::invalid_argument);
}

TEST_CASE("pareto sampling reproduces the analytic tail") {
  const auto model = MartingaleModel::pareto_sym(1.5, 1.0, 1.2);
  const std::uint64_t N = 100000;
  std::vector<double> path;
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < N; ++i) {
    RngStream rng(77, i);
    sample_path(model, 1, rng, path);
    if (std::fabs(path[0]) > 2.0) ++count;
  }
  const double expect = std::exp2(-1.5);  // P{|X|>2} = 2^{-1.5}
  const double se = std::sqrt(expect * (1.0 - expect) / static_cast<double>(N));
  CHECK(std::fabs(count / double(N) - expect) < 3.0 * se);
}

TEST_CASE("sphere increments are unit vectors with mean zero") {
  const auto model = MartingaleModel::uniform_sphere(2, 2.0);
  std::vector<double> path;
  double sx = 0.0, sy = 0.0;
  const std::uint64_t N = 200000;
  for (std::uint64_t i = 0; i < N; ++i) {
    RngStream rng(5, i);
    sample_path(model, 1, rng, path);
    CHECK(std::fabs(path[0] * path[0] + path[1] * path[1] - 1.0) < 1e-12);
    sx += path[0];
    sy += path[1];
  }
  // coordinates have variance 1/2
  const double se = std::sqrt(0.5 / static_cast<double>(N));
  CHECK(std::fabs(sx / double(N)) < 4.0 * se);
  CHECK(std::fabs(sy / double(N)) < 4.0 * se);
}

TEST_CASE("iid sample means stay within 4 standard errors") {
  for (const auto& model : {MartingaleModel::sign(2.0), MartingaleModel::pareto_sym(1.8, 1.0, 1.5)}) {
    const std::uint64_t N = 1000000;
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> path;
    for (std::uint64_t i = 0; i < N; ++i) {
      RngStream rng(31, i);
      sample_path(model, 1, rng, path);
      sum += path[0];
      sum2 += path[0] * path[0];
    }
    const double mean = sum / double(N);
    const double sd = std::sqrt(sum2 / double(N) - mean * mean);
    CHECK(std::fabs(mean) < 4.0 * sd / std::sqrt(double(N)));
  }
}

TEST_CASE("strict stationarity: shifted windows share their marginal moments") {
  const auto model = MartingaleModel::vol_switch(0.5, 1.5, 2.0);
  const std::uint64_t N = 200000;
  std::vector<double> path;
  double m_a = 0.0, m2_a = 0.0, m_b = 0.0, m2_b = 0.0;
  for (std::uint64_t i = 0; i < N; ++i) {
    RngStream rng(13, i);
    sample_path(model, 6, rng, path);
    m_a += path[1];
    m2_a += path[1] * path[1];
    m_b += path[4];
    m2_b += path[4] * path[4];
  }
  const double v = 0.5 * (0.25 + 2.25);  // E X^2 = E sigma^2
  const double se2 = std::sqrt(2.0) * v / std::sqrt(double(N));  // crude scale
  CHECK(std::fabs(m_a / double(N)) < 0.01);
  CHECK(std::fabs(m_b / double(N)) < 0.01);
  CHECK(std::fabs(m2_a / double(N) - m2_b / double(N)) < 5.0 * se2);
  CHECK(std::fabs(m2_a / double(N) - v) < 5.0 * se2);
}

TEST_CASE("increment tails per kind") {
  CHECK(increment_tail(MartingaleModel::sign(2.0))(0.99) == 1.0);
  CHECK(increment_tail(MartingaleModel::sign(2.0))(1.0) == 0.0);

  const auto gp = increment_tail(MartingaleModel::pareto_sym(1.8, 1.0, 1.5));
  CHECK(gp(0.5) == 1.0);
  CHECK(gp(2.0) == Catch::Approx(std::pow(2.0, -1.8)).epsilon(1e-14));

  const auto gz = increment_tail(MartingaleModel::vol_switch(0.0, 0.0, 2.0));
  CHECK(gz(0.5) == 0.0);

  CHECK_THROWS_AS(increment_tail(MartingaleModel::vol_switch(0.5, 1.5, 2.0)), UnsupportedError);
}

TEST_CASE("conditional moment tails") {
  const auto gs = conditional_moment_tail(MartingaleModel::sign(2.0), 2.0);
  CHECK(gs(0.5) == 1.0);
  CHECK(gs(1.0) == 0.0);

  // alpha / (alpha - p) = 6 for alpha = 1.8, p = 1.5; cross-checked by the
  // layer-cake integral of P{|X|^p > s}
  const auto model = MartingaleModel::pareto_sym(1.8, 1.0, 1.5);
  const auto gm = conditional_moment_tail(model, 1.5);
  CHECK(gm(5.999) == 1.0);
  CHECK(gm(6.0) == 0.0);
  double numeric = 1.0;  // int_0^1 of P{|X|^1.5 > s} = 1
  double a = 1.0;
  for (int i = 0; i < 400 && a < 1e28; ++i) {
    numeric += integrate_adaptive([](double s) { return std::pow(s, -1.8 / 1.5); }, a, 2 * a).value;
    a *= 2;
  }
  CHECK(numeric == Catch::Approx(6.0).epsilon(1e-4));

  CHECK_THROWS_AS(conditional_moment_tail(MartingaleModel::pareto_sym(1.5, 1.0, 1.5), 1.5),
                  std::domain_error);

  const auto gv = conditional_moment_tail(MartingaleModel::vol_switch(0.5, 1.5, 2.0), 2.0);
  CHECK(gv(0.2) == 1.0);
  CHECK(gv(0.25) == 0.5);  // between lo^2 and hi^2
  CHECK(gv(2.25) == 0.0);
}

TEST_CASE("condsum tail for the switching volatility is a binomial staircase") {
  const auto g = condsum_tail(MartingaleModel::vol_switch(1.0, 2.0, 2.0), 2.0, 3);
  // sum = (3-K)*1 + K*4 with K ~ Binomial(3, 1/2): values 3,6,9,12 w.p. 1/8,3/8,3/8,1/8
  CHECK(g(2.9) == Catch::Approx(1.0));
  CHECK(g(3.0) == Catch::Approx(7.0 / 8.0));
  CHECK(g(6.0) == Catch::Approx(4.0 / 8.0));
  CHECK(g(9.0) == Catch::Approx(1.0 / 8.0));
  CHECK(g(12.0) == Catch::Approx(0.0));

  CHECK(condsum_tail(MartingaleModel::sign(2.0), 2.0, 5)(4.999) == 1.0);
  CHECK(condsum_tail(MartingaleModel::sign(2.0), 2.0, 5)(5.0) == 0.0);
}

TEST_CASE("maxinc tail kinds") {
  CHECK(maxinc_tail(MartingaleModel::sign(2.0), 16)(0.5) == 1.0);
  const auto gm = maxinc_tail(MartingaleModel::pareto_sym(2.0, 1.0, 1.5), 4);
  const double base = std::min(1.0, std::pow(3.0, -2.0));
  CHECK(gm(3.0) == Catch::Approx(1.0 - std::pow(1.0 - base, 4)).epsilon(1e-12));
  CHECK_THROWS_AS(maxinc_tail(MartingaleModel::vol_switch(0.5, 1.5, 2.0), 4), UnsupportedError);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(MartingaleModel::pareto_sym(0.9, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(MartingaleModel::pareto_sym(1.8, -1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(MartingaleModel::sign(2.5), std::invalid_argument);  // p > r
  CHECK_THROWS_AS(MartingaleModel::sign(1.0), std::invalid_argument);  // p <= 1
}
