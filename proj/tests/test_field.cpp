#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mdev/field.hpp"

using namespace mdev;

TEST_CASE("product field samples have the rank-one sign structure") {
  const auto field = FieldModel::product_sign(2);
  const std::int64_t n[] = {2, 2};
  std::vector<double> buf;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    RngStream rng(17, trial);
    sample_field(field, n, rng, buf);
    REQUIRE(buf.size() == 4);
    for (double v : buf) CHECK((v == 1.0 || v == -1.0));
    // entry(i,j) = a_i b_j forces e11 e22 == e12 e21
    CHECK(buf[0] * buf[3] == buf[1] * buf[2]);
  }
}

TEST_CASE("single-site box sample") {
  const auto field = FieldModel::product_sign(2);
  const std::int64_t n[] = {1, 1};
  std::vector<double> buf;
  RngStream rng(3, 5);
  sample_field(field, n, rng, buf);
  REQUIRE(buf.size() == 1);
  CHECK((buf[0] == 1.0 || buf[0] == -1.0));
}

TEST_CASE("d=3 product identity: all eight entries multiply to +1") {
  // every axis variable appears an even number of times in the product
  auto spec = enumeration::product_field({2, 2, 2});
  enumeration::Enumerator en(spec);
  const std::int64_t sites[][3] = {{1, 1, 1}, {1, 1, 2}, {1, 2, 1}, {1, 2, 2},
                                   {2, 1, 1}, {2, 1, 2}, {2, 2, 1}, {2, 2, 2}};
  auto prods = en.tabulate([&](std::span<const int> bits) {
    double p = 1.0;
    for (const auto& s : sites) p *= spec.increment(bits, std::span<const std::int64_t>(s, 3));
    return p;
  });
  for (double v : prods) CHECK(v == 1.0);
}

TEST_CASE("prefix sums produce box partial sums") {
  std::vector<double> data = {1, 2, 3, 4};  // 2x2, last axis fastest
  const std::int64_t n[] = {2, 2};
  prefix_sums_inplace(data, n);
  CHECK(data[0] == 1.0);   // S_{1,1}
  CHECK(data[1] == 3.0);   // S_{1,2}
  CHECK(data[2] == 4.0);   // S_{2,1}
  CHECK(data[3] == 10.0);  // S_{2,2}
}

TEST_CASE("orthomartingale properties hold for product sign fields") {
  const std::int64_t n22[] = {2, 2};
  CHECK(verify_orthomartingale(FieldModel::product_sign(2), n22));
  const std::int64_t n33[] = {3, 3};
  CHECK(verify_orthomartingale(FieldModel::product_sign(2), n33));
  const std::int64_t n222[] = {2, 2, 2};
  CHECK(verify_orthomartingale(FieldModel::product_sign(3), n222));
  // d = 1 degenerates to the martingale-difference check
  const std::int64_t n3[] = {3};
  CHECK(verify_orthomartingale(FieldModel::product_sign(1), n3));
}

TEST_CASE("absolute-value increments break the martingale property") {
  const auto res =
      enumeration::check_orthomartingale_properties(enumeration::abs_product_field({2, 2}));
  CHECK_FALSE(res.martingale_in_last_axis);  // E|m| = 1, not 0
  CHECK_FALSE(res.all());
}

TEST_CASE("enumeration guards") {
  const auto field = FieldModel::product_sign(2);
  const std::int64_t big[] = {30, 30};
  CHECK_THROWS_AS(verify_orthomartingale(field, big), ResourceError);
  FieldModel heavy;
  heavy.axes = {AxisDesc{AxisKind::pareto_sym, 2.0, 1.0}, AxisDesc{}};
  const std::int64_t n22[] = {2, 2};
  CHECK_THROWS_AS(verify_orthomartingale(heavy, n22), UnsupportedError);
}

TEST_CASE("field tails") {
  CHECK(field_increment_tail(FieldModel::product_sign(2))(0.9) == 1.0);
  CHECK(field_increment_tail(FieldModel::product_sign(2))(1.0) == 0.0);

  FieldModel one_heavy;
  one_heavy.axes = {AxisDesc{AxisKind::pareto_sym, 2.0, 1.0}, AxisDesc{}};
  CHECK(field_increment_tail(one_heavy)(3.0) == Catch::Approx(std::pow(3.0, -2.0)));

  FieldModel two_heavy;
  two_heavy.axes = {AxisDesc{AxisKind::pareto_sym, 2.0, 1.0}, AxisDesc{AxisKind::pareto_sym, 2.0, 1.0}};
  CHECK_THROWS_AS(field_increment_tail(two_heavy), UnsupportedError);

  // conditional p-th moment given the past along axis j
  const auto gs = field_condmom_tail(FieldModel::product_sign(2), 2.0, 1);
  CHECK(gs(0.99) == 1.0);
  CHECK(gs(1.0) == 0.0);
  // heavy axis j: the conditional moment is the constant axis moment
  const auto gj = field_condmom_tail(one_heavy, 1.5, 1);  // E|eps|^1.5 = 2/(2-1.5) = 4
  CHECK(gj(3.999) == 1.0);
  CHECK(gj(4.0) == 0.0);
  // heavy axis elsewhere: tail of |eps|^p, a pareto with shape alpha/p
  const auto go = field_condmom_tail(one_heavy, 1.5, 2);
  CHECK(go(8.0) == Catch::Approx(std::pow(8.0, -2.0 / 1.5)).epsilon(1e-12));
}

TEST_CASE("sample_field budget and dimension checks") {
  const auto field = FieldModel::product_sign(2);
  std::vector<double> buf;
  RngStream rng(1, 1);
  const std::int64_t n[] = {4096, 4096};
  CHECK_THROWS_AS(sample_field(field, n, rng, buf, 1 << 10), ResourceError);
  const std::int64_t bad[] = {4};
  CHECK_THROWS_AS(sample_field(field, bad, rng, buf), std::invalid_argument);
}
