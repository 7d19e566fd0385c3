#include <doctest.h>

#include <cmath>
#include <map>

#include "willslab/numeric.hpp"
#include "willslab/rng.hpp"

using namespace wills;

TEST_CASE("philox known-answer vectors") {
  // Random123 reference vectors for philox4x32-10.
  const auto zeros = Philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(zeros[0] == 0x6627e8d5u);
  CHECK(zeros[1] == 0xe169c58du);
  CHECK(zeros[2] == 0xbc57ac4cu);
  CHECK(zeros[3] == 0x9b00dbd8u);

  const auto ones = Philox::block(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("streams are reproducible and distinct") {
  Philox a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool same_ab = true, same_ac = true, same_ad = true;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    same_ab &= va == b.next_u64();
    same_ac &= va == c.next_u64();
    same_ad &= va == d.next_u64();
  }
  CHECK(same_ab);
  CHECK_FALSE(same_ac);
  CHECK_FALSE(same_ad);
}

TEST_CASE("uniform moments") {
  Philox rng(7, 0);
  RunningMoments m;
  const int n = 200000;
  for (int i = 0; i < n; ++i) m.add(rng.uniform());
  CHECK(m.mean() == doctest::Approx(0.5).epsilon(0.005));
  CHECK(m.variance() == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("gaussian moments") {
  Philox rng(11, 0);
  RunningMoments m;
  const int n = 400000;
  for (int i = 0; i < n; ++i) m.add(rng.gaussian());
  CHECK(std::abs(m.mean()) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(m.variance() == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(m.fourth_central_moment() - 3.0) < 0.1);
}

TEST_CASE("gamma moments at half-integer shapes") {
  for (double shape : {0.5, 1.0, 2.5, 8.0}) {
    Philox rng(13, static_cast<std::uint64_t>(shape * 2));
    RunningMoments m;
    const int n = 400000;
    for (int i = 0; i < n; ++i) m.add(rng.gamma(shape));
    const double se_mean = std::sqrt(shape / n);
    CHECK(std::abs(m.mean() - shape) < 5.0 * se_mean);
    CHECK(m.variance() == doctest::Approx(shape).epsilon(0.03));
  }
  Philox rng(13, 99);
  CHECK(rng.gamma(0.0) == 0.0);
}

TEST_CASE("alias table reproduces the law") {
  const std::vector<double> weights{1.0, 3.0, 0.0, 6.0};
  AliasTable table(weights);
  Philox rng(5, 1);
  std::map<std::size_t, std::size_t> counts;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) ++counts[table.sample(rng)];
  CHECK(counts[2] == 0);
  for (std::size_t k : {0u, 1u, 3u}) {
    const double p = weights[k] / 10.0;
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(static_cast<double>(counts[k]) / n - p) < 5.0 * se);
  }
}

TEST_CASE("running moments merge matches a single pass") {
  Philox rng(3, 0);
  RunningMoments whole, left, right;
  for (int i = 0; i < 5000; ++i) {
    const double x = rng.gamma(1.5);
    whole.add(x);
    (i % 2 == 0 ? left : right).add(x);
  }
  left.merge(right);
  CHECK(left.mean() == doctest::Approx(whole.mean()).epsilon(1e-12));
  CHECK(left.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));
  CHECK(left.fourth_central_moment() ==
        doctest::Approx(whole.fourth_central_moment()).epsilon(1e-10));
}
