#include <doctest.h>

#include <cmath>
#include <functional>

#include "willslab/errors.hpp"
#include "willslab/intrinsic.hpp"
#include "willslab/numeric.hpp"
#include "willslab/rng.hpp"
#include "willslab/serialize.hpp"

using namespace wills;
using Eigen::VectorXd;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b,
               int n = 4000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; i += 2) s += 4.0 * f(a + i * h);
  for (int i = 2; i < n; i += 2) s += 2.0 * f(a + i * h);
  return s * h / 3.0;
}

std::vector<double> pascal_row(int d) {
  std::vector<double> row{1.0};
  for (int i = 0; i < d; ++i) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t k = 0; k < row.size(); ++k) {
      next[k] += row[k];
      next[k + 1] += row[k];
    }
    row = std::move(next);
  }
  return row;
}

} // namespace

TEST_CASE("unit cube profile is the binomial row") {
  for (int d = 1; d <= 20; ++d) {
    const auto profile = profile_box(VectorXd::Ones(d));
    const auto expected = pascal_row(d);
    const auto got = profile.values();
    for (int k = 0; k <= d; ++k)
      CHECK(got[k] == doctest::Approx(expected[k]).epsilon(1e-10));
    CHECK(profile.wills() == doctest::Approx(std::pow(2.0, d)).epsilon(1e-10));
    CHECK(is_ultra_log_concave(got, 1e-10));
  }
}

TEST_CASE("rectangle profile uses elementary symmetric polynomials") {
  const auto profile = profile_box(Eigen::Vector2d(2.0, 3.0));
  CHECK(profile.v(0) == doctest::Approx(1.0));
  CHECK(profile.v(1) == doctest::Approx(5.0));
  CHECK(profile.v(2) == doctest::Approx(6.0));

  // homogeneity: v_k(sK) = s^k C(d,k) for equal sides
  const int d = 7;
  const double s = 1.7;
  const auto scaled = profile_box(VectorXd::Constant(d, s));
  const auto binom = pascal_row(d);
  for (int k = 0; k <= d; ++k)
    CHECK(scaled.v(k) ==
          doctest::Approx(binom[k] * std::pow(s, k)).epsilon(1e-12));
}

TEST_CASE("ball profiles match the closed form") {
  const auto d1 = profile_ball(1, 1.0);
  CHECK(d1.v(0) == doctest::Approx(1.0));
  CHECK(d1.v(1) == doctest::Approx(2.0));

  const auto d2 = profile_ball(2, 1.0);
  CHECK(d2.v(1) == doctest::Approx(kPi));
  CHECK(d2.v(2) == doctest::Approx(kPi));

  const auto d3 = profile_ball(3, 1.0);
  CHECK(d3.v(1) == doctest::Approx(4.0));
  CHECK(d3.v(2) == doctest::Approx(2.0 * kPi)); // half the surface area
  CHECK(d3.v(3) == doctest::Approx(4.0 * kPi / 3.0));

  for (int d = 1; d <= 50; ++d) {
    const auto profile = profile_ball(d, 1.0);
    for (int k = 0; k <= d; ++k) {
      const double expected = std::exp(log_choose(d, k)) * unit_ball_volume(d) /
                              unit_ball_volume(d - k);
      CHECK(profile.v(k) == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(is_ultra_log_concave(profile.values(), 1e-10));
  }
}

TEST_CASE("v1 of the unit ball grows like sqrt(2 pi d)") {
  const int d = 10000;
  const auto profile = profile_ball(d, 1.0);
  const double ratio = profile.v(1) / std::sqrt(2.0 * kPi * d);
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("intrinsic volume law") {
  const auto square = vk_law(profile_box(VectorXd::Ones(2)));
  CHECK(square.probs[0] == doctest::Approx(0.25));
  CHECK(square.probs[1] == doctest::Approx(0.5));
  CHECK(square.probs[2] == doctest::Approx(0.25));

  for (int d : {1, 5, 12, 20}) {
    const auto law = vk_law(profile_box(VectorXd::Ones(d)));
    const auto binom = pascal_row(d);
    for (int k = 0; k <= d; ++k)
      CHECK(law.probs[k] ==
            doctest::Approx(binom[k] / std::pow(2.0, d)).epsilon(1e-12));
  }

  const auto ball = vk_law(profile_ball(2, 1.0));
  const double w = 1.0 + 2.0 * kPi;
  CHECK(ball.probs[0] == doctest::Approx(1.0 / w));
  CHECK(ball.probs[1] == doctest::Approx(kPi / w));
  CHECK(ball.probs[2] == doctest::Approx(kPi / w));
}

TEST_CASE("ultra log-concavity checks") {
  CHECK(is_ultra_log_concave({1, 3, 3, 1}, 1e-12));
  CHECK_FALSE(is_ultra_log_concave({1, 1, 1}, 1e-12));
  CHECK(is_ultra_log_concave({1, 0.5, 0.125}, 1e-12)); // equality at k = 1
  CHECK(is_ultra_log_concave({1, 0, 0, 0}, 1e-12));

  Philox rng(17, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform() * 199);
    if (rep % 2 == 0) {
      VectorXd sides(d);
      for (int i = 0; i < d; ++i) sides[i] = 0.2 + 2.3 * rng.uniform();
      CHECK(is_ultra_log_concave(profile_box(sides).values(), 1e-9));
    } else {
      const double radius = 0.2 + 2.3 * rng.uniform();
      CHECK(is_ultra_log_concave_log(profile_ball(d, radius).log_values(),
                                     1e-9));
    }
  }
}

TEST_CASE("ULC moment bounds") {
  SUBCASE("binomial") {
    const int d = 12;
    const auto out = ulc_moment_bounds(vk_law(profile_box(VectorXd::Ones(d))));
    CHECK(out.mean_bound == doctest::Approx(d).epsilon(1e-10));
    CHECK(out.mean == doctest::Approx(d / 2.0).epsilon(1e-10));
    CHECK(out.variance == doctest::Approx(d / 4.0).epsilon(1e-10));
    CHECK(out.mean_within);
    CHECK(out.var_within);
    CHECK(out.lotz_tropp_within);
  }
  SUBCASE("ball d=2") {
    const auto out = ulc_moment_bounds(vk_law(profile_ball(2, 1.0)));
    CHECK(out.mean_bound == doctest::Approx(kPi).epsilon(1e-10));
    CHECK(out.mean ==
          doctest::Approx(3.0 * kPi / (1.0 + 2.0 * kPi)).epsilon(1e-10));
    CHECK(out.mean == doctest::Approx(1.29405).epsilon(1e-4));
    CHECK(out.mean_within);
    CHECK(out.var_within);
  }
  SUBCASE("point mass") {
    const auto out = ulc_moment_bounds(DiscreteLaw{{1.0}});
    CHECK(out.mean_bound == 0.0);
    CHECK(out.mean == 0.0);
    CHECK(out.variance == 0.0);
    CHECK(out.var_within);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(ulc_moment_bounds(DiscreteLaw{{0.0, 1.0}}), Error);
    CHECK_THROWS_AS(ulc_moment_bounds(DiscreteLaw{{0.4, 0.2, 0.4}}), Error);
  }
}

TEST_CASE("surface law") {
  SUBCASE("unit square corner fraction") {
    const auto law = surface_law(profile_box(VectorXd::Ones(2)), 1.0);
    CHECK(law.probs[0] ==
          doctest::Approx(2.0 * kPi / (2.0 * kPi + 4.0)).epsilon(1e-12));
    CHECK(law.probs[1] ==
          doctest::Approx(4.0 / (2.0 * kPi + 4.0)).epsilon(1e-12));
    CHECK(law.probs[0] == doctest::Approx(0.6110).epsilon(1e-4));
  }
  SUBCASE("s -> 0 concentrates at i = 0") {
    for (const auto& profile :
         {profile_box(VectorXd::Ones(5)), profile_ball(5, 2.0)}) {
      const auto law = surface_law(profile, 1e-9);
      CHECK(law.probs[0] == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(law.e_p == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    }
  }
  SUBCASE("ball closed form and the projection-trace cross-check") {
    for (double s : {0.3, 1.0, 4.0}) {
      const auto law = surface_law(profile_ball(2, 1.0), s);
      CHECK(law.probs[1] == doctest::Approx(s / (1.0 + s)).epsilon(1e-12));
      CHECK(law.e_p == doctest::Approx(s / (1.0 + s)).epsilon(1e-12));
    }
    // e_p(1/r) = (d-1)/(1+r) = Tr grad P on the sphere at distance r
    for (int d : {2, 3, 7, 20, 50}) {
      const auto profile = profile_ball(d, 1.0);
      for (double r : {0.1, 1.0, 10.0}) {
        const double lhs = surface_law_mean(profile, 1.0 / r);
        CHECK(lhs == doctest::Approx((d - 1.0) / (1.0 + r)).epsilon(1e-10));
      }
    }
  }
  SUBCASE("sentinel and errors") {
    const auto profile = profile_box(VectorXd::Ones(3));
    const auto at_inf = surface_law(profile, kInf);
    CHECK(at_inf.probs[2] == 1.0);
    CHECK(at_inf.e_p == 2.0);
    CHECK_THROWS_AS(surface_law(profile, 0.0), Error);
    CHECK_THROWS_AS(surface_law(profile, -1.0), Error);
  }
  SUBCASE("surface laws are ultra log-concave") {
    Philox rng(29, 0);
    for (int rep = 0; rep < 30; ++rep) {
      const int d = 2 + static_cast<int>(rng.uniform() * 99);
      VectorXd sides(d);
      for (int i = 0; i < d; ++i) sides[i] = 0.3 + 2.0 * rng.uniform();
      const auto box_profile = profile_box(sides);
      const auto ball_profile = profile_ball(d, 0.3 + 2.0 * rng.uniform());
      for (double s : {0.1, 1.0, 10.0}) {
        CHECK(is_ultra_log_concave(surface_law(box_profile, s).probs, 1e-9));
        CHECK(is_ultra_log_concave(surface_law(ball_profile, s).probs, 1e-9));
      }
    }
  }
  SUBCASE("evaluator matches the full law") {
    const auto profile = profile_ball(17, 1.3);
    const SurfaceMeanEvaluator eval(profile);
    for (double s : {0.05, 0.7, 3.0, 40.0})
      CHECK(eval(s) == doctest::Approx(surface_law(profile, s).e_p).epsilon(
                           1e-12));
    CHECK(eval(kInf) == 16.0);
  }
}

TEST_CASE("moment identities against quadrature oracles") {
  SUBCASE("unit cube per-coordinate oracle") {
    // density e^{-pi (|u| - 1/2)_+^2} / 2 per coordinate
    const double t = 0.5;
    const double norm = 1.0 + 2.0 * t;
    auto h_of = [&](double u) {
      const double excess = std::max(std::abs(u) - t, 0.0);
      return kPi * excess * excess;
    };
    auto density = [&](double u) { return std::exp(-h_of(u)) / norm; };
    const double eh =
        simpson([&](double u) { return h_of(u) * density(u); }, -9.0, 9.0);
    const double eh2 =
        simpson([&](double u) { return h_of(u) * h_of(u) * density(u); }, -9.0,
                9.0);
    CHECK(eh == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(eh2 - eh * eh == doctest::Approx(5.0 / 16.0).epsilon(1e-8));

    for (int d : {1, 8, 64}) {
      const auto m = moments(profile_box(VectorXd::Ones(d)));
      CHECK(m.delta == doctest::Approx(d * eh).epsilon(1e-7));
      CHECK(m.sigma2 == doctest::Approx(d * (eh2 - eh * eh)).epsilon(1e-7));
      CHECK(m.delta == doctest::Approx(d / 4.0).epsilon(1e-10));
      CHECK(m.tau2 == doctest::Approx(d / 4.0).epsilon(1e-10));
      CHECK(m.sigma2 == doctest::Approx(5.0 * d / 16.0).epsilon(1e-10));
      CHECK(m.delta ==
            doctest::Approx((d - m.mean_v) / 2.0).epsilon(1e-12));
      CHECK(m.sigma2 ==
            doctest::Approx(m.tau2 / 4.0 + m.delta).epsilon(1e-12));
    }
  }
  SUBCASE("degenerate point body") {
    for (int d : {1, 10}) {
      const auto m = moments(profile_point(d));
      CHECK(m.mean_v == 0.0);
      CHECK(m.tau2 == 0.0);
      CHECK(m.delta == doctest::Approx(d / 2.0));
      CHECK(m.sigma2 == doctest::Approx(d / 2.0));
    }
  }
  SUBCASE("segment as a one-dimensional ball") {
    const auto m = moments(profile_ball(1, 1.0));
    CHECK(m.delta == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(m.tau2 == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    CHECK(m.sigma2 == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

    // direct quadrature on the segment density
    auto h_of = [&](double u) {
      const double excess = std::max(std::abs(u) - 1.0, 0.0);
      return kPi * excess * excess;
    };
    const double w = simpson([&](double u) { return std::exp(-h_of(u)); },
                             -10.0, 10.0);
    CHECK(w == doctest::Approx(3.0).epsilon(1e-8));
    const double eh = simpson(
        [&](double u) { return h_of(u) * std::exp(-h_of(u)) / 3.0; }, -10.0,
        10.0);
    const double eh2 = simpson(
        [&](double u) {
          return h_of(u) * h_of(u) * std::exp(-h_of(u)) / 3.0;
        },
        -10.0, 10.0);
    CHECK(m.delta == doctest::Approx(eh).epsilon(1e-7));
    CHECK(m.sigma2 == doctest::Approx(eh2 - eh * eh).epsilon(1e-7));
  }
}

TEST_CASE("wills functional under scaling: binomial theorem") {
  for (int d : {3, 10, 40}) {
    const auto profile = profile_box(VectorXd::Ones(d));
    for (double lambda : {0.5, 1.0, 2.0}) {
      std::vector<double> terms;
      for (int k = 0; k <= d; ++k)
        terms.push_back(profile.log_v(k) + k * std::log(lambda));
      CHECK(log_sum_exp(terms) ==
            doctest::Approx(d * std::log1p(lambda)).epsilon(1e-12));
    }
  }
}

TEST_CASE("profile JSON round trip") {
  for (const auto& profile :
       {profile_box(Eigen::Vector2d(2.0, 3.0)), profile_ball(9, 0.7),
        profile_point(4)}) {
    const auto copy = profile_from_json(profile_to_json(profile));
    REQUIRE(copy.dim() == profile.dim());
    for (int k = 0; k <= profile.dim(); ++k) {
      if (profile.log_v(k) == kNegInf)
        CHECK(copy.log_v(k) == kNegInf);
      else
        CHECK(copy.log_v(k) == doctest::Approx(profile.log_v(k)));
    }
    CHECK(copy.log_wills() == doctest::Approx(profile.log_wills()));
  }
  CHECK_THROWS_AS(profile_from_json("{\"d\": 2}"), Error);
}
