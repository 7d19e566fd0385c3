#include <doctest.h>

#include <cmath>

#include "willslab/errors.hpp"
#include "willslab/numeric.hpp"
#include "willslab/volumetry.hpp"

using namespace wills;
using Eigen::VectorXd;

namespace {

ConvexBody triangle_body(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                         const Eigen::Vector2d& c) {
  Eigen::MatrixXd normals(3, 2);
  VectorXd offsets(3);
  const Eigen::Vector2d centroid = (a + b + c) / 3.0;
  const std::array<std::pair<Eigen::Vector2d, Eigen::Vector2d>, 3> edges{
      {{a, b}, {b, c}, {c, a}}};
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d e = edges[i].second - edges[i].first;
    Eigen::Vector2d n(e[1], -e[0]); // one of the two edge normals
    if (n.dot(centroid - edges[i].first) > 0) n = -n;
    n.normalize();
    normals.row(i) = n.transpose();
    offsets[i] = n.dot(edges[i].first);
  }
  return ConvexBody::hpolytope(normals, offsets, centroid);
}

} // namespace

TEST_CASE("parallel volume examples") {
  SUBCASE("unit square at r=1: area + perimeter band + corner disk") {
    const auto body = ConvexBody::cube(2, 0.5);
    const auto est = estimate_parallel_volume(body, 1.0, 1000000, {1, 0});
    CHECK(std::abs(est.value - (5.0 + kPi)) < 3.0 * est.stderr);
    CHECK(est.stderr < 0.03);
  }
  SUBCASE("disk of radius 2") {
    const auto body = ConvexBody::ball(VectorXd::Zero(2), 1.0);
    const auto est = estimate_parallel_volume(body, 1.0, 1000000, {2, 0});
    CHECK(std::abs(est.value - 4.0 * kPi) < 3.0 * est.stderr);
  }
  SUBCASE("r = 0 recovers the volume") {
    const auto body = ConvexBody::cube(3, 0.5);
    const auto est = estimate_parallel_volume(body, 0.0, 400000, {3, 0});
    CHECK(std::abs(est.value - 1.0) < 3.0 * est.stderr);
  }
  SUBCASE("input guards") {
    const auto body = ConvexBody::cube(2, 0.5);
    CHECK_THROWS_AS(estimate_parallel_volume(body, 1.0, 0, {0, 0}), Error);
    CHECK_THROWS_AS(
        estimate_parallel_volume(ConvexBody::cube(9, 0.5), 1.0, 10, {0, 0}),
        Error);
  }
}

TEST_CASE("hit-or-miss matches the Steiner polynomial in d <= 4") {
  const auto rect = ConvexBody::box(VectorXd::Zero(2),
                                    Eigen::Vector2d(1.0, 1.5)); // sides (2,3)
  const auto rect_profile = profile_box(Eigen::Vector2d(2.0, 3.0));
  const auto ball = ConvexBody::ball(VectorXd::Zero(3), 1.0);
  const auto ball_profile = profile_ball(3, 1.0);
  std::uint64_t stream = 0;
  for (double r : {0.5, 1.0, 2.0}) {
    const auto re = estimate_parallel_volume(rect, r, 400000, {10, stream++});
    CHECK(std::abs(re.value - steiner_polynomial(rect_profile, r)) <
          3.0 * re.stderr);
    const auto be = estimate_parallel_volume(ball, r, 400000, {10, stream++});
    CHECK(std::abs(be.value - steiner_polynomial(ball_profile, r)) <
          3.0 * be.stderr);
  }
}

TEST_CASE("repeated estimates pool to the Steiner value") {
  const auto body = ConvexBody::cube(2, 0.5);
  const double truth = steiner_polynomial(profile_box(VectorXd::Ones(2)), 0.7);
  double sum = 0.0, var_sum = 0.0;
  const int reps = 20;
  for (int k = 0; k < reps; ++k) {
    const auto est = estimate_parallel_volume(
        body, 0.7, 50000, {77, 1000 + static_cast<std::uint64_t>(k)});
    sum += est.value;
    var_sum += est.stderr * est.stderr;
  }
  const double pooled_se = std::sqrt(var_sum) / reps;
  CHECK(std::abs(sum / reps - truth) < 3.0 * pooled_se);
}

TEST_CASE("steiner fits recover closed-form profiles") {
  SUBCASE("rectangle (2,3)") {
    const auto body =
        ConvexBody::box(VectorXd::Zero(2), Eigen::Vector2d(1.0, 1.5));
    const auto fit = fit_steiner(body, default_steiner_radii(body, 6), 200000,
                                 {20, 0});
    const double expected[] = {1.0, 5.0, 6.0};
    for (int k = 0; k <= 2; ++k)
      CHECK(std::abs(fit.v[k] - expected[k]) < 3.0 * fit.stderr(k));
  }
  SUBCASE("unit cube d=3") {
    const auto body = ConvexBody::cube(3, 0.5);
    const auto fit = fit_steiner(body, default_steiner_radii(body, 7), 200000,
                                 {21, 0});
    const double expected[] = {1.0, 3.0, 3.0, 1.0};
    for (int k = 0; k <= 3; ++k)
      CHECK(std::abs(fit.v[k] - expected[k]) < 3.0 * fit.stderr(k));
  }
  SUBCASE("unit disk") {
    const auto body = ConvexBody::ball(VectorXd::Zero(2), 1.0);
    const auto fit = fit_steiner(body, default_steiner_radii(body, 6), 200000,
                                 {22, 0});
    const double expected[] = {1.0, kPi, kPi};
    for (int k = 0; k <= 2; ++k)
      CHECK(std::abs(fit.v[k] - expected[k]) < 3.0 * fit.stderr(k));
  }
  SUBCASE("near-coincident radii are flagged") {
    const auto body = ConvexBody::cube(2, 0.5);
    const std::vector<double> radii{1.0, 1.0 + 1e-13, 1.0 + 2e-13};
    try {
      fit_steiner(body, radii, 1000, {23, 0});
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::conditioning);
    }
  }
  SUBCASE("too few radii") {
    const auto body = ConvexBody::cube(2, 0.5);
    CHECK_THROWS_AS(fit_steiner(body, {0.5, 1.0}, 1000, {0, 0}), Error);
  }
}

TEST_CASE("wills importance sampling") {
  SUBCASE("unit cube: W(lambda K) = (1+lambda)^d") {
    const auto body = ConvexBody::cube(3, 0.5);
    const auto scan =
        estimate_wills_scaled(body, {0.5, 1.0, 2.0}, 200000, {30, 0});
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
      const double truth = std::pow(1.0 + scan.lambdas[i], 3);
      CHECK(std::abs(scan.estimates[i] - truth) < 3.0 * scan.stderrs[i]);
    }
  }
  SUBCASE("point body integrates to 1") {
    const auto body = ConvexBody::point(VectorXd::Zero(4));
    const auto scan = estimate_wills_scaled(body, {0.5, 3.0}, 100000, {31, 0});
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
      CHECK(std::abs(scan.estimates[i] - 1.0) < 3.0 * scan.stderrs[i]);
  }
  SUBCASE("disk at lambda=1: 1 + 2 pi") {
    const auto body = ConvexBody::ball(VectorXd::Zero(2), 1.0);
    const auto scan = estimate_wills_scaled(body, {1.0}, 200000, {32, 0});
    CHECK(std::abs(scan.estimates[0] - (1.0 + 2.0 * kPi)) <
          3.0 * scan.stderrs[0]);
  }
  SUBCASE("low effective sample size is flagged") {
    const auto body = ConvexBody::cube(6, 0.5);
    WillsScanOptions opts;
    opts.min_ess_fraction = 0.999; // unattainably strict
    try {
      estimate_wills_scaled(body, {1.0}, 2000, {33, 0}, opts);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::proposal);
    }
  }
}

TEST_CASE("two recovery routes agree on a triangle") {
  const auto tri = triangle_body({0.0, 0.0}, {1.3, 0.2}, {0.4, 1.1});
  // ground truth: v_0 = 1, v_1 = perimeter/2, v_2 = area
  const Eigen::Vector2d a(0.0, 0.0), b(1.3, 0.2), c(0.4, 1.1);
  const double area =
      0.5 * std::abs((b - a)[0] * (c - a)[1] - (b - a)[1] * (c - a)[0]);
  const double per = (b - a).norm() + (c - b).norm() + (a - c).norm();

  const auto fit =
      fit_steiner(tri, default_steiner_radii(tri, 7), 150000, {40, 0});
  std::vector<double> lambdas{0.5, 0.8, 1.2, 1.7, 2.3, 3.0};
  const auto scan = estimate_wills_scaled(tri, lambdas, 150000, {41, 0});
  const auto wfit = recover_profile_from_wills(scan, 2);

  const double truth[] = {1.0, per / 2.0, area};
  for (int k = 0; k <= 2; ++k) {
    CHECK(std::abs(fit.v[k] - truth[k]) < 4.0 * fit.stderr(k));
    CHECK(std::abs(wfit.v[k] - truth[k]) < 4.0 * wfit.stderr(k));
    const double joint =
        std::sqrt(fit.stderr(k) * fit.stderr(k) +
                  wfit.stderr(k) * wfit.stderr(k));
    CHECK(std::abs(fit.v[k] - wfit.v[k]) < 4.0 * joint);
  }
}

TEST_CASE("surface slice") {
  SUBCASE("unit square at r=1: corner fraction") {
    const auto body = ConvexBody::cube(2, 0.5);
    const auto profile = profile_for(body);
    const auto slice =
        estimate_surface_slice(body, profile, 1.0, 300000, {50, 0});
    const double p0 = 2.0 * kPi / (2.0 * kPi + 4.0);
    const double se =
        std::sqrt(p0 * (1 - p0) / static_cast<double>(slice.hits));
    CHECK(std::abs(slice.empirical[0] - p0) < 4.0 * se + 0.01);
    CHECK(slice.tv < 0.03);
  }
  SUBCASE("larger slices shift mass toward the vertices") {
    // p(s -> 0) puts all mass at i = 0; distances beyond ~2 are not
    // reachable by the density, so check the trend over sampleable radii.
    const auto body = ConvexBody::cube(3, 0.5);
    const auto profile = profile_for(body);
    const auto near =
        estimate_surface_slice(body, profile, 0.4, 400000, {51, 0});
    const auto far =
        estimate_surface_slice(body, profile, 1.5, 2000000, {51, 7});
    CHECK(far.empirical[0] > near.empirical[0]);
    CHECK(near.tv < 0.04);
    CHECK(far.tv < 0.04);
    CHECK(far.theoretical.probs[0] >
          near.theoretical.probs[0]);
  }
  SUBCASE("segment endpoints are zero-faces") {
    const auto body = ConvexBody::cube(1, 1.0);
    const auto profile = profile_for(body);
    const auto slice =
        estimate_surface_slice(body, profile, 0.5, 200000, {52, 0});
    CHECK(slice.empirical[0] == 1.0);
    CHECK(slice.tv < 1e-12);
  }
  SUBCASE("polytope slice via MALA matches the fitted-form law") {
    // right triangle with the exact profile (1, perimeter/2, area)
    Eigen::MatrixXd normals(3, 2);
    normals << -1, 0, 0, -1, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    Eigen::VectorXd offsets(3);
    offsets << 0, 0, 1.0 / std::sqrt(2.0);
    const auto tri = ConvexBody::hpolytope(normals, offsets,
                                           Eigen::Vector2d(0.25, 0.25));
    const double perimeter = 2.0 + std::sqrt(2.0);
    const auto profile =
        IntrinsicProfile::from_values({1.0, perimeter / 2.0, 0.5});
    SurfaceSliceOptions opts;
    opts.mala.burn_in = 4000;
    opts.mala.thin = 3;
    const auto slice =
        estimate_surface_slice(tri, profile, 0.8, 300000, {54, 0}, opts);
    CHECK(slice.tv < 0.05);
    CHECK(slice.empirical[0] ==
          doctest::Approx(slice.theoretical.probs[0]).epsilon(0.12));
  }
  SUBCASE("starved band raises band_width") {
    const auto body = ConvexBody::cube(2, 0.5);
    const auto profile = profile_for(body);
    try {
      estimate_surface_slice(body, profile, 1.0, 2000, {53, 0});
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::band_width);
    }
  }
}
