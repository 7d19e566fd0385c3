#include <doctest.h>

#include <cmath>

#include "willslab/errors.hpp"
#include "willslab/numeric.hpp"
#include "willslab/sampling.hpp"
#include "willslab/stein.hpp"

using namespace wills;
using Eigen::VectorXd;

TEST_CASE("convention: H(grad phi) is pi dist^2") {
  Philox rng(71, 0);
  const auto bodies = {ConvexBody::cube(3, 0.8),
                       ConvexBody::ball(VectorXd::Zero(3), 1.3),
                       ConvexBody::point(VectorXd::Zero(3))};
  for (const auto& body : bodies) {
    for (int k = 0; k < 50; ++k) {
      VectorXd x(3);
      for (int i = 0; i < 3; ++i) x[i] = 3.0 * rng.gaussian();
      const double dist = distance_to(body, x);
      CHECK(stein_h(grad_phi(body, x)) ==
            doctest::Approx(kPi * dist * dist).epsilon(1e-10));
    }
  }
}

TEST_CASE("A sigma = 2 across bodies") {
  SUBCASE("unit cube d=16") {
    const auto body = ConvexBody::cube(16, 0.5);
    const auto profile = profile_for(body);
    const auto a = estimate_A(body, &profile, 100000, {81, 0});
    CHECK(std::abs(a.value * a.sigma - 2.0) < 4.0 * a.stderr * a.sigma);
  }
  SUBCASE("degenerate point body d=10: A = 2/sqrt(5)") {
    const auto body = ConvexBody::point(VectorXd::Zero(10));
    const auto profile = profile_for(body);
    const auto a = estimate_A(body, &profile, 100000, {82, 0});
    CHECK(a.sigma == doctest::Approx(std::sqrt(5.0)));
    CHECK(std::abs(a.value - 2.0 / std::sqrt(5.0)) < 4.0 * a.stderr);
  }
  SUBCASE("asymmetric box") {
    const auto body = ConvexBody::box(
        Eigen::Vector3d(0.4, -1.0, 2.0), Eigen::Vector3d(0.5, 1.0, 1.5));
    const auto profile = profile_for(body);
    const auto a = estimate_A(body, &profile, 100000, {83, 0});
    CHECK(std::abs(a.value * a.sigma - 2.0) < 4.0 * a.stderr * a.sigma);
  }
  SUBCASE("ball d=8") {
    const auto body = ConvexBody::ball(VectorXd::Zero(8), 1.5);
    const auto profile = profile_for(body);
    const auto a = estimate_A(body, &profile, 100000, {84, 0});
    CHECK(std::abs(a.value * a.sigma - 2.0) < 4.0 * a.stderr * a.sigma);
  }
}

TEST_CASE("nested Monte Carlo validates the closed-form time integration") {
  // Two-level estimate of Var(int_0^inf e^{-t} <Hess phi(X) grad H(Y0),
  // E_inf[grad H(Y_t)]> dt) without using the analytic collapse.
  const auto body = ConvexBody::cube(4, 0.5);
  const auto profile = profile_for(body);
  const int d = 4;
  const std::size_t n_outer = 1000, n_inner = 1000;

  const auto outer_pts = sample_box_exact(body, n_outer, {91, 0});
  const auto inner_pts = sample_box_exact(body, n_inner, {91, 1});
  Eigen::MatrixXd inner_y(n_inner, d);
  for (std::size_t j = 0; j < n_inner; ++j)
    inner_y.row(static_cast<Eigen::Index>(j)) =
        grad_phi(body, inner_pts.points.row(static_cast<Eigen::Index>(j))
                           .transpose())
            .transpose();

  // Simpson quadrature over u = e^{-t} in (0, 1].
  const int nodes = 400;
  RunningMoments nested;
  for (std::size_t i = 0; i < n_outer; ++i) {
    const VectorXd x =
        outer_pts.points.row(static_cast<Eigen::Index>(i)).transpose();
    const VectorXd y0 = grad_phi(body, x);
    // Hess phi(x) grad H(y0) = (I - grad P(x)) y0, evaluated via the clamp
    // mask rather than the orthogonality identity.
    VectorXd z = y0;
    for (int c = 0; c < d; ++c) {
      const bool clamped = std::abs(x[c] - 0.0) > 0.5;
      if (!clamped) z[c] = 0.0;
    }
    const VectorXd inner_mean = inner_y.colwise().mean().transpose();
    auto integrand = [&](double u) {
      // E_inner[grad H(Y_t)] with u = e^{-t}
      const double root = std::sqrt(std::max(0.0, 1.0 - u * u));
      const VectorXd expected = (u * y0 + root * inner_mean) / (2.0 * kPi);
      return z.dot(expected);
    };
    double integral = integrand(0.0) + integrand(1.0);
    for (int k = 1; k < nodes; ++k)
      integral += (k % 2 ? 4.0 : 2.0) * integrand(k / double(nodes));
    integral /= 3.0 * nodes;
    nested.add(integral);
  }

  const double sigma2 = moments(profile).sigma2;
  const double a_nested = 2.0 / sigma2 * nested.stddev();
  const double a_nested_se =
      nested.stderr_of_variance() / (sigma2 * nested.stddev());
  const auto a = estimate_A(body, &profile, 100000, {92, 0});
  CHECK(std::abs(a_nested - a.value) <
        4.0 * std::sqrt(a_nested_se * a_nested_se + a.stderr * a.stderr));
}

TEST_CASE("B estimates") {
  SUBCASE("segment: only zero-dimensional faces, B = 0") {
    const auto body = ConvexBody::cube(1, 1.0);
    const auto profile = profile_for(body);
    const auto b = estimate_B(body, profile, 20000, {100, 0});
    CHECK(b.value == 0.0);
  }
  SUBCASE("unit square surface mean closed form") {
    const auto profile = profile_box(VectorXd::Ones(2));
    for (double s : {0.2, 1.0, 5.0})
      CHECK(surface_law_mean(profile, s) ==
            doctest::Approx(4.0 * s / (2.0 * kPi + 4.0 * s)).epsilon(1e-12));
  }
  SUBCASE("ball: e_p(1/dist) = (d-1)/(1+dist)") {
    const int d = 6;
    const auto body = ConvexBody::ball(VectorXd::Zero(d), 1.0);
    const auto profile = profile_for(body);
    const auto b = estimate_B(body, profile, 50000, {101, 0});
    // independent route: direct moments of (d-1)/(1+dist)
    const auto h = sample_hk_mixture(vk_law(profile), d, 50000, {102, 5});
    RunningMoments m;
    for (double hv : h.h)
      m.add(hv == 0.0 ? static_cast<double>(d - 1)
                      : (d - 1.0) / (1.0 + std::sqrt(hv / kPi)));
    const double sd_direct = m.stddev();
    const double sigma = std::sqrt(moments(profile).sigma2);
    const double b_direct = 1.14 / sigma * sd_direct;
    const double se_direct = 1.14 / sigma * m.stderr_of_variance() /
                             (2.0 * sd_direct);
    CHECK(std::abs(b.value - b_direct) <
          4.0 * std::sqrt(b.stderr * b.stderr + se_direct * se_direct));
  }
  SUBCASE("two routes for the box: mixture dist vs geometric dist") {
    const int d = 5;
    const auto body = ConvexBody::cube(d, 0.5);
    const auto profile = profile_for(body);
    const SurfaceMeanEvaluator e_p(profile);
    const auto b_mixture = estimate_B(body, profile, 60000, {103, 0});

    const auto pts = sample_box_exact(body, 60000, {104, 0});
    RunningMoments m;
    for (Eigen::Index i = 0; i < pts.points.rows(); ++i) {
      const double dist = distance_to(body, pts.points.row(i).transpose());
      m.add(dist == 0.0 ? static_cast<double>(d - 1) : e_p(1.0 / dist));
    }
    const double sigma = std::sqrt(moments(profile).sigma2);
    const double b_geometric = 1.14 / sigma * m.stddev();
    const double se_geometric =
        1.14 / sigma * m.stderr_of_variance() / (2.0 * m.stddev());
    CHECK(std::abs(b_mixture.value - b_geometric) <
          4.0 * std::sqrt(b_mixture.stderr * b_mixture.stderr +
                          se_geometric * se_geometric));
  }
}

TEST_CASE("estimators reject sample sizes below the stream count") {
  const auto body = ConvexBody::cube(4, 0.5);
  const auto profile = profile_for(body);
  SteinOptions opts;
  opts.streams = 32;
  CHECK_THROWS_AS(estimate_A(body, &profile, 10, {0, 0}, opts), Error);
  CHECK_THROWS_AS(estimate_B(body, profile, 10, {0, 0}, opts), Error);
  CHECK_THROWS_AS(check_ibp(body, IbpTestFn::identity, 10, {0, 0}, opts),
                  Error);
}

TEST_CASE("integration by parts residuals vanish") {
  const auto cube = ConvexBody::cube(16, 0.5);
  for (IbpTestFn fn :
       {IbpTestFn::identity, IbpTestFn::constant, IbpTestFn::cubic}) {
    const auto est = check_ibp(cube, fn, 100000, {110, 0});
    CHECK(std::abs(est.value) <= 4.0 * est.stderr);
  }
  // degenerate point body: E[<X, grad phi>] = E[2 pi ||X||^2] = d
  const auto pt = ConvexBody::point(VectorXd::Zero(7));
  const auto est = check_ibp(pt, IbpTestFn::identity, 100000, {111, 0});
  CHECK(std::abs(est.value) <= 4.0 * est.stderr);
  // ball route reconstructs X
  const auto ball = ConvexBody::ball(VectorXd::Zero(5), 1.0);
  const auto best = check_ibp(ball, IbpTestFn::identity, 100000, {112, 0});
  CHECK(std::abs(best.value) <= 4.0 * best.stderr);
}

TEST_CASE("brascamp-lieb checks") {
  SUBCASE("gaussian saturation: equality for linear f") {
    const auto pt = ConvexBody::point(VectorXd::Zero(6));
    const auto out = brascamp_lieb_check(pt, 0.0, BlTestFn::linear, 100000,
                                         {120, 0});
    const double truth = 6.0 / (2.0 * kPi);
    CHECK(std::abs(out.variance.value - truth) < 4.0 * out.variance.stderr);
    CHECK(std::abs(out.bound.value - truth) < 1e-12); // bound is deterministic
    CHECK(out.holds);
  }
  SUBCASE("box cases hold") {
    const auto box = ConvexBody::cube(4, 1.0);
    for (double eps : {0.1, 0.25, 0.5}) {
      for (BlTestFn fn : {BlTestFn::linear, BlTestFn::quadratic}) {
        const auto out = brascamp_lieb_check(box, eps, fn, 100000, {121, 0});
        CHECK(out.holds);
      }
    }
  }
  SUBCASE("quadratic f at eps=0.1 leaves a strictly positive gap") {
    const auto box = ConvexBody::cube(4, 1.0);
    const auto out =
        brascamp_lieb_check(box, 0.1, BlTestFn::quadratic, 100000, {122, 0});
    const double combined = std::sqrt(out.variance.stderr * out.variance.stderr +
                                      out.bound.stderr * out.bound.stderr);
    CHECK(out.bound.value - out.variance.value > 4.0 * combined);
  }
  SUBCASE("singular Hessian is rejected") {
    const auto box = ConvexBody::cube(3, 1.0);
    CHECK_THROWS_AS(
        brascamp_lieb_check(box, 0.0, BlTestFn::linear, 1000, {0, 0}), Error);
    CHECK_THROWS_AS(
        brascamp_lieb_check(box, -0.1, BlTestFn::linear, 1000, {0, 0}), Error);
  }
}

TEST_CASE("stein bound report") {
  const auto body = ConvexBody::cube(64, 0.5);
  const auto profile = profile_for(body);
  const auto report = stein_bound(body, profile, 30000, {130, 0});
  CHECK(report.d == 64);
  CHECK(report.sigma == doctest::Approx(std::sqrt(5.0 * 64 / 16.0)));
  CHECK(report.a > 0.0);
  CHECK(report.b > 0.0);
  CHECK(report.bound == report.a + report.b);
  CHECK(report.bound_alt == doctest::Approx(2.0 * report.a + report.b));
  CHECK(report.bound_active()); // A + B dominates the TV proxy here
}

TEST_CASE("stein bound on a polytope via the MALA route") {
  // right triangle {u >= 0, u1 + u2 <= 1}: v = (1, perimeter/2, area) exactly
  Eigen::MatrixXd normals(3, 2);
  normals << -1, 0, 0, -1, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  Eigen::VectorXd offsets(3);
  offsets << 0, 0, 1.0 / std::sqrt(2.0);
  const auto tri = ConvexBody::hpolytope(normals, offsets,
                                         Eigen::Vector2d(0.25, 0.25));
  const double perimeter = 2.0 + std::sqrt(2.0);
  const auto profile =
      IntrinsicProfile::from_values({1.0, perimeter / 2.0, 0.5});

  SteinOptions opts;
  opts.streams = 16;
  opts.threads = 2;
  const auto report = stein_bound(tri, profile, 16000, {134, 0}, opts);
  CHECK(report.bound_active());
  // MALA chains are correlated, so give the identity a wider window
  CHECK(std::abs(report.a * report.sigma - 2.0) <
        8.0 * report.a_stderr * report.sigma);
  CHECK(report.b > 0.0);
}

TEST_CASE("stein bound scaling for the ball family R = d^{1/4}") {
  SteinOptions opts;
  opts.threads = 2;
  std::vector<double> scaled;
  std::vector<double> scaled_se;
  for (int d : {16, 64, 256}) {
    const auto body = ConvexBody::ball(
        VectorXd::Zero(d), std::pow(static_cast<double>(d), 0.25));
    const auto profile = profile_for(body);
    const auto rep = stein_bound(body, profile, 40000, {135, 0}, opts);
    CHECK(rep.bound_active());
    CHECK(std::abs(rep.a * rep.sigma - 2.0) < 4.0 * rep.a_stderr * rep.sigma);
    scaled.push_back(rep.bound * std::pow(static_cast<double>(d), 0.25));
    scaled_se.push_back(rep.combined_stderr() *
                        std::pow(static_cast<double>(d), 0.25));
  }
  // bound * d^{1/4} stays bounded: non-increasing over the grid (with slack)
  for (std::size_t i = 1; i < scaled.size(); ++i)
    CHECK(scaled[i] <=
          scaled[i - 1] + 4.0 * (scaled_se[i] + scaled_se[i - 1]));
}

TEST_CASE("surface-law variance bound from the proof's second step") {
  // var_p(s) <= s d^alpha v_1(ball) (kappa_{d-1}/kappa_d) (d-1)/d
  const double alpha = 0.25;
  for (int d : {4, 16, 64}) {
    const double scale = std::pow(d, alpha);
    const auto ball_profile = profile_ball(d, scale);
    const auto box_profile = profile_box(
        VectorXd::Constant(d, 2.0 * scale / std::sqrt(static_cast<double>(d))));
    const double v1_ball =
        d * unit_ball_volume(d) / unit_ball_volume(d - 1);
    const double kappa_ratio = unit_ball_volume(d - 1) / unit_ball_volume(d);
    for (double s : {0.1, 1.0, 10.0}) {
      const double bound =
          s * scale * v1_ball * kappa_ratio * (d - 1.0) / d;
      CHECK(surface_law(ball_profile, s).var_p <= bound * (1 + 1e-12));
      CHECK(surface_law(box_profile, s).var_p <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("tilted tail estimates shrink against exp(-d/2)") {
  // Constant-diameter cubes (diam = 1/2): T_d = 1/(4 sqrt d).
  std::vector<double> ratios;
  for (int d : {10, 20, 40}) {
    const auto box =
        ConvexBody::cube(d, 0.25 / std::sqrt(static_cast<double>(d)));
    const auto est = estimate_tail_probability(box, 7.0, 200000, {140, 0});
    CHECK(est.value >= 0.0);
    CHECK(est.value < 1.0);
    ratios.push_back(est.value / std::exp(-0.5 * d));
  }
  CHECK(ratios[1] < ratios[0]);
  CHECK(ratios[2] < ratios[1]);

  // cross-check the tilting against plain Monte Carlo where the event is
  // still observable
  const int d = 10;
  const auto box =
      ConvexBody::cube(d, 0.25 / std::sqrt(static_cast<double>(d)));
  const auto is = estimate_tail_probability(box, 7.0, 400000, {141, 0});
  const auto pts = sample_box_exact(box, 400000, {142, 0});
  std::size_t hits = 0;
  const double threshold = std::sqrt(static_cast<double>(d)) / 7.0;
  for (Eigen::Index i = 0; i < pts.points.rows(); ++i)
    if (distance_to(box, pts.points.row(i).transpose()) <= threshold) ++hits;
  const double p_mc = static_cast<double>(hits) / 400000.0;
  const double se_mc = std::sqrt(p_mc * (1 - p_mc) / 400000.0);
  CHECK(std::abs(is.value - p_mc) <
        4.0 * std::sqrt(se_mc * se_mc + is.stderr * is.stderr));
}
