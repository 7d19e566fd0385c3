#include "willslab/volumetry.hpp"

#include <algorithm>
#include <cmath>

#include "willslab/errors.hpp"
#include "willslab/numeric.hpp"
#include "willslab/parallel.hpp"

namespace wills {

namespace {

constexpr int kHitOrMissDimCap = 8;

ConvexBody scale_body(const ConvexBody& body, double lambda) {
  switch (body.kind()) {
    case BodyKind::box: {
      const auto& b = body.as_box();
      return ConvexBody::box(lambda * b.center, lambda * b.half_widths);
    }
    case BodyKind::ball: {
      const auto& b = body.as_ball();
      if (b.degenerate) return ConvexBody::point(lambda * b.center);
      return ConvexBody::ball(lambda * b.center, lambda * b.radius);
    }
    case BodyKind::hpolytope:
    default: {
      const auto& p = body.as_hpolytope();
      return ConvexBody::hpolytope(p.normals, lambda * p.offsets,
                                   lambda * p.interior_point,
                                   p.enclosing_radius
                                       ? std::optional<double>(
                                             lambda * *p.enclosing_radius)
                                       : std::nullopt);
    }
  }
}

struct Wls {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double condition;
};

Wls weighted_least_squares(const Eigen::MatrixXd& design,
                           const Eigen::VectorXd& y,
                           const Eigen::VectorXd& stderrs,
                           double max_condition) {
  const int m = static_cast<int>(design.rows());
  const int p = static_cast<int>(design.cols());
  Eigen::MatrixXd a(m, p);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double w = 1.0 / stderrs[i];
    a.row(i) = w * design.row(i);
    b[i] = w * y[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv[0] / sv[sv.size() - 1];
  if (!(sv[sv.size() - 1] > 0.0) || cond > max_condition)
    throw_error(ErrorKind::conditioning,
                "weighted_least_squares: design condition number " +
                    std::to_string(cond) +
                    " too large; choose better-spread radii");
  Wls out;
  out.params = svd.solve(b);
  // cov = (A^T A)^{-1} = V S^{-2} V^T for the weighted design.
  Eigen::VectorXd inv_s2 = sv.array().square().inverse();
  out.covariance =
      svd.matrixV() * inv_s2.asDiagonal() * svd.matrixV().transpose();
  out.condition = cond;
  return out;
}

} // namespace

double steiner_polynomial(const IntrinsicProfile& profile, double r) {
  const int d = profile.dim();
  std::vector<double> terms;
  terms.reserve(d + 1);
  const double log_r = r > 0.0 ? std::log(r) : kNegInf;
  for (int k = 0; k <= d; ++k) {
    if (profile.log_v(k) == kNegInf) continue;
    double t = profile.log_v(k) + log_unit_ball_volume(d - k);
    if (k < d) {
      if (r == 0.0) continue;
      t += (d - k) * log_r;
    }
    terms.push_back(t);
  }
  return std::exp(log_sum_exp(terms));
}

VolumeEstimate estimate_parallel_volume(const ConvexBody& body, double r,
                                        std::size_t n, SeedSpec seed) {
  if (n == 0)
    throw_error(ErrorKind::input, "estimate_parallel_volume: n must be > 0");
  if (r < 0.0)
    throw_error(ErrorKind::input, "estimate_parallel_volume: r must be >= 0");
  const int d = body.dim();
  if (d > kHitOrMissDimCap)
    throw_error(ErrorKind::input,
                "estimate_parallel_volume: hit-or-miss is capped at d <= 8; "
                "use estimate_wills_scaled beyond that");
  const double half = enclosing_radius(body) + r;
  const Eigen::VectorXd& ref = body.reference_point();
  const double cube_volume = std::pow(2.0 * half, d);

  Philox rng(seed);
  Eigen::VectorXd x(d);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j)
      x[j] = ref[j] + (2.0 * rng.uniform() - 1.0) * half;
    if (distance_to(body, x) <= r) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  VolumeEstimate est;
  est.value = cube_volume * p;
  est.stderr = cube_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  est.n = n;
  est.method = "hit_or_miss";
  return est;
}

std::vector<double> default_steiner_radii(const ConvexBody& body, int count) {
  const double base = enclosing_radius(body);
  const double lo = 0.25 * base, hi = 4.0 * base;
  std::vector<double> radii(count);
  for (int i = 0; i < count; ++i)
    radii[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return radii;
}

SteinerFit fit_steiner(const ConvexBody& body, const std::vector<double>& radii,
                       std::size_t n_per_radius, SeedSpec seed,
                       const SteinerFitOptions& opts) {
  const int d = body.dim();
  const int n_params = opts.constrain_v0 ? d : d + 1;
  if (static_cast<int>(radii.size()) < d + 1)
    throw_error(ErrorKind::input,
                "fit_steiner: need at least d+1 distinct radii");

  // Per-radius estimates as independent parallel jobs with their own streams.
  const auto volumes = run_streams<VolumeEstimate>(
      radii.size(), opts.threads, [&](std::size_t i) {
        return estimate_parallel_volume(body, radii[i], n_per_radius,
                                        seed.with_stream(seed.stream + i));
      });

  const int m = static_cast<int>(radii.size());
  Eigen::MatrixXd design(m, n_params);
  Eigen::VectorXd y(m), se(m);
  for (int i = 0; i < m; ++i) {
    const double r = radii[i];
    y[i] = volumes[i].value;
    double s = volumes[i].stderr;
    if (!(s > 0.0)) {
      // A radius that saw 0 or n hits reports stderr 0; substitute the
      // add-half binomial width so its weight stays finite.
      const double n_d = static_cast<double>(volumes[i].n);
      const double scale = std::pow(2.0 * (enclosing_radius(body) + r), d);
      s = scale * std::sqrt(0.25 / n_d) / std::sqrt(n_d);
    }
    se[i] = s;
    for (int k = 0; k <= d; ++k) {
      const double entry = unit_ball_volume(d - k) * std::pow(r, d - k);
      if (opts.constrain_v0) {
        if (k == 0)
          y[i] -= entry; // move the known v_0 = 1 term to the left side
        else
          design(i, k - 1) = entry;
      } else {
        design(i, k) = entry;
      }
    }
  }

  const Wls wls = weighted_least_squares(design, y, se, opts.max_condition);
  SteinerFit fit;
  if (opts.constrain_v0) {
    fit.v = Eigen::VectorXd(d + 1);
    fit.v[0] = 1.0;
    fit.v.tail(d) = wls.params;
    fit.covariance = Eigen::MatrixXd::Zero(d + 1, d + 1);
    fit.covariance.bottomRightCorner(d, d) = wls.covariance;
  } else {
    fit.v = wls.params;
    fit.covariance = wls.covariance;
  }
  fit.condition = wls.condition;
  fit.radii = radii;
  fit.volumes = volumes;
  return fit;
}

IntrinsicProfile SteinerFit::to_profile() const {
  std::vector<double> values(v.size());
  for (int k = 0; k < v.size(); ++k) {
    if (!(v[k] >= 0.0))
      throw_error(ErrorKind::input,
                  "SteinerFit::to_profile: fitted v_" + std::to_string(k) +
                      " is negative; not representable as a profile");
    values[k] = v[k];
  }
  return IntrinsicProfile::from_values(values);
}

WillsScan estimate_wills_scaled(const ConvexBody& body,
                                const std::vector<double>& lambdas,
                                std::size_t n, SeedSpec seed,
                                const WillsScanOptions& opts) {
  for (double l : lambdas)
    if (!(l > 0.0))
      throw_error(ErrorKind::input,
                  "estimate_wills_scaled: lambdas must be > 0");
  const int d = body.dim();

  struct PerLambda {
    double estimate, stderr, ess;
  };
  const auto rows = run_streams<PerLambda>(
      lambdas.size(), opts.threads, [&](std::size_t li) {
        const double lambda = lambdas[li];
        const ConvexBody scaled = scale_body(body, lambda);
        const Eigen::VectorXd mu = scaled.reference_point();
        const double radius = enclosing_radius(scaled);
        const double sigma2 = radius * radius / d + 1.0 / kPi;
        const double log_norm = -0.5 * d * std::log(2.0 * kPi * sigma2);

        Philox rng(seed.with_stream(seed.stream + li));
        Eigen::VectorXd x(d);
        RunningMoments w_moments;
        double sum_w = 0.0, sum_w2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          for (int j = 0; j < d; ++j)
            x[j] = mu[j] + std::sqrt(sigma2) * rng.gaussian();
          const double dist = distance_to(scaled, x);
          const double log_q =
              log_norm - (x - mu).squaredNorm() / (2.0 * sigma2);
          const double w = std::exp(-kPi * dist * dist - log_q);
          w_moments.add(w);
          sum_w += w;
          sum_w2 += w * w;
        }
        PerLambda out;
        out.estimate = w_moments.mean();
        out.stderr = w_moments.stderr_of_mean();
        out.ess = sum_w2 > 0.0 ? sum_w * sum_w / sum_w2 : 0.0;
        if (out.ess < opts.min_ess_fraction * static_cast<double>(n))
          throw_error(ErrorKind::proposal,
                      "estimate_wills_scaled: effective sample size " +
                          std::to_string(out.ess) + " below " +
                          std::to_string(opts.min_ess_fraction * 100) +
                          "% of n at lambda=" + std::to_string(lambda));
        return out;
      });

  WillsScan scan;
  scan.lambdas = lambdas;
  for (const auto& row : rows) {
    scan.estimates.push_back(row.estimate);
    scan.stderrs.push_back(row.stderr);
    scan.ess.push_back(row.ess);
  }
  return scan;
}

SteinerFit recover_profile_from_wills(const WillsScan& scan, int d,
                                      double max_condition) {
  const int m = static_cast<int>(scan.lambdas.size());
  if (m < d + 1)
    throw_error(ErrorKind::input,
                "recover_profile_from_wills: need at least d+1 lambdas");
  Eigen::MatrixXd design(m, d + 1);
  Eigen::VectorXd y(m), se(m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k <= d; ++k)
      design(i, k) = std::pow(scan.lambdas[i], k);
    y[i] = scan.estimates[i];
    se[i] = scan.stderrs[i] > 0.0 ? scan.stderrs[i] : 1e-12;
  }
  const Wls wls = weighted_least_squares(design, y, se, max_condition);
  SteinerFit fit;
  fit.v = wls.params;
  fit.covariance = wls.covariance;
  fit.condition = wls.condition;
  fit.radii = scan.lambdas;
  return fit;
}

SurfaceSliceResult estimate_surface_slice(const ConvexBody& body,
                                          const IntrinsicProfile& profile,
                                          double r, std::size_t n,
                                          SeedSpec seed,
                                          const SurfaceSliceOptions& opts) {
  if (!(r > 0.0))
    throw_error(ErrorKind::input, "estimate_surface_slice: r must be > 0");
  if (body.kind() == BodyKind::ball && !body.degenerate())
    throw_error(ErrorKind::input,
                "estimate_surface_slice: face classification needs a box or "
                "polytope");
  const int d = body.dim();

  const SampleBatch batch = sample_points_auto(body, n, seed, opts.mala);
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i)
    dist[i] =
        distance_to(body, batch.points.row(static_cast<Eigen::Index>(i))
                              .transpose());

  // Band half-width capped at a fixed fraction of r: the conditional law
  // drifts continuously with distance, so the binning bias is O(w). The full
  // capped band is used (not shrunk to the hit floor) so the whole n-budget
  // feeds the histogram; min_hits is the feasibility floor.
  const double w = opts.max_band_fraction * r;

  SurfaceSliceResult result;
  result.r = r;
  result.band_half_width = w;
  result.empirical.assign(static_cast<std::size_t>(d), 0.0);
  std::size_t classified = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(dist[i] > 0.0) || std::abs(dist[i] - r) > w) continue;
    ++result.hits;
    try {
      const double trace = trace_projection_jacobian(
          body, batch.points.row(static_cast<Eigen::Index>(i)).transpose(),
          opts.classify_tol);
      const int face = static_cast<int>(std::lround(trace));
      if (face >= 0 && face < d) {
        result.empirical[face] += 1.0;
        ++classified;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::boundary_case) throw;
      ++result.skipped_boundary;
    }
  }
  if (classified < opts.min_hits)
    throw_error(ErrorKind::band_width,
                "estimate_surface_slice: only " + std::to_string(classified) +
                    " classified hits in the distance band; increase n or "
                    "the band cap");
  for (double& p : result.empirical) p /= static_cast<double>(classified);

  result.theoretical = surface_law(profile, 1.0 / r);
  double tv = 0.0;
  for (int i = 0; i < d; ++i)
    tv += std::abs(result.empirical[i] - result.theoretical.probs[i]);
  result.tv = 0.5 * tv;
  return result;
}

} // namespace wills
