#include "willslab/stein.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "willslab/cltlab.hpp"
#include "willslab/errors.hpp"
#include "willslab/numeric.hpp"
#include "willslab/parallel.hpp"
#include "willslab/sampling.hpp"

namespace wills {

Eigen::VectorXd grad_phi(const ConvexBody& body, const Eigen::VectorXd& x) {
  const ProjectionResult proj = project(body, x);
  return 2.0 * kPi * (x - proj.point);
}

double stein_h(const Eigen::VectorXd& y) {
  return y.squaredNorm() / (4.0 * kPi);
}

namespace {

void check_streams(const SteinOptions& opts, std::size_t n,
                   const char* where) {
  if (opts.streams < 4)
    throw_error(ErrorKind::input,
                std::string(where) + ": need at least 4 streams");
  if (n < 2 * opts.streams)
    throw_error(ErrorKind::input,
                std::string(where) +
                    ": n must be at least twice the stream count so the "
                    "per-stream batch statistics are defined");
}

/// Visit `count` draws of (X, Y = grad phi(X)) generated on the given stream.
/// Boxes and balls use their exact samplers; H-polytopes run a MALA chain.
/// `need_x` skips point reconstruction when only Y is consumed.
void for_each_gradient(const ConvexBody& body, const IntrinsicProfile* profile,
                       std::size_t count, SeedSpec seed, bool need_x,
                       const std::function<void(const Eigen::VectorXd&,
                                                const Eigen::VectorXd&)>& fn) {
  const int d = body.dim();
  Eigen::VectorXd x(d), y(d);
  switch (body.kind()) {
    case BodyKind::box: {
      const auto& b = body.as_box();
      Philox rng(seed);
      const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * kPi);
      for (std::size_t i = 0; i < count; ++i) {
        for (int j = 0; j < d; ++j) {
          const double t = b.half_widths[j];
          const double p_interior = 2.0 * t / (1.0 + 2.0 * t);
          double u;
          if (rng.uniform() < p_interior) {
            u = (2.0 * rng.uniform() - 1.0) * t;
          } else {
            const double g = std::abs(rng.gaussian()) * inv_sqrt_2pi;
            u = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (t + g);
          }
          x[j] = b.center[j] + u;
          const double excess = std::abs(u) - t;
          y[j] = excess > 0.0 ? 2.0 * kPi * (u > 0 ? excess : -excess) : 0.0;
        }
        fn(x, y);
      }
      return;
    }
    case BodyKind::ball: {
      const auto& b = body.as_ball();
      const IntrinsicProfile prof =
          profile ? *profile : profile_for(body);
      const DiscreteLaw law = vk_law(prof);
      const AliasTable alias(law.probs);
      Philox rng(seed);
      Eigen::VectorXd dir(d);
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t v = alias.sample(rng);
        const double h = rng.gamma(0.5 * static_cast<double>(d - v));
        for (int j = 0; j < d; ++j) dir[j] = rng.gaussian();
        dir.normalize();
        if (h == 0.0) {
          y.setZero();
          if (need_x) {
            const double radius =
                b.radius * std::pow(rng.uniform_pos(), 1.0 / d);
            x = b.center + radius * dir;
          }
        } else {
          const double dist = std::sqrt(h / kPi);
          y = (2.0 * kPi * dist) * dir;
          if (need_x) x = b.center + (b.radius + dist) * dir;
        }
        fn(x, y);
      }
      return;
    }
    case BodyKind::hpolytope:
    default: {
      const SampleBatch chain = sample_mala(body, count, MalaOptions{}, seed);
      for (std::size_t i = 0; i < count; ++i) {
        x = chain.points.row(static_cast<Eigen::Index>(i)).transpose();
        y = grad_phi(body, x);
        fn(x, y);
      }
      return;
    }
  }
}

double sigma_from_profile_or_sample(const IntrinsicProfile* profile,
                                    const RunningMoments& sample_h) {
  if (profile) return std::sqrt(moments(*profile).sigma2);
  return std::sqrt(sample_h.variance());
}

} // namespace

ABEstimate estimate_A(const ConvexBody& body, const IntrinsicProfile* profile,
                      std::size_t n, SeedSpec seed, const SteinOptions& opts) {
  check_streams(opts, n, "estimate_A");
  const int d = body.dim();
  const std::size_t streams = opts.streams & ~std::size_t{1}; // even split
  const std::size_t half = streams / 2;

  // First half of the streams: m = E[Y] (and sigma, when no profile).
  struct MeanAcc {
    Eigen::VectorXd sum;
    std::size_t count = 0;
    RunningMoments h;
  };
  const auto mean_parts = run_streams<MeanAcc>(
      half, opts.threads, [&](std::size_t s) {
        MeanAcc acc{Eigen::VectorXd::Zero(d), 0, {}};
        const std::size_t chunk = stream_chunk(n, streams, s);
        for_each_gradient(body, profile, chunk,
                          seed.with_stream(seed.stream + s), false,
                          [&](const Eigen::VectorXd&, const Eigen::VectorXd& y) {
                            acc.sum += y;
                            acc.h.add(stein_h(y));
                            ++acc.count;
                          });
        return acc;
      });
  Eigen::VectorXd m_hat = Eigen::VectorXd::Zero(d);
  std::size_t m_count = 0;
  RunningMoments h_moments;
  for (const auto& part : mean_parts) {
    m_hat += part.sum;
    m_count += part.count;
    h_moments.merge(part.h);
  }
  m_hat /= static_cast<double>(m_count);

  // Second half: per-stream variances of the collapsed integrand
  //   S(X) = (1/2pi)(||Y||^2/2 + (pi/4) <Y, m>).
  const auto var_parts = run_streams<RunningMoments>(
      half, opts.threads, [&](std::size_t s) {
        RunningMoments acc;
        const std::size_t stream_index = half + s;
        const std::size_t chunk = stream_chunk(n, streams, stream_index);
        for_each_gradient(
            body, profile, chunk,
            seed.with_stream(seed.stream + stream_index), false,
            [&](const Eigen::VectorXd&, const Eigen::VectorXd& y) {
              const double integral =
                  (0.5 * y.squaredNorm() + 0.25 * kPi * y.dot(m_hat)) /
                  (2.0 * kPi);
              acc.add(integral);
            });
        return acc;
      });

  std::vector<double> stream_vars;
  stream_vars.reserve(half);
  for (const auto& acc : var_parts) stream_vars.push_back(acc.variance());
  const double var_s = mean_of(stream_vars);
  const double se_var =
      std::sqrt(variance_of(stream_vars) / static_cast<double>(half));
  const double sigma = sigma_from_profile_or_sample(profile, h_moments);
  if (!(sigma > 0.0))
    throw_error(ErrorKind::degenerate, "estimate_A: sigma is zero");

  ABEstimate out;
  out.sigma = sigma;
  out.value = 2.0 / (sigma * sigma) * std::sqrt(var_s);
  out.stderr = var_s > 0.0
                   ? 2.0 / (sigma * sigma) * se_var / (2.0 * std::sqrt(var_s))
                   : 0.0;
  return out;
}

ABEstimate estimate_B(const ConvexBody& body, const IntrinsicProfile& profile,
                      std::size_t n, SeedSpec seed, const SteinOptions& opts) {
  check_streams(opts, n, "estimate_B");
  const int d = body.dim();
  if (profile.dim() != d)
    throw_error(ErrorKind::input, "estimate_B: profile dimension mismatch");
  const DiscreteLaw law = vk_law(profile);
  const AliasTable alias(law.probs);
  const SurfaceMeanEvaluator e_p(profile);

  const auto parts = run_streams<std::vector<double>>(
      opts.streams, opts.threads, [&](std::size_t s) {
        const std::size_t chunk = stream_chunk(n, opts.streams, s);
        Philox rng(seed.with_stream(seed.stream + s));
        std::vector<double> values;
        values.reserve(chunk);
        for (std::size_t i = 0; i < chunk; ++i) {
          const std::size_t v = alias.sample(rng);
          const double h = rng.gamma(0.5 * static_cast<double>(d - v));
          // dist = 0 evaluates the p(inf) sentinel: e_p = d - 1.
          const double value =
              h == 0.0 ? static_cast<double>(d - 1)
                       : e_p(1.0 / std::sqrt(h / kPi));
          values.push_back(value);
        }
        return values;
      });

  std::vector<double> values;
  values.reserve(n);
  for (const auto& part : parts)
    values.insert(values.end(), part.begin(), part.end());
  const double sd = std::sqrt(variance_of(values));

  // Bootstrap stderr of the standard deviation.
  constexpr std::size_t kResamples = 200;
  Philox boot(seed.with_stream(seed.stream + 0x626f6f74ull)); // "boot"
  RunningMoments sd_moments;
  for (std::size_t b = 0; b < kResamples; ++b) {
    RunningMoments m;
    for (std::size_t i = 0; i < values.size(); ++i)
      m.add(values[boot.uniform_index(values.size())]);
    sd_moments.add(m.stddev());
  }

  const double sigma = std::sqrt(moments(profile).sigma2);
  if (!(sigma > 0.0))
    throw_error(ErrorKind::degenerate, "estimate_B: sigma is zero");
  ABEstimate out;
  out.sigma = sigma;
  out.value = 1.14 / sigma * sd;
  out.stderr = 1.14 / sigma * sd_moments.stddev();
  return out;
}

Estimate check_ibp(const ConvexBody& body, IbpTestFn fn, std::size_t n,
                   SeedSpec seed, const SteinOptions& opts) {
  check_streams(opts, n, "check_ibp");
  const int d = body.dim();

  auto residual = [fn, d](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    switch (fn) {
      case IbpTestFn::identity:
        return x.dot(y) - static_cast<double>(d);
      case IbpTestFn::constant:
        return y.sum();
      case IbpTestFn::cubic:
      default: {
        const double norm2 = x.squaredNorm();
        return norm2 * x.dot(y) - (d + 2.0) * norm2;
      }
    }
  };

  const auto parts = run_streams<RunningMoments>(
      opts.streams, opts.threads, [&](std::size_t s) {
        RunningMoments acc;
        const std::size_t chunk = stream_chunk(n, opts.streams, s);
        for_each_gradient(body, nullptr, chunk,
                          seed.with_stream(seed.stream + s), true,
                          [&](const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) {
                            acc.add(residual(x, y));
                          });
        return acc;
      });

  std::vector<double> stream_means;
  for (const auto& acc : parts) stream_means.push_back(acc.mean());
  Estimate out;
  out.value = mean_of(stream_means);
  out.stderr = std::sqrt(variance_of(stream_means) /
                         static_cast<double>(stream_means.size()));
  return out;
}

BrascampLiebResult brascamp_lieb_check(const ConvexBody& box, double epsilon,
                                       BlTestFn fn, std::size_t n,
                                       SeedSpec seed,
                                       const SteinOptions& opts) {
  check_streams(opts, n, "brascamp_lieb_check");
  const bool is_point = box.degenerate();
  if (box.kind() != BodyKind::box && !is_point)
    throw_error(ErrorKind::input,
                "brascamp_lieb_check: body must be a box or the point body");
  if (epsilon < 0.0)
    throw_error(ErrorKind::input, "brascamp_lieb_check: epsilon must be >= 0");
  if (epsilon == 0.0 && !is_point)
    throw_error(ErrorKind::input,
                "brascamp_lieb_check: epsilon = 0 makes Hess phi_eps singular "
                "on interior coordinates; only the point body admits it");
  const int d = box.dim();
  const Eigen::VectorXd& center = box.reference_point();

  struct Acc {
    double w = 0.0, wf = 0.0, wf2 = 0.0, wg = 0.0;
  };
  const auto parts = run_streams<Acc>(
      opts.streams, opts.threads, [&](std::size_t s) {
        Acc acc;
        const std::size_t chunk = stream_chunk(n, opts.streams, s);
        const SampleBatch pts = sample_box_exact(
            box, chunk, seed.with_stream(seed.stream + s));
        for (std::size_t i = 0; i < chunk; ++i) {
          const Eigen::VectorXd x =
              pts.points.row(static_cast<Eigen::Index>(i)).transpose();
          const double w = std::exp(-epsilon * kPi * x.squaredNorm());
          double f, g = 0.0;
          if (fn == BlTestFn::linear) {
            f = x.sum();
            for (int j = 0; j < d; ++j) {
              const bool clamped =
                  is_point ||
                  std::abs(x[j] - center[j]) > box.as_box().half_widths[j];
              g += 1.0 / (2.0 * kPi * (epsilon + (clamped ? 1.0 : 0.0)));
            }
          } else {
            f = x.squaredNorm();
            for (int j = 0; j < d; ++j) {
              const bool clamped =
                  is_point ||
                  std::abs(x[j] - center[j]) > box.as_box().half_widths[j];
              g += 4.0 * x[j] * x[j] /
                   (2.0 * kPi * (epsilon + (clamped ? 1.0 : 0.0)));
            }
          }
          acc.w += w;
          acc.wf += w * f;
          acc.wf2 += w * f * f;
          acc.wg += w * g;
        }
        return acc;
      });

  std::vector<double> vars, bounds;
  for (const auto& acc : parts) {
    const double mean_f = acc.wf / acc.w;
    vars.push_back(acc.wf2 / acc.w - mean_f * mean_f);
    bounds.push_back(acc.wg / acc.w);
  }
  BrascampLiebResult out;
  out.variance.value = mean_of(vars);
  out.variance.stderr =
      std::sqrt(variance_of(vars) / static_cast<double>(vars.size()));
  out.bound.value = mean_of(bounds);
  out.bound.stderr =
      std::sqrt(variance_of(bounds) / static_cast<double>(bounds.size()));
  const double slack = 4.0 * std::sqrt(out.variance.stderr * out.variance.stderr +
                                       out.bound.stderr * out.bound.stderr);
  out.holds = out.variance.value <= out.bound.value + slack;
  return out;
}

SteinReport stein_bound(const ConvexBody& body, const IntrinsicProfile& profile,
                        std::size_t n, SeedSpec seed,
                        const SteinOptions& opts) {
  const MomentSummary mom = moments(profile);
  const ABEstimate a = estimate_A(body, &profile, n, seed, opts);
  const ABEstimate b =
      estimate_B(body, profile, n, seed.with_stream(seed.stream + opts.streams),
                 opts);

  // Empirical distance on the same sample budget, via the mixture route.
  const DiscreteLaw law = vk_law(profile);
  SampleBatch h = sample_hk_mixture(
      law, body.dim(), n,
      seed.with_stream(seed.stream + 2 * opts.streams + 1));
  const std::vector<double> f = standardize(h.h, mom);
  const double tv = tv_distance_histogram(f);

  SteinReport report;
  report.d = body.dim();
  report.body = describe(body);
  report.sigma = std::sqrt(mom.sigma2);
  report.a = a.value;
  report.a_stderr = a.stderr;
  report.b = b.value;
  report.b_stderr = b.stderr;
  report.bound = a.value + b.value;
  report.bound_alt = 2.0 * a.value + b.value;
  report.empirical_tv = tv;
  report.n = n;
  report.seed = seed;
  return report;
}

Estimate estimate_tail_probability(const ConvexBody& box, double theta,
                                   std::size_t n, SeedSpec seed,
                                   const SteinOptions& opts) {
  check_streams(opts, n, "estimate_tail_probability");
  if (box.kind() != BodyKind::box)
    throw_error(ErrorKind::input,
                "estimate_tail_probability: body must be a box");
  if (!(theta > 0.0))
    throw_error(ErrorKind::input, "estimate_tail_probability: theta > 0");
  const int d = box.dim();
  const auto& shape = box.as_box();
  const double threshold = kPi * d / (theta * theta); // event {H <= threshold}

  // Tilted per-coordinate mean of h = pi (|u| - T)_+^2 under the density
  // proportional to exp(-t h) f(u).
  auto tilted_mean_sum = [&](double t) {
    double total = 0.0;
    for (int j = 0; j < d; ++j) {
      const double tw = 2.0 * shape.half_widths[j];
      const double tail = 1.0 / std::sqrt(1.0 + t);
      total += (0.5 * tail / (1.0 + t)) / (tw + tail);
    }
    return total;
  };

  double tilt = 0.0;
  if (tilted_mean_sum(0.0) > threshold) {
    double lo = 0.0, hi = 1.0;
    while (tilted_mean_sum(hi) > threshold) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (tilted_mean_sum(mid) > threshold ? lo : hi) = mid;
    }
    tilt = 0.5 * (lo + hi);
  }

  double log_m_total = 0.0; // sum_j log M_j(tilt)
  for (int j = 0; j < d; ++j) {
    const double tw = 2.0 * shape.half_widths[j];
    log_m_total +=
        std::log((tw + 1.0 / std::sqrt(1.0 + tilt)) / (1.0 + tw));
  }

  const auto parts = run_streams<RunningMoments>(
      opts.streams, opts.threads, [&](std::size_t s) {
        RunningMoments acc;
        const std::size_t chunk = stream_chunk(n, opts.streams, s);
        Philox rng(seed.with_stream(seed.stream + s));
        const double tail_sd = 1.0 / std::sqrt(2.0 * kPi * (1.0 + tilt));
        for (std::size_t i = 0; i < chunk; ++i) {
          double h_total = 0.0;
          for (int j = 0; j < d; ++j) {
            const double tw = 2.0 * shape.half_widths[j];
            const double p_interior =
                tw / (tw + 1.0 / std::sqrt(1.0 + tilt));
            if (rng.uniform() < p_interior) {
              rng.uniform(); // position inside is irrelevant to h
            } else {
              const double g = std::abs(rng.gaussian()) * tail_sd;
              h_total += kPi * g * g;
            }
          }
          const double w =
              h_total <= threshold
                  ? std::exp(tilt * h_total + log_m_total)
                  : 0.0;
          acc.add(w);
        }
        return acc;
      });

  std::vector<double> stream_means;
  for (const auto& acc : parts) stream_means.push_back(acc.mean());
  Estimate out;
  out.value = mean_of(stream_means);
  out.stderr = std::sqrt(variance_of(stream_means) /
                         static_cast<double>(stream_means.size()));
  return out;
}

} // namespace wills
