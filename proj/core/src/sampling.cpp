#include "willslab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "willslab/errors.hpp"
#include "willslab/numeric.hpp"

namespace wills {

namespace {

constexpr std::uint32_t kBatchMagic = 0x42534C57u; // "WLSB" little-endian
constexpr std::uint32_t kBatchVersion = 1u;

double box_half_width(const ConvexBody& body, int i) {
  if (body.kind() == BodyKind::box) return body.as_box().half_widths[i];
  return 0.0; // degenerate point body
}

const Eigen::VectorXd& box_center(const ConvexBody& body) {
  return body.reference_point();
}

bool box_like(const ConvexBody& body) {
  return body.kind() == BodyKind::box || body.degenerate();
}

} // namespace

SampleBatch sample_box_exact(const ConvexBody& box, std::size_t n,
                             SeedSpec seed) {
  if (!box_like(box))
    throw_error(ErrorKind::input,
                "sample_box_exact: body must be a box (or the point body)");
  const int d = box.dim();
  const Eigen::VectorXd& center = box_center(box);
  Philox rng(seed);

  SampleBatch batch;
  batch.kind = BatchKind::points;
  batch.sampler = SamplerTag::box_exact;
  batch.seed = seed;
  batch.origin = describe(box);
  batch.dim = d;
  batch.points.resize(static_cast<Eigen::Index>(n), d);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * kPi);
  for (std::size_t row = 0; row < n; ++row) {
    for (int i = 0; i < d; ++i) {
      const double t = box_half_width(box, i);
      const double p_interior = 2.0 * t / (1.0 + 2.0 * t);
      double u;
      if (rng.uniform() < p_interior) {
        u = (2.0 * rng.uniform() - 1.0) * t;
      } else {
        const double g = std::abs(rng.gaussian()) * inv_sqrt_2pi;
        u = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (t + g);
      }
      batch.points(static_cast<Eigen::Index>(row), i) = center[i] + u;
    }
  }
  return batch;
}

SampleBatch sample_ball_exact(const ConvexBody& ball, std::size_t n,
                              SeedSpec seed) {
  if (ball.kind() != BodyKind::ball)
    throw_error(ErrorKind::input, "sample_ball_exact: body must be a ball");
  const int d = ball.dim();
  const auto& shape = ball.as_ball();
  const DiscreteLaw law = vk_law(profile_for(ball));
  const AliasTable alias(law.probs);
  Philox rng(seed);

  SampleBatch batch;
  batch.kind = BatchKind::points;
  batch.sampler = SamplerTag::ball_exact;
  batch.seed = seed;
  batch.origin = describe(ball);
  batch.dim = d;
  batch.points.resize(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd dir(d);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t v = alias.sample(rng);
    const double shape_param = 0.5 * static_cast<double>(d - v);
    const double h = rng.gamma(shape_param);
    for (int i = 0; i < d; ++i) dir[i] = rng.gaussian();
    dir.normalize();
    double radius;
    if (h == 0.0) {
      // Conditional on landing inside, X is uniform in the ball.
      radius = shape.radius * std::pow(rng.uniform_pos(), 1.0 / d);
    } else {
      radius = shape.radius + std::sqrt(h / kPi);
    }
    batch.points.row(static_cast<Eigen::Index>(row)) =
        (shape.center + radius * dir).transpose();
  }
  return batch;
}

SampleBatch sample_hk_mixture(const DiscreteLaw& law, int d, std::size_t n,
                              SeedSpec seed) {
  if (law.probs.empty())
    throw_error(ErrorKind::input, "sample_hk_mixture: empty law");
  if (static_cast<int>(law.upper()) > d)
    throw_error(ErrorKind::input,
                "sample_hk_mixture: law support exceeds the dimension");
  const AliasTable alias(law.probs);
  Philox rng(seed);

  SampleBatch batch;
  batch.kind = BatchKind::h_values;
  batch.sampler = SamplerTag::mixture;
  batch.seed = seed;
  batch.origin = "law(m=" + std::to_string(law.upper()) + ",d=" +
                 std::to_string(d) + ")";
  batch.dim = 1;
  batch.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = alias.sample(rng);
    batch.h[i] = rng.gamma(0.5 * static_cast<double>(d - v));
  }
  return batch;
}

namespace {

struct MalaState {
  Eigen::VectorXd x;
  Eigen::VectorXd projected;
  double dist2 = 0.0;
};

MalaState make_state(const ConvexBody& body, Eigen::VectorXd x) {
  MalaState s;
  const ProjectionResult proj = project(body, x);
  s.projected = proj.point;
  s.dist2 = proj.distance * proj.distance;
  s.x = std::move(x);
  return s;
}

/// Effective sample size via the Geyer initial-positive-sequence estimator on
/// the autocovariances of the series.
double effective_sample_size(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 4) return static_cast<double>(n);
  const double m = mean_of(series);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - m;
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      s += centered[i] * centered[i + lag];
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  double iact = 1.0;
  const std::size_t max_lag = std::min<std::size_t>(n / 2, 2000);
  for (std::size_t k = 1; k + 1 <= max_lag; k += 2) {
    const double pair = (autocov(k) + autocov(k + 1)) / c0;
    if (pair <= 0.0) break;
    iact += 2.0 * pair;
  }
  return static_cast<double>(n) / iact;
}

} // namespace

SampleBatch sample_mala(const ConvexBody& body, std::size_t n,
                        const MalaOptions& opts, SeedSpec seed) {
  if (!(opts.step > 0.0))
    throw_error(ErrorKind::input, "sample_mala: step must be > 0");
  if (opts.thin == 0)
    throw_error(ErrorKind::input, "sample_mala: thin must be >= 1");
  const int d = body.dim();
  Philox rng(seed);

  double log_step = std::log(opts.step);
  MalaState state = make_state(body, body.reference_point());
  Eigen::VectorXd noise(d), proposal(d);

  auto mala_step = [&](double tau, double& accept_prob) -> bool {
    const double tau2 = tau * tau;
    // grad log pi = -2 pi (x - P(x))
    const Eigen::VectorXd drift =
        state.x - tau2 * kPi * (state.x - state.projected);
    for (int i = 0; i < d; ++i) noise[i] = rng.gaussian();
    proposal = drift + tau * noise;
    MalaState next = make_state(body, proposal);
    const Eigen::VectorXd reverse_drift =
        next.x - tau2 * kPi * (next.x - next.projected);
    const double log_fwd = -(proposal - drift).squaredNorm() / (2.0 * tau2);
    const double log_rev = -(state.x - reverse_drift).squaredNorm() / (2.0 * tau2);
    const double log_alpha =
        -kPi * next.dist2 + kPi * state.dist2 + log_rev - log_fwd;
    accept_prob = std::min(1.0, std::exp(std::min(0.0, log_alpha)));
    if (std::log(rng.uniform_pos()) < log_alpha) {
      state = std::move(next);
      return true;
    }
    return false;
  };

  // Burn-in with Robbins-Monro tuning of log(step) toward target_accept.
  for (std::size_t t = 1; t <= opts.burn_in; ++t) {
    double accept_prob = 0.0;
    mala_step(std::exp(log_step), accept_prob);
    if (opts.auto_tune) {
      const double gain =
          1.0 / std::pow(static_cast<double>(std::max<std::size_t>(t, 10)), 0.6);
      log_step += gain * (accept_prob - opts.target_accept);
    }
  }
  const double tau = std::exp(log_step);

  SampleBatch batch;
  batch.kind = BatchKind::points;
  batch.sampler = SamplerTag::mala;
  batch.seed = seed;
  batch.origin = describe(body);
  batch.dim = d;
  batch.points.resize(static_cast<Eigen::Index>(n), d);
  std::vector<double> h_series;
  h_series.reserve(n);
  std::size_t accepted = 0, proposed = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t s = 0; s < opts.thin; ++s) {
      double accept_prob = 0.0;
      accepted += mala_step(tau, accept_prob) ? 1u : 0u;
      ++proposed;
    }
    batch.points.row(static_cast<Eigen::Index>(k)) = state.x.transpose();
    h_series.push_back(kPi * state.dist2);
  }

  MalaDiagnostics diag;
  diag.acceptance_rate =
      proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;
  diag.ess = effective_sample_size(h_series);
  batch.diagnostics = diag;
  if (diag.acceptance_rate < 0.1 || diag.acceptance_rate > 0.9)
    throw_error(ErrorKind::tuning,
                "sample_mala: acceptance rate " +
                    std::to_string(diag.acceptance_rate) +
                    " outside [0.1, 0.9]; adjust `step` or enable auto_tune");
  return batch;
}

SampleBatch h_from_points(const ConvexBody& body, const SampleBatch& batch) {
  if (batch.kind != BatchKind::points)
    throw_error(ErrorKind::input, "h_from_points: batch must contain points");
  if (batch.dim != body.dim())
    throw_error(ErrorKind::input, "h_from_points: dimension mismatch");
  SampleBatch out;
  out.kind = BatchKind::h_values;
  out.sampler = batch.sampler;
  out.seed = batch.seed;
  out.origin = batch.origin;
  out.dim = 1;
  out.diagnostics = batch.diagnostics;
  const std::size_t n = batch.size();
  out.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dist =
        distance_to(body, batch.points.row(static_cast<Eigen::Index>(i))
                              .transpose());
    out.h[i] = kPi * dist * dist;
  }
  return out;
}

SampleBatch sample_points_auto(const ConvexBody& body, std::size_t n,
                               SeedSpec seed, const MalaOptions& opts) {
  switch (body.kind()) {
    case BodyKind::box:
      return sample_box_exact(body, n, seed);
    case BodyKind::ball:
      if (body.degenerate()) return sample_box_exact(body, n, seed);
      return sample_ball_exact(body, n, seed);
    case BodyKind::hpolytope:
    default:
      return sample_mala(body, n, opts, seed);
  }
}

const char* to_string(SamplerTag tag) {
  switch (tag) {
    case SamplerTag::box_exact: return "box_exact";
    case SamplerTag::ball_exact: return "ball_exact";
    case SamplerTag::mixture: return "mixture";
    case SamplerTag::mala: return "mala";
  }
  return "unknown";
}

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
  out.precision(17);
  if (batch.kind == BatchKind::points) {
    for (int j = 0; j < batch.dim; ++j) out << (j ? ",x" : "x") << j;
    out << "\n";
    for (Eigen::Index i = 0; i < batch.points.rows(); ++i) {
      for (int j = 0; j < batch.dim; ++j) {
        if (j) out << ",";
        out << batch.points(i, j);
      }
      out << "\n";
    }
  } else {
    out << "h\n";
    for (double v : batch.h) out << v << "\n";
  }
}

void write_batch_binary(const SampleBatch& batch, std::ostream& out) {
  // Kind travels in the high half of the version word.
  const std::uint32_t version_word =
      kBatchVersion |
      (batch.kind == BatchKind::h_values ? 0x00010000u : 0u);
  const std::uint32_t header[4] = {
      kBatchMagic, version_word, static_cast<std::uint32_t>(batch.size()),
      static_cast<std::uint32_t>(batch.kind == BatchKind::points ? batch.dim
                                                                 : 1)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  if (batch.kind == BatchKind::points) {
    for (Eigen::Index i = 0; i < batch.points.rows(); ++i)
      for (int j = 0; j < batch.dim; ++j) {
        const double v = batch.points(i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
  } else {
    out.write(reinterpret_cast<const char*>(batch.h.data()),
              static_cast<std::streamsize>(batch.h.size() * sizeof(double)));
  }
}

SampleBatch read_batch_binary(std::istream& in) {
  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || header[0] != kBatchMagic)
    throw_error(ErrorKind::input, "read_batch_binary: bad magic");
  if ((header[1] & 0xFFFFu) != kBatchVersion)
    throw_error(ErrorKind::input, "read_batch_binary: unsupported version");
  const bool is_h = (header[1] >> 16) != 0;
  const std::size_t count = header[2];
  const int dim = static_cast<int>(header[3]);
  SampleBatch batch;
  batch.dim = dim;
  if (is_h) {
    batch.kind = BatchKind::h_values;
    batch.h.resize(count);
    in.read(reinterpret_cast<char*>(batch.h.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  } else {
    batch.kind = BatchKind::points;
    batch.points.resize(static_cast<Eigen::Index>(count), dim);
    for (std::size_t i = 0; i < count; ++i)
      for (int j = 0; j < dim; ++j) {
        double v;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        batch.points(static_cast<Eigen::Index>(i), j) = v;
      }
  }
  if (!in) throw_error(ErrorKind::input, "read_batch_binary: truncated data");
  return batch;
}

} // namespace wills
