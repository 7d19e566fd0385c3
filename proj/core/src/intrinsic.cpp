#include "willslab/intrinsic.hpp"

#include <algorithm>
#include <cmath>

#include "willslab/errors.hpp"
#include "willslab/numeric.hpp"

namespace wills {

IntrinsicProfile::IntrinsicProfile(std::vector<double> log_v)
    : log_v_(std::move(log_v)), log_wills_(log_sum_exp(log_v_)) {}

IntrinsicProfile IntrinsicProfile::from_values(const std::vector<double>& v) {
  if (v.empty())
    throw_error(ErrorKind::input, "IntrinsicProfile: empty value vector");
  std::vector<double> log_v(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 0.0)
      throw_error(ErrorKind::input,
                  "IntrinsicProfile: intrinsic volumes must be nonnegative");
    log_v[k] = v[k] > 0.0 ? std::log(v[k]) : kNegInf;
  }
  return IntrinsicProfile(std::move(log_v));
}

IntrinsicProfile IntrinsicProfile::from_log_values(std::vector<double> log_v) {
  if (log_v.empty())
    throw_error(ErrorKind::input, "IntrinsicProfile: empty log-value vector");
  return IntrinsicProfile(std::move(log_v));
}

std::vector<double> IntrinsicProfile::values() const {
  std::vector<double> v(log_v_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::exp(log_v_[k]);
  return v;
}

IntrinsicProfile profile_box(const Eigen::VectorXd& sides) {
  const int d = static_cast<int>(sides.size());
  if (d < 1) throw_error(ErrorKind::input, "profile_box: empty side vector");
  if (!(sides.array() > 0.0).all())
    throw_error(ErrorKind::input, "profile_box: all sides must be > 0");

  std::vector<double> log_v(static_cast<std::size_t>(d) + 1, kNegInf);
  if (sides.maxCoeff() == sides.minCoeff()) {
    // Equal sides: e_k = C(d,k) s^k, usable far beyond the recurrence range.
    const double log_s = std::log(sides[0]);
    for (int k = 0; k <= d; ++k) log_v[k] = log_choose(d, k) + k * log_s;
    return IntrinsicProfile::from_log_values(std::move(log_v));
  }

  // One-pass elementary-symmetric recurrence, all terms positive.
  log_v[0] = 0.0;
  for (int i = 0; i < d; ++i) {
    const double log_side = std::log(sides[i]);
    for (int k = std::min(i + 1, d); k >= 1; --k)
      log_v[k] = log_add_exp(log_v[k], log_side + log_v[k - 1]);
  }
  return IntrinsicProfile::from_log_values(std::move(log_v));
}

IntrinsicProfile profile_ball(int d, double radius) {
  if (d < 1) throw_error(ErrorKind::input, "profile_ball: d must be >= 1");
  if (!(radius > 0.0))
    throw_error(ErrorKind::input, "profile_ball: radius must be > 0");
  const double log_kd = log_unit_ball_volume(d);
  const double log_r = std::log(radius);
  std::vector<double> log_v(static_cast<std::size_t>(d) + 1);
  for (int k = 0; k <= d; ++k)
    log_v[k] =
        log_choose(d, k) + log_kd - log_unit_ball_volume(d - k) + k * log_r;
  return IntrinsicProfile::from_log_values(std::move(log_v));
}

IntrinsicProfile profile_point(int d) {
  if (d < 1) throw_error(ErrorKind::input, "profile_point: d must be >= 1");
  std::vector<double> log_v(static_cast<std::size_t>(d) + 1, kNegInf);
  log_v[0] = 0.0;
  return IntrinsicProfile::from_log_values(std::move(log_v));
}

IntrinsicProfile profile_for(const ConvexBody& body) {
  switch (body.kind()) {
    case BodyKind::box:
      return profile_box(2.0 * body.as_box().half_widths);
    case BodyKind::ball: {
      const auto& b = body.as_ball();
      if (b.degenerate) return profile_point(body.dim());
      return profile_ball(body.dim(), b.radius);
    }
    case BodyKind::hpolytope:
    default:
      throw_error(ErrorKind::input,
                  "profile_for: no closed form for H-polytopes; recover one "
                  "with fit_steiner or estimate_wills_scaled");
  }
}

double DiscreteLaw::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k)
    m += static_cast<double>(k) * probs[k];
  return m;
}

double DiscreteLaw::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double c = static_cast<double>(k) - m;
    v += c * c * probs[k];
  }
  return v;
}

DiscreteLaw vk_law(const IntrinsicProfile& profile) {
  const auto& log_v = profile.log_values();
  const double hi = *std::max_element(log_v.begin(), log_v.end());
  DiscreteLaw law;
  law.probs.resize(log_v.size());
  double total = 0.0;
  for (std::size_t k = 0; k < log_v.size(); ++k) {
    law.probs[k] = std::exp(log_v[k] - hi);
    total += law.probs[k];
  }
  for (double& p : law.probs) p /= total;
  return law;
}

bool is_ultra_log_concave(const std::vector<double>& x, double tol) {
  for (double v : x)
    if (v < 0.0) return false;
  for (std::size_t k = 1; k + 1 < x.size(); ++k) {
    const double lhs = static_cast<double>(k) * x[k] * x[k];
    const double rhs = static_cast<double>(k + 1) * x[k - 1] * x[k + 1];
    const double scale = std::max(lhs, rhs);
    if (lhs < rhs - tol * scale) return false;
  }
  return true;
}

bool is_ultra_log_concave_log(const std::vector<double>& log_x, double tol) {
  for (std::size_t k = 1; k + 1 < log_x.size(); ++k) {
    const double lhs = std::log(static_cast<double>(k)) + 2.0 * log_x[k];
    const double rhs = std::log(static_cast<double>(k + 1)) + log_x[k - 1] +
                       log_x[k + 1];
    if (rhs == kNegInf) continue;
    if (lhs == kNegInf || lhs < rhs - tol) return false;
  }
  return true;
}

UlcMomentBounds ulc_moment_bounds(const DiscreteLaw& law, double tol) {
  if (law.probs.empty())
    throw_error(ErrorKind::input, "ulc_moment_bounds: empty law");
  if (!(law.probs[0] > 0.0))
    throw_error(ErrorKind::degenerate,
                "ulc_moment_bounds: law has x_0 = 0; bound x_1/x_0 undefined");
  if (!is_ultra_log_concave(law.probs, tol))
    throw_error(ErrorKind::input,
                "ulc_moment_bounds: law is not ultra log-concave");

  UlcMomentBounds out;
  const double x1 = law.probs.size() > 1 ? law.probs[1] : 0.0;
  out.mean_bound = x1 / law.probs[0];
  out.var_bound = out.mean_bound;
  out.mean = law.mean();
  out.variance = law.variance();
  const double slack = tol * (1.0 + out.mean_bound);
  out.mean_within = out.mean <= out.mean_bound + slack;
  out.var_within = out.variance <= out.var_bound + slack;
  const double d = static_cast<double>(law.upper());
  if (d + out.mean > 0.0) {
    const double lt = 2.0 * (d - out.mean) / (d + out.mean) * out.mean;
    out.lotz_tropp_within = out.variance <= lt + tol * (1.0 + lt);
  } else {
    out.lotz_tropp_within = out.variance <= tol;
  }
  return out;
}

SurfaceLaw surface_law(const IntrinsicProfile& profile, double s) {
  const int d = profile.dim();
  SurfaceLaw law;
  law.d = d;
  law.s = s;
  law.probs.assign(static_cast<std::size_t>(d), 0.0);
  if (std::isinf(s) && s > 0.0) {
    // Convention: p(inf) puts all mass on the top index.
    law.probs[d - 1] = 1.0;
    law.e_p = d - 1;
    law.var_p = 0.0;
    return law;
  }
  if (!(s > 0.0))
    throw_error(ErrorKind::input, "surface_law: s must be > 0 (or +inf)");

  const double log_s = std::log(s);
  std::vector<double> log_q(static_cast<std::size_t>(d), kNegInf);
  double hi = kNegInf;
  for (int i = 0; i < d; ++i) {
    if (profile.log_v(i) == kNegInf) continue;
    log_q[i] = std::log(static_cast<double>(d - i)) + profile.log_v(i) +
               log_unit_ball_volume(d - i) + i * log_s;
    hi = std::max(hi, log_q[i]);
  }
  if (hi == kNegInf)
    throw_error(ErrorKind::degenerate, "surface_law: vanishing profile");
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    law.probs[i] = std::exp(log_q[i] - hi);
    total += law.probs[i];
  }
  double e_p = 0.0;
  for (int i = 0; i < d; ++i) {
    law.probs[i] /= total;
    e_p += i * law.probs[i];
  }
  double var_p = 0.0;
  for (int i = 0; i < d; ++i) {
    const double c = i - e_p;
    var_p += c * c * law.probs[i];
  }
  law.e_p = e_p;
  law.var_p = var_p;
  return law;
}

double surface_law_mean(const IntrinsicProfile& profile, double s) {
  if (std::isinf(s) && s > 0.0) return profile.dim() - 1;
  return surface_law(profile, s).e_p;
}

SurfaceMeanEvaluator::SurfaceMeanEvaluator(const IntrinsicProfile& profile)
    : d_(profile.dim()), log_coeff_(static_cast<std::size_t>(profile.dim())) {
  for (int i = 0; i < d_; ++i) {
    log_coeff_[i] = profile.log_v(i) == kNegInf
                        ? kNegInf
                        : std::log(static_cast<double>(d_ - i)) +
                              profile.log_v(i) + log_unit_ball_volume(d_ - i);
  }
}

double SurfaceMeanEvaluator::operator()(double s) const {
  if (std::isinf(s) && s > 0.0) return d_ - 1;
  if (!(s > 0.0))
    throw_error(ErrorKind::input, "SurfaceMeanEvaluator: s must be > 0");
  const double log_s = std::log(s);
  double hi = kNegInf;
  for (int i = 0; i < d_; ++i) {
    if (log_coeff_[i] == kNegInf) continue;
    hi = std::max(hi, log_coeff_[i] + i * log_s);
  }
  double total = 0.0, weighted = 0.0;
  for (int i = 0; i < d_; ++i) {
    if (log_coeff_[i] == kNegInf) continue;
    const double t = std::exp(log_coeff_[i] + i * log_s - hi);
    total += t;
    weighted += i * t;
  }
  return weighted / total;
}

MomentSummary moments(const IntrinsicProfile& profile) {
  const DiscreteLaw law = vk_law(profile);
  MomentSummary m;
  m.mean_v = law.mean();
  m.tau2 = law.variance();
  m.delta = (profile.dim() - m.mean_v) / 2.0;
  m.sigma2 = m.tau2 / 4.0 + m.delta;
  return m;
}

} // namespace wills
