#pragma once

#include <Eigen/Dense>
#include <vector>

#include "willslab/geometry.hpp"

namespace wills {

/// The vector (v_0, ..., v_d) of intrinsic volumes together with the total
/// intrinsic volume W(K) = sum_k v_k. Values are kept in log space so that
/// large-dimensional profiles (v_k overflows well before d = 10^4) stay
/// representable; exact zeros are stored as -inf.
class IntrinsicProfile {
public:
  static IntrinsicProfile from_values(const std::vector<double>& v);
  static IntrinsicProfile from_log_values(std::vector<double> log_v);

  int dim() const { return static_cast<int>(log_v_.size()) - 1; }
  double log_v(int k) const { return log_v_.at(static_cast<std::size_t>(k)); }
  double v(int k) const { return std::exp(log_v(k)); }
  const std::vector<double>& log_values() const { return log_v_; }
  std::vector<double> values() const;

  double log_wills() const { return log_wills_; }
  double wills() const { return std::exp(log_wills_); }

private:
  explicit IntrinsicProfile(std::vector<double> log_v);

  std::vector<double> log_v_;
  double log_wills_;
};

/// v_k = e_k(sides), the k-th elementary symmetric polynomial of the side
/// lengths. Equal sides take the closed form C(d,k) s^k (valid up to d ~ 1e6);
/// general boxes run the stable one-pass recurrence in log space.
IntrinsicProfile profile_box(const Eigen::VectorXd& sides);

/// v_k = C(d,k) (kappa_d / kappa_{d-k}) R^k.
IntrinsicProfile profile_ball(int d, double radius);

/// The point body {c} in R^d: v = (1, 0, ..., 0).
IntrinsicProfile profile_point(int d);

/// Closed-form profile for boxes, balls and point bodies; input error for
/// H-polytopes (use volumetry's Monte Carlo recovery for those).
IntrinsicProfile profile_for(const ConvexBody& body);

/// A probability vector on {0, ..., m}.
struct DiscreteLaw {
  std::vector<double> probs;

  std::size_t upper() const { return probs.size() - 1; }
  double mean() const;
  double variance() const;
};

/// P(V_K = k) = v_k(K) / W(K).
DiscreteLaw vk_law(const IntrinsicProfile& profile);

/// k x_k^2 >= (k+1) x_{k-1} x_{k+1} for all interior k, up to tol times the
/// larger of the two sides.
bool is_ultra_log_concave(const std::vector<double>& x, double tol = 1e-12);
/// Same test on log values (handles profiles whose raw values overflow).
bool is_ultra_log_concave_log(const std::vector<double>& log_x,
                              double tol = 1e-12);

struct UlcMomentBounds {
  double mean_bound = 0.0; // x_1 / x_0
  double var_bound = 0.0;  // x_1 / x_0
  double mean = 0.0;
  double variance = 0.0;
  bool mean_within = false;
  bool var_within = false;
  /// Var <= 2 (d - E)/(d + E) E, monitored alongside the Poincare-type bound.
  bool lotz_tropp_within = false;
};

/// Poincare-type moment bounds for an ultra log-concave law with x_0 > 0.
UlcMomentBounds ulc_moment_bounds(const DiscreteLaw& law, double tol = 1e-9);

/// Face-dimension law of a uniform point on the parallel surface at distance
/// 1/s: p_i(s) ~ (d-i) v_i(K) kappa_{d-i} s^i on i in {0, ..., d-1}.
/// The sentinel s = +inf returns (0, ..., 0, 1).
struct SurfaceLaw {
  int d = 0;
  double s = 0.0;
  std::vector<double> probs; // size d
  double e_p = 0.0;          // sum_i i p_i(s)
  double var_p = 0.0;        // sum_i i^2 p_i(s) - e_p^2
};

SurfaceLaw surface_law(const IntrinsicProfile& profile, double s);

/// e_p(s) alone, without materializing the law.
double surface_law_mean(const IntrinsicProfile& profile, double s);

/// Allocation-free e_p(s) evaluator for hot loops; precomputes the
/// s-independent log coefficients log((d-i) v_i kappa_{d-i}).
class SurfaceMeanEvaluator {
public:
  explicit SurfaceMeanEvaluator(const IntrinsicProfile& profile);
  /// e_p(s); accepts the +inf sentinel (returns d-1).
  double operator()(double s) const;
  int dim() const { return d_; }

private:
  int d_;
  std::vector<double> log_coeff_; // size d, -inf where v_i = 0
};

/// delta = E[pi dist^2(X_K, K)], sigma2 = Var(pi dist^2), tau2 = Var(V_K).
/// delta = (d - E[V_K]) / 2 and sigma2 = tau2 / 4 + delta, both exact given a
/// profile. (The identities pin delta to the pi-scaled squared distance; the
/// per-coordinate quadrature oracle in the tests confirms the convention.)
struct MomentSummary {
  double delta = 0.0;
  double sigma2 = 0.0;
  double tau2 = 0.0;
  double mean_v = 0.0;
};

MomentSummary moments(const IntrinsicProfile& profile);

} // namespace wills
