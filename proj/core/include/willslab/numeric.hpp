#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace wills {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; handles -inf operands.
double log_add_exp(double a, double b);

/// log(sum_i exp(x_i)); returns -inf for an empty or all -inf input.
double log_sum_exp(const std::vector<double>& x);

/// log C(n, k); requires 0 <= k <= n.
double log_choose(std::int64_t n, std::int64_t k);

/// log of kappa_j = Vol_j(unit ball of R^j) = pi^{j/2} / Gamma(1 + j/2).
/// Stable for j up to ~1e6.
double log_unit_ball_volume(int j);

/// kappa_j itself (exponentiated; underflows to 0 for very large j).
double unit_ball_volume(int j);

/// Standard normal density, CDF and quantile.
double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse of normal_cdf, accurate to ~1e-13 over (0, 1) after a Halley polish.
double normal_quantile(double p);

/// Streaming moment accumulator (Welford / Pebay updates up to order four).
class RunningMoments {
public:
  void add(double x) {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
           4.0 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 when fewer than two observations.
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_of_mean() const {
    return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
  }
  /// Fourth central moment (biased, plug-in), used for variance stderrs.
  double fourth_central_moment() const {
    return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0;
  }
  /// Delta-method standard error of the sample variance.
  double stderr_of_variance() const {
    if (n_ < 2) return 0.0;
    const double v = m2_ / static_cast<double>(n_);
    const double mu4 = fourth_central_moment();
    const double var_of_var = (mu4 - v * v) / static_cast<double>(n_);
    return var_of_var > 0 ? std::sqrt(var_of_var) : 0.0;
  }

  /// Pool with another accumulator (parallel-combine form of the updates).
  void merge(const RunningMoments& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    const double d2 = delta * delta;
    const double m4 = m4_ + other.m4_ +
                      d2 * d2 * na * nb * (na * na - na * nb + nb * nb) /
                          (n * n * n) +
                      6.0 * d2 * (na * na * other.m2_ + nb * nb * m2_) /
                          (n * n) +
                      4.0 * delta * (na * other.m3_ - nb * m3_) / n;
    const double m3 = m3_ + other.m3_ +
                      delta * d2 * na * nb * (na - nb) / (n * n) +
                      3.0 * delta * (na * other.m2_ - nb * m2_) / n;
    const double m2 = m2_ + other.m2_ + d2 * na * nb / n;
    mean_ += delta * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += other.n_;
  }

private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

/// Mean and unbiased variance of a vector (two-pass, deterministic order).
double mean_of(const std::vector<double>& x);
double variance_of(const std::vector<double>& x);

} // namespace wills
