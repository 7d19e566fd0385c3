#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "willslab/geometry.hpp"
#include "willslab/intrinsic.hpp"
#include "willslab/rng.hpp"

namespace wills {

/// F = (H - delta) / sqrt(sigma2). H already carries the pi factor, so this
/// standardizes dist^2 and pi cancels against the moment convention.
std::vector<double> standardize(const std::vector<double>& h,
                                const MomentSummary& m);
/// Same with moments estimated from the sample itself (requires n >= 100).
std::vector<double> standardize_sample_moments(const std::vector<double>& h);

struct KsResult {
  double statistic = 0.0;
  double dkw_band = 0.0; // 99% Dvoretzky-Kiefer-Wolfowitz band
};

/// sup_x |F_n(x) - Phi(x)| with the distribution-free 99% DKW band
/// sqrt(ln(2/0.01) / (2n)).
KsResult ks_distance_to_gaussian(std::vector<double> values);

/// Histogram total-variation proxy: (1/2) sum over equal-probability-under-Phi
/// bins of |empirical mass - 1/bins|. A lower-bound-biased stand-in for the
/// true total variation distance; bins defaults to ceil(n^(1/3)).
double tv_distance_histogram(const std::vector<double>& values,
                             std::size_t bins = 0);

/// Exact L1 distance between the empirical CDF and Phi (Wasserstein-1).
double wasserstein1_to_gaussian(std::vector<double> values);

/// Kolmogorov-Smirnov statistic between two samples.
double two_sample_ks_statistic(std::vector<double> a, std::vector<double> b);
/// Large-sample critical value c(alpha) sqrt((n+m)/(nm)) at alpha = 0.01.
double two_sample_ks_critical_001(std::size_t n, std::size_t m);

struct RateFit {
  double slope = 0.0;
  double stderr = 0.0;
  double intercept = 0.0;
};

/// OLS of log(distance) on log(d).
RateFit rate_fit(const std::vector<double>& ds,
                 const std::vector<double>& distances);

/// Size rule c * d^alpha: half-width for cube families, radius for balls.
struct FamilySpec {
  enum class Kind { cube, ball };
  Kind kind = Kind::cube;
  double c = 0.5;
  double alpha = 0.0;

  double size_at(int d) const;
  std::string name() const;
};

ConvexBody family_body(const FamilySpec& spec, int d);
IntrinsicProfile family_profile(const FamilySpec& spec, int d);

struct CltRow {
  int d = 0;
  double ks = 0.0;
  double ks_band = 0.0;
  double tv = 0.0;
  double w1 = 0.0;
  std::size_t n = 0;
};

struct CltReport {
  FamilySpec family;
  std::vector<CltRow> rows;
  RateFit fit; // log-log fit of KS against d
  SeedSpec seed;
};

struct ExperimentOptions {
  std::size_t streams = 32;
  int threads = 1;
};

/// For each d: build the family profile, draw H through the Gamma-mixture
/// route, standardize with population moments, and record KS (with DKW band),
/// the TV histogram proxy and W1; then fit the log-log rate on KS.
CltReport run_family_experiment(const FamilySpec& spec,
                                const std::vector<int>& d_grid,
                                std::size_t n_per_d, SeedSpec seed,
                                const ExperimentOptions& opts = {});

/// Mixture draws of H for an arbitrary profile, split over streams with a
/// fixed in-order concatenation.
std::vector<double> sample_h_mixture_streams(const IntrinsicProfile& profile,
                                             std::size_t n, SeedSpec seed,
                                             const ExperimentOptions& opts);

} // namespace wills
