#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "willslab/geometry.hpp"
#include "willslab/intrinsic.hpp"
#include "willslab/rng.hpp"
#include "willslab/sampling.hpp"

namespace wills {

struct VolumeEstimate {
  double value = 0.0;
  double stderr = 0.0;
  std::size_t n = 0;
  const char* method = "";
};

/// Hit-or-miss estimate of Vol(K + r B) from the enclosing cube of half-width
/// enclosing_radius(K) + r. Unbiased; binomial stderr. Capped at d <= 8 (use
/// the Wills importance-sampling route beyond that).
VolumeEstimate estimate_parallel_volume(const ConvexBody& body, double r,
                                        std::size_t n, SeedSpec seed);

struct SteinerFitOptions {
  int threads = 1;
  bool constrain_v0 = false; // pin v_0 = 1 instead of fitting it
  double max_condition = 1e12;
};

/// Weighted least-squares recovery of (v_0, ..., v_d) from parallel-volume
/// estimates at the given radii; design matrix entries kappa_{d-k} r^{d-k}.
struct SteinerFit {
  Eigen::VectorXd v;          // fitted intrinsic volumes (length d+1)
  Eigen::MatrixXd covariance; // parameter covariance
  double condition = 0.0;     // of the weighted design
  std::vector<double> radii;
  std::vector<VolumeEstimate> volumes;

  double stderr(int k) const { return std::sqrt(covariance(k, k)); }
  /// Conversion for export; requires all fitted values positive.
  IntrinsicProfile to_profile() const;
};

/// Geometric default radii in [0.25, 4] * enclosing_radius.
std::vector<double> default_steiner_radii(const ConvexBody& body, int count);

SteinerFit fit_steiner(const ConvexBody& body, const std::vector<double>& radii,
                       std::size_t n_per_radius, SeedSpec seed,
                       const SteinerFitOptions& opts = {});

/// Importance-sampling estimates of W(lambda K) = integral of
/// exp(-pi dist^2(x, lambda K)), one Gaussian proposal per lambda.
struct WillsScan {
  std::vector<double> lambdas;
  std::vector<double> estimates;
  std::vector<double> stderrs;
  std::vector<double> ess; // effective sample sizes
};

struct WillsScanOptions {
  int threads = 1;
  double min_ess_fraction = 0.01;
};

WillsScan estimate_wills_scaled(const ConvexBody& body,
                                const std::vector<double>& lambdas,
                                std::size_t n, SeedSpec seed,
                                const WillsScanOptions& opts = {});

/// Solve the Vandermonde system W(lambda K) = sum_k lambda^k v_k for the
/// profile (alternative recovery route to fit_steiner).
SteinerFit recover_profile_from_wills(const WillsScan& scan, int d,
                                      double max_condition = 1e12);

struct SurfaceSliceOptions {
  std::size_t min_hits = 1000;
  double max_band_fraction = 0.05; // band half-width cap, as a fraction of r
  double classify_tol = 1e-9;
  MalaOptions mala; // used for H-polytope draws
};

/// Empirical face-dimension law of draws conditioned on dist in [r-w, r+w],
/// classified by trace_projection_jacobian, against the theoretical p(1/r).
struct SurfaceSliceResult {
  double r = 0.0;
  double band_half_width = 0.0;
  std::size_t hits = 0;
  std::size_t skipped_boundary = 0; // draws rejected as boundary cases
  std::vector<double> empirical;    // histogram over i in {0, ..., d-1}
  SurfaceLaw theoretical;
  double tv = 0.0; // total variation between the two
};

SurfaceSliceResult estimate_surface_slice(const ConvexBody& body,
                                          const IntrinsicProfile& profile,
                                          double r, std::size_t n,
                                          SeedSpec seed,
                                          const SurfaceSliceOptions& opts = {});

/// Steiner polynomial sum_k kappa_{d-k} v_k r^{d-k} evaluated at r.
double steiner_polynomial(const IntrinsicProfile& profile, double r);

} // namespace wills
