#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "willslab/geometry.hpp"
#include "willslab/intrinsic.hpp"
#include "willslab/rng.hpp"

namespace wills {

enum class BatchKind { points, h_values };
enum class SamplerTag { box_exact, ball_exact, mixture, mala };

struct MalaDiagnostics {
  double acceptance_rate = 0.0;
  double ess = 0.0; // effective sample size of the pi*dist^2 series
};

/// Reproducibly seeded draws of X_K (points) or H_K (h_values).
struct SampleBatch {
  BatchKind kind = BatchKind::points;
  SamplerTag sampler = SamplerTag::box_exact;
  SeedSpec seed;
  std::string origin;        // body or law description
  int dim = 0;               // body dimension (1 for h_values batches)
  Eigen::MatrixXd points;    // kind == points: one row per draw
  std::vector<double> h;     // kind == h_values
  std::optional<MalaDiagnostics> diagnostics;

  std::size_t size() const {
    return kind == BatchKind::points ? static_cast<std::size_t>(points.rows())
                                     : h.size();
  }
};

/// Exact per-coordinate sampler for boxes (and the degenerate point body,
/// whose marginals are plain Gaussians with variance 1/(2 pi)). Per
/// coordinate with half-width T: uniform on [-T, T] with probability
/// 2T/(1+2T), otherwise T + |half-Gaussian| with a random sign.
SampleBatch sample_box_exact(const ConvexBody& box, std::size_t n,
                             SeedSpec seed);

/// Exact sampler for balls: the distance comes from the Gamma-mixture route
/// and the direction is uniform on the sphere; draws that land inside are
/// uniform in the ball.
SampleBatch sample_ball_exact(const ConvexBody& ball, std::size_t n,
                              SeedSpec seed);

/// H_K as a Gamma mixture: V from the law, then H ~ Gamma((d-V)/2, 1), with
/// H = 0 exactly when V = d.
SampleBatch sample_hk_mixture(const DiscreteLaw& law, int d, std::size_t n,
                              SeedSpec seed);

struct MalaOptions {
  std::size_t burn_in = 2000;
  double step = 0.5;          // proposal scale; tuned during burn-in
  std::size_t thin = 1;       // keep every thin-th post-burn-in state
  bool auto_tune = true;
  double target_accept = 0.55;
};

/// Metropolis-adjusted Langevin chain targeting the Hadwiger-Wills density
/// exp(-pi dist^2(x, K)) / W(K), initialized at the body's reference point.
/// The step is tuned toward `target_accept` by stochastic approximation
/// during burn-in, then frozen; a post-tuning acceptance rate outside
/// [0.1, 0.9] raises a tuning error.
SampleBatch sample_mala(const ConvexBody& body, std::size_t n,
                        const MalaOptions& opts, SeedSpec seed);

/// Elementwise H = pi * dist^2(x, K).
SampleBatch h_from_points(const ConvexBody& body, const SampleBatch& batch);

/// Draw points by the fastest exact route (box_exact / ball_exact), falling
/// back to MALA for H-polytopes.
SampleBatch sample_points_auto(const ConvexBody& body, std::size_t n,
                               SeedSpec seed, const MalaOptions& opts = {});

/// CSV: one row per draw. Binary: 16-byte header (magic "WLSB", version,
/// count, dim as little-endian u32) followed by little-endian f64 values in
/// row-major order.
void write_batch_csv(const SampleBatch& batch, std::ostream& out);
void write_batch_binary(const SampleBatch& batch, std::ostream& out);
SampleBatch read_batch_binary(std::istream& in);

const char* to_string(SamplerTag tag);

} // namespace wills
