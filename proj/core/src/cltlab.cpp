#include "willslab/cltlab.hpp"

#include <algorithm>
#include <cmath>

#include "willslab/errors.hpp"
#include "willslab/numeric.hpp"
#include "willslab/parallel.hpp"
#include "willslab/sampling.hpp"

namespace wills {

std::vector<double> standardize(const std::vector<double>& h,
                                const MomentSummary& m) {
  if (!(m.sigma2 > 0.0))
    throw_error(ErrorKind::degenerate, "standardize: zero variance");
  const double scale = 1.0 / std::sqrt(m.sigma2);
  std::vector<double> f(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) f[i] = (h[i] - m.delta) * scale;
  return f;
}

std::vector<double> standardize_sample_moments(const std::vector<double>& h) {
  if (h.size() < 100)
    throw_error(ErrorKind::input,
                "standardize: need n >= 100 for sample moments");
  MomentSummary m;
  m.delta = mean_of(h);
  m.sigma2 = variance_of(h);
  if (!(m.sigma2 > 0.0))
    throw_error(ErrorKind::degenerate,
                "standardize: sample variance is zero (constant input)");
  return standardize(h, m);
}

KsResult ks_distance_to_gaussian(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n < 10)
    throw_error(ErrorKind::input, "ks_distance_to_gaussian: need n >= 10");
  std::sort(values.begin(), values.end());
  double stat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = normal_cdf(values[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    stat = std::max(stat, std::max(cdf - lo, hi - cdf));
  }
  KsResult out;
  out.statistic = stat;
  out.dkw_band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
  return out;
}

double tv_distance_histogram(const std::vector<double>& values,
                             std::size_t bins) {
  const std::size_t n = values.size();
  if (n < 1000)
    throw_error(ErrorKind::input, "tv_distance_histogram: need n >= 1000");
  const std::size_t m =
      bins > 0 ? bins
               : static_cast<std::size_t>(
                     std::ceil(std::pow(static_cast<double>(n), 1.0 / 3.0)));
  std::vector<std::size_t> counts(m, 0);
  for (double v : values) {
    const double u = normal_cdf(v);
    std::size_t b = static_cast<std::size_t>(u * static_cast<double>(m));
    if (b >= m) b = m - 1;
    ++counts[b];
  }
  const double uniform = 1.0 / static_cast<double>(m);
  double tv = 0.0;
  for (std::size_t b = 0; b < m; ++b)
    tv += std::abs(static_cast<double>(counts[b]) / n - uniform);
  return 0.5 * tv;
}

namespace {

// Antiderivative of Phi: G(x) = x Phi(x) + phi(x); G -> 0 at -inf.
double big_g(double x) { return x * normal_cdf(x) + normal_pdf(x); }

} // namespace

double wasserstein1_to_gaussian(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n < 2)
    throw_error(ErrorKind::input, "wasserstein1_to_gaussian: need n >= 2");
  std::sort(values.begin(), values.end());
  double w1 = big_g(values.front()); // integral of Phi over the left tail
  for (std::size_t i = 1; i < n; ++i) {
    const double a = values[i - 1], b = values[i];
    if (a == b) continue;
    const double level = static_cast<double>(i) / n;
    const double crossing = normal_quantile(level);
    auto piece = [&](double lo, double hi) {
      // integral over [lo, hi] of |level - Phi|, sign fixed on the piece
      const double raw = level * (hi - lo) - (big_g(hi) - big_g(lo));
      return std::abs(raw);
    };
    if (crossing <= a || crossing >= b)
      w1 += piece(a, b);
    else
      w1 += piece(a, crossing) + piece(crossing, b);
  }
  w1 += big_g(values.back()) - values.back(); // right tail of 1 - Phi
  return w1;
}

double two_sample_ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw_error(ErrorKind::input, "two_sample_ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double stat = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    stat = std::max(stat, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return stat;
}

double two_sample_ks_critical_001(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return 1.628 * std::sqrt((nn + mm) / (nn * mm));
}

RateFit rate_fit(const std::vector<double>& ds,
                 const std::vector<double>& distances) {
  const std::size_t n = ds.size();
  if (n < 3 || distances.size() != n)
    throw_error(ErrorKind::input, "rate_fit: need at least 3 grid points");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(ds[i] > 0.0) || !(distances[i] > 0.0))
      throw_error(ErrorKind::input, "rate_fit: inputs must be positive");
    x[i] = std::log(ds[i]);
    y[i] = std::log(distances[i]);
  }
  const double xbar = mean_of(x), ybar = mean_of(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += r * r;
  }
  fit.stderr = n > 2 ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx)
                     : 0.0;
  return fit;
}

double FamilySpec::size_at(int d) const {
  return c * std::pow(static_cast<double>(d), alpha);
}

std::string FamilySpec::name() const {
  return kind == Kind::cube ? "cube" : "ball";
}

ConvexBody family_body(const FamilySpec& spec, int d) {
  const double size = spec.size_at(d);
  if (spec.kind == FamilySpec::Kind::cube)
    return ConvexBody::cube(d, size);
  return ConvexBody::ball(Eigen::VectorXd::Zero(d), size);
}

IntrinsicProfile family_profile(const FamilySpec& spec, int d) {
  const double size = spec.size_at(d);
  if (spec.kind == FamilySpec::Kind::cube)
    return profile_box(Eigen::VectorXd::Constant(d, 2.0 * size));
  return profile_ball(d, size);
}

std::vector<double> sample_h_mixture_streams(const IntrinsicProfile& profile,
                                             std::size_t n, SeedSpec seed,
                                             const ExperimentOptions& opts) {
  const DiscreteLaw law = vk_law(profile);
  const AliasTable alias(law.probs);
  const int d = profile.dim();
  const auto parts = run_streams<std::vector<double>>(
      opts.streams, opts.threads, [&](std::size_t s) {
        const std::size_t chunk = stream_chunk(n, opts.streams, s);
        Philox rng(seed.with_stream(seed.stream + s));
        std::vector<double> values;
        values.reserve(chunk);
        for (std::size_t i = 0; i < chunk; ++i) {
          const std::size_t v = alias.sample(rng);
          values.push_back(rng.gamma(0.5 * static_cast<double>(d - v)));
        }
        return values;
      });
  std::vector<double> h;
  h.reserve(n);
  for (const auto& part : parts) h.insert(h.end(), part.begin(), part.end());
  return h;
}

CltReport run_family_experiment(const FamilySpec& spec,
                                const std::vector<int>& d_grid,
                                std::size_t n_per_d, SeedSpec seed,
                                const ExperimentOptions& opts) {
  if (d_grid.empty())
    throw_error(ErrorKind::input, "run_family_experiment: empty d grid");
  CltReport report;
  report.family = spec;
  report.seed = seed;
  std::uint64_t stream_base = seed.stream;
  for (int d : d_grid) {
    const IntrinsicProfile profile = family_profile(spec, d);
    const MomentSummary mom = moments(profile);
    const std::vector<double> h = sample_h_mixture_streams(
        profile, n_per_d, seed.with_stream(stream_base), opts);
    stream_base += opts.streams;
    const std::vector<double> f = standardize(h, mom);
    CltRow row;
    row.d = d;
    const KsResult ks = ks_distance_to_gaussian(f);
    row.ks = ks.statistic;
    row.ks_band = ks.dkw_band;
    row.tv = tv_distance_histogram(f);
    row.w1 = wasserstein1_to_gaussian(f);
    row.n = n_per_d;
    report.rows.push_back(row);
  }
  if (report.rows.size() >= 3) {
    std::vector<double> ds, ks;
    for (const auto& row : report.rows) {
      ds.push_back(row.d);
      ks.push_back(row.ks);
    }
    report.fit = rate_fit(ds, ks);
  }
  return report;
}

} // namespace wills
