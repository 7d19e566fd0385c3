#include <benchmark/benchmark.h>

#include <cmath>

#include "willslab/cltlab.hpp"
#include "willslab/geometry.hpp"
#include "willslab/intrinsic.hpp"
#include "willslab/rng.hpp"
#include "willslab/sampling.hpp"

using namespace wills;

static void BM_PhiloxU64(benchmark::State& state) {
  Philox rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}
BENCHMARK(BM_PhiloxU64);

static void BM_Gaussian(benchmark::State& state) {
  Philox rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.gaussian());
}
BENCHMARK(BM_Gaussian);

static void BM_Gamma(benchmark::State& state) {
  Philox rng(1, 0);
  const double shape = static_cast<double>(state.range(0)) / 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(rng.gamma(shape));
}
BENCHMARK(BM_Gamma)->Arg(1)->Arg(9)->Arg(513);

static void BM_ProfileBoxEqualSides(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Eigen::VectorXd sides = Eigen::VectorXd::Ones(d);
  for (auto _ : state) benchmark::DoNotOptimize(profile_box(sides));
  state.SetComplexityN(d);
}
BENCHMARK(BM_ProfileBoxEqualSides)->Range(64, 16384)->Complexity();

static void BM_ProfileBoxRecurrence(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Eigen::VectorXd sides(d);
  for (int i = 0; i < d; ++i) sides[i] = 1.0 + 0.001 * i;
  for (auto _ : state) benchmark::DoNotOptimize(profile_box(sides));
  state.SetComplexityN(d);
}
BENCHMARK(BM_ProfileBoxRecurrence)->Range(16, 1024)->Complexity();

static void BM_ProjectBox(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto body = ConvexBody::cube(d, 0.5);
  Philox rng(2, 0);
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
  for (auto _ : state) benchmark::DoNotOptimize(project(body, x));
}
BENCHMARK(BM_ProjectBox)->Arg(8)->Arg(64)->Arg(512);

static void BM_DykstraSimplex(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Eigen::MatrixXd normals(d + 1, d);
  normals.setZero();
  Eigen::VectorXd offsets(d + 1);
  for (int i = 0; i < d; ++i) {
    normals(i, i) = -1.0;
    offsets[i] = 0.0;
  }
  normals.row(d).setConstant(1.0 / std::sqrt(static_cast<double>(d)));
  offsets[d] = 1.0 / std::sqrt(static_cast<double>(d));
  const auto body = ConvexBody::hpolytope(
      normals, offsets, Eigen::VectorXd::Constant(d, 0.5 / d));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(distance_to(body, x));
}
BENCHMARK(BM_DykstraSimplex)->Arg(2)->Arg(8)->Arg(32);

static void BM_MixtureDraw(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const DiscreteLaw law = vk_law(profile_box(Eigen::VectorXd::Ones(d)));
  const AliasTable alias(law.probs);
  Philox rng(3, 0);
  for (auto _ : state) {
    const std::size_t v = alias.sample(rng);
    benchmark::DoNotOptimize(rng.gamma(0.5 * static_cast<double>(d - v)));
  }
}
BENCHMARK(BM_MixtureDraw)->Arg(64)->Arg(1024)->Arg(16384);

static void BM_SurfaceMean(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const SurfaceMeanEvaluator e_p(profile_box(Eigen::VectorXd::Ones(d)));
  double s = 0.31;
  for (auto _ : state) {
    benchmark::DoNotOptimize(e_p(s));
    s = s < 10 ? s * 1.01 : 0.31;
  }
}
BENCHMARK(BM_SurfaceMean)->Arg(16)->Arg(256);

static void BM_KsDistance(benchmark::State& state) {
  Philox rng(4, 0);
  std::vector<double> values(static_cast<std::size_t>(state.range(0)));
  for (auto& v : values) v = rng.gaussian();
  for (auto _ : state) {
    auto copy = values;
    benchmark::DoNotOptimize(ks_distance_to_gaussian(std::move(copy)));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KsDistance)->Range(1 << 12, 1 << 20)->Complexity();

BENCHMARK_MAIN();
