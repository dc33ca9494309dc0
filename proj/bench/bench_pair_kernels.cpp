// Serial reference against the OpenMP pair kernels. Set OMP_NUM_THREADS to
// compare thread counts; the serial variants ignore it.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "amortized/kernels.hpp"
#include "amortized/ksd.hpp"
#include "amortized/reference/serial_kernels.hpp"
#include "amortized/svgd.hpp"
#include "amortized/targets.hpp"

namespace {

using namespace amortized;

constexpr Eigen::Index kDim = 10;

ParticleMatrix particles(Eigen::Index n) {
  Rng rng(7);
  std::normal_distribution<double> normal;
  ParticleMatrix z(n, kDim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
  return z;
}

const GaussianMixture& target() {
  static const GaussianMixture gmm = [] {
    Rng rng(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd means(5, kDim);
    for (Eigen::Index i = 0; i < means.size(); ++i) means.data()[i] = normal(rng);
    return GaussianMixture(means, 0.8);
  }();
  return gmm;
}

void BM_SteinGradientParallel(benchmark::State& state) {
  const ParticleMatrix z = particles(state.range(0));
  const Bandwidth h = median_bandwidth(z);
  for (auto _ : state) benchmark::DoNotOptimize(stein_gradient(z, target(), h));
}

void BM_SteinGradientSerial(benchmark::State& state) {
  const ParticleMatrix z = particles(state.range(0));
  const Bandwidth h = median_bandwidth(z);
  for (auto _ : state) benchmark::DoNotOptimize(serial::stein_gradient(z, target(), h));
}

void BM_KsdParallel(benchmark::State& state) {
  const ParticleMatrix z = particles(state.range(0));
  const Bandwidth h = median_bandwidth(z);
  for (auto _ : state) benchmark::DoNotOptimize(ksd_u_statistic(z, target(), h));
}

void BM_KsdSerial(benchmark::State& state) {
  const ParticleMatrix z = particles(state.range(0));
  const Bandwidth h = median_bandwidth(z);
  for (auto _ : state) benchmark::DoNotOptimize(serial::ksd_u_statistic(z, target(), h));
}

void BM_KsdFieldParallel(benchmark::State& state) {
  const ParticleMatrix z = particles(state.range(0));
  const Bandwidth h = median_bandwidth(z);
  for (auto _ : state) benchmark::DoNotOptimize(ksd_descent_field(z, target(), h));
}

void BM_KsdFieldSerial(benchmark::State& state) {
  const ParticleMatrix z = particles(state.range(0));
  const Bandwidth h = median_bandwidth(z);
  for (auto _ : state) benchmark::DoNotOptimize(serial::ksd_descent_field(z, target(), h));
}

void BM_MedianParallel(benchmark::State& state) {
  const ParticleMatrix z = particles(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(median_bandwidth(z));
}

void BM_MedianSerial(benchmark::State& state) {
  const ParticleMatrix z = particles(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::median_bandwidth(z));
}

}  // namespace

BENCHMARK(BM_SteinGradientParallel)->Arg(100)->Arg(400)->Arg(1000);
BENCHMARK(BM_SteinGradientSerial)->Arg(100)->Arg(400)->Arg(1000);
BENCHMARK(BM_KsdParallel)->Arg(100)->Arg(400);
BENCHMARK(BM_KsdSerial)->Arg(100)->Arg(400);
BENCHMARK(BM_KsdFieldParallel)->Arg(100)->Arg(400);
BENCHMARK(BM_KsdFieldSerial)->Arg(100)->Arg(400);
BENCHMARK(BM_MedianParallel)->Arg(100)->Arg(1000);
BENCHMARK(BM_MedianSerial)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
