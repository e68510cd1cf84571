// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "conecert/kernels.hpp"
#include "conecert/polyfront.hpp"

using namespace conecert;

namespace {

kernels::SymBasis<double> packed_basis(std::size_t m) {
  kernels::SymBasis<double> basis;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      if (i == j)
        basis.push_back({{i, i, 1.0}});
      else
        basis.push_back({{i, j, 0.5}, {j, i, 0.5}});
    }
  return basis;
}

Mat random_spd(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Mat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  return g * g.transpose() + Mat::Identity(n, n) * static_cast<double>(n);
}

Mat random_mat(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Mat a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = normal(rng);
  return a;
}

std::vector<Exponent> random_support(int size, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<unsigned> deg(0, 6);
  std::vector<Exponent> s{{0, 0}};
  while (static_cast<int>(s.size()) < size) {
    Exponent e{deg(rng), deg(rng)};
    if (std::find(s.begin(), s.end(), e) == s.end()) s.push_back(e);
  }
  return s;
}

void BM_LogdetHessianSerial(benchmark::State& st) {
  const auto m = static_cast<std::size_t>(st.range(0));
  const auto basis = packed_basis(m);
  const Mat t = random_spd(static_cast<Eigen::Index>(m), 1);
  Mat h(basis.size(), basis.size());
  for (auto _ : st) {
    kernels::logdet_hessian_serial(basis, t, h);
    benchmark::DoNotOptimize(h.data());
  }
}

void BM_LogdetHessianOmp(benchmark::State& st) {
  const auto m = static_cast<std::size_t>(st.range(0));
  const auto basis = packed_basis(m);
  const Mat t = random_spd(static_cast<Eigen::Index>(m), 1);
  Mat h(basis.size(), basis.size());
  for (auto _ : st) {
    kernels::logdet_hessian(basis, t, h);
    benchmark::DoNotOptimize(h.data());
  }
}

void BM_CongruenceSerial(benchmark::State& st) {
  const Eigen::Index n = st.range(0);
  const Mat a = random_mat(n / 2, n, 2);
  const Mat h = random_spd(n, 3);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::congruence_serial(a, h).data());
}

void BM_CongruenceOmp(benchmark::State& st) {
  const Eigen::Index n = st.range(0);
  const Mat a = random_mat(n / 2, n, 2);
  const Mat h = random_spd(n, 3);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::congruence(a, h).data());
}

void BM_CircuitsSerial(benchmark::State& st) {
  const auto support = random_support(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_circuits_serial(support).circuits.size());
}

void BM_CircuitsOmp(benchmark::State& st) {
  const auto support = random_support(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_circuits(support).circuits.size());
}

}  // namespace

BENCHMARK(BM_LogdetHessianSerial)->Arg(4)->Arg(8)->Arg(12);
BENCHMARK(BM_LogdetHessianOmp)->Arg(4)->Arg(8)->Arg(12);
BENCHMARK(BM_CongruenceSerial)->Arg(64)->Arg(256);
BENCHMARK(BM_CongruenceOmp)->Arg(64)->Arg(256);
BENCHMARK(BM_CircuitsSerial)->Arg(10)->Arg(14);
BENCHMARK(BM_CircuitsOmp)->Arg(10)->Arg(14);

BENCHMARK_MAIN();
