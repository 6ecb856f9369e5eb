// Serial reference kernels against their OpenMP versions.

#include "netmed/kernels.hpp"
#include "netmed/rng.hpp"
#include "netmed/sim.hpp"

#include <benchmark/benchmark.h>

using namespace netmed;

namespace {

struct Problem {
  AdjacencyMatrix a;
  Eigen::MatrixXd z;
  Eigen::MatrixXd u;
  Eigen::VectorXd lambda;
};

Problem make_problem(int n) {
  Rng rng(n);
  Eigen::MatrixXd u(n, 3);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) u(i, k) = rng.normal();
  Eigen::VectorXd lambda(3);
  lambda << 2.0, 1.0, -0.5;
  Eigen::MatrixXd z = u * lambda.asDiagonal() * u.transpose();
  z.array() -= 2.0;
  return {gen_erdos_renyi(n, 0.1, n + 1), z, u, lambda};
}

template <double (*F)(const AdjacencyMatrix&, const Eigen::MatrixXd&, kernels::Link)>
void bm_dyad(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(F(p.a, p.z, kernels::Link::logit));
}

template <double (*F)(const AdjacencyMatrix&, const Eigen::MatrixXd&, const Eigen::VectorXd&, double,
                      kernels::Link)>
void bm_rank_one(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)));
  const Eigen::VectorXd v = p.u.col(0);
  for (auto _ : state) benchmark::DoNotOptimize(F(p.a, p.z, v, 0.3, kernels::Link::logit));
}

template <void (*F)(const Eigen::MatrixXd&, const Eigen::VectorXd&, Eigen::MatrixXd&)>
void bm_low_rank(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)));
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p.u.rows(), p.u.rows());
  for (auto _ : state) {
    F(p.u, p.lambda, acc);
    benchmark::DoNotOptimize(acc.data());
  }
}

template <kernels::TriadCounts (*F)(const AdjacencyMatrix&)>
void bm_triads(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(F(p.a));
}

template <double (*F)(const Eigen::MatrixXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)>
void bm_logistic(benchmark::State& state) {
  const auto n = state.range(0);
  Rng rng(7);
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (int k = 1; k < 4; ++k) design(i, k) = rng.normal();
    y(i) = rng.bernoulli(0.5);
  }
  Eigen::VectorXd coef(4);
  coef << 0.1, 0.5, -0.2, 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(F(design, y, coef));
}

}  // namespace

BENCHMARK(bm_dyad<kernels::dyad_loglik_serial>)->Name("dyad_loglik/serial")->Arg(100)->Arg(400);
BENCHMARK(bm_dyad<kernels::dyad_loglik>)->Name("dyad_loglik/omp")->Arg(100)->Arg(400);
BENCHMARK(bm_rank_one<kernels::dyad_loglik_rank_one_serial>)->Name("rank_one/serial")->Arg(100)->Arg(400);
BENCHMARK(bm_rank_one<kernels::dyad_loglik_rank_one>)->Name("rank_one/omp")->Arg(100)->Arg(400);
BENCHMARK(bm_low_rank<kernels::accumulate_low_rank_serial>)->Name("low_rank/serial")->Arg(100)->Arg(400);
BENCHMARK(bm_low_rank<kernels::accumulate_low_rank>)->Name("low_rank/omp")->Arg(100)->Arg(400);
BENCHMARK(bm_triads<kernels::count_triads_serial>)->Name("triads/serial")->Arg(50)->Arg(150);
BENCHMARK(bm_triads<kernels::count_triads>)->Name("triads/omp")->Arg(50)->Arg(150);
BENCHMARK(bm_logistic<kernels::logistic_loglik_serial>)->Name("logistic/serial")->Arg(1000)->Arg(100000);
BENCHMARK(bm_logistic<kernels::logistic_loglik>)->Name("logistic/omp")->Arg(1000)->Arg(100000);

BENCHMARK_MAIN();
