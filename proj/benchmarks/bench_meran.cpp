#include <benchmark/benchmark.h>

#include <meran/beamforming.hpp>
#include <meran/car.hpp>
#include <meran/car_fast.hpp>
#include <meran/dlda.hpp>
#include <meran/scenario.hpp>
#include <meran/socp.hpp>

using namespace meran;

namespace {

Scenario bench_scenario(int n, double fc) {
  SystemConfig cfg;
  cfg.kappa = 1e-16;
  cfg.clone_capacity = fc;
  return generate(7, n, 10, 2, 300.0, cfg);
}

void BM_fixed_point_power(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Scenario sc = bench_scenario(n, n);
  auto [cls, dec] = classify(sc);
  std::vector<CVector> h;
  std::vector<double> targets;
  for (int i = 0; i < n; ++i)
    if (dec[i].r_min > 0.0) {
      h.push_back(sc.channels[i]);
      targets.push_back(dec[i].r_min);
    }
  for (auto _ : state) {
    auto res = fixed_point_power(h, targets, sc.cfg);
    benchmark::DoNotOptimize(res.powers);
  }
}
BENCHMARK(BM_fixed_point_power)->Arg(4)->Arg(8)->Arg(16);

void BM_socp_rate_cones(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Scenario sc = bench_scenario(n, n);
  auto [cls, dec] = classify(sc);
  std::vector<CVector> h;
  std::vector<double> targets;
  for (int i = 0; i < n && (int)h.size() < n; ++i)
    if (dec[i].r_min > 0.0) {
      h.push_back(sc.channels[i].head(4));
      targets.push_back(dec[i].r_min);
    }
  const int users = static_cast<int>(h.size());
  const int m = 4, block = 2 * m;
  SocpProblem p;
  p.n = users * block;
  p.quad_obj = Eigen::VectorXd::Ones(p.n);
  p.lin_obj = Eigen::VectorXd::Zero(p.n);
  std::vector<int> offsets(users);
  for (int i = 0; i < users; ++i) offsets[i] = i * block;
  for (int i = 0; i < users; ++i)
    p.socs.push_back(
        build_rate_soc(h[i], offsets, i, targets[i], 1.0, sc.cfg.bandwidth, p.n));
  for (auto _ : state) {
    auto sol = solve(p);
    benchmark::DoNotOptimize(sol.objective_value);
  }
}
BENCHMARK(BM_socp_rate_cones)->Arg(2)->Arg(4);

void BM_dispatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Scenario sc = bench_scenario(n, std::max(1, n / 2));
  auto [cls, dec] = classify(sc);
  for (auto _ : state) {
    Allocation a = dispatch(sc, cls, dec);
    benchmark::DoNotOptimize(a.sum_power);
  }
}
BENCHMARK(BM_dispatch)->Arg(8)->Arg(12);

void BM_carp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Scenario sc = bench_scenario(n, std::max(1, n / 2));
  auto [cls, dec] = classify(sc);
  for (auto _ : state) {
    Allocation a = carp(sc, cls, dec);
    benchmark::DoNotOptimize(a.sum_power);
  }
}
BENCHMARK(BM_carp)->Arg(8)->Arg(12)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
