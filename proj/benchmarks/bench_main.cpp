// Microbenchmarks for the hot paths: the boundary-value solve, tabulated
// solution queries, the risk-neutral step kernel, and Monte Carlo pricing.

#include <benchmark/benchmark.h>

#include "volfeed/model.hpp"
#include "volfeed/pd_solver.hpp"
#include "volfeed/pricing.hpp"
#include "volfeed/rng.hpp"
#include "volfeed/simulate.hpp"

namespace {

volfeed::model_params anchor_params(double rho = -0.5) {
    volfeed::model_params p;
    p.r = 0.02;
    p.alpha = 0.05;
    p.gamma = 2.0;
    p.beta = 0.5;
    p.beta_q = 0.5;
    p.sigma_x = 0.2;
    p.rho_dx = rho;
    return p;
}

const volfeed::pd_solution& anchor_solution() {
    static const volfeed::pd_solution sol = volfeed::solve_pd_ratio(anchor_params());
    return sol;
}

void bm_solve_linear(benchmark::State& state) {
    const volfeed::model_params p = anchor_params(0.0);
    for (auto _ : state) benchmark::DoNotOptimize(volfeed::solve_pd_ratio(p).f(0.0));
}
BENCHMARK(bm_solve_linear)->Unit(benchmark::kMillisecond);

void bm_solve_with_continuation(benchmark::State& state) {
    const volfeed::model_params p = anchor_params();
    for (auto _ : state) benchmark::DoNotOptimize(volfeed::solve_pd_ratio(p).f(0.0));
}
BENCHMARK(bm_solve_with_continuation)->Unit(benchmark::kMillisecond);

void bm_solution_query(benchmark::State& state) {
    const volfeed::pd_solution& sol = anchor_solution();
    double x = 0.0;
    for (auto _ : state) {
        x += 0.001;
        if (x > 4.9) x = 0.0;
        double f, fx;
        sol.eval(x, f, fx);
        benchmark::DoNotOptimize(f + fx);
    }
}
BENCHMARK(bm_solution_query);

void bm_dividend_vol_query(benchmark::State& state) {
    const volfeed::pd_solution& sol = anchor_solution();
    double x = 0.01;
    for (auto _ : state) {
        x += 0.001;
        if (x > 4.9) x = 0.01;
        benchmark::DoNotOptimize(sol.dividend_vol(x));
    }
}
BENCHMARK(bm_dividend_vol_query);

void bm_rn_step(benchmark::State& state) {
    const volfeed::pd_solution& sol = anchor_solution();
    const volfeed::model_params p = anchor_params();
    volfeed::market_state s;
    s.x = 0.2;
    s.P = 100.0;
    s.D = 100.0 / sol.f(0.2);
    volfeed::normal_stream rng(1234);
    const double dt = 1.0 / 252.0;
    for (auto _ : state) {
        const volfeed::correlated_shocks z = rng.correlated_pair(p.rho_dx);
        s = volfeed::rn_step(s, sol, z, dt, p);
        if (!(s.P > 1e-6 && s.P < 1e9)) s.P = 100.0;  // keep the state bounded
        benchmark::DoNotOptimize(s.P);
    }
}
BENCHMARK(bm_rn_step);

void bm_price_call(benchmark::State& state) {
    const volfeed::pd_solution& sol = anchor_solution();
    const volfeed::model_params p = anchor_params();
    volfeed::market_state s0;
    s0.x = 0.2;
    s0.P = 100.0;
    s0.D = 100.0 / sol.f(0.2);
    volfeed::option_spec spec;
    spec.strike = 100.0;
    spec.maturity = 0.5;
    volfeed::mc_config mc;
    mc.n_paths = static_cast<std::size_t>(state.range(0));
    mc.seed = 99;
    for (auto _ : state)
        benchmark::DoNotOptimize(volfeed::price_call(spec, s0, sol, p, mc).price);
}
BENCHMARK(bm_price_call)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void bm_simulate_paths(benchmark::State& state) {
    const volfeed::pd_solution& sol = anchor_solution();
    const volfeed::model_params p = anchor_params();
    volfeed::sim_config sc;
    sc.dt = 1.0 / 252.0;
    sc.horizon = 1.0;
    sc.n_paths = 16;
    sc.x0 = 0.2;
    sc.P0 = 100.0;
    sc.seed = 7;
    for (auto _ : state)
        benchmark::DoNotOptimize(volfeed::simulate_paths(p, sol, sc).P[0].back());
}
BENCHMARK(bm_simulate_paths)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
