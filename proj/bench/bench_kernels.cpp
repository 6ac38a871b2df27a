#include <benchmark/benchmark.h>

#include <random>

#include "parapack/campaign.hpp"
#include "parapack/module_solver.hpp"
#include "parapack/stats/dominance.hpp"

using namespace parapack;

namespace {

CampaignSpec small_campaign() {
    CampaignSpec s = fast_campaign();
    s.n_modules = 8;
    s.n_cycles = 1;
    s.master_seed = 11;
    return s;
}

void BM_CampaignParallel(benchmark::State& state) {
    const CampaignSpec spec = small_campaign();
    for (auto _ : state) benchmark::DoNotOptimize(run_campaign(spec, static_cast<int>(state.range(0))));
    state.SetItemsProcessed(state.iterations() * spec.n_modules);
}
BENCHMARK(BM_CampaignParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CampaignSerial(benchmark::State& state) {
    const CampaignSpec spec = small_campaign();
    for (auto _ : state) benchmark::DoNotOptimize(run_campaign_serial(spec));
    state.SetItemsProcessed(state.iterations() * spec.n_modules);
}
BENCHMARK(BM_CampaignSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

struct DominanceProblem {
    stats::RegressionModel model;
    Eigen::MatrixXd z;
    Eigen::VectorXd y;
};

// every predictor linear plus consecutive interactions, so all q groups enter
DominanceProblem dominance_problem(int q) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const int n = 500;
    DominanceProblem p;
    p.z.resize(n, q);
    p.y.resize(n);
    for (int i = 0; i < n; ++i) {
        p.y(i) = g(rng);
        for (int j = 0; j < q; ++j) {
            p.z(i, j) = g(rng);
            p.y(i) += 0.3 * p.z(i, j);
        }
    }
    std::vector<stats::Term> terms;
    std::vector<std::string> names;
    for (int j = 0; j < q; ++j) {
        terms.push_back(stats::Term::linear(j));
        names.push_back("x" + std::to_string(j));
    }
    for (int j = 0; j + 1 < q; ++j) terms.push_back(stats::Term::interaction(j, j + 1));
    p.model = stats::fit_terms(p.z, p.y, terms, names);
    return p;
}

void BM_DominanceParallel(benchmark::State& state) {
    const auto p = dominance_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(stats::relative_importance(p.model, p.z, p.y));
}
BENCHMARK(BM_DominanceParallel)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_DominanceSerial(benchmark::State& state) {
    const auto p = dominance_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(stats::relative_importance_serial(p.model, p.z, p.y));
}
BENCHMARK(BM_DominanceSerial)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BranchSolve(benchmark::State& state) {
    const auto cfg = campaign_module(small_campaign(), 0);
    std::vector<EspmModel> models;
    std::vector<CellState> states;
    for (const auto& c : cfg.cells) {
        models.emplace_back(c, cfg.numerics);
        states.push_back(models.back().initial_state(0.6, 298.15));
    }
    for (auto _ : state) benchmark::DoNotOptimize(solve_branch_currents(states, models, 19.4, cfg.r_int));
}
BENCHMARK(BM_BranchSolve);

void BM_CellStep(benchmark::State& state) {
    const auto cfg = campaign_module(small_campaign(), 0);
    const EspmModel m(cfg.cells[0], cfg.numerics);
    CellState s = m.initial_state(0.6, 298.15);
    for (auto _ : state) {
        s = m.step(s, 4.85, 2.0);
        if (s.c_s_n.back() < 0.1 * cfg.cells[0].c_max_n) s = m.initial_state(0.6, 298.15);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_CellStep);

}  // namespace

BENCHMARK_MAIN();
