// Microbenchmarks for the hot paths: panel parsing, design construction,
// product-limit curves, partial-likelihood fitting, and the diagnostics
// pipeline. Inputs come from the deterministic generator so runs are
// comparable across machines and revisions.

#include <benchmark/benchmark.h>

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "survkit/competing.hpp"
#include "survkit/cox.hpp"
#include "survkit/diagnostics.hpp"
#include "survkit/km.hpp"
#include "survkit/panel.hpp"
#include "survkit/simulate.hpp"

namespace {

using namespace survkit;

Scenario bench_scenario(std::size_t n) {
    Scenario s;
    s.n_subjects = n;
    s.baseline_rate = 0.04;
    s.censor_horizon = 40.0;
    s.seed = 20260813;
    s.round_to_whole_weeks = true;  // integer weeks: plenty of ties

    CovariateSpec traffic;
    traffic.name = "trafficDelta";
    traffic.target = CovariateTarget::TrafficDelta;
    CovariateSpec trends;
    trends.name = "trendsDelta";
    trends.target = CovariateTarget::TrendsDelta;
    CovariateSpec ep;
    ep.name = "epShare";
    ep.distribution = CovariateSpec::Distribution::Indicator;
    ep.probability = 0.4;
    ep.target = CovariateTarget::CompanyTypeEp;
    CovariateSpec age;
    age.name = "weeksSinceFirst";
    age.distribution = CovariateSpec::Distribution::Uniform;
    age.lo = 0.0;
    age.hi = 150.0;
    age.target = CovariateTarget::WeeksSinceFirst;
    CovariateSpec capital;
    capital.name = "logCapital";
    capital.distribution = CovariateSpec::Distribution::Uniform;
    capital.lo = 0.0;
    capital.hi = 3.0;
    capital.target = CovariateTarget::LogTotalCapital;
    s.covariates = {traffic, trends, ep, age, capital};
    s.causes = {{EventKind::VentureEquity, {0.4, -0.25, 0.3, 0.002, 0.15}}};
    return s;
}

struct BenchData {
    std::vector<IntervalRecord> records;
    CovariateRecipe recipe;
    DesignMatrix design;
    std::string panel_tsv;
};

const BenchData& data_for(std::size_t n) {
    static std::map<std::size_t, BenchData> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        BenchData d;
        auto [records, truth] = generate(bench_scenario(n));
        d.records = std::move(records);
        d.recipe.covariates = truth.recipe_columns;
        d.design = build_design(d.records, d.recipe);
        std::ostringstream out;
        write_panel(out, d.records);
        d.panel_tsv = out.str();
        it = cache.emplace(n, std::move(d)).first;
    }
    return it->second;
}

void BM_ParsePanel(benchmark::State& state) {
    const auto& d = data_for(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        std::istringstream in(d.panel_tsv);
        auto result = parse_panel(in);
        benchmark::DoNotOptimize(result.records.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(d.panel_tsv.size()));
}

void BM_BuildDesign(benchmark::State& state) {
    const auto& d = data_for(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        DesignMatrix design = build_design(d.records, d.recipe);
        benchmark::DoNotOptimize(design.values.data());
    }
}

void BM_KaplanMeier(benchmark::State& state) {
    const auto& d = data_for(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        SurvivalCurve curve = kaplan_meier(build_risk_index(d.design.durations, d.design.events));
        benchmark::DoNotOptimize(curve.steps.data());
    }
}

void BM_LikelihoodDerivatives(benchmark::State& state) {
    const auto& d = data_for(static_cast<std::size_t>(state.range(0)));
    const auto ties = state.range(1) ? TieMethod::Efron : TieMethod::Breslow;
    const Eigen::VectorXd beta =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d.design.k()), 0.1);
    for (auto _ : state) {
        auto parts = partial_likelihood_derivatives(d.design, beta, ties);
        benchmark::DoNotOptimize(parts.gradient.data());
    }
}

void BM_FitCox(benchmark::State& state) {
    const auto& d = data_for(static_cast<std::size_t>(state.range(0)));
    const auto ties = state.range(1) ? TieMethod::Efron : TieMethod::Breslow;
    for (auto _ : state) {
        CoxFit fit = fit_cox(d.design, ties);
        benchmark::DoNotOptimize(fit.beta.data());
    }
}

void BM_PhDiagnostics(benchmark::State& state) {
    const auto& d = data_for(static_cast<std::size_t>(state.range(0)));
    const CoxFit fit = fit_cox(d.design, TieMethod::Efron);
    for (auto _ : state) {
        ResidualMatrix resid = schoenfeld_residuals(d.design, fit);
        scale_residuals(resid, fit);
        PhTestReport report = proportional_hazards_test(resid, fit, TimeTransform::KaplanMeier);
        benchmark::DoNotOptimize(report.global_chi_square);
    }
}

void BM_FitCompeting(benchmark::State& state) {
    Scenario s = bench_scenario(static_cast<std::size_t>(state.range(0)));
    s.causes = {{EventKind::VentureEquity, {0.4, -0.25, 0.3, 0.002, 0.15}},
                {EventKind::MergerAcquisition, {-0.2, 0.3, 0.0, 0.0, 0.1}},
                {EventKind::Ipo, {0.1, 0.0, 0.2, 0.001, 0.3}}};
    const auto [records, truth] = generate(s);
    CovariateRecipe recipe;
    recipe.covariates = truth.recipe_columns;
    const std::vector<CauseSpec> causes = {{"ve", {EventKind::VentureEquity}},
                                           {"ma", {EventKind::MergerAcquisition}},
                                           {"ipo", {EventKind::Ipo}}};
    for (auto _ : state) {
        CompetingRiskReport report = fit_competing(records, recipe, causes, TieMethod::Efron);
        benchmark::DoNotOptimize(report.per_cause.data());
    }
}

void BM_Simulate(benchmark::State& state) {
    const Scenario s = bench_scenario(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto generated = generate(s);
        benchmark::DoNotOptimize(generated.first.data());
    }
}

} // namespace

BENCHMARK(BM_ParsePanel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_BuildDesign)->Arg(1000)->Arg(10000);
BENCHMARK(BM_KaplanMeier)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_LikelihoodDerivatives)
    ->ArgsProduct({{1000, 10000}, {0, 1}})
    ->ArgNames({"n", "efron"});
BENCHMARK(BM_FitCox)
    ->ArgsProduct({{250, 1000, 4000, 16000}, {0, 1}})
    ->ArgNames({"n", "efron"})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PhDiagnostics)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitCompeting)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
