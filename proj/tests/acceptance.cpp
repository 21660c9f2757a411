// Acceptance gate: end-to-end statistical and behavioral checks, one line of
// output per criterion. Exits with the number of failed criteria.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "survkit/competing.hpp"
#include "survkit/cox.hpp"
#include "survkit/diagnostics.hpp"
#include "survkit/km.hpp"
#include "survkit/panel.hpp"
#include "survkit/render.hpp"
#include "survkit/risk_index.hpp"
#include "survkit/simulate.hpp"

using namespace survkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome pass(std::string detail) { return {true, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, std::move(detail)}; }

std::string fmt(double v, int digits = 3) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*g", digits, v);
    return buffer;
}

// --- 1: agreement with an exhaustive grid search on tiny instances ---------

Outcome small_sample_grid_agreement() {
    std::mt19937_64 rng(101);
    int done = 0, attempts = 0;
    double worst = 0.0;
    while (done < 20 && attempts < 200) {
        ++attempts;
        const std::size_t n = 5 + attempts % 4;       // 5..8 records
        const std::size_t k = 1 + attempts % 2;       // 1 or 2 covariates
        const auto ties = attempts % 2 ? TieMethod::Efron : TieMethod::Breslow;
        const auto data =
            oracle::make_cox_data(rng, n, k, 0.15, 12.0, 0.6, /*integer_weeks=*/attempts % 3 == 0);
        std::size_t events = 0;
        for (const bool e : data.design.events) events += e;
        if (events < 2) continue;

        CoxFit fit;
        try {
            fit = fit_cox(data.design, ties);
        } catch (const std::exception&) {
            continue;  // separated or otherwise unfittable micro-instance
        }
        const auto grid = oracle::grid_maximize(data.design, ties, 8.0, 5e-5);
        if (grid.hit_boundary) continue;

        const double deviation = (fit.beta - grid.beta).cwiseAbs().maxCoeff();
        worst = std::max(worst, deviation);
        if (deviation > 1e-3) {
            return fail("instance " + std::to_string(attempts) + " deviates by " + fmt(deviation));
        }
        ++done;
    }
    if (done < 20) return fail("only " + std::to_string(done) + " usable instances of 20");
    return pass(std::to_string(done) + " instances within 1e-3 of the grid optimum (worst " +
                fmt(worst) + ")");
}

// --- 2: analytic derivatives against finite differences --------------------

Outcome derivative_agreement() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double worst_g = 0.0, worst_h = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t k = 1 + rep % 3;
        const auto ties = rep % 2 ? TieMethod::Efron : TieMethod::Breslow;
        const auto data =
            oracle::make_cox_data(rng, 40, k, 0.08, 25.0, 0.5, /*integer_weeks=*/rep % 2 == 0);
        Eigen::VectorXd beta(static_cast<Eigen::Index>(k));
        for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = coef(rng);

        const auto parts = partial_likelihood_derivatives(data.design, beta, ties);
        const Eigen::VectorXd fd_g = oracle::fd_gradient(data.design, beta, ties);
        for (Eigen::Index j = 0; j < beta.size(); ++j) {
            const double rel =
                std::fabs(parts.gradient(j) - fd_g(j)) / std::max(1.0, std::fabs(fd_g(j)));
            worst_g = std::max(worst_g, rel);
            if (rel > 1e-4) {
                return fail("gradient component off by relative " + fmt(rel) + " (rep " +
                            std::to_string(rep) + ")");
            }
        }
        const Eigen::MatrixXd fd_info = oracle::fd_hessian(data.design, beta, ties);
        for (Eigen::Index a = 0; a < fd_info.rows(); ++a) {
            for (Eigen::Index b = 0; b < fd_info.cols(); ++b) {
                const double rel = std::fabs(parts.information(a, b) - fd_info(a, b)) /
                                   std::max(1.0, std::fabs(fd_info(a, b)));
                worst_h = std::max(worst_h, rel);
                if (rel > 1e-4) {
                    return fail("information entry off by relative " + fmt(rel) + " (rep " +
                                std::to_string(rep) + ")");
                }
            }
        }
    }
    return pass("50 instances; worst relative error: gradient " + fmt(worst_g) + ", information " +
                fmt(worst_h));
}

// --- 3: coefficient recovery and confidence coverage -----------------------

Outcome recovery_and_coverage() {
    std::mt19937_64 rng(303);
    Eigen::VectorXd true_beta(2);
    true_beta << 0.5, -0.3;
    const int seeds = 200;
    int covered = 0, total = 0;
    double bias0 = 0.0, bias1 = 0.0, censored_share = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const auto data = oracle::make_cox_data_with_beta(rng, 2000, true_beta, 0.05, 25.0);
        std::size_t events = 0;
        for (const bool e : data.design.events) events += e;
        censored_share += 1.0 - static_cast<double>(events) / 2000.0;

        const CoxFit fit = fit_cox(data.design, TieMethod::Efron);
        if (!fit.converged) return fail("seed " + std::to_string(s) + " did not converge");
        for (Eigen::Index j = 0; j < 2; ++j) {
            ++total;
            if (std::fabs(fit.beta(j) - true_beta(j)) <= 3.0 * fit.se(j)) ++covered;
        }
        bias0 += fit.beta(0) - true_beta(0);
        bias1 += fit.beta(1) - true_beta(1);
    }
    const double coverage = static_cast<double>(covered) / static_cast<double>(total);
    bias0 /= seeds;
    bias1 /= seeds;
    censored_share /= seeds;
    std::string detail = "coverage " + fmt(100 * coverage, 4) + "% of three-sigma bands, bias (" +
                         fmt(bias0, 2) + ", " + fmt(bias1, 2) + "), censored " +
                         fmt(100 * censored_share, 3) + "%";
    if (coverage < 0.95) return fail("coverage below 95%: " + detail);
    if (std::fabs(bias0) >= 0.03 || std::fabs(bias1) >= 0.03) {
        return fail("mean bias above 0.03: " + detail);
    }
    return pass(detail);
}

// --- 4: product-limit exactness --------------------------------------------

Outcome product_limit_exactness() {
    // Fully observed distinct durations: survival steps are (n - i) / n.
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    const std::size_t n = 137;
    std::vector<double> durations;
    std::vector<bool> events(n, true);
    for (std::size_t i = 0; i < n; ++i) durations.push_back(1.0 + static_cast<double>(i) + jitter(rng) * 0.5);
    const SurvivalCurve curve = kaplan_meier(build_risk_index(durations, events));
    if (curve.steps.size() != n) return fail("expected one step per distinct duration");
    for (std::size_t i = 0; i < n; ++i) {
        const double expected = static_cast<double>(n - i - 1) / static_cast<double>(n);
        if (std::fabs(curve.steps[i].survival - expected) > 1e-12) {
            return fail("fully observed step " + std::to_string(i) + " off by " +
                        fmt(curve.steps[i].survival - expected));
        }
    }

    // The censored reference case: events at 1 and 2, censoring at 3.
    const SurvivalCurve tiny =
        kaplan_meier(build_risk_index({1.0, 2.0, 3.0}, {true, true, false}));
    if (std::fabs(tiny.survival_at(1.0) - 2.0 / 3.0) > 1e-12 ||
        std::fabs(tiny.survival_at(2.0) - 1.0 / 3.0) > 1e-12 ||
        std::fabs(tiny.survival_at(5.0) - 1.0 / 3.0) > 1e-12) {
        return fail("three-record censored curve is off");
    }

    // Random tied integer data against the brute-force product.
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto data = oracle::make_cox_data(rng, 60, 1, 0.1, 15.0, 0.4, true);
        const SurvivalCurve fast =
            kaplan_meier(build_risk_index(data.design.durations, data.design.events));
        const auto slow = oracle::kaplan_meier(data.design.durations, data.design.events);
        if (fast.steps.size() != slow.size()) return fail("step count mismatch");
        for (std::size_t i = 0; i < slow.size(); ++i) {
            worst = std::max(worst, std::fabs(fast.steps[i].survival - slow[i].survival));
        }
    }
    if (worst > 1e-12) return fail("tied-data curve deviates by " + fmt(worst));
    return pass("137 fully observed steps exact; 20 tied datasets within " + fmt(worst));
}

// --- 5: residual centering at the optimum -----------------------------------

Outcome residual_centering() {
    std::mt19937_64 rng(505);
    double worst = 0.0;
    for (int rep = 0; rep < 12; ++rep) {
        const auto ties = rep % 2 ? TieMethod::Efron : TieMethod::Breslow;
        const auto data =
            oracle::make_cox_data(rng, 120, 2 + rep % 2, 0.07, 22.0, 0.4, rep % 2 == 0);
        const CoxFit fit = fit_cox(data.design, ties);
        const ResidualMatrix resid = schoenfeld_residuals(data.design, fit);
        const double m = static_cast<double>(resid.m());
        for (Eigen::Index j = 0; j < resid.residuals.cols(); ++j) {
            const double normalized = std::fabs(resid.residuals.col(j).sum()) / m;
            worst = std::max(worst, normalized);
            if (normalized > 1e-6) {
                return fail("column sum " + fmt(normalized) + " times m at rep " +
                            std::to_string(rep));
            }
        }
    }
    return pass("24 residual matrices centered within 1e-6 * m (worst " + fmt(worst) + ")");
}

// --- 6: invariance under covariate relocation and rescaling -----------------

Outcome invariance() {
    std::mt19937_64 rng(606);
    FitControls tight;
    tight.loglik_rel_tol = 1e-13;
    tight.grad_tol = 1e-11;

    double worst_shift = 0.0, worst_scale = 0.0, worst_tie = 0.0;
    for (int rep = 0; rep < 6; ++rep) {
        const auto data = oracle::make_cox_data(rng, 90, 2, 0.08, 25.0, 0.5);
        const CoxFit base = fit_cox(data.design, TieMethod::Breslow, tight);

        DesignMatrix shifted = data.design;
        shifted.values.col(0).array() += 5.0;
        shifted.values.col(1).array() -= 11.0;
        const CoxFit relocated = fit_cox(shifted, TieMethod::Breslow, tight);
        worst_shift = std::max(worst_shift, (relocated.beta - base.beta).cwiseAbs().maxCoeff());
        worst_shift = std::max(worst_shift, (relocated.se - base.se).cwiseAbs().maxCoeff());

        DesignMatrix scaled = data.design;
        scaled.values.col(0) *= 10.0;
        scaled.values.col(1) *= 0.25;
        const CoxFit rescaled = fit_cox(scaled, TieMethod::Breslow, tight);
        worst_scale = std::max(worst_scale, std::fabs(rescaled.beta(0) - base.beta(0) / 10.0));
        worst_scale = std::max(worst_scale, std::fabs(rescaled.beta(1) - base.beta(1) / 0.25));
        worst_scale = std::max(worst_scale, std::fabs(rescaled.se(0) - base.se(0) / 10.0));
        worst_scale = std::max(worst_scale, std::fabs(rescaled.se(1) - base.se(1) / 0.25));

        // Tie-free data: the two tie conventions coincide.
        const CoxFit efron = fit_cox(data.design, TieMethod::Efron, tight);
        worst_tie = std::max(worst_tie, (efron.beta - base.beta).cwiseAbs().maxCoeff());
        worst_tie = std::max(worst_tie, std::fabs(efron.loglik - base.loglik));
    }
    if (worst_shift > 1e-8) return fail("relocation moved the fit by " + fmt(worst_shift));
    if (worst_scale > 1e-8) return fail("rescaling inconsistency " + fmt(worst_scale));
    if (worst_tie > 1e-10) return fail("tie conventions differ on tie-free data by " + fmt(worst_tie));
    return pass("relocation " + fmt(worst_shift) + ", rescaling " + fmt(worst_scale) +
                ", tie-free convention gap " + fmt(worst_tie));
}

// --- 7: trend-test calibration and power ------------------------------------

struct GtResult {
    double p = 1.0;
    bool usable = false;
};

GtResult run_gt(const DesignMatrix& design, TieMethod ties) {
    GtResult out;
    try {
        const CoxFit fit = fit_cox(design, ties);
        ResidualMatrix resid = schoenfeld_residuals(design, fit);
        scale_residuals(resid, fit);
        const PhTestReport report =
            proportional_hazards_test(resid, fit, TimeTransform::Identity);
        out.p = report.per_covariate[0].p_value;
        out.usable = true;
    } catch (const std::exception&) {
        out.usable = false;
    }
    return out;
}

Outcome trend_test_calibration_and_power() {
    // Size: proportional-hazards data must be rejected at the nominal rate.
    std::mt19937_64 rng(707);
    Eigen::VectorXd beta(1);
    beta << 0.5;
    int rejected = 0, usable = 0;
    for (int s = 0; s < 500; ++s) {
        const auto data = oracle::make_cox_data_with_beta(rng, 150, beta, 0.05, 20.0);
        const GtResult r = run_gt(data.design, TieMethod::Breslow);
        if (!r.usable) continue;
        ++usable;
        if (r.p < 0.05) ++rejected;
    }
    if (usable < 480) return fail("too many unusable calibration fits");
    const double rate = static_cast<double>(rejected) / static_cast<double>(usable);
    if (rate < 0.02 || rate > 0.09) {
        return fail("null rejection rate " + fmt(100 * rate, 3) + "% outside [2%, 9%]");
    }

    // Power: a coefficient drifting upward in time must be caught decisively.
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double l0 = 0.05, b0 = 0.5, b1 = 0.05, horizon = 20.0;
    int powered = 0, power_runs = 200;
    for (int s = 0; s < power_runs; ++s) {
        const std::size_t n = 1000;
        DesignMatrix d;
        d.columns = {{"x", ColumnKind::Continuous, "acceptance"}};
        d.values.resize(static_cast<Eigen::Index>(n), 1);
        d.durations.resize(n);
        d.events.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = normal(rng);
            d.values(static_cast<Eigen::Index>(i), 0) = x;
            // Inverse of the cumulative hazard of rate l0*exp((b0 + b1 t) x).
            const double e = -std::log(uniform(rng));
            const double a = b1 * x;
            double latent;
            if (std::fabs(a) < 1e-10) {
                latent = e / (l0 * std::exp(b0 * x));
            } else {
                const double argument = 1.0 + a * e / (l0 * std::exp(b0 * x));
                latent = argument > 0.0 ? std::log(argument) / a
                                        : std::numeric_limits<double>::infinity();
            }
            d.durations[i] = 1.0 + std::min(latent, horizon);
            d.events[i] = latent <= horizon;
        }
        const GtResult r = run_gt(d, TieMethod::Breslow);
        if (r.usable && r.p < 0.01) ++powered;
    }
    const double power = static_cast<double>(powered) / static_cast<double>(power_runs);
    if (power < 0.90) {
        return fail("drift detected in only " + fmt(100 * power, 3) + "% of runs (needs 90%)");
    }
    return pass("null rejection " + fmt(100 * rate, 3) + "% in [2%, 9%]; drift caught in " +
                fmt(100 * power, 3) + "% at p<0.01");
}

// --- 8: cause decomposition consistency -------------------------------------

Outcome competing_consistency() {
    Scenario s;
    s.n_subjects = 4753;
    s.baseline_rate = 0.0228;
    s.censor_horizon = 40.0;
    s.seed = 808;
    CovariateSpec traffic;
    traffic.name = "trafficDelta";
    traffic.target = CovariateTarget::TrafficDelta;
    CovariateSpec trends;
    trends.name = "trendsDelta";
    trends.target = CovariateTarget::TrendsDelta;
    CovariateSpec always_ep;  // constant flag: shifts cause levels only
    always_ep.name = "epFlag";
    always_ep.distribution = CovariateSpec::Distribution::Indicator;
    always_ep.probability = 1.0;
    always_ep.target = CovariateTarget::CompanyTypeEp;
    s.covariates = {traffic, trends, always_ep};
    s.causes = {{EventKind::VentureEquity, {0.3, 0.0, 0.0}},
                {EventKind::MergerAcquisition, {0.0, 0.2, -2.15}},
                {EventKind::Ipo, {0.0, 0.0, -5.13}}};
    const auto [records, truth] = generate(s);

    CovariateRecipe recipe;
    recipe.covariates = {"trafficDelta", "trendsDelta"};

    // One cause covering everything must reproduce the kind-oblivious fit.
    const std::vector<CauseSpec> all = {
        {"any", {EventKind::VentureEquity, EventKind::MergerAcquisition, EventKind::Ipo}}};
    const CompetingRiskReport merged = fit_competing(records, recipe, all, TieMethod::Efron);
    const CoxFit oblivious = fit_cox(build_design(records, recipe), TieMethod::Efron);
    if (!merged.per_cause[0].fit) return fail("merged cause did not fit");
    const double gap =
        (merged.per_cause[0].fit->beta - oblivious.beta).cwiseAbs().maxCoeff();
    if (gap > 1e-10) return fail("merged cause differs from oblivious fit by " + fmt(gap));

    // Singleton causes partition the records exactly.
    const std::vector<CauseSpec> split = {{"ve", {EventKind::VentureEquity}},
                                          {"ma", {EventKind::MergerAcquisition}},
                                          {"ipo", {EventKind::Ipo}}};
    const CompetingRiskReport report = fit_competing(records, recipe, split, TieMethod::Efron);
    std::size_t assigned = 0;
    for (const auto& cf : report.per_cause) assigned += cf.n_events;
    if (assigned + report.n_censored + report.n_unassigned_events != records.size()) {
        return fail("event partition does not add back up to the panel");
    }
    if (report.n_unassigned_events != 0) return fail("unexpected unassigned events");
    for (std::size_t k = 0; k < 3; ++k) {
        if (report.per_cause[k].n_events != truth.event_tally[k]) {
            return fail("tally mismatch for cause " + report.per_cause[k].cause.name);
        }
    }
    std::ostringstream detail;
    detail << "merged-vs-oblivious gap " << fmt(gap) << "; partition "
           << report.per_cause[0].n_events << "+" << report.per_cause[1].n_events << "+"
           << report.per_cause[2].n_events << "+" << report.n_censored << "="
           << records.size();
    return pass(detail.str());
}

// --- 9: rank test null behavior ---------------------------------------------

Outcome logrank_null_behavior() {
    // Mirrored groups: identical samples cannot be told apart.
    std::mt19937_64 rng(909);
    for (int rep = 0; rep < 5; ++rep) {
        const auto data = oracle::make_cox_data(rng, 40, 1, 0.1, 18.0, 0.3, rep % 2 == 0);
        const RiskSetIndex group = build_risk_index(data.design.durations, data.design.events);
        const std::vector<RiskSetIndex> groups = {group, group};
        const LogrankResult mirrored = logrank_test(groups);
        if (std::fabs(mirrored.chi_square) > 1e-10) {
            return fail("mirrored groups yield chi-square " + fmt(mirrored.chi_square));
        }
    }

    // Exchangeable groups: the p-value distribution must be close to uniform.
    std::exponential_distribution<double> expo(0.08);
    std::vector<double> ps;
    for (int s = 0; s < 500; ++s) {
        std::vector<double> da, db;
        std::vector<bool> ea, eb;
        for (int i = 0; i < 50; ++i) {
            const double ta = expo(rng), tb = expo(rng);
            da.push_back(1.0 + std::min(ta, 30.0));
            ea.push_back(ta <= 30.0);
            db.push_back(1.0 + std::min(tb, 30.0));
            eb.push_back(tb <= 30.0);
        }
        const std::vector<RiskSetIndex> groups = {build_risk_index(da, ea),
                                                  build_risk_index(db, eb)};
        ps.push_back(logrank_test(groups).p_value);
    }
    std::sort(ps.begin(), ps.end());
    double ks = 0.0;
    const double n = static_cast<double>(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ks = std::max(ks, std::fabs(ps[i] - static_cast<double>(i + 1) / n));
        ks = std::max(ks, std::fabs(ps[i] - static_cast<double>(i) / n));
    }
    if (ks >= 0.1) return fail("null p-values deviate from uniform: KS " + fmt(ks));
    return pass("mirrored groups exactly null; 500-seed KS distance " + fmt(ks));
}

// --- 10: reported effect sizes and table wording -----------------------------

Outcome report_format_anchors() {
    if (std::fabs(percent_hazard_change(0.291102) - 33.8) > 0.05) {
        return fail("percent change at 0.291102 is " + fmt(percent_hazard_change(0.291102), 6));
    }
    if (std::fabs(percent_hazard_change(-0.073076) - (-7.0)) > 0.05) {
        return fail("percent change at -0.073076 is " + fmt(percent_hazard_change(-0.073076), 6));
    }

    DesignMatrix d;
    d.columns = {{"trafficDelta", ColumnKind::Continuous, "acceptance"},
                 {"companyType=EP", ColumnKind::Indicator, "acceptance"}};
    d.durations = {3, 1, 7, 2, 5, 8, 4, 10, 6, 9};
    d.events = {true, false, true, true, false, true, true, false, true, true};
    d.values.resize(10, 2);
    d.values << 0.2, 1, -0.4, 0, 0.7, 1, 1.1, 0, -0.9, 0, 0.3, 1, -0.2, 1, 0.8, 0, 0.05, 1, -0.6, 0;
    const std::string table = render_fit_table(fit_cox(d, TieMethod::Efron));

    const char* required[] = {
        "Covariate name\tBeta\tExp(beta)\tSe(coef)\tZ\tPr(>|z|)\n",
        "\nConcordance= ",
        "\nRsquare= ",
        "\nLikelihood ratio test = ",
        "\nWald test = ",
        "\nScore (logrank) test = ",
        " on 2 df, p=",
        "n= 10, number of events= 7\n",
    };
    for (const char* needle : required) {
        if (table.find(needle) == std::string::npos) {
            std::string shown(needle);
            for (auto& c : shown) {
                if (c == '\t') c = ' ';
                if (c == '\n') c = ' ';
            }
            return fail("fit table is missing '" + shown + "'");
        }
    }
    return pass("hazard-change anchors within 0.05; table header and footer pinned");
}

// --- 11: pipeline reproducibility through the command line -------------------

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<missing " + path.string() + ">";
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Outcome pipeline_reproducibility() {
    const char* cli = std::getenv("SURVKIT_CLI");
    if (cli == nullptr) return fail("SURVKIT_CLI is not set");

    const fs::path root = fs::temp_directory_path() / "survkit_acceptance";
    std::error_code ec;
    fs::remove_all(root, ec);
    fs::create_directories(root);
    const fs::path recipe = root / "recipe.json";
    std::ofstream(recipe) << R"({"covariates": ["trafficDelta", "trendsDelta"]})";

    auto run = [&](const std::string& args) {
        const std::string command =
            std::string(cli) + " " + args + " > /dev/null 2> /dev/null";
        const int raw = std::system(command.c_str());
        return WIFEXITED(raw) && WEXITSTATUS(raw) == 0;
    };

    for (const char* tag : {"a", "b"}) {
        const fs::path dir = root / tag;
        fs::create_directories(dir);
        const std::string panel = (dir / "panel.tsv").string();
        if (!run("simulate --n 400 --baseline-rate 0.05 --beta 0.45 -0.25 --censor-horizon 35 "
                 "--seed 4242 --round-weeks -o " + panel)) {
            return fail("simulate failed in " + std::string(tag));
        }
        if (!run("fit -i " + panel + " --recipe " + recipe.string() + " -o " +
                 (dir / "fit.tsv").string())) {
            return fail("fit failed in " + std::string(tag));
        }
        if (!run("diagnose -i " + panel + " --recipe " + recipe.string() + " --residuals-out " +
                 (dir / "residuals.tsv").string() + " --format structured -o " +
                 (dir / "ph.json").string())) {
            return fail("diagnose failed in " + std::string(tag));
        }
        if (!run("compete -i " + panel + " --recipe " + recipe.string() + " -o " +
                 (dir / "compete.tsv").string())) {
            return fail("compete failed in " + std::string(tag));
        }
    }

    std::size_t bytes = 0;
    for (const char* name : {"panel.tsv", "panel.tsv.truth.json", "fit.tsv", "residuals.tsv",
                             "ph.json", "compete.tsv"}) {
        const std::string a = slurp(root / "a" / name);
        const std::string b = slurp(root / "b" / name);
        if (a != b || a.rfind("<missing", 0) == 0) {
            return fail(std::string(name) + " differs between reruns");
        }
        bytes += a.size();
    }
    return pass("six artifacts byte-identical across reruns (" + std::to_string(bytes / 2) +
                " bytes each)");
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
        double budget_seconds;
    };
    const std::vector<Criterion> criteria = {
        {"small-sample fits match exhaustive grid search", small_sample_grid_agreement, 5.0},
        {"analytic derivatives match finite differences", derivative_agreement, 5.0},
        {"coefficients recovered with honest uncertainty", recovery_and_coverage, 60.0},
        {"product-limit curve is exact", product_limit_exactness, 30.0},
        {"score residual columns center at the optimum", residual_centering, 30.0},
        {"fits are invariant to relocation and rescaling", invariance, 30.0},
        {"trend test is calibrated and detects drift", trend_test_calibration_and_power, 180.0},
        {"cause decomposition is consistent and conservative", competing_consistency, 60.0},
        {"rank test is exact on mirrors and uniform under the null", logrank_null_behavior, 60.0},
        {"reported effects and table wording are pinned", report_format_anchors, 30.0},
        {"command-line pipeline is byte-reproducible", pipeline_reproducibility, 60.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome = fail(std::string("unexpected exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criteria[i].budget_seconds) {
            outcome.pass = false;
            outcome.detail += " [exceeded " + fmt(criteria[i].budget_seconds, 3) + "s budget]";
        }
        if (!outcome.pass) ++failures;
        std::printf("[%2zu] %s  %s — %s [%.1fs]\n", i + 1, outcome.pass ? "PASS" : "FAIL",
                    criteria[i].name, outcome.detail.c_str(), elapsed);
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("all %zu criteria passed\n", criteria.size());
    } else {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    }
    return failures;
}
