// Command-line front end: panel summaries, hazard-model fits, proportional-
// hazards diagnostics, competing-risk decompositions and synthetic panels.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "survkit/competing.hpp"
#include "survkit/cox.hpp"
#include "survkit/diagnostics.hpp"
#include "survkit/panel.hpp"
#include "survkit/render.hpp"
#include "survkit/simulate.hpp"

namespace {

using namespace survkit;

enum class OutputFormat { Tsv, Structured };

struct CommonOptions {
    std::string input;
    std::string output;
    OutputFormat format = OutputFormat::Tsv;
};

void add_common(CLI::App* cmd, CommonOptions& options, bool needs_input = true) {
    auto* in = cmd->add_option("-i,--input", options.input, "panel file (TSV)");
    if (needs_input) in->required();
    cmd->add_option("-o,--output", options.output, "machine-readable output path");
    cmd->add_option("--format", options.format, "machine output format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, OutputFormat>{{"tsv", OutputFormat::Tsv},
                                                {"structured", OutputFormat::Structured}},
            CLI::ignore_case));
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

void write_output(const CommonOptions& options, const std::string& tsv,
                  const nlohmann::json& doc) {
    if (options.output.empty()) return;
    if (options.format == OutputFormat::Tsv) {
        write_text(options.output, tsv);
    } else {
        write_text(options.output, doc.dump(2) + "\n");
    }
}

std::vector<IntervalRecord> load_records(const std::string& path) {
    PanelLoadResult loaded = load_panel(path);
    if (!loaded.rejected.empty()) {
        std::cerr << "rejected " << loaded.rejected.size() << " of "
                  << loaded.rejected.size() + loaded.records.size() << " rows:\n";
        for (const auto& r : loaded.rejected) {
            std::cerr << "  line " << r.line << ": " << r.reason << "\n";
        }
    }
    if (loaded.records.empty()) {
        throw std::runtime_error("no usable records in " + path);
    }
    return std::move(loaded.records);
}

struct FitOptions {
    TieMethod ties = TieMethod::Efron;
    std::string recipe_path;
    bool augment_time_interactions = false;
};

void add_fit_options(CLI::App* cmd, FitOptions& options) {
    cmd->add_option("--ties", options.ties, "tie handling in the partial likelihood")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, TieMethod>{{"breslow", TieMethod::Breslow},
                                             {"efron", TieMethod::Efron}},
            CLI::ignore_case));
    cmd->add_option("--recipe", options.recipe_path,
                    "JSON covariate recipe (default: the standard nine columns)");
    cmd->add_flag("--augment-time-interactions", options.augment_time_interactions,
                  "append roundNumber:yearsSinceFirst and weeksSinceFirst:weeksSinceLast");
}

CovariateRecipe resolve_recipe(const FitOptions& options) {
    CovariateRecipe recipe = options.recipe_path.empty()
                                 ? CovariateRecipe::standard()
                                 : load_recipe(options.recipe_path);
    if (options.augment_time_interactions) {
        for (const auto& pair : CovariateRecipe::standard_with_time_interactions().interactions) {
            recipe.interactions.push_back(pair);
        }
    }
    return recipe;
}

int cmd_summarize(const CommonOptions& common) {
    const auto records = load_records(common.input);
    const PanelSummary summary = summarize_panel(records);
    std::cout << render_panel_summary(summary);
    write_output(common, render_panel_summary_tsv(summary), panel_summary_to_json(summary));
    return 0;
}

int cmd_fit(const CommonOptions& common, const FitOptions& options) {
    const auto records = load_records(common.input);
    const DesignMatrix design = build_design(records, resolve_recipe(options));
    const CoxFit fit = fit_cox(design, options.ties);
    std::cout << render_fit_table(fit);
    write_output(common, render_fit_tsv(fit), fit_to_json(fit));
    return 0;
}

struct DiagnoseOptions {
    TimeTransform transform = TimeTransform::KaplanMeier;
    double alpha = 0.05;
    std::string residuals_out;
};

int cmd_diagnose(const CommonOptions& common, const FitOptions& fit_options,
                 const DiagnoseOptions& options) {
    const auto records = load_records(common.input);
    const DesignMatrix design = build_design(records, resolve_recipe(fit_options));
    const CoxFit fit = fit_cox(design, fit_options.ties);
    ResidualMatrix residuals = schoenfeld_residuals(design, fit);
    scale_residuals(residuals, fit);
    const PhTestReport report = proportional_hazards_test(residuals, fit, options.transform);
    std::cout << render_ph_report(report, options.alpha);
    if (!options.residuals_out.empty()) {
        write_text(options.residuals_out, render_residuals_tsv(residuals));
    }
    write_output(common, render_ph_tsv(report), ph_to_json(report, options.alpha));
    return 0;
}

CauseSpec parse_cause(const std::string& text) {
    const auto equals = text.find('=');
    if (equals == std::string::npos || equals == 0 || equals + 1 >= text.size()) {
        throw std::runtime_error("--cause expects name=KIND[,KIND...], got '" + text + "'");
    }
    CauseSpec cause;
    cause.name = text.substr(0, equals);
    std::stringstream kinds(text.substr(equals + 1));
    std::string code;
    while (std::getline(kinds, code, ',')) {
        const auto kind = event_kind_from_code(code);
        if (!kind || *kind == EventKind::NoEvent) {
            throw std::runtime_error("--cause " + cause.name + ": '" + code +
                                     "' is not an event kind (use VE, MA or IPO)");
        }
        cause.included_kinds.insert(*kind);
    }
    return cause;
}

int cmd_compete(const CommonOptions& common, const FitOptions& fit_options,
                const std::vector<std::string>& cause_args) {
    const auto records = load_records(common.input);
    std::vector<CauseSpec> causes;
    if (cause_args.empty()) {
        causes = {{"ve", {EventKind::VentureEquity}},
                  {"ma", {EventKind::MergerAcquisition}},
                  {"ipo", {EventKind::Ipo}}};
    } else {
        for (const auto& text : cause_args) causes.push_back(parse_cause(text));
    }
    const CompetingRiskReport report =
        fit_competing(records, resolve_recipe(fit_options), causes, fit_options.ties);
    std::cout << render_competing_report(report);
    write_output(common, render_competing_tsv(report), competing_to_json(report));
    return 0;
}

struct SimulateOptions {
    std::string scenario_path;
    std::size_t n = 500;
    double baseline_rate = 0.05;
    double censor_horizon = 30.0;
    std::uint64_t seed = 1;
    bool round_weeks = false;
    std::vector<double> beta = {0.5, -0.3};
    std::string output;
};

Scenario inline_scenario(const SimulateOptions& options) {
    if (options.beta.size() != 2) {
        throw std::runtime_error("inline --beta takes exactly two values (use --scenario for more)");
    }
    Scenario s;
    s.n_subjects = options.n;
    s.baseline_rate = options.baseline_rate;
    s.censor_horizon = options.censor_horizon;
    s.seed = options.seed;
    s.round_to_whole_weeks = options.round_weeks;
    CovariateSpec a;
    a.name = "trafficDelta";
    a.distribution = CovariateSpec::Distribution::Normal;
    a.mean = 0.0;
    a.sd = 1.0;
    a.target = CovariateTarget::TrafficDelta;
    CovariateSpec b;
    b.name = "trendsDelta";
    b.distribution = CovariateSpec::Distribution::Normal;
    b.mean = 0.0;
    b.sd = 1.0;
    b.target = CovariateTarget::TrendsDelta;
    s.covariates = {a, b};
    s.causes = {{EventKind::VentureEquity, options.beta}};
    return s;
}

int cmd_simulate(const SimulateOptions& options) {
    const Scenario scenario = options.scenario_path.empty()
                                  ? inline_scenario(options)
                                  : load_scenario(options.scenario_path);
    const auto [records, truth] = generate(scenario);
    save_panel(options.output, records);
    save_ground_truth(options.output + ".truth.json", truth);
    std::cout << "wrote " << records.size() << " records to " << options.output << "\n"
              << "events: VE " << truth.event_tally[0] << ", MA " << truth.event_tally[1]
              << ", IPO " << truth.event_tally[2] << ", censored " << truth.event_tally[3]
              << "\n"
              << "ground truth: " << options.output << ".truth.json\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"survkit: staged-event survival analysis"};
    app.require_subcommand(1);

    CommonOptions common;
    FitOptions fit_options;
    DiagnoseOptions diagnose_options;
    std::vector<std::string> cause_args;
    SimulateOptions simulate_options;

    auto* summarize = app.add_subcommand("summarize", "distribution summary of a panel");
    add_common(summarize, common);

    auto* fit = app.add_subcommand("fit", "proportional-hazards fit");
    add_common(fit, common);
    add_fit_options(fit, fit_options);

    auto* diagnose = app.add_subcommand("diagnose", "proportional-hazards assumption check");
    add_common(diagnose, common);
    add_fit_options(diagnose, fit_options);
    diagnose->add_option("--g", diagnose_options.transform, "time transform for the trend test")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, TimeTransform>{{"identity", TimeTransform::Identity},
                                                 {"log", TimeTransform::Log},
                                                 {"km", TimeTransform::KaplanMeier}},
            CLI::ignore_case));
    diagnose->add_option("--alpha", diagnose_options.alpha, "flagging threshold")
        ->check(CLI::Range(1e-10, 0.5));
    diagnose->add_option("--residuals-out", diagnose_options.residuals_out,
                         "write residual rows (TSV) here");

    auto* compete = app.add_subcommand("compete", "cause-specific hazard fits");
    add_common(compete, common);
    add_fit_options(compete, fit_options);
    compete->add_option("--cause", cause_args,
                        "name=KIND[,KIND...] (repeatable; default ve=VE ma=MA ipo=IPO)");

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic panel with known truth");
    simulate->add_option("--scenario", simulate_options.scenario_path, "scenario JSON");
    simulate->add_option("--n", simulate_options.n, "subjects (inline scenario)");
    simulate->add_option("--baseline-rate", simulate_options.baseline_rate,
                         "events per week at x=0 (inline)");
    simulate->add_option("--beta", simulate_options.beta, "two coefficients (inline)")
        ->expected(2);
    simulate->add_option("--censor-horizon", simulate_options.censor_horizon,
                         "administrative censoring horizon in weeks (inline)");
    simulate->add_option("--seed", simulate_options.seed, "RNG seed (inline)");
    simulate->add_flag("--round-weeks", simulate_options.round_weeks,
                       "round durations up to whole weeks (inline)");
    simulate->add_option("-o,--output", simulate_options.output, "panel output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (summarize->parsed()) return cmd_summarize(common);
        if (fit->parsed()) return cmd_fit(common, fit_options);
        if (diagnose->parsed()) return cmd_diagnose(common, fit_options, diagnose_options);
        if (compete->parsed()) return cmd_compete(common, fit_options, cause_args);
        if (simulate->parsed()) return cmd_simulate(simulate_options);
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 1;
    } catch (const SeparationError& e) {
        std::cerr << "separation: " << e.what() << "\n";
        return 1;
    } catch (const CollinearityError& e) {
        std::cerr << "collinearity: " << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        for (const auto& it : e.trace) {
            std::cerr << "  iteration " << it.iteration << ": loglik " << it.loglik
                      << ", max gradient " << it.grad_max_norm << "\n";
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
