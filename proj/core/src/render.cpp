#include "survkit/render.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace survkit {

std::string format_significant(double value, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
    return buffer;
}

std::string format_full(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

namespace {

double rsquare(const CoxFit& fit) {
    return 1.0 - std::exp(-fit.lr_stat / static_cast<double>(fit.n_records));
}

std::string fit_footer(const CoxFit& fit) {
    std::ostringstream out;
    out << "n= " << fit.n_records << ", number of events= " << fit.n_events << "\n";
    out << "Concordance= " << format_significant(fit.concordance.value, 3) << "\n";
    out << "Rsquare= " << format_significant(rsquare(fit), 3) << "\n";
    out << "Likelihood ratio test = " << format_significant(fit.lr_stat) << " on " << fit.df
        << " df, p=" << format_significant(fit.lr_p) << "\n";
    out << "Wald test = " << format_significant(fit.wald_stat) << " on " << fit.df
        << " df, p=" << format_significant(fit.wald_p) << "\n";
    out << "Score (logrank) test = " << format_significant(fit.score_stat) << " on " << fit.df
        << " df, p=" << format_significant(fit.score_p) << "\n";
    return out.str();
}

void append_fit_json(nlohmann::json& doc, const CoxFit& fit) {
    doc["ties"] = std::string(to_label(fit.ties));
    doc["n"] = fit.n_records;
    doc["events"] = fit.n_events;
    doc["converged"] = fit.converged;
    doc["loglik_null"] = fit.loglik_null;
    doc["loglik"] = fit.loglik;
    doc["coefficients"] = nlohmann::json::array();
    for (std::size_t j = 0; j < fit.covariate_names.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        doc["coefficients"].push_back({{"name", fit.covariate_names[j]},
                                       {"beta", fit.beta(jj)},
                                       {"exp_beta", fit.hazard_ratio(jj)},
                                       {"se", fit.se(jj)},
                                       {"z", fit.z(jj)},
                                       {"p", fit.p(jj)}});
    }
    doc["tests"] = {
        {"likelihood_ratio", {{"stat", fit.lr_stat}, {"df", fit.df}, {"p", fit.lr_p}}},
        {"wald", {{"stat", fit.wald_stat}, {"df", fit.df}, {"p", fit.wald_p}}},
        {"score", {{"stat", fit.score_stat}, {"df", fit.df}, {"p", fit.score_p}}},
    };
    doc["concordance"] = {{"value", fit.concordance.value},
                          {"usable_pairs", fit.concordance.usable_pairs},
                          {"defined", fit.concordance.defined}};
    doc["rsquare"] = rsquare(fit);
    doc["iterations"] = nlohmann::json::array();
    for (const auto& it : fit.iterations) {
        doc["iterations"].push_back({{"iteration", it.iteration},
                                     {"loglik", it.loglik},
                                     {"grad_max_norm", it.grad_max_norm},
                                     {"step_halvings", it.step_halvings}});
    }
}

nlohmann::json summary_to_json(const DistributionSummary& s) {
    return {{"n", s.n},     {"min", s.min}, {"q1", s.q1},  {"median", s.median},
            {"mean", s.mean}, {"q3", s.q3},   {"max", s.max}};
}

std::string summary_line(const DistributionSummary& s) {
    std::ostringstream out;
    out << "min " << format_significant(s.min) << ", q1 " << format_significant(s.q1)
        << ", median " << format_significant(s.median) << ", mean "
        << format_significant(s.mean) << ", q3 " << format_significant(s.q3) << ", max "
        << format_significant(s.max) << " (n= " << s.n << ")";
    return out.str();
}

constexpr std::array<std::string_view, 4> kKindNames = {"VE", "MA", "IPO", "censored"};

} // namespace

std::string render_fit_table(const CoxFit& fit) {
    std::ostringstream out;
    out << "Covariate name\tBeta\tExp(beta)\tSe(coef)\tZ\tPr(>|z|)\n";
    for (std::size_t j = 0; j < fit.covariate_names.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out << fit.covariate_names[j] << '\t' << format_significant(fit.beta(jj)) << '\t'
            << format_significant(fit.hazard_ratio(jj)) << '\t'
            << format_significant(fit.se(jj)) << '\t' << format_significant(fit.z(jj)) << '\t'
            << format_significant(fit.p(jj)) << '\n';
    }
    out << '\n' << fit_footer(fit);
    return out.str();
}

std::string render_fit_tsv(const CoxFit& fit) {
    std::ostringstream out;
    out << "covariate\tbeta\texp_beta\tse\tz\tp\n";
    for (std::size_t j = 0; j < fit.covariate_names.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out << fit.covariate_names[j] << '\t' << format_full(fit.beta(jj)) << '\t'
            << format_full(fit.hazard_ratio(jj)) << '\t' << format_full(fit.se(jj)) << '\t'
            << format_full(fit.z(jj)) << '\t' << format_full(fit.p(jj)) << '\n';
    }
    out << "# n\t" << fit.n_records << "\n# events\t" << fit.n_events << "\n";
    out << "# ties\t" << to_label(fit.ties) << "\n";
    out << "# loglik_null\t" << format_full(fit.loglik_null) << "\n";
    out << "# loglik\t" << format_full(fit.loglik) << "\n";
    out << "# concordance\t" << format_full(fit.concordance.value) << "\n";
    out << "# rsquare\t" << format_full(rsquare(fit)) << "\n";
    out << "# likelihood_ratio\t" << format_full(fit.lr_stat) << "\t" << fit.df << "\t"
        << format_full(fit.lr_p) << "\n";
    out << "# wald\t" << format_full(fit.wald_stat) << "\t" << fit.df << "\t"
        << format_full(fit.wald_p) << "\n";
    out << "# score\t" << format_full(fit.score_stat) << "\t" << fit.df << "\t"
        << format_full(fit.score_p) << "\n";
    return out.str();
}

nlohmann::json fit_to_json(const CoxFit& fit) {
    nlohmann::json doc;
    append_fit_json(doc, fit);
    return doc;
}

std::string render_curve_table(const SurvivalCurve& curve) {
    std::ostringstream out;
    out << "Time\tAt risk\tEvents\tSurvival\n";
    for (const auto& step : curve.steps) {
        out << format_significant(step.time) << '\t' << step.n_at_risk << '\t' << step.n_events
            << '\t' << format_significant(step.survival) << '\n';
    }
    auto quantile = [](const std::optional<double>& q) {
        return q ? format_significant(*q) : std::string("not reached");
    };
    out << '\n';
    out << "n= " << curve.n_records << ", events= " << curve.n_events << '\n';
    out << "q25= " << quantile(curve.q25) << ", median= " << quantile(curve.median)
        << ", q75= " << quantile(curve.q75) << '\n';
    return out.str();
}

std::string render_curve_tsv(const SurvivalCurve& curve) {
    std::ostringstream out;
    out << "time\tn_at_risk\tn_events\tsurvival\n";
    for (const auto& step : curve.steps) {
        out << format_full(step.time) << '\t' << step.n_at_risk << '\t' << step.n_events << '\t'
            << format_full(step.survival) << '\n';
    }
    return out.str();
}

nlohmann::json curve_to_json(const SurvivalCurve& curve) {
    nlohmann::json doc;
    doc["n"] = curve.n_records;
    doc["events"] = curve.n_events;
    doc["degenerate"] = curve.degenerate;
    doc["steps"] = nlohmann::json::array();
    for (const auto& step : curve.steps) {
        doc["steps"].push_back({{"time", step.time},
                                {"n_at_risk", step.n_at_risk},
                                {"n_events", step.n_events},
                                {"survival", step.survival}});
    }
    auto quantile = [](const std::optional<double>& q) {
        return q ? nlohmann::json(*q) : nlohmann::json(nullptr);
    };
    doc["quantiles"] = {{"q25", quantile(curve.q25)},
                        {"median", quantile(curve.median)},
                        {"q75", quantile(curve.q75)}};
    return doc;
}

std::string render_ph_report(const PhTestReport& report, double alpha) {
    std::ostringstream out;
    out << "Proportional hazards trend test, g(t) = " << to_label(report.transform) << "\n";
    out << "Covariate\tSlope\tChi-square\tp\n";
    for (const auto& entry : report.per_covariate) {
        out << entry.name << '\t' << format_significant(entry.slope) << '\t'
            << format_significant(entry.chi_square) << '\t'
            << format_significant(entry.p_value);
        if (entry.p_value < alpha) out << "\t*";
        out << '\n';
    }
    out << "GLOBAL\t-\t" << format_significant(report.global_chi_square) << '\t'
        << format_significant(report.global_p);
    if (report.global_p < alpha) out << "\t*";
    out << '\n';
    out << "* p < " << format_significant(alpha) << " (" << report.global_df << " df global)\n";
    return out.str();
}

std::string render_ph_tsv(const PhTestReport& report) {
    std::ostringstream out;
    out << "covariate\tslope\tchi_square\tdf\tp\n";
    for (const auto& entry : report.per_covariate) {
        out << entry.name << '\t' << format_full(entry.slope) << '\t'
            << format_full(entry.chi_square) << "\t1\t" << format_full(entry.p_value) << '\n';
    }
    out << "GLOBAL\t\t" << format_full(report.global_chi_square) << '\t' << report.global_df
        << '\t' << format_full(report.global_p) << '\n';
    return out.str();
}

nlohmann::json ph_to_json(const PhTestReport& report, double alpha) {
    nlohmann::json doc;
    doc["transform"] = std::string(to_label(report.transform));
    doc["alpha"] = alpha;
    doc["per_covariate"] = nlohmann::json::array();
    for (const auto& entry : report.per_covariate) {
        doc["per_covariate"].push_back({{"name", entry.name},
                                        {"slope", entry.slope},
                                        {"chi_square", entry.chi_square},
                                        {"p", entry.p_value},
                                        {"violates", entry.p_value < alpha}});
    }
    doc["global"] = {{"chi_square", report.global_chi_square},
                     {"df", report.global_df},
                     {"p", report.global_p},
                     {"violates", report.global_p < alpha}};
    return doc;
}

std::string render_residuals_tsv(const ResidualMatrix& residuals) {
    std::ostringstream out;
    out << "event_time\trecord";
    for (const auto& name : residuals.covariate_names) out << '\t' << name;
    if (residuals.scaled) {
        for (const auto& name : residuals.covariate_names) out << "\tscaled:" << name;
    }
    out << '\n';
    for (std::size_t i = 0; i < residuals.m(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out << format_full(residuals.event_times[i]) << '\t' << residuals.record_ids[i];
        for (Eigen::Index j = 0; j < residuals.residuals.cols(); ++j) {
            out << '\t' << format_full(residuals.residuals(ii, j));
        }
        if (residuals.scaled) {
            for (Eigen::Index j = 0; j < residuals.scaled->cols(); ++j) {
                out << '\t' << format_full((*residuals.scaled)(ii, j));
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string render_panel_summary(const PanelSummary& summary) {
    std::ostringstream out;
    out << "Records: " << summary.n_records << '\n';
    out << "Events: VE " << summary.event_counts[0] << ", MA " << summary.event_counts[1]
        << ", IPO " << summary.event_counts[2] << ", censored " << summary.event_counts[3]
        << '\n';
    out << "Company types: CP " << summary.company_type_counts[0] << ", EP "
        << summary.company_type_counts[1] << ", PL " << summary.company_type_counts[2] << '\n';

    out << "Durations (weeks): " << summary_line(summary.durations_all) << '\n';
    for (std::size_t kind = 0; kind < 3; ++kind) {
        if (summary.duration_by_kind[kind]) {
            out << "  to " << kKindNames[kind] << ": " << summary_line(*summary.duration_by_kind[kind])
                << '\n';
        }
    }
    if (summary.duration_censored) {
        out << "  censored: " << summary_line(*summary.duration_censored) << '\n';
    }

    if (summary.amount_all) {
        out << "Disclosed amounts ($M): " << summary_line(*summary.amount_all) << '\n';
        for (std::size_t kind = 0; kind < 3; ++kind) {
            if (summary.amount_by_kind[kind]) {
                out << "  " << kKindNames[kind] << ": " << summary_line(*summary.amount_by_kind[kind])
                    << '\n';
            }
        }
    }

    out << "Round numbers: " << summary_line(summary.round_numbers) << '\n';
    out << "Trends coverage: " << summary.n_with_trends;
    if (summary.trends_delta) out << "; delta " << summary_line(*summary.trends_delta);
    out << '\n';
    out << "Traffic coverage: " << summary.n_with_traffic;
    if (summary.traffic_delta) out << "; delta " << summary_line(*summary.traffic_delta);
    out << '\n';
    return out.str();
}

std::string render_panel_summary_tsv(const PanelSummary& summary) {
    std::ostringstream out;
    out << "section\tmeasure\tvalue\n";
    out << "records\tcount\t" << summary.n_records << '\n';
    for (std::size_t kind = 0; kind < 3; ++kind) {
        out << "events\t" << kKindNames[kind] << '\t' << summary.event_counts[kind] << '\n';
    }
    out << "events\tcensored\t" << summary.event_counts[3] << '\n';
    out << "company_types\tCP\t" << summary.company_type_counts[0] << '\n';
    out << "company_types\tEP\t" << summary.company_type_counts[1] << '\n';
    out << "company_types\tPL\t" << summary.company_type_counts[2] << '\n';

    auto emit = [&](const std::string& section, const DistributionSummary& s) {
        out << section << "\tn\t" << s.n << '\n';
        out << section << "\tmin\t" << format_full(s.min) << '\n';
        out << section << "\tq1\t" << format_full(s.q1) << '\n';
        out << section << "\tmedian\t" << format_full(s.median) << '\n';
        out << section << "\tmean\t" << format_full(s.mean) << '\n';
        out << section << "\tq3\t" << format_full(s.q3) << '\n';
        out << section << "\tmax\t" << format_full(s.max) << '\n';
    };
    emit("durations", summary.durations_all);
    for (std::size_t kind = 0; kind < 3; ++kind) {
        if (summary.duration_by_kind[kind]) {
            emit("durations_" + std::string(kKindNames[kind]), *summary.duration_by_kind[kind]);
        }
    }
    if (summary.duration_censored) emit("durations_censored", *summary.duration_censored);
    if (summary.amount_all) emit("amounts", *summary.amount_all);
    for (std::size_t kind = 0; kind < 3; ++kind) {
        if (summary.amount_by_kind[kind]) {
            emit("amounts_" + std::string(kKindNames[kind]), *summary.amount_by_kind[kind]);
        }
    }
    emit("round_numbers", summary.round_numbers);
    out << "trends\tcovered\t" << summary.n_with_trends << '\n';
    if (summary.trends_delta) emit("trends_delta", *summary.trends_delta);
    out << "traffic\tcovered\t" << summary.n_with_traffic << '\n';
    if (summary.traffic_delta) emit("traffic_delta", *summary.traffic_delta);
    return out.str();
}

nlohmann::json panel_summary_to_json(const PanelSummary& summary) {
    nlohmann::json doc;
    doc["records"] = summary.n_records;
    doc["events"] = {{"VE", summary.event_counts[0]},
                     {"MA", summary.event_counts[1]},
                     {"IPO", summary.event_counts[2]},
                     {"censored", summary.event_counts[3]}};
    doc["company_types"] = {{"CP", summary.company_type_counts[0]},
                            {"EP", summary.company_type_counts[1]},
                            {"PL", summary.company_type_counts[2]}};
    doc["durations"] = summary_to_json(summary.durations_all);
    for (std::size_t kind = 0; kind < 3; ++kind) {
        if (summary.duration_by_kind[kind]) {
            doc["durations_by_kind"][std::string(kKindNames[kind])] =
                summary_to_json(*summary.duration_by_kind[kind]);
        }
    }
    if (summary.duration_censored) {
        doc["durations_censored"] = summary_to_json(*summary.duration_censored);
    }
    if (summary.amount_all) doc["amounts"] = summary_to_json(*summary.amount_all);
    for (std::size_t kind = 0; kind < 3; ++kind) {
        if (summary.amount_by_kind[kind]) {
            doc["amounts_by_kind"][std::string(kKindNames[kind])] =
                summary_to_json(*summary.amount_by_kind[kind]);
        }
    }
    doc["round_numbers"] = summary_to_json(summary.round_numbers);
    doc["trends"] = {{"covered", summary.n_with_trends}};
    if (summary.trends_delta) doc["trends"]["delta"] = summary_to_json(*summary.trends_delta);
    doc["traffic"] = {{"covered", summary.n_with_traffic}};
    if (summary.traffic_delta) doc["traffic"]["delta"] = summary_to_json(*summary.traffic_delta);
    return doc;
}

std::string render_competing_report(const CompetingRiskReport& report) {
    std::ostringstream out;
    out << "Competing risks: " << report.n_records << " records, " << report.n_censored
        << " censored, " << report.n_unassigned_events << " events outside every cause\n";
    for (const auto& cause : report.per_cause) {
        out << "\n=== Cause: " << cause.cause.name << " (";
        bool first = true;
        for (const auto kind : cause.cause.included_kinds) {
            if (!first) out << ", ";
            out << to_code(kind);
            first = false;
        }
        out << "), events= " << cause.n_events << " ===\n";
        if (cause.fit) {
            out << render_fit_table(*cause.fit);
        } else {
            out << "insufficient events: " << cause.skip_reason << '\n';
        }
    }
    return out.str();
}

std::string render_competing_tsv(const CompetingRiskReport& report) {
    std::ostringstream out;
    out << "cause\tcovariate\tbeta\texp_beta\tse\tz\tp\tevents\n";
    for (const auto& cause : report.per_cause) {
        if (!cause.fit) {
            out << cause.cause.name << "\t-\t\t\t\t\t\t" << cause.n_events << '\n';
            continue;
        }
        const auto& fit = *cause.fit;
        for (std::size_t j = 0; j < fit.covariate_names.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            out << cause.cause.name << '\t' << fit.covariate_names[j] << '\t'
                << format_full(fit.beta(jj)) << '\t' << format_full(fit.hazard_ratio(jj)) << '\t'
                << format_full(fit.se(jj)) << '\t' << format_full(fit.z(jj)) << '\t'
                << format_full(fit.p(jj)) << '\t' << cause.n_events << '\n';
        }
    }
    return out.str();
}

nlohmann::json competing_to_json(const CompetingRiskReport& report) {
    nlohmann::json doc;
    doc["records"] = report.n_records;
    doc["censored"] = report.n_censored;
    doc["unassigned_events"] = report.n_unassigned_events;
    doc["causes"] = nlohmann::json::array();
    for (const auto& cause : report.per_cause) {
        nlohmann::json entry;
        entry["name"] = cause.cause.name;
        entry["kinds"] = nlohmann::json::array();
        for (const auto kind : cause.cause.included_kinds) {
            entry["kinds"].push_back(std::string(to_code(kind)));
        }
        entry["events"] = cause.n_events;
        if (cause.fit) {
            entry["fit"] = fit_to_json(*cause.fit);
        } else {
            entry["fit"] = nullptr;
            entry["skip_reason"] = cause.skip_reason;
        }
        doc["causes"].push_back(std::move(entry));
    }
    return doc;
}

} // namespace survkit
