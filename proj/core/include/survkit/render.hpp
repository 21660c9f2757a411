#pragma once

#include <string>

#include <json.hpp>

#include "survkit/competing.hpp"
#include "survkit/cox.hpp"
#include "survkit/diagnostics.hpp"
#include "survkit/km.hpp"
#include "survkit/panel.hpp"

namespace survkit {

/// %.Ng formatting for human tables.
std::string format_significant(double value, int digits = 6);

/// Shortest representation that parses back to the same double, for machine
/// output.
std::string format_full(double value);

/// Coefficient table plus the summary footer (concordance, R-square, and the
/// three global tests).
std::string render_fit_table(const CoxFit& fit);
std::string render_fit_tsv(const CoxFit& fit);
nlohmann::json fit_to_json(const CoxFit& fit);

std::string render_curve_table(const SurvivalCurve& curve);
std::string render_curve_tsv(const SurvivalCurve& curve);
nlohmann::json curve_to_json(const SurvivalCurve& curve);

std::string render_ph_report(const PhTestReport& report, double alpha);
std::string render_ph_tsv(const PhTestReport& report);
nlohmann::json ph_to_json(const PhTestReport& report, double alpha);

/// Residual rows (and scaled rows when present) at full precision.
std::string render_residuals_tsv(const ResidualMatrix& residuals);

std::string render_panel_summary(const PanelSummary& summary);
std::string render_panel_summary_tsv(const PanelSummary& summary);
nlohmann::json panel_summary_to_json(const PanelSummary& summary);

std::string render_competing_report(const CompetingRiskReport& report);
std::string render_competing_tsv(const CompetingRiskReport& report);
nlohmann::json competing_to_json(const CompetingRiskReport& report);

} // namespace survkit
