#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "survkit/design.hpp"
#include "survkit/record.hpp"

namespace survkit {

/// Column order of the tab-separated panel format.
inline constexpr std::array<std::string_view, 14> kPanelColumns = {
    "company_name",     "company_type",      "investment_type",
    "investment_amount_musd", "total_capital_raised_musd", "round_name",
    "round_number",     "weeks_since_first", "weeks_since_last",
    "event_occurred",   "has_trends_data",   "trends_delta_pct",
    "has_traffic_data", "traffic_delta_pct"};

/// The file header does not match the panel schema.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string message, std::vector<std::string> missing,
                std::vector<std::string> extra)
        : std::runtime_error(std::move(message)),
          missing_columns(std::move(missing)),
          extra_columns(std::move(extra)) {}
    std::vector<std::string> missing_columns;
    std::vector<std::string> extra_columns;
};

struct PanelLoadResult {
    std::vector<IntervalRecord> records;

    struct Rejection {
        std::size_t line = 0;  // 1-based line number in the file
        std::string reason;
    };
    /// Rows that parsed as TSV but violated a field or record invariant.
    std::vector<Rejection> rejected;
};

/// Parses a panel stream. A malformed header throws SchemaError naming the
/// missing and unexpected columns; bad rows are collected, never dropped
/// silently.
PanelLoadResult parse_panel(std::istream& in);
PanelLoadResult load_panel(const std::filesystem::path& path);

void write_panel(std::ostream& out, std::span<const IntervalRecord> records);
void save_panel(const std::filesystem::path& path, std::span<const IntervalRecord> records);

/// Covariate construction plan: which derived columns to build from records,
/// plus optional covariate-by-time interactions.
struct CovariateRecipe {
    std::vector<std::string> covariates;
    std::vector<std::pair<std::string, TimeScale>> interactions;

    /// The nine-column construction used throughout the reports:
    /// Log(totalCapital), roundNumber, weeksSinceFirst, trafficDelta,
    /// hasTrendsData, trendsDelta, trendsDeltaSign, companyType=EP,
    /// companyType=PL.
    static CovariateRecipe standard();

    /// standard() plus roundNumber x yearsSinceFirst and weeksSinceFirst x
    /// weeksSinceLast interactions.
    static CovariateRecipe standard_with_time_interactions();
};

/// Names build_design understands, in their canonical report order.
std::span<const std::string_view> known_covariates();

/// Reads a recipe from JSON: {"covariates": [...], "interactions":
/// [{"covariate": ..., "time_scale": "yearsSinceFirst"|"weeksSinceLast"}]}.
CovariateRecipe load_recipe(const std::filesystem::path& path);

/// Builds the covariate matrix for a record span. Unknown covariate names and
/// duplicate columns are rejected; missing deltas enter as zero (their
/// has_* indicator columns carry the missingness).
DesignMatrix build_design(std::span<const IntervalRecord> records,
                          const CovariateRecipe& recipe);

struct DistributionSummary {
    std::size_t n = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, mean = 0.0, q3 = 0.0, max = 0.0;
};

/// Five-number summary plus mean; values need not be sorted.
DistributionSummary summarize_values(std::vector<double> values);

struct PanelSummary {
    std::size_t n_records = 0;
    /// Indexed by EventKind order: VE, MA, IPO, NoEvent.
    std::array<std::size_t, 4> event_counts{};
    /// Indexed by CompanyType order: CP, EP, PL.
    std::array<std::size_t, 3> company_type_counts{};

    /// Disclosed (positive) investment amounts, overall and per event kind.
    std::optional<DistributionSummary> amount_all;
    std::array<std::optional<DistributionSummary>, 3> amount_by_kind;

    DistributionSummary durations_all;
    std::array<std::optional<DistributionSummary>, 3> duration_by_kind;
    std::optional<DistributionSummary> duration_censored;

    DistributionSummary round_numbers;

    std::size_t n_with_trends = 0;
    std::optional<DistributionSummary> trends_delta;
    std::size_t n_with_traffic = 0;
    std::optional<DistributionSummary> traffic_delta;
};

PanelSummary summarize_panel(std::span<const IntervalRecord> records);

} // namespace survkit
