#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace survkit {

/// What ended an interval: a follow-on venture round, an acquisition, a public
/// offering, or nothing yet (right censored).
enum class EventKind { VentureEquity, MergerAcquisition, Ipo, NoEvent };

enum class CompanyType { ConsumerProduct, EnterpriseProduct, Platform };

std::string_view to_code(EventKind kind);
std::string_view to_code(CompanyType type);
std::optional<EventKind> event_kind_from_code(std::string_view code);
std::optional<CompanyType> company_type_from_code(std::string_view code);

/// One observation interval for one company: the gap between two consecutive
/// financing events, or from the last event to the end of observation.
/// Durations are measured in weeks and are at least one week by construction
/// of the panel.
struct IntervalRecord {
    std::string company_id;
    CompanyType company_type = CompanyType::ConsumerProduct;

    EventKind event_kind = EventKind::NoEvent;
    bool event_occurred = false;

    /// Size of the terminating event in millions of dollars; zero when the
    /// amount is undisclosed or the interval is censored.
    double investment_amount = 0.0;
    /// Capital raised before this interval's terminating event, in millions.
    double total_capital_raised = 0.0;

    std::string round_name;
    int round_number = 1;

    double weeks_since_first = 0.0;
    /// Length of the interval; this is the survival time.
    double duration_weeks = 1.0;

    bool has_trends_data = false;
    std::optional<double> trends_delta;
    bool has_traffic_data = false;
    std::optional<double> traffic_delta;
};

/// Invariant violations for a single record, empty when the record is valid.
/// Checked: duration >= 1 week, non-negative times and amounts, round number
/// >= 1, event flag consistent with event kind, delta presence consistent with
/// its availability flag, finite numerics, and no tab/newline in text fields.
std::vector<std::string> validate(const IntervalRecord& record);

/// Throws std::invalid_argument listing every violation if the record is bad.
void require_valid(const IntervalRecord& record);

} // namespace survkit
