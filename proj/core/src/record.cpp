#include "survkit/record.hpp"

#include <cmath>
#include <stdexcept>

namespace survkit {

std::string_view to_code(EventKind kind) {
    switch (kind) {
        case EventKind::VentureEquity: return "VE";
        case EventKind::MergerAcquisition: return "MA";
        case EventKind::Ipo: return "IPO";
        case EventKind::NoEvent: return "NONE";
    }
    throw std::invalid_argument("to_code: unknown EventKind");
}

std::string_view to_code(CompanyType type) {
    switch (type) {
        case CompanyType::ConsumerProduct: return "CP";
        case CompanyType::EnterpriseProduct: return "EP";
        case CompanyType::Platform: return "PL";
    }
    throw std::invalid_argument("to_code: unknown CompanyType");
}

std::optional<EventKind> event_kind_from_code(std::string_view code) {
    if (code == "VE") return EventKind::VentureEquity;
    if (code == "MA") return EventKind::MergerAcquisition;
    if (code == "IPO") return EventKind::Ipo;
    if (code == "NONE") return EventKind::NoEvent;
    return std::nullopt;
}

std::optional<CompanyType> company_type_from_code(std::string_view code) {
    if (code == "CP") return CompanyType::ConsumerProduct;
    if (code == "EP") return CompanyType::EnterpriseProduct;
    if (code == "PL") return CompanyType::Platform;
    return std::nullopt;
}

namespace {

bool clean_text(const std::string& s) {
    return s.find('\t') == std::string::npos && s.find('\n') == std::string::npos &&
           s.find('\r') == std::string::npos;
}

} // namespace

std::vector<std::string> validate(const IntervalRecord& r) {
    std::vector<std::string> problems;
    auto finite = [](double v) { return std::isfinite(v); };

    if (r.company_id.empty()) problems.push_back("company_id is empty");
    if (!clean_text(r.company_id)) problems.push_back("company_id contains tab or newline");
    if (!clean_text(r.round_name)) problems.push_back("round_name contains tab or newline");

    if (!finite(r.duration_weeks) || r.duration_weeks < 1.0) {
        problems.push_back("duration_weeks must be >= 1");
    }
    if (!finite(r.weeks_since_first) || r.weeks_since_first < 0.0) {
        problems.push_back("weeks_since_first must be >= 0");
    }
    if (!finite(r.investment_amount) || r.investment_amount < 0.0) {
        problems.push_back("investment_amount must be >= 0");
    }
    if (!finite(r.total_capital_raised) || r.total_capital_raised < 0.0) {
        problems.push_back("total_capital_raised must be >= 0");
    }
    if (r.round_number < 1) problems.push_back("round_number must be >= 1");

    if (r.event_occurred != (r.event_kind != EventKind::NoEvent)) {
        problems.push_back("event_occurred inconsistent with event_kind");
    }
    if (r.has_trends_data != r.trends_delta.has_value()) {
        problems.push_back("trends_delta presence inconsistent with has_trends_data");
    }
    if (r.has_traffic_data != r.traffic_delta.has_value()) {
        problems.push_back("traffic_delta presence inconsistent with has_traffic_data");
    }
    if (r.trends_delta && !finite(*r.trends_delta)) problems.push_back("trends_delta not finite");
    if (r.traffic_delta && !finite(*r.traffic_delta)) problems.push_back("traffic_delta not finite");

    return problems;
}

void require_valid(const IntervalRecord& record) {
    const auto problems = validate(record);
    if (problems.empty()) return;
    std::string message = "invalid record";
    if (!record.company_id.empty()) message += " for " + record.company_id;
    message += ":";
    for (const auto& p : problems) message += " " + p + ";";
    throw std::invalid_argument(message);
}

} // namespace survkit
