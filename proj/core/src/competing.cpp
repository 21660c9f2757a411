#include "survkit/competing.hpp"

#include <future>
#include <stdexcept>

namespace survkit {

void require_valid(const CauseSpec& cause) {
    if (cause.name.empty()) throw std::invalid_argument("cause has no name");
    if (cause.included_kinds.empty()) {
        throw std::invalid_argument("cause " + cause.name + " includes no event kinds");
    }
    if (cause.included_kinds.count(EventKind::NoEvent)) {
        throw std::invalid_argument("cause " + cause.name +
                                    " cannot include the no-event marker");
    }
}

std::vector<IntervalRecord> recensor_by_cause(std::span<const IntervalRecord> records,
                                              const CauseSpec& cause) {
    require_valid(cause);
    std::vector<IntervalRecord> out(records.begin(), records.end());
    for (auto& r : out) {
        if (!r.event_occurred) continue;
        if (!cause.included_kinds.count(r.event_kind)) {
            // The competing event ends observation but is not "the" event:
            // same duration, censored.
            r.event_kind = EventKind::NoEvent;
            r.event_occurred = false;
        }
    }
    return out;
}

CompetingRiskReport fit_competing(std::span<const IntervalRecord> records,
                                  const CovariateRecipe& recipe,
                                  std::span<const CauseSpec> causes, TieMethod ties,
                                  const FitControls& controls) {
    if (records.empty()) throw std::invalid_argument("fit_competing: no records");
    if (causes.empty()) throw std::invalid_argument("fit_competing: no causes given");

    std::set<std::string> names;
    std::set<EventKind> claimed;
    for (const auto& cause : causes) {
        require_valid(cause);
        if (!names.insert(cause.name).second) {
            throw std::invalid_argument("duplicate cause name " + cause.name);
        }
        for (const auto kind : cause.included_kinds) {
            if (!claimed.insert(kind).second) {
                throw std::invalid_argument("event kind " + std::string(to_code(kind)) +
                                            " appears in more than one cause");
            }
        }
    }

    // One covariate construction shared by every cause-specific fit; only the
    // event flags differ between causes.
    const DesignMatrix base = build_design(records, recipe);

    CompetingRiskReport report;
    report.n_records = records.size();
    for (const auto& r : records) {
        if (!r.event_occurred) {
            ++report.n_censored;
        } else if (!claimed.count(r.event_kind)) {
            ++report.n_unassigned_events;
        }
    }

    auto fit_one = [&](const CauseSpec& cause) -> CauseFit {
        CauseFit result;
        result.cause = cause;
        DesignMatrix design = base;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            design.events[i] = r.event_occurred && cause.included_kinds.count(r.event_kind) > 0;
            if (design.events[i]) ++result.n_events;
        }
        if (result.n_events == 0) {
            result.skip_reason = "no events of this cause after recensoring";
            return result;
        }
        result.fit = fit_cox(design, ties, controls);
        return result;
    };

    std::vector<std::future<CauseFit>> futures;
    futures.reserve(causes.size());
    for (const auto& cause : causes) {
        futures.push_back(std::async(std::launch::async, fit_one, std::cref(cause)));
    }
    for (auto& f : futures) report.per_cause.push_back(f.get());
    return report;
}

} // namespace survkit
