#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "survkit/cox.hpp"
#include "survkit/panel.hpp"
#include "survkit/record.hpp"

namespace survkit {

/// One destination in a competing-risks decomposition: a named, non-empty set
/// of event kinds treated as "the" event, with everything else censored.
struct CauseSpec {
    std::string name;
    std::set<EventKind> included_kinds;
};

/// Throws std::invalid_argument for an unnamed cause, an empty kind set, or a
/// set containing the no-event marker.
void require_valid(const CauseSpec& cause);

/// Latent-risk recensoring: records whose event kind falls outside the cause
/// keep their duration but lose their event flag. Durations are untouched, so
/// the records stay at risk exactly as long as before.
std::vector<IntervalRecord> recensor_by_cause(std::span<const IntervalRecord> records,
                                              const CauseSpec& cause);

struct CauseFit {
    CauseSpec cause;
    std::size_t n_events = 0;
    /// Absent when the cause had no events to fit.
    std::optional<CoxFit> fit;
    std::string skip_reason;
};

struct CompetingRiskReport {
    std::vector<CauseFit> per_cause;  // in the order the causes were given
    std::size_t n_records = 0;
    std::size_t n_censored = 0;            // records with no event at all
    std::size_t n_unassigned_events = 0;   // events covered by no cause
};

/// Fits one cause-specific hazard model per cause on a shared covariate
/// construction. Causes must not overlap; a cause with zero events is
/// reported with an insufficient-events marker instead of a fit. Cause fits
/// run concurrently.
CompetingRiskReport fit_competing(std::span<const IntervalRecord> records,
                                  const CovariateRecipe& recipe,
                                  std::span<const CauseSpec> causes, TieMethod ties,
                                  const FitControls& controls = {});

} // namespace survkit
