#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "survkit/record.hpp"

namespace survkit {

/// Distinct event times of a sample together with, at each one, the set of
/// records still at risk and the set of records that fail there.
///
/// Records are kept sorted by descending duration (ties broken by record id),
/// so the risk set of any event time is a prefix of that ordering and the
/// whole index costs O(n) beyond the sort. Record ids are positions in the
/// input sequence.
class RiskSetIndex {
public:
    struct EventTime {
        double time = 0.0;
        std::size_t n_at_risk = 0;
        std::vector<std::size_t> failures;  // ids failing at `time`, ascending
    };

    /// Distinct event times in ascending time order.
    const std::vector<EventTime>& times() const { return times_; }

    std::size_t n_records() const { return by_duration_desc_.size(); }
    std::size_t n_events() const { return n_events_; }

    /// Ids of records with duration >= times()[i].time.
    std::span<const std::size_t> at_risk(std::size_t i) const;

    /// All record ids in descending-duration order (the prefix ordering).
    std::span<const std::size_t> by_duration_desc() const { return by_duration_desc_; }

    /// Number of records with duration >= t, for any t.
    std::size_t n_at_risk_at(double t) const;

    /// Number of failures exactly at t (zero when t is not an event time).
    std::size_t n_failures_at(double t) const;

private:
    friend RiskSetIndex build_risk_index(const std::vector<double>&, const std::vector<bool>&);

    std::vector<EventTime> times_;
    std::vector<std::size_t> by_duration_desc_;
    std::vector<double> sorted_durations_;  // aligned with by_duration_desc_
    std::size_t n_events_ = 0;
};

/// Builds the index from parallel duration/event vectors. Durations must be
/// finite and >= 1; the vectors must be the same non-zero length.
RiskSetIndex build_risk_index(const std::vector<double>& durations,
                              const std::vector<bool>& events);

/// Builds the index from records (ids are positions in the span).
RiskSetIndex build_risk_index(std::span<const IntervalRecord> records);

} // namespace survkit
