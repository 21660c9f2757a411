#include "survkit/risk_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace survkit {

std::span<const std::size_t> RiskSetIndex::at_risk(std::size_t i) const {
    if (i >= times_.size()) throw std::out_of_range("RiskSetIndex::at_risk: index out of range");
    return {by_duration_desc_.data(), times_[i].n_at_risk};
}

std::size_t RiskSetIndex::n_at_risk_at(double t) const {
    // sorted_durations_ is descending; records at risk at t are those with
    // duration >= t, i.e. the prefix before the first duration < t.
    const auto it = std::lower_bound(sorted_durations_.begin(), sorted_durations_.end(), t,
                                     [](double d, double threshold) { return d >= threshold; });
    return static_cast<std::size_t>(it - sorted_durations_.begin());
}

std::size_t RiskSetIndex::n_failures_at(double t) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t,
                                     [](const EventTime& e, double v) { return e.time < v; });
    if (it == times_.end() || it->time != t) return 0;
    return it->failures.size();
}

RiskSetIndex build_risk_index(const std::vector<double>& durations,
                              const std::vector<bool>& events) {
    if (durations.empty()) throw std::invalid_argument("build_risk_index: no records");
    if (durations.size() != events.size()) {
        throw std::invalid_argument("build_risk_index: durations and events differ in length");
    }
    for (std::size_t i = 0; i < durations.size(); ++i) {
        if (!std::isfinite(durations[i]) || durations[i] < 1.0) {
            throw std::invalid_argument("build_risk_index: duration at record " +
                                        std::to_string(i) + " must be finite and >= 1");
        }
    }

    RiskSetIndex index;
    index.by_duration_desc_.resize(durations.size());
    std::iota(index.by_duration_desc_.begin(), index.by_duration_desc_.end(), std::size_t{0});
    std::sort(index.by_duration_desc_.begin(), index.by_duration_desc_.end(),
              [&](std::size_t a, std::size_t b) {
                  if (durations[a] != durations[b]) return durations[a] > durations[b];
                  return a < b;
              });
    index.sorted_durations_.reserve(durations.size());
    for (std::size_t id : index.by_duration_desc_) index.sorted_durations_.push_back(durations[id]);

    // Distinct event times ascending. Walking the descending order backwards
    // visits durations ascending, so each distinct event time is finished
    // before the next begins.
    for (std::size_t pos = durations.size(); pos-- > 0;) {
        const std::size_t id = index.by_duration_desc_[pos];
        if (!events[id]) continue;
        const double t = durations[id];
        if (index.times_.empty() || index.times_.back().time != t) {
            RiskSetIndex::EventTime entry;
            entry.time = t;
            index.times_.push_back(std::move(entry));
        }
        index.times_.back().failures.push_back(id);
        ++index.n_events_;
    }
    for (auto& entry : index.times_) {
        std::sort(entry.failures.begin(), entry.failures.end());
        // The risk set holds every record with duration >= time, censored ones
        // included, so size it from the durations rather than event positions.
        entry.n_at_risk = index.n_at_risk_at(entry.time);
    }
    return index;
}

RiskSetIndex build_risk_index(std::span<const IntervalRecord> records) {
    std::vector<double> durations;
    std::vector<bool> events;
    durations.reserve(records.size());
    events.reserve(records.size());
    for (const auto& r : records) {
        durations.push_back(r.duration_weeks);
        events.push_back(r.event_occurred);
    }
    return build_risk_index(durations, events);
}

} // namespace survkit
