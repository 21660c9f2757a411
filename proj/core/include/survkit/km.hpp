#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "survkit/risk_index.hpp"

namespace survkit {

/// Kaplan-Meier product-limit estimate. `survival` at each step is the value
/// of the right-continuous curve at that event time (the drop has happened).
struct SurvivalCurve {
    struct Step {
        double time = 0.0;
        std::size_t n_at_risk = 0;
        std::size_t n_events = 0;
        double survival = 1.0;
    };

    std::vector<Step> steps;  // ascending event time
    std::size_t n_records = 0;
    std::size_t n_events = 0;

    /// True when the sample has no events at all; the curve is identically 1
    /// and every quantile is undefined.
    bool degenerate = false;

    std::optional<double> q25, median, q75;

    /// Curve value at t: product of (1 - d/n) over event times <= t.
    double survival_at(double t) const;

    /// Left limit at t: product over event times strictly before t.
    double survival_before(double t) const;
};

SurvivalCurve kaplan_meier(const RiskSetIndex& index);

/// Smallest event time where the curve has dropped to 1-p or below, absent
/// when the curve never falls that far (heavy censoring) or never drops at
/// all. p must lie in (0, 1).
std::optional<double> survival_quantile(const SurvivalCurve& curve, double p);

struct LogrankResult {
    double chi_square = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::vector<std::size_t> observed;  // events per group
    std::vector<double> expected;       // expected events per group under H0
};

/// K-sample logrank test on two or more groups. Variance uses the
/// hypergeometric form with the tie correction (n-d)/(n-1); pooled event
/// times where only one subject remains at risk contribute nothing.
LogrankResult logrank_test(std::span<const RiskSetIndex> groups);

} // namespace survkit
