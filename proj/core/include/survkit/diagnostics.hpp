#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "survkit/cox.hpp"
#include "survkit/design.hpp"

namespace survkit {

/// Schoenfeld residuals: one row per uncensored record, ordered by event time
/// (ties by record id). Row r is x_r minus the fitted risk-set mean at that
/// event time; with Efron ties the subtracted mean is the average of the tie
/// group's staged means, so columns still sum to (numerically) zero.
struct ResidualMatrix {
    std::vector<std::string> covariate_names;
    std::vector<double> event_times;       // m, ascending
    std::vector<std::size_t> record_ids;   // m, id of the failing record
    Eigen::MatrixXd residuals;             // m x k
    std::optional<Eigen::MatrixXd> scaled; // m x k, after scale_residuals

    /// 1 - KM(t-) of the fitted sample at each event row, for the "km" time
    /// transform.
    std::vector<double> km_transform;

    std::size_t m() const { return event_times.size(); }
    std::size_t k() const { return covariate_names.size(); }
};

/// The chosen time transform g(t) had zero variance across event times (e.g.
/// all events tied), so no trend in time is estimable.
class DegenerateTimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TimeTransform { Identity, Log, KaplanMeier };

std::string_view to_label(TimeTransform transform);

/// Computes Schoenfeld residuals for a converged fit on the design it was
/// fitted to. Refuses unconverged fits and mismatched shapes.
ResidualMatrix schoenfeld_residuals(const DesignMatrix& design, const CoxFit& fit);

/// Scales residuals in place: r* = m * V * r per row, the constant
/// average-information approximation of the per-time variance. Throws if
/// already scaled.
void scale_residuals(ResidualMatrix& residuals, const CoxFit& fit);

struct PhTestReport {
    struct PerCovariate {
        std::string name;
        double slope = 0.0;       // trend of beta_j(t) against g(t)
        double chi_square = 0.0;
        double p_value = 1.0;     // 1 df
    };
    std::vector<PerCovariate> per_covariate;
    double global_chi_square = 0.0;
    int global_df = 0;
    double global_p = 1.0;
    TimeTransform transform = TimeTransform::KaplanMeier;
};

/// Score test for a linear trend of each coefficient against g(event time):
/// the proportional-hazards check. Requires scaled residuals and at least
/// k + 2 events.
PhTestReport proportional_hazards_test(const ResidualMatrix& residuals, const CoxFit& fit,
                                       TimeTransform transform);

/// Appends covariate-by-time interaction columns to a copy of the design:
/// for each (name, scale) pair a column named "name:scale" holding
/// value * (weeks_since_first / 52) or value * duration. The base column must
/// exist and the new name must be fresh.
DesignMatrix augment_with_time_interactions(
    const DesignMatrix& design, const std::vector<double>& weeks_since_first,
    const std::vector<std::pair<std::string, TimeScale>>& interactions);

} // namespace survkit
