#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace survkit {

enum class ColumnKind { Continuous, Indicator, Interaction };

/// The clock an interaction term multiplies a covariate by.
enum class TimeScale { YearsSinceFirst, WeeksSinceLast };

std::string_view to_label(TimeScale scale);

struct DesignColumn {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    /// How the column was derived from record fields, for reports.
    std::string source;
};

/// Covariate matrix with the outcome (duration, event flag) carried alongside.
/// Rows correspond to records in their original order.
struct DesignMatrix {
    std::vector<DesignColumn> columns;
    Eigen::MatrixXd values;        // n x k
    std::vector<double> durations; // n
    std::vector<bool> events;      // n

    std::size_t n() const { return durations.size(); }
    std::size_t k() const { return columns.size(); }

    /// Index of a column by name, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t column_index(std::string_view name) const;
};

/// Validates shape and contents: consistent sizes, at least one row and one
/// column, finite covariate values, durations finite and >= 1, and distinct
/// column names. Throws std::invalid_argument on the first failure.
void require_consistent(const DesignMatrix& design);

} // namespace survkit
