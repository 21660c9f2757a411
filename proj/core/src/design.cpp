#include "survkit/design.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace survkit {

std::string_view to_label(TimeScale scale) {
    switch (scale) {
        case TimeScale::YearsSinceFirst: return "yearsSinceFirst";
        case TimeScale::WeeksSinceLast: return "weeksSinceLast";
    }
    throw std::invalid_argument("to_label: unknown TimeScale");
}

std::size_t DesignMatrix::column_index(std::string_view name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].name == name) return j;
    }
    return npos;
}

void require_consistent(const DesignMatrix& design) {
    const auto n = design.durations.size();
    const auto k = design.columns.size();
    if (n == 0) throw std::invalid_argument("design matrix has no rows");
    if (k == 0) throw std::invalid_argument("design matrix has no covariates");
    if (design.events.size() != n) {
        throw std::invalid_argument("design matrix: events length differs from durations");
    }
    if (design.values.rows() != static_cast<Eigen::Index>(n) ||
        design.values.cols() != static_cast<Eigen::Index>(k)) {
        throw std::invalid_argument("design matrix: value shape does not match rows/columns");
    }
    if (!design.values.allFinite()) {
        throw std::invalid_argument("design matrix: covariate values must be finite");
    }
    for (double d : design.durations) {
        if (!std::isfinite(d) || d < 1.0) {
            throw std::invalid_argument("design matrix: durations must be finite and >= 1");
        }
    }
    std::unordered_set<std::string> seen;
    for (const auto& column : design.columns) {
        if (column.name.empty()) throw std::invalid_argument("design matrix: empty column name");
        if (!seen.insert(column.name).second) {
            throw std::invalid_argument("design matrix: duplicate column name " + column.name);
        }
    }
}

} // namespace survkit
