#include "survkit/diagnostics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "survkit/km.hpp"
#include "survkit/risk_index.hpp"
#include "survkit/stats.hpp"

namespace survkit {

std::string_view to_label(TimeTransform transform) {
    switch (transform) {
        case TimeTransform::Identity: return "identity";
        case TimeTransform::Log: return "log";
        case TimeTransform::KaplanMeier: return "km";
    }
    throw std::invalid_argument("to_label: unknown TimeTransform");
}

namespace {

void require_matching(const DesignMatrix& design, const CoxFit& fit) {
    if (!fit.converged) {
        throw std::invalid_argument("residuals require a converged fit");
    }
    if (fit.covariate_names.size() != design.k() ||
        !std::equal(fit.covariate_names.begin(), fit.covariate_names.end(),
                    design.columns.begin(),
                    [](const std::string& a, const DesignColumn& b) { return a == b.name; })) {
        throw std::invalid_argument("fit covariates do not match the design matrix");
    }
    if (fit.n_records != design.n()) {
        throw std::invalid_argument("fit was produced from a different number of records");
    }
}

} // namespace

ResidualMatrix schoenfeld_residuals(const DesignMatrix& design, const CoxFit& fit) {
    require_consistent(design);
    require_matching(design, fit);

    const RiskSetIndex index = build_risk_index(design.durations, design.events);
    const auto k = static_cast<Eigen::Index>(design.k());
    const Eigen::VectorXd lp = design.values * fit.beta;

    ResidualMatrix out;
    out.covariate_names = fit.covariate_names;
    out.event_times.reserve(index.n_events());
    out.record_ids.reserve(index.n_events());
    out.residuals.resize(static_cast<Eigen::Index>(index.n_events()), k);

    // Same prefix sweep as the fit, weights exp(lp - cmax); means are ratios,
    // so the common rescale cancels.
    double cmax = -std::numeric_limits<double>::infinity();
    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(k);
    const auto order = index.by_duration_desc();
    const auto& times = index.times();
    std::size_t absorbed = 0;

    // Rows are emitted while sweeping backwards through time, then the whole
    // matrix is reversed into ascending order.
    Eigen::Index row = static_cast<Eigen::Index>(index.n_events());
    Eigen::VectorXd mean(k), d1(k);

    for (std::size_t ti = times.size(); ti-- > 0;) {
        const auto& event = times[ti];
        while (absorbed < event.n_at_risk) {
            const std::size_t id = order[absorbed++];
            const double l = lp(static_cast<Eigen::Index>(id));
            if (l > cmax) {
                const double scale = std::exp(cmax - l);
                s0 *= scale;
                s1 *= scale;
                cmax = l;
            }
            const double w = std::exp(l - cmax);
            s0 += w;
            s1.noalias() += w * design.values.row(static_cast<Eigen::Index>(id)).transpose();
        }

        const double d = static_cast<double>(event.failures.size());
        if (fit.ties == TieMethod::Breslow || event.failures.size() == 1) {
            mean = s1 / s0;
        } else {
            // Average of the staged Efron means, so the rows of a tie group
            // keep the property that all rows sum to the score (zero at the
            // optimum).
            double ds0 = 0.0;
            d1.setZero();
            for (const std::size_t id : event.failures) {
                const double w = std::exp(lp(static_cast<Eigen::Index>(id)) - cmax);
                ds0 += w;
                d1.noalias() += w * design.values.row(static_cast<Eigen::Index>(id)).transpose();
            }
            mean.setZero();
            for (double j = 0.0; j < d; ++j) {
                const double f = j / d;
                mean.noalias() += (s1 - f * d1) / (s0 - f * ds0);
            }
            mean /= d;
        }

        // Tie groups keep ascending record id order; reversing the global row
        // order afterwards preserves it because rows here go in descending id.
        for (auto it = event.failures.rbegin(); it != event.failures.rend(); ++it) {
            --row;
            out.residuals.row(row) =
                design.values.row(static_cast<Eigen::Index>(*it)) - mean.transpose();
        }
    }

    for (const auto& event : times) {
        for (const std::size_t id : event.failures) {
            out.event_times.push_back(event.time);
            out.record_ids.push_back(id);
        }
    }

    const SurvivalCurve curve = kaplan_meier(index);
    out.km_transform.reserve(out.event_times.size());
    for (const double t : out.event_times) {
        out.km_transform.push_back(1.0 - curve.survival_before(t));
    }
    return out;
}

void scale_residuals(ResidualMatrix& residuals, const CoxFit& fit) {
    if (residuals.scaled.has_value()) {
        throw std::invalid_argument("residuals are already scaled");
    }
    if (!fit.converged) throw std::invalid_argument("scaling requires a converged fit");
    if (residuals.k() != fit.covariate_names.size() || residuals.covariate_names != fit.covariate_names) {
        throw std::invalid_argument("residuals do not match the fit's covariates");
    }
    if (residuals.m() == 0) throw std::invalid_argument("no residual rows to scale");
    if (!fit.covariance.allFinite()) {
        throw std::invalid_argument("fit covariance is not finite");
    }
    // r* = m * V * r for each row; V is symmetric so the matrix form is r V.
    residuals.scaled = static_cast<double>(residuals.m()) * residuals.residuals * fit.covariance;
}

PhTestReport proportional_hazards_test(const ResidualMatrix& residuals, const CoxFit& fit,
                                       TimeTransform transform) {
    if (!residuals.scaled.has_value()) {
        throw std::invalid_argument("proportional_hazards_test requires scaled residuals");
    }
    if (residuals.covariate_names != fit.covariate_names) {
        throw std::invalid_argument("residuals do not match the fit's covariates");
    }
    const std::size_t m = residuals.m();
    const std::size_t k = residuals.k();
    if (m < k + 2) {
        throw std::invalid_argument(
            "too few events for the trend test: need at least covariates + 2, have " +
            std::to_string(m));
    }

    Eigen::VectorXd g(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const double t = residuals.event_times[i];
        switch (transform) {
            case TimeTransform::Identity: g(static_cast<Eigen::Index>(i)) = t; break;
            case TimeTransform::Log: g(static_cast<Eigen::Index>(i)) = std::log(t); break;
            case TimeTransform::KaplanMeier:
                g(static_cast<Eigen::Index>(i)) = residuals.km_transform[i];
                break;
        }
    }
    if (g.maxCoeff() == g.minCoeff()) {
        throw DegenerateTimeError("time transform '" + std::string(to_label(transform)) +
                                  "' is constant across the " + std::to_string(m) +
                                  " event times; no time trend is estimable");
    }

    const Eigen::VectorXd xx = g.array() - g.mean();
    const double sum_xx = xx.squaredNorm();

    PhTestReport report;
    report.transform = transform;
    report.global_df = static_cast<int>(k);

    const Eigen::MatrixXd& r2 = *residuals.scaled;
    const Eigen::RowVectorXd trend = xx.transpose() * r2;  // 1 x k
    const double md = static_cast<double>(m);
    for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        PhTestReport::PerCovariate entry;
        entry.name = residuals.covariate_names[j];
        entry.slope = trend(jj) / sum_xx;
        entry.chi_square = trend(jj) * trend(jj) / (fit.covariance(jj, jj) * md * sum_xx);
        entry.p_value = stats::chi_square_sf(entry.chi_square, 1);
        report.per_covariate.push_back(std::move(entry));
    }

    const Eigen::VectorXd u = residuals.residuals.transpose() * xx;  // unscaled
    report.global_chi_square = md * u.dot(fit.covariance * u) / sum_xx;
    report.global_p = stats::chi_square_sf(report.global_chi_square, report.global_df);
    return report;
}

DesignMatrix augment_with_time_interactions(
    const DesignMatrix& design, const std::vector<double>& weeks_since_first,
    const std::vector<std::pair<std::string, TimeScale>>& interactions) {
    require_consistent(design);

    DesignMatrix out = design;
    const auto n = static_cast<Eigen::Index>(design.n());
    for (const auto& [base_name, scale] : interactions) {
        const std::size_t base = out.column_index(base_name);
        if (base == DesignMatrix::npos) {
            throw std::invalid_argument("interaction references unknown covariate " + base_name);
        }
        std::string name = base_name + ":" + std::string(to_label(scale));
        if (out.column_index(name) != DesignMatrix::npos) {
            throw std::invalid_argument("interaction column " + name + " already present");
        }

        Eigen::VectorXd factor(n);
        if (scale == TimeScale::YearsSinceFirst) {
            if (weeks_since_first.size() != design.n()) {
                throw std::invalid_argument(
                    "interaction on yearsSinceFirst needs weeks_since_first for every row");
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                factor(i) = weeks_since_first[static_cast<std::size_t>(i)] / 52.0;
            }
        } else {
            for (Eigen::Index i = 0; i < n; ++i) {
                factor(i) = design.durations[static_cast<std::size_t>(i)];
            }
        }

        out.values.conservativeResize(Eigen::NoChange, out.values.cols() + 1);
        out.values.col(out.values.cols() - 1) =
            out.values.col(static_cast<Eigen::Index>(base)).cwiseProduct(factor);
        out.columns.push_back({std::move(name), ColumnKind::Interaction,
                               base_name + " times " + std::string(to_label(scale))});
    }
    require_consistent(out);
    return out;
}

} // namespace survkit
