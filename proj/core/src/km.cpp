#include "survkit/km.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "survkit/stats.hpp"

namespace survkit {

double SurvivalCurve::survival_at(double t) const {
    // Last step with time <= t.
    const auto it = std::upper_bound(steps.begin(), steps.end(), t,
                                     [](double v, const Step& s) { return v < s.time; });
    if (it == steps.begin()) return 1.0;
    return std::prev(it)->survival;
}

double SurvivalCurve::survival_before(double t) const {
    const auto it = std::lower_bound(steps.begin(), steps.end(), t,
                                     [](const Step& s, double v) { return s.time < v; });
    if (it == steps.begin()) return 1.0;
    return std::prev(it)->survival;
}

SurvivalCurve kaplan_meier(const RiskSetIndex& index) {
    SurvivalCurve curve;
    curve.n_records = index.n_records();
    curve.n_events = index.n_events();
    curve.degenerate = index.times().empty();

    double survival = 1.0;
    curve.steps.reserve(index.times().size());
    for (const auto& entry : index.times()) {
        const auto d = entry.failures.size();
        const auto n = entry.n_at_risk;
        survival *= 1.0 - static_cast<double>(d) / static_cast<double>(n);
        curve.steps.push_back({entry.time, n, d, survival});
    }

    curve.q25 = survival_quantile(curve, 0.25);
    curve.median = survival_quantile(curve, 0.5);
    curve.q75 = survival_quantile(curve, 0.75);
    return curve;
}

std::optional<double> survival_quantile(const SurvivalCurve& curve, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("survival_quantile: p outside (0, 1)");
    if (curve.degenerate) return std::nullopt;
    // Tiny slack so quantiles hit exactly (e.g. a curve value of 1/2 computed
    // through a product of ratios) are not missed to rounding.
    const double threshold = (1.0 - p) + 1e-12;
    for (const auto& step : curve.steps) {
        if (step.survival <= threshold) return step.time;
    }
    return std::nullopt;
}

LogrankResult logrank_test(std::span<const RiskSetIndex> groups) {
    const std::size_t k = groups.size();
    if (k < 2) throw std::invalid_argument("logrank_test: needs at least two groups");

    // Pooled distinct event times.
    std::vector<double> pooled;
    for (const auto& g : groups) {
        for (const auto& entry : g.times()) pooled.push_back(entry.time);
    }
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    LogrankResult result;
    result.df = static_cast<int>(k) - 1;
    result.observed.assign(k, 0);
    result.expected.assign(k, 0.0);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k - 1));
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k - 1),
                                              static_cast<Eigen::Index>(k - 1));

    std::vector<double> n_g(k), d_g(k);
    for (const double t : pooled) {
        double n_total = 0.0, d_total = 0.0;
        for (std::size_t g = 0; g < k; ++g) {
            n_g[g] = static_cast<double>(groups[g].n_at_risk_at(t));
            d_g[g] = static_cast<double>(groups[g].n_failures_at(t));
            n_total += n_g[g];
            d_total += d_g[g];
        }
        for (std::size_t g = 0; g < k; ++g) result.observed[g] += static_cast<std::size_t>(d_g[g]);
        if (n_total <= 1.0) continue;  // no information in a one-subject risk set

        const double tie_correction = (n_total - d_total) / (n_total - 1.0);
        for (std::size_t g = 0; g < k; ++g) {
            const double e = d_total * n_g[g] / n_total;
            result.expected[g] += e;
            if (g + 1 < k) z(static_cast<Eigen::Index>(g)) += d_g[g] - e;
        }
        for (std::size_t g = 0; g + 1 < k; ++g) {
            for (std::size_t h = 0; h + 1 < k; ++h) {
                const double same = g == h ? n_g[g] / n_total : 0.0;
                v(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) +=
                    d_total * tie_correction * (same - n_g[g] * n_g[h] / (n_total * n_total));
            }
        }
    }

    // Pseudo-inverse solve keeps degenerate designs (no events, or risk sets
    // that collapse at every event time) well-defined: they yield 0.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(v);
    const Eigen::VectorXd solved = cod.pseudoInverse() * z;
    result.chi_square = z.dot(solved);
    if (result.chi_square < 0.0 && result.chi_square > -1e-12) result.chi_square = 0.0;
    result.p_value = stats::chi_square_sf(result.chi_square, result.df);
    return result;
}

} // namespace survkit
