#include "survkit/cox.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "survkit/risk_index.hpp"
#include "survkit/stats.hpp"

namespace survkit {

std::string_view to_label(TieMethod ties) {
    switch (ties) {
        case TieMethod::Breslow: return "breslow";
        case TieMethod::Efron: return "efron";
    }
    throw std::invalid_argument("to_label: unknown TieMethod");
}

namespace {

struct SweepResult {
    double loglik = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd information;
};

// One pass over the risk sets in descending duration order. Risk sets are
// prefixes of that order, so the denominator accumulators only grow; they are
// kept relative to the largest linear predictor absorbed so far, which keeps
// every exp() argument non-positive no matter how extreme beta is.
//
// At an event time with failure set D (|D| = d), writing S = sum_{j at risk}
// exp(lp_j) and S_D for the same sum over D only:
//   Breslow    adds sum_D lp - d log S, with risk-set mean S1/S entering the
//              gradient d times and the weighted covariance entering the
//              information d times.
//   Efron      spreads the tied failures over d denominators S - (j/d) S_D,
//              j = 0..d-1, each with its own mean and covariance.
SweepResult sweep(const DesignMatrix& design, const Eigen::VectorXd& beta, TieMethod ties,
                  bool with_derivatives, const RiskSetIndex& index) {
    const auto k = static_cast<Eigen::Index>(design.k());
    const Eigen::VectorXd lp = design.values * beta;
    if (!lp.allFinite()) {
        for (Eigen::Index i = 0; i < lp.size(); ++i) {
            if (!std::isfinite(lp(i))) {
                throw LikelihoodOverflowError(
                    "linear predictor overflowed for the risk set at time " +
                        std::to_string(design.durations[static_cast<std::size_t>(i)]),
                    design.durations[static_cast<std::size_t>(i)]);
            }
        }
    }

    SweepResult out;
    if (with_derivatives) {
        out.gradient = Eigen::VectorXd::Zero(k);
        out.information = Eigen::MatrixXd::Zero(k, k);
    }

    double cmax = -std::numeric_limits<double>::infinity();
    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(k, k);

    Eigen::VectorXd d1 = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd mean(k), x_sum(k);

    const auto order = index.by_duration_desc();
    const auto& times = index.times();
    std::size_t absorbed = 0;

    for (std::size_t ti = times.size(); ti-- > 0;) {
        const auto& event = times[ti];
        while (absorbed < event.n_at_risk) {
            const std::size_t id = order[absorbed++];
            const double l = lp(static_cast<Eigen::Index>(id));
            if (l > cmax) {
                const double scale = std::exp(cmax - l);  // 0 on the first record
                s0 *= scale;
                if (with_derivatives) {
                    s1 *= scale;
                    s2 *= scale;
                }
                cmax = l;
            }
            const double w = std::exp(l - cmax);
            s0 += w;
            if (with_derivatives) {
                const auto row = design.values.row(static_cast<Eigen::Index>(id));
                s1.noalias() += w * row.transpose();
                s2.noalias() += w * row.transpose() * row;
            }
        }

        const double d = static_cast<double>(event.failures.size());
        double lp_sum = 0.0, ds0 = 0.0;
        if (with_derivatives) {
            x_sum.setZero();
            if (ties == TieMethod::Efron) {
                d1.setZero();
                d2.setZero();
            }
        }
        for (const std::size_t id : event.failures) {
            lp_sum += lp(static_cast<Eigen::Index>(id));
            const auto row = design.values.row(static_cast<Eigen::Index>(id));
            if (with_derivatives) x_sum.noalias() += row.transpose();
            if (ties == TieMethod::Efron) {
                const double w = std::exp(lp(static_cast<Eigen::Index>(id)) - cmax);
                ds0 += w;
                if (with_derivatives) {
                    d1.noalias() += w * row.transpose();
                    d2.noalias() += w * row.transpose() * row;
                }
            }
        }

        out.loglik += lp_sum;
        if (ties == TieMethod::Breslow) {
            out.loglik -= d * (cmax + std::log(s0));
            if (with_derivatives) {
                mean = s1 / s0;
                out.gradient.noalias() += x_sum - d * mean;
                out.information.noalias() += d * (s2 / s0 - mean * mean.transpose());
            }
        } else {
            for (double j = 0.0; j < d; ++j) {
                const double f = j / d;
                const double denom = s0 - f * ds0;
                out.loglik -= cmax + std::log(denom);
                if (with_derivatives) {
                    mean = (s1 - f * d1) / denom;
                    out.gradient.noalias() -= mean;
                    out.information.noalias() +=
                        (s2 - f * d2) / denom - mean * mean.transpose();
                }
            }
            if (with_derivatives) out.gradient.noalias() += x_sum;
        }

        if (!std::isfinite(out.loglik)) {
            throw LikelihoodOverflowError(
                "partial likelihood overflowed at the risk set for time " +
                    std::to_string(event.time),
                event.time);
        }
    }
    return out;
}

void require_beta(const DesignMatrix& design, const Eigen::VectorXd& beta) {
    if (beta.size() != static_cast<Eigen::Index>(design.k())) {
        throw std::invalid_argument("beta length does not match the number of covariates");
    }
    if (!beta.allFinite()) throw std::invalid_argument("beta must be finite");
}

std::string collinear_message(const Eigen::MatrixXd& information,
                              const std::vector<DesignColumn>& columns) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(information);
    std::ostringstream message;
    message << "covariates are collinear (information rank " << lu.rank() << " of "
            << columns.size() << ")";
    if (lu.dimensionOfKernel() > 0) {
        const Eigen::VectorXd null_direction = lu.kernel().col(0);
        message << "; involved:";
        for (Eigen::Index j = 0; j < null_direction.size(); ++j) {
            if (std::fabs(null_direction(j)) > 1e-8 * null_direction.cwiseAbs().maxCoeff()) {
                message << ' ' << columns[static_cast<std::size_t>(j)].name;
            }
        }
    }
    return message.str();
}

bool information_is_full_rank(const Eigen::MatrixXd& information) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(information);
    return lu.rank() == information.rows();
}

} // namespace

double log_partial_likelihood(const DesignMatrix& design, const Eigen::VectorXd& beta,
                              TieMethod ties) {
    require_consistent(design);
    require_beta(design, beta);
    const RiskSetIndex index = build_risk_index(design.durations, design.events);
    return sweep(design, beta, ties, /*with_derivatives=*/false, index).loglik;
}

PartialLikelihoodDerivatives partial_likelihood_derivatives(const DesignMatrix& design,
                                                            const Eigen::VectorXd& beta,
                                                            TieMethod ties) {
    require_consistent(design);
    require_beta(design, beta);
    const RiskSetIndex index = build_risk_index(design.durations, design.events);
    SweepResult result = sweep(design, beta, ties, /*with_derivatives=*/true, index);
    return {result.loglik, std::move(result.gradient), std::move(result.information)};
}

CoxFit fit_cox(const DesignMatrix& design, TieMethod ties, const FitControls& controls) {
    require_consistent(design);
    if (controls.max_iterations < 1 || controls.max_step_halvings < 0 ||
        !(controls.loglik_rel_tol > 0.0) || !(controls.grad_tol > 0.0) ||
        !(controls.separation_bound > 0.0)) {
        throw std::invalid_argument("fit_cox: invalid fit controls");
    }

    const RiskSetIndex index = build_risk_index(design.durations, design.events);
    if (index.n_events() == 0) {
        throw std::invalid_argument("fit_cox: no events in the sample, nothing to fit");
    }

    const auto k = static_cast<Eigen::Index>(design.k());
    for (Eigen::Index j = 0; j < k; ++j) {
        if (design.values.col(j).maxCoeff() == design.values.col(j).minCoeff()) {
            throw CollinearityError("covariate " + design.columns[static_cast<std::size_t>(j)].name +
                                    " is constant");
        }
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    SweepResult current = sweep(design, beta, ties, true, index);
    if (!information_is_full_rank(current.information)) {
        throw CollinearityError(collinear_message(current.information, design.columns));
    }

    CoxFit fit;
    fit.ties = ties;
    fit.df = static_cast<int>(k);
    fit.n_records = design.n();
    fit.n_events = index.n_events();
    fit.loglik_null = current.loglik;
    for (const auto& column : design.columns) fit.covariate_names.push_back(column.name);

    const Eigen::VectorXd score_solve = current.information.ldlt().solve(current.gradient);
    fit.score_stat = current.gradient.dot(score_solve);

    fit.iterations.push_back(
        {0, current.loglik, current.gradient.cwiseAbs().maxCoeff(), 0});

    for (int iteration = 1; iteration <= controls.max_iterations && !fit.converged; ++iteration) {
        const Eigen::VectorXd direction = current.information.ldlt().solve(current.gradient);
        if (!direction.allFinite()) {
            throw CollinearityError(collinear_message(current.information, design.columns));
        }

        double scale = 1.0;
        int halvings = 0;
        Eigen::VectorXd candidate;
        SweepResult next;
        // Near the optimum the true improvement drops below the sweep's own
        // rounding noise while the gradient still shrinks quadratically, so
        // accept steps that are uphill to within that noise.
        const double noise = 1e-13 * (std::fabs(current.loglik) + 1.0);
        for (;;) {
            candidate = beta + scale * direction;
            next = sweep(design, candidate, ties, true, index);
            if (next.loglik >= current.loglik - noise) break;
            if (halvings >= controls.max_step_halvings) {
                // No uphill step left. At a stationary point that just means
                // we have converged to machine precision.
                if (current.gradient.cwiseAbs().maxCoeff() < controls.grad_tol) {
                    fit.converged = true;
                    break;
                }
                throw ConvergenceError("step halving found no likelihood increase at iteration " +
                                           std::to_string(iteration),
                                       fit.iterations);
            }
            ++halvings;
            scale *= 0.5;
        }
        if (fit.converged) break;

        const double improvement = next.loglik - current.loglik;
        beta = candidate;
        current = std::move(next);
        const double grad_max = current.gradient.cwiseAbs().maxCoeff();
        fit.iterations.push_back({iteration, current.loglik, grad_max, halvings});

        for (Eigen::Index j = 0; j < k; ++j) {
            if (std::fabs(beta(j)) > controls.separation_bound) {
                const auto& name = design.columns[static_cast<std::size_t>(j)].name;
                throw SeparationError("monotone likelihood: coefficient for " + name +
                                          " diverged past " +
                                          std::to_string(controls.separation_bound) +
                                          " while the likelihood kept increasing",
                                      name, beta(j));
            }
        }

        if (std::fabs(improvement) <= controls.loglik_rel_tol * (std::fabs(current.loglik) + 1.0) &&
            grad_max < controls.grad_tol) {
            fit.converged = true;
        }
    }
    if (!fit.converged) {
        throw ConvergenceError("Newton-Raphson did not converge in " +
                                   std::to_string(controls.max_iterations) + " iterations",
                               fit.iterations);
    }

    fit.beta = beta;
    fit.loglik = current.loglik;
    fit.information = current.information;
    fit.covariance = current.information.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    if (!fit.covariance.allFinite() || (fit.covariance.diagonal().array() <= 0.0).any()) {
        throw CollinearityError("information matrix is singular at the optimum");
    }

    fit.se = fit.covariance.diagonal().cwiseSqrt();
    fit.hazard_ratio = beta.array().exp();
    fit.z = beta.cwiseQuotient(fit.se);
    fit.p.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) fit.p(j) = stats::two_sided_normal_p(fit.z(j));

    fit.lr_stat = std::max(0.0, 2.0 * (fit.loglik - fit.loglik_null));
    fit.wald_stat = beta.dot(fit.information * beta);
    fit.lr_p = stats::chi_square_sf(fit.lr_stat, fit.df);
    fit.wald_p = stats::chi_square_sf(fit.wald_stat, fit.df);
    fit.score_p = stats::chi_square_sf(fit.score_stat, fit.df);

    fit.concordance = concordance_index(design, beta);
    return fit;
}

double percent_hazard_change(double beta) {
    if (!std::isfinite(beta)) throw std::invalid_argument("percent_hazard_change: beta not finite");
    return 100.0 * std::expm1(beta);
}

double hazard_ratio_between(const CoxFit& fit, const Eigen::VectorXd& x_a,
                            const Eigen::VectorXd& x_b) {
    if (x_a.size() != fit.beta.size() || x_b.size() != fit.beta.size()) {
        throw std::invalid_argument("hazard_ratio_between: covariate vectors do not match fit");
    }
    if (!x_a.allFinite() || !x_b.allFinite()) {
        throw std::invalid_argument("hazard_ratio_between: covariate vectors must be finite");
    }
    return std::exp((x_a - x_b).dot(fit.beta));
}

Concordance concordance_index(const DesignMatrix& design, const Eigen::VectorXd& beta) {
    require_consistent(design);
    require_beta(design, beta);
    const Eigen::VectorXd lp = design.values * beta;

    const std::size_t n = design.n();
    std::size_t usable = 0;
    double score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool i_shorter = design.durations[i] < design.durations[j];
            const bool j_shorter = design.durations[j] < design.durations[i];
            if (!i_shorter && !j_shorter) continue;  // tied durations are unusable
            const std::size_t shorter = i_shorter ? i : j;
            const std::size_t longer = i_shorter ? j : i;
            if (!design.events[shorter]) continue;  // censored first: ordering unknown
            ++usable;
            const double lp_short = lp(static_cast<Eigen::Index>(shorter));
            const double lp_long = lp(static_cast<Eigen::Index>(longer));
            if (lp_short > lp_long) {
                score += 1.0;
            } else if (lp_short == lp_long) {
                score += 0.5;
            }
        }
    }

    Concordance result;
    result.usable_pairs = usable;
    result.defined = usable > 0;
    result.value = result.defined ? score / static_cast<double>(usable) : 0.0;
    return result;
}

} // namespace survkit
