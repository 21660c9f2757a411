#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "survkit/design.hpp"

namespace survkit {

/// How tied event times enter the partial likelihood.
enum class TieMethod { Breslow, Efron };

std::string_view to_label(TieMethod ties);

struct FitControls {
    double loglik_rel_tol = 1e-9;
    double grad_tol = 1e-6;
    int max_iterations = 50;
    int max_step_halvings = 10;
    /// |beta_j| beyond this while the likelihood still climbs means the
    /// likelihood is monotone in that coordinate (separation).
    double separation_bound = 20.0;
};

struct IterationRecord {
    int iteration = 0;
    double loglik = 0.0;
    double grad_max_norm = 0.0;
    int step_halvings = 0;
};

/// Harrell's C over usable pairs (distinct durations where the shorter one is
/// an event). Ties in the linear predictor count 1/2; tied durations are not
/// usable pairs.
struct Concordance {
    double value = 0.0;
    std::size_t usable_pairs = 0;
    bool defined = false;
};

struct CoxFit {
    std::vector<std::string> covariate_names;
    TieMethod ties = TieMethod::Breslow;

    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    Eigen::VectorXd z;
    Eigen::VectorXd p;
    Eigen::VectorXd hazard_ratio;  // exp(beta)

    Eigen::MatrixXd information;   // observed information at beta
    Eigen::MatrixXd covariance;    // its inverse

    double loglik_null = 0.0;
    double loglik = 0.0;

    int df = 0;
    double lr_stat = 0.0, lr_p = 1.0;
    double wald_stat = 0.0, wald_p = 1.0;
    double score_stat = 0.0, score_p = 1.0;

    Concordance concordance;
    std::vector<IterationRecord> iterations;  // iteration 0 is the start point
    bool converged = false;

    std::size_t n_records = 0;
    std::size_t n_events = 0;
};

/// The likelihood kept increasing while a coefficient ran away; the data can
/// perfectly order events by that covariate.
class SeparationError : public std::runtime_error {
public:
    SeparationError(std::string message, std::string column, double beta_value)
        : std::runtime_error(std::move(message)), column(std::move(column)), beta(beta_value) {}
    std::string column;
    double beta;
};

class CollinearityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(std::string message, std::vector<IterationRecord> trace)
        : std::runtime_error(std::move(message)), trace(std::move(trace)) {}
    std::vector<IterationRecord> trace;
};

/// A risk-set denominator overflowed or collapsed despite rescaling.
class LikelihoodOverflowError : public std::runtime_error {
public:
    LikelihoodOverflowError(std::string message, double time)
        : std::runtime_error(std::move(message)), risk_set_time(time) {}
    double risk_set_time;
};

/// Log partial likelihood at beta. Each risk-set sum is rescaled by its
/// running maximum linear predictor, so extreme beta values stay finite.
double log_partial_likelihood(const DesignMatrix& design, const Eigen::VectorXd& beta,
                              TieMethod ties);

struct PartialLikelihoodDerivatives {
    double loglik = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd information;  // negated Hessian
};

PartialLikelihoodDerivatives partial_likelihood_derivatives(const DesignMatrix& design,
                                                            const Eigen::VectorXd& beta,
                                                            TieMethod ties);

/// Newton-Raphson from beta = 0 with step halving. Convergence requires both
/// the relative log-likelihood change below loglik_rel_tol and the gradient
/// max-norm below grad_tol.
CoxFit fit_cox(const DesignMatrix& design, TieMethod ties = TieMethod::Breslow,
               const FitControls& controls = {});

/// 100 * (exp(beta) - 1): percent change in the hazard for a one-unit
/// covariate increase.
double percent_hazard_change(double beta);

/// Fitted hazard ratio between two covariate vectors: exp((x_a - x_b) beta).
double hazard_ratio_between(const CoxFit& fit, const Eigen::VectorXd& x_a,
                            const Eigen::VectorXd& x_b);

/// Harrell's concordance of the fit's linear predictor on a dataset.
Concordance concordance_index(const DesignMatrix& design, const Eigen::VectorXd& beta);

} // namespace survkit
