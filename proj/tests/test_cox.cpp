#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "survkit/cox.hpp"
#include "survkit/risk_index.hpp"

using namespace survkit;

namespace {

DesignMatrix tied_one_covariate() {
    // 8 records, one covariate, a tie at t=5; frozen reference values below
    // were computed with an independent implementation.
    DesignMatrix d;
    d.columns = {{"x1", ColumnKind::Continuous, "test"}};
    d.durations = {5, 5, 6, 2, 4, 9, 9, 11};
    d.events = {true, true, true, false, true, true, false, true};
    d.values.resize(8, 1);
    d.values << 0.5, -0.2, 1.0, 0.3, -0.7, 0.1, 0.9, -1.1;
    return d;
}

DesignMatrix two_covariates_no_ties() {
    DesignMatrix d;
    d.columns = {{"x1", ColumnKind::Continuous, "test"},
                 {"x2", ColumnKind::Indicator, "test"}};
    d.durations = {3, 1, 7, 2, 5, 8, 4, 10, 6, 9};
    d.events = {true, false, true, true, false, true, true, false, true, true};
    d.values.resize(10, 2);
    d.values << 0.2, 1, -0.4, 0, 0.7, 1, 1.1, 0, -0.9, 0, 0.3, 1, -0.2, 1, 0.8, 0, 0.05, 1, -0.6, 0;
    return d;
}

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

} // namespace

TEST_CASE("log partial likelihood matches frozen reference evaluations") {
    const DesignMatrix d1 = tied_one_covariate();
    CHECK(log_partial_likelihood(d1, vec1(0.0), TieMethod::Breslow) ==
          doctest::Approx(-8.0143357372994242).epsilon(1e-13));
    CHECK(log_partial_likelihood(d1, vec1(0.0), TieMethod::Efron) ==
          doctest::Approx(-7.8320141805054693).epsilon(1e-13));
    CHECK(log_partial_likelihood(d1, vec1(0.7), TieMethod::Breslow) ==
          doctest::Approx(-8.6350246618757662).epsilon(1e-13));
    CHECK(log_partial_likelihood(d1, vec1(0.7), TieMethod::Efron) ==
          doctest::Approx(-8.4744988087072333).epsilon(1e-13));

    const DesignMatrix d2 = two_covariates_no_ties();
    CHECK(log_partial_likelihood(d2, vec2(0.0, 0.0), TieMethod::Breslow) ==
          doctest::Approx(-11.010068010853415).epsilon(1e-13));
    CHECK(log_partial_likelihood(d2, vec2(0.3, -0.5), TieMethod::Breslow) ==
          doctest::Approx(-12.001059695498299).epsilon(1e-13));
}

TEST_CASE("null log likelihood has the closed form sum over event times") {
    std::mt19937_64 rng(31);
    const auto data = oracle::make_cox_data(rng, 120, 2, 0.08, 18.0, 0.5, true);
    const RiskSetIndex index = build_risk_index(data.design.durations, data.design.events);

    // Breslow: -sum d_i log n_i. Efron: the staged denominators at beta=0
    // are n_i - (j/d)*d = n_i - j.
    double breslow = 0.0, efron = 0.0;
    for (const auto& entry : index.times()) {
        const auto d = static_cast<double>(entry.failures.size());
        breslow -= d * std::log(static_cast<double>(entry.n_at_risk));
        for (double j = 0.0; j < d; ++j) {
            efron -= std::log(static_cast<double>(entry.n_at_risk) - j);
        }
    }

    const auto k = static_cast<Eigen::Index>(data.design.k());
    CHECK(log_partial_likelihood(data.design, Eigen::VectorXd::Zero(k), TieMethod::Breslow) ==
          doctest::Approx(breslow).epsilon(1e-12));
    CHECK(log_partial_likelihood(data.design, Eigen::VectorXd::Zero(k), TieMethod::Efron) ==
          doctest::Approx(efron).epsilon(1e-12));
}

TEST_CASE("optimized sweep equals the brute-force evaluation on random data") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> coef(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto data = oracle::make_cox_data(rng, 50, 3, 0.08, 15.0, 0.4, trial % 2 == 0);
        Eigen::VectorXd beta(3);
        beta << coef(rng), coef(rng), coef(rng);
        for (const auto ties : {TieMethod::Breslow, TieMethod::Efron}) {
            const double fast = log_partial_likelihood(data.design, beta, ties);
            const double slow = oracle::log_partial_likelihood(data.design, beta, ties);
            CHECK(fast == doctest::Approx(slow).epsilon(1e-11));
        }
    }
}

TEST_CASE("rescaled sweep survives extreme coefficients where naive exp overflows") {
    const DesignMatrix d = two_covariates_no_ties();
    // exp(600) overflows a double; the rescaled sweep must stay finite.
    const double value = log_partial_likelihood(d, vec2(600.0, -550.0), TieMethod::Breslow);
    CHECK(std::isfinite(value));
    const double efron = log_partial_likelihood(d, vec2(600.0, -550.0), TieMethod::Efron);
    CHECK(std::isfinite(efron));
}

TEST_CASE("analytic gradient and information match finite differences") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> coef(-0.8, 0.8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = oracle::make_cox_data(rng, 60, 2, 0.08, 15.0, 0.5, true);
        const Eigen::VectorXd beta = vec2(coef(rng), coef(rng));
        for (const auto ties : {TieMethod::Breslow, TieMethod::Efron}) {
            const auto derivs = partial_likelihood_derivatives(data.design, beta, ties);
            CHECK(derivs.loglik ==
                  doctest::Approx(log_partial_likelihood(data.design, beta, ties)).epsilon(1e-12));

            const Eigen::VectorXd fd_grad = oracle::fd_gradient(data.design, beta, ties);
            const Eigen::MatrixXd fd_info = oracle::fd_hessian(data.design, beta, ties);
            for (Eigen::Index j = 0; j < beta.size(); ++j) {
                CHECK(derivs.gradient(j) == doctest::Approx(fd_grad(j)).epsilon(1e-4));
            }
            for (Eigen::Index a = 0; a < beta.size(); ++a) {
                for (Eigen::Index b = 0; b < beta.size(); ++b) {
                    CHECK(derivs.information(a, b) ==
                          doctest::Approx(fd_info(a, b)).epsilon(1e-4));
                }
            }
        }
    }
}

TEST_CASE("fit matches frozen reference coefficients") {
    const DesignMatrix d1 = tied_one_covariate();
    const CoxFit breslow = fit_cox(d1, TieMethod::Breslow);
    CHECK(breslow.converged);
    CHECK(breslow.beta(0) == doctest::Approx(0.01254626).epsilon(1e-4));
    CHECK(breslow.loglik == doctest::Approx(-8.01410440782207).epsilon(1e-10));
    CHECK(breslow.loglik_null == doctest::Approx(-8.0143357372994242).epsilon(1e-12));

    const CoxFit efron = fit_cox(d1, TieMethod::Efron);
    CHECK(efron.beta(0) == doctest::Approx(0.00890656).epsilon(1e-3));
    CHECK(efron.loglik == doctest::Approx(-7.83189443309402).epsilon(1e-10));

    const DesignMatrix d2 = two_covariates_no_ties();
    const CoxFit fit2 = fit_cox(d2, TieMethod::Breslow);
    CHECK(fit2.beta(0) == doctest::Approx(-0.03053968).epsilon(2e-3));
    CHECK(fit2.beta(1) == doctest::Approx(1.54993939).epsilon(1e-4));
    CHECK(fit2.loglik == doctest::Approx(-9.74244947803075).epsilon(1e-10));
}

TEST_CASE("fit leaves a strictly increasing convergence trace and a zero gradient") {
    std::mt19937_64 rng(61);
    const auto data = oracle::make_cox_data(rng, 150, 2, 0.07, 20.0, 0.5, true);
    const CoxFit fit = fit_cox(data.design, TieMethod::Efron);

    CHECK(fit.converged);
    REQUIRE(fit.iterations.size() >= 2);
    CHECK(fit.iterations.front().iteration == 0);
    for (std::size_t i = 1; i < fit.iterations.size(); ++i) {
        CHECK(fit.iterations[i].loglik > fit.iterations[i - 1].loglik);
    }
    CHECK(fit.iterations.back().grad_max_norm < 1e-6);
    CHECK(fit.loglik >= fit.loglik_null);

    // The reported beta maximizes: nudging any coordinate lowers the value.
    for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
        for (const double delta : {-1e-3, 1e-3}) {
            Eigen::VectorXd nudged = fit.beta;
            nudged(j) += delta;
            CHECK(log_partial_likelihood(data.design, nudged, TieMethod::Efron) < fit.loglik);
        }
    }
}

TEST_CASE("global test statistics are consistent") {
    std::mt19937_64 rng(67);
    const auto data = oracle::make_cox_data(rng, 400, 2, 0.06, 25.0, 0.4, false);
    const CoxFit fit = fit_cox(data.design, TieMethod::Breslow);

    CHECK(fit.lr_stat == doctest::Approx(2.0 * (fit.loglik - fit.loglik_null)).epsilon(1e-12));
    CHECK(fit.wald_stat == doctest::Approx(fit.beta.dot(fit.information * fit.beta)).epsilon(1e-12));
    CHECK(fit.lr_stat >= 0.0);
    CHECK(fit.wald_stat >= 0.0);
    CHECK(fit.score_stat >= 0.0);
    // With n=400 and a real signal the three statistics agree to first order.
    CHECK(fit.wald_stat == doctest::Approx(fit.lr_stat).epsilon(0.2));
    CHECK(fit.score_stat == doctest::Approx(fit.lr_stat).epsilon(0.2));
    CHECK(fit.df == 2);
    for (Eigen::Index j = 0; j < 2; ++j) {
        CHECK(fit.se(j) > 0.0);
        CHECK(fit.z(j) == doctest::Approx(fit.beta(j) / fit.se(j)).epsilon(1e-12));
        CHECK(fit.p(j) >= 0.0);
        CHECK(fit.p(j) <= 1.0);
        CHECK(fit.hazard_ratio(j) == doctest::Approx(std::exp(fit.beta(j))).epsilon(1e-14));
    }

    // Covariance is the information inverse.
    const Eigen::MatrixXd product = fit.information * fit.covariance;
    CHECK((product - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fit recovers generating coefficients within three standard errors") {
    std::mt19937_64 rng(71);
    const auto data = oracle::make_cox_data(rng, 2000, 2, 0.05, 28.0, 0.5, false);
    const CoxFit fit = fit_cox(data.design, TieMethod::Breslow);
    for (Eigen::Index j = 0; j < 2; ++j) {
        CHECK(std::fabs(fit.beta(j) - data.true_beta(j)) < 3.0 * fit.se(j));
    }
    CHECK(fit.concordance.value > 0.5);
}

TEST_CASE("location and scale changes transform the fit exactly") {
    std::mt19937_64 rng(73);
    const auto data = oracle::make_cox_data(rng, 250, 2, 0.07, 22.0, 0.4, false);

    FitControls tight;
    tight.loglik_rel_tol = 1e-13;
    tight.grad_tol = 1e-11;
    const CoxFit base = fit_cox(data.design, TieMethod::Breslow, tight);

    DesignMatrix shifted = data.design;
    shifted.values.col(0).array() += 5.0;
    const CoxFit shift_fit = fit_cox(shifted, TieMethod::Breslow, tight);
    CHECK(shift_fit.beta(0) == doctest::Approx(base.beta(0)).epsilon(1e-8));
    CHECK(shift_fit.se(0) == doctest::Approx(base.se(0)).epsilon(1e-8));

    DesignMatrix scaled = data.design;
    scaled.values.col(1) *= 4.0;
    const CoxFit scale_fit = fit_cox(scaled, TieMethod::Breslow, tight);
    CHECK(scale_fit.beta(1) * 4.0 == doctest::Approx(base.beta(1)).epsilon(1e-8));
    CHECK(scale_fit.se(1) * 4.0 == doctest::Approx(base.se(1)).epsilon(1e-8));
    CHECK(scale_fit.loglik == doctest::Approx(base.loglik).epsilon(1e-10));
}

TEST_CASE("Breslow and Efron coincide when no event times are tied") {
    std::mt19937_64 rng(79);
    const auto data = oracle::make_cox_data(rng, 180, 2, 0.06, 30.0, 0.5, false);
    {
        // Continuous durations: ties have probability zero, but verify.
        const RiskSetIndex index = build_risk_index(data.design.durations, data.design.events);
        for (const auto& entry : index.times()) REQUIRE(entry.failures.size() == 1);
    }
    const CoxFit breslow = fit_cox(data.design, TieMethod::Breslow);
    const CoxFit efron = fit_cox(data.design, TieMethod::Efron);
    CHECK((breslow.beta - efron.beta).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((breslow.se - efron.se).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(breslow.loglik == doctest::Approx(efron.loglik).epsilon(1e-12));
}

TEST_CASE("separation raises a dedicated error naming the runaway column") {
    // The single covariate perfectly orders the events: monotone likelihood.
    DesignMatrix d;
    d.columns = {{"winner", ColumnKind::Continuous, "test"}};
    d.durations = {1, 2, 3, 4, 5, 6};
    d.events = {true, true, true, true, true, true};
    d.values.resize(6, 1);
    d.values << 6, 5, 4, 3, 2, 1;
    CHECK_THROWS_AS(fit_cox(d, TieMethod::Breslow), SeparationError);
    try {
        fit_cox(d, TieMethod::Breslow);
    } catch (const SeparationError& e) {
        CHECK(e.column == "winner");
        CHECK(std::fabs(e.beta) > 20.0);
    }
}

TEST_CASE("collinear and degenerate designs are rejected up front") {
    std::mt19937_64 rng(83);
    auto data = oracle::make_cox_data(rng, 40, 2, 0.08, 15.0, 0.4, true);

    SUBCASE("duplicated column") {
        DesignMatrix d = data.design;
        d.columns.push_back({"x1_copy", ColumnKind::Continuous, "test"});
        d.values.conservativeResize(Eigen::NoChange, 3);
        d.values.col(2) = d.values.col(0);
        CHECK_THROWS_AS(fit_cox(d, TieMethod::Breslow), CollinearityError);
    }
    SUBCASE("constant column") {
        DesignMatrix d = data.design;
        d.values.col(1).setConstant(2.5);
        CHECK_THROWS_AS(fit_cox(d, TieMethod::Breslow), CollinearityError);
    }
    SUBCASE("no events") {
        DesignMatrix d = data.design;
        std::fill(d.events.begin(), d.events.end(), false);
        CHECK_THROWS_AS(fit_cox(d, TieMethod::Breslow), std::invalid_argument);
    }
    SUBCASE("beta length mismatch") {
        CHECK_THROWS_AS(log_partial_likelihood(data.design, vec1(0.1), TieMethod::Breslow),
                        std::invalid_argument);
    }
    SUBCASE("non-finite beta") {
        CHECK_THROWS_AS(
            log_partial_likelihood(data.design, vec2(std::nan(""), 0.0), TieMethod::Breslow),
            std::invalid_argument);
    }
}

TEST_CASE("percent hazard change and hazard ratios") {
    CHECK(percent_hazard_change(0.0) == 0.0);
    CHECK(percent_hazard_change(std::log(2.0)) == doctest::Approx(100.0).epsilon(1e-12));
    // Anchors reproduced from the published coefficient table.
    CHECK(std::fabs(percent_hazard_change(0.291102) - 33.8) < 0.05);
    CHECK(std::fabs(percent_hazard_change(-0.073076) - (-7.0)) < 0.05);
    CHECK_THROWS_AS(percent_hazard_change(std::nan("")), std::invalid_argument);

    const DesignMatrix d2 = two_covariates_no_ties();
    const CoxFit fit = fit_cox(d2, TieMethod::Breslow);
    const Eigen::VectorXd a = vec2(1.0, 1.0), b = vec2(0.0, 1.0);
    CHECK(hazard_ratio_between(fit, a, b) == doctest::Approx(std::exp(fit.beta(0))).epsilon(1e-12));
    CHECK(hazard_ratio_between(fit, a, a) == 1.0);
    CHECK_THROWS_AS(hazard_ratio_between(fit, vec1(1.0), b), std::invalid_argument);
}

TEST_CASE("concordance on hand-checkable data") {
    DesignMatrix d;
    d.columns = {{"x", ColumnKind::Continuous, "test"}};
    d.durations = {1, 2, 3};
    d.events = {true, true, false};
    d.values.resize(3, 1);

    d.values << 3, 2, 1;  // higher risk fails earlier: perfectly concordant
    auto c = concordance_index(d, vec1(1.0));
    CHECK(c.defined);
    CHECK(c.usable_pairs == 3);
    CHECK(c.value == doctest::Approx(1.0));

    c = concordance_index(d, vec1(-1.0));  // reversed predictor
    CHECK(c.value == doctest::Approx(0.0));

    d.values << 2, 2, 5;  // one tied pair counts a half
    c = concordance_index(d, vec1(1.0));
    CHECK(c.usable_pairs == 3);
    CHECK(c.value == doctest::Approx(0.5 / 3.0).epsilon(1e-14));

    // Tied durations and censored-shorter pairs are unusable.
    DesignMatrix tied;
    tied.columns = d.columns;
    tied.durations = {4, 4, 2};
    tied.events = {true, true, false};
    tied.values.resize(3, 1);
    tied.values << 1, 2, 3;
    c = concordance_index(tied, vec1(1.0));
    CHECK(c.usable_pairs == 0);
    CHECK_FALSE(c.defined);
}

TEST_CASE("convergence failure carries the iteration trace") {
    std::mt19937_64 rng(89);
    const auto data = oracle::make_cox_data(rng, 100, 2, 0.07, 18.0, 0.5, true);
    FitControls controls;
    controls.max_iterations = 1;  // force failure
    controls.loglik_rel_tol = 1e-15;
    controls.grad_tol = 1e-14;
    try {
        fit_cox(data.design, TieMethod::Breslow, controls);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.trace.size() == 2);  // start point + one iteration
        CHECK(e.trace.back().loglik > e.trace.front().loglik);
    }
}
