#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "statboost/lss.hpp"
#include "test_util.hpp"

using namespace statboost;

namespace {

std::vector<BaseLearnerSpec> linear_specs(int p) {
    std::vector<BaseLearnerSpec> specs;
    for (int j = 1; j <= p; ++j)
        specs.push_back(BaseLearnerSpec::linear("x" + std::to_string(j)));
    return specs;
}

// y ~ N(2 x1, exp(1 + 0.5 x2)^2) plus noise covariates.
Dataset heteroscedastic_data(int n, int p, std::uint64_t seed) {
    statboost::Rng rng(seed);
    Eigen::MatrixXd X = testutil::standardized(testutil::randn_matrix(rng, n, p));
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        double sigma = std::exp(1.0 + 0.5 * X(i, 1));
        y(i) = 2.0 * X(i, 0) + sigma * rng.normal();
    }
    return testutil::make_dataset(X, y);
}

}  // namespace

TEST_CASE("offset-only fit reproduces the sample mean and sd") {
    statboost::Rng rng(1);
    Eigen::VectorXd y = 3.0 * testutil::randn(rng, 50).array() + 1.5;
    Dataset d = testutil::make_dataset(testutil::randn(rng, 50), y);
    LssFit fit = fit_lss(d, linear_specs(1), linear_specs(1), 0.1, 0, 0);
    auto [mu, sigma] = predict_lss(fit, d);
    double mean = y.mean();
    double sd = std::sqrt((y.array() - mean).square().sum() / (y.size() - 1.0));
    CHECK((mu.array() - mean).abs().maxCoeff() <= 1e-12);
    CHECK((sigma.array() - sd).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("scale gradient at a perfect location fit with unit sigma is -1") {
    Eigen::VectorXd y(3), mu(3), eta_sigma(3);
    y << 1.0, -2.0, 0.5;
    mu = y;
    eta_sigma.setZero();
    Eigen::VectorXd u = lss_gradient_sigma(y, mu, eta_sigma);
    CHECK((u.array() + 1.0).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("both gradients match finite differences of the joint NLL") {
    statboost::Rng rng(2);
    for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd y(1), mu(1), ls(1);
        y << 3.0 * rng.normal();
        mu << 2.0 * rng.normal();
        ls << 1.5 * rng.normal();
        double fd_mu = testutil::central_diff(
            [&](double v) {
                Eigen::VectorXd m(1);
                m << v;
                return -lss_nll(y, m, ls);
            },
            mu(0));
        double fd_sigma = testutil::central_diff(
            [&](double v) {
                Eigen::VectorXd s(1);
                s << v;
                return -lss_nll(y, mu, s);
            },
            ls(0));
        CHECK(lss_gradient_mu(y, mu, ls)(0) == doctest::Approx(fd_mu).epsilon(1e-6));
        CHECK(lss_gradient_sigma(y, mu, ls)(0) ==
              doctest::Approx(fd_sigma).epsilon(1e-6));
    }
}

TEST_CASE("joint training NLL is non-increasing along the cyclic sequence") {
    Dataset d = heteroscedastic_data(200, 5, 3);
    LssFit fit = fit_lss(d, linear_specs(5), linear_specs(5), 0.1, 80, 80);
    double prev = fit.offset_nll;
    for (const auto& step : fit.history) {
        CHECK(step.nll <= prev + 1e-12);
        prev = step.nll;
    }
    CHECK(std::isfinite(fit.final_nll()));
}

TEST_CASE("exhausted predictors are skipped while the other continues") {
    Dataset d = heteroscedastic_data(100, 3, 4);
    LssFit fit = fit_lss(d, linear_specs(3), linear_specs(3), 0.1, 5, 12);
    int mu_steps = 0, sigma_steps = 0;
    for (const auto& step : fit.history) {
        if (step.predictor == 0) {
            ++mu_steps;
            CHECK(step.iteration <= 5);
        } else {
            ++sigma_steps;
        }
    }
    CHECK(mu_steps == 5);
    CHECK(sigma_steps == 12);
}

TEST_CASE("training-data predictions reproduce the fitted state") {
    Dataset d = heteroscedastic_data(120, 4, 5);
    LssFit fit = fit_lss(d, linear_specs(4), linear_specs(4), 0.1, 40, 40);
    auto [mu, sigma] = predict_lss(fit, d);
    CHECK(sigma.minCoeff() > 0.0);
    // The final training NLL recorded during fitting matches the NLL of the
    // canonical predictions within float accumulation error.
    Eigen::VectorXd eta_sigma = sigma.array().log();
    CHECK(lss_nll(d.response(), mu, eta_sigma) ==
          doctest::Approx(fit.final_nll()).epsilon(1e-12));
}

TEST_CASE("location and scale signals land in their own predictors") {
    int hits_mu = 0, hits_sigma = 0, reps = 5;
    for (int rep = 0; rep < reps; ++rep) {
        Dataset d = heteroscedastic_data(500, 10, 100 + rep);
        LssFit fit = fit_lss(d, linear_specs(10), linear_specs(10), 0.1, 100, 100);
        if (fit.mu.components[0](0) > 0.5) ++hits_mu;        // x1 in eta_mu
        if (fit.sigma.components[1](0) > 0.1) ++hits_sigma;  // x2 in eta_sigma
    }
    CHECK(hits_mu == reps);
    CHECK(hits_sigma == reps);
}

TEST_CASE("tune_lss: degenerate sigma grid reduces to homoscedastic tuning") {
    Dataset d = heteroscedastic_data(80, 3, 6);
    LssConfig cfg;
    cfg.learners_mu = linear_specs(3);
    cfg.learners_sigma = linear_specs(3);
    cfg.nu = 0.1;
    ResamplingPlan plan = ResamplingPlan::subsample(0.5, 5, 17);
    LssTuneResult r = tune_lss(d, cfg, plan, {0, 10, 20, 40}, {0}, 1);
    CHECK(r.mstop_sigma == 0);
    CHECK(r.mean_nll.cols() == 1);
    // Surface minimum is attained at the returned pair.
    Eigen::Index ai = 0;
    for (std::size_t a = 0; a < r.grid_mu.size(); ++a)
        if (r.grid_mu[a] == r.mstop_mu) ai = static_cast<Eigen::Index>(a);
    CHECK(r.mean_nll(ai, 0) == r.mean_nll.minCoeff());
}

TEST_CASE("tune_lss surface cells equal standalone fit-and-evaluate") {
    Dataset d = heteroscedastic_data(90, 3, 7);
    LssConfig cfg;
    cfg.learners_mu = linear_specs(3);
    cfg.learners_sigma = linear_specs(3);
    cfg.nu = 0.1;
    ResamplingPlan plan = ResamplingPlan::kfold(3, 23);
    std::vector<int> grid_mu = {0, 8, 15};
    std::vector<int> grid_sigma = {0, 5, 15};
    LssTuneResult r = tune_lss(d, cfg, plan, grid_mu, grid_sigma, 1);

    auto folds = make_folds(d, plan);
    for (std::size_t a = 0; a < grid_mu.size(); ++a) {
        for (std::size_t b = 0; b < grid_sigma.size(); ++b) {
            double mean = 0.0;
            for (const auto& fold : folds) {
                Dataset train = d.subset(fold.train);
                Dataset test = d.subset(fold.test);
                LssFit fit = fit_lss(train, cfg.learners_mu, cfg.learners_sigma,
                                     cfg.nu, grid_mu[a], grid_sigma[b]);
                auto [mu, sigma] = predict_lss(fit, test);
                Eigen::VectorXd eta_sigma = sigma.array().log();
                mean += lss_nll(test.response(), mu, eta_sigma);
            }
            mean /= static_cast<double>(folds.size());
            CHECK(r.mean_nll(static_cast<Eigen::Index>(a),
                             static_cast<Eigen::Index>(b)) ==
                  doctest::Approx(mean).epsilon(1e-12));
        }
    }

    // Returned pair attains the minimum.
    double at = 0.0;
    for (std::size_t a = 0; a < grid_mu.size(); ++a)
        for (std::size_t b = 0; b < grid_sigma.size(); ++b)
            if (grid_mu[a] == r.mstop_mu && grid_sigma[b] == r.mstop_sigma)
                at = r.mean_nll(static_cast<Eigen::Index>(a),
                                static_cast<Eigen::Index>(b));
    CHECK(at == r.mean_nll.minCoeff());
}

TEST_CASE("tune_lss is parallel-invariant") {
    Dataset d = heteroscedastic_data(70, 2, 8);
    LssConfig cfg;
    cfg.learners_mu = linear_specs(2);
    cfg.learners_sigma = linear_specs(2);
    cfg.nu = 0.1;
    ResamplingPlan plan = ResamplingPlan::subsample(0.5, 6, 31);
    LssTuneResult serial = tune_lss(d, cfg, plan, {0, 5, 10}, {0, 5, 10}, 1);
    LssTuneResult parallel = tune_lss(d, cfg, plan, {0, 5, 10}, {0, 5, 10}, 8);
    CHECK((serial.mean_nll - parallel.mean_nll).cwiseAbs().maxCoeff() == 0.0);
    CHECK(serial.mstop_mu == parallel.mstop_mu);
    CHECK(serial.mstop_sigma == parallel.mstop_sigma);
}

TEST_CASE("spline learners work in both predictors") {
    statboost::Rng rng(44);
    int n = 300;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = -2.0 + 4.0 * i / (n - 1.0);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i)
        y(i) = std::sin(2.0 * x(i)) + std::exp(0.5 * x(i)) * 0.3 * rng.normal();
    Dataset d = testutil::make_dataset(x, y);
    std::vector<BaseLearnerSpec> splines = {BaseLearnerSpec::pspline("x1", 4.0, 3, 10, 2)};
    LssFit fit = fit_lss(d, splines, splines, 0.1, 60, 60);
    // Per-step NLL monotonicity is a linear-learner property; with flexible
    // splines on the heavy-tailed scale gradient individual steps may
    // overshoot. The fit must still stay finite and improve overall.
    for (const auto& step : fit.history) CHECK(std::isfinite(step.nll));
    auto [mu, sigma] = predict_lss(fit, d);
    CHECK(mu.allFinite());
    CHECK(sigma.minCoeff() > 0.0);
    CHECK(fit.final_nll() < fit.offset_nll);
}

TEST_CASE("degenerate inputs error") {
    statboost::Rng rng(9);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 3.0);
    Dataset constant = testutil::make_dataset(testutil::randn(rng, 20), y);
    CHECK_THROWS_AS(fit_lss(constant, linear_specs(1), linear_specs(1), 0.1, 5, 5),
                    DataError);
    Dataset ok = heteroscedastic_data(30, 2, 10);
    CHECK_THROWS_AS(fit_lss(ok, {}, linear_specs(1), 0.1, 5, 5), ConfigError);
    CHECK_THROWS_AS(fit_lss(ok, linear_specs(1), linear_specs(1), 0.0, 5, 5),
                    ConfigError);
    CHECK_THROWS_AS(fit_lss(ok, linear_specs(1), linear_specs(1), 0.1, -1, 5),
                    ConfigError);
}
