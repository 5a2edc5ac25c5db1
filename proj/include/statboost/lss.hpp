#ifndef STATBOOST_LSS_HPP
#define STATBOOST_LSS_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "statboost/base_learner.hpp"
#include "statboost/resampling.hpp"

namespace statboost {

/// Gaussian location-scale model: y ~ N(mu, sigma^2) with mu = eta_mu
/// (identity link) and sigma = exp(eta_sigma) (log link). Mean negative
/// log-likelihood over the sample.
double lss_nll(const Eigen::VectorXd& y, const Eigen::VectorXd& eta_mu,
               const Eigen::VectorXd& eta_sigma);

/// Negative gradients of the per-observation NLL in each predictor:
/// u_mu = (y - mu)/sigma^2, u_sigma = (y - mu)^2/sigma^2 - 1.
Eigen::VectorXd lss_gradient_mu(const Eigen::VectorXd& y,
                                const Eigen::VectorXd& eta_mu,
                                const Eigen::VectorXd& eta_sigma);
Eigen::VectorXd lss_gradient_sigma(const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& eta_mu,
                                   const Eigen::VectorXd& eta_sigma);

/// One boosted additive predictor inside an LssFit.
struct LssPredictor {
    double offset = 0.0;
    std::vector<BuiltLearner> learners;
    std::vector<Eigen::VectorXd> components;
};

/// One cyclic boosting sub-step, tagged with its global iteration index and
/// the predictor it updated.
struct LssStep {
    int iteration = 0;
    int predictor = 0;  // 0 = mu, 1 = sigma
    int selected = -1;
    Eigen::VectorXd increment;
    double nll = 0.0;  // training NLL after this sub-step
};

/// Cyclic two-predictor boosting fit with separate stopping iterations.
struct LssFit {
    LssPredictor mu;
    LssPredictor sigma;
    double nu = 0.1;
    int mstop_mu = 0;
    int mstop_sigma = 0;
    double offset_nll = 0.0;
    std::vector<LssStep> history;
    std::shared_ptr<const Dataset> training_data;

    double final_nll() const {
        return history.empty() ? offset_nll : history.back().nll;
    }
};

/// Alternates one gradient-boosting step on eta_mu (sigma held fixed) and
/// one on eta_sigma (mu held fixed); a predictor whose mstop is exhausted is
/// skipped while the other continues. Offsets: eta_mu = mean(y),
/// eta_sigma = log(sd(y)).
LssFit fit_lss(const Dataset& d, const std::vector<BaseLearnerSpec>& learners_mu,
               const std::vector<BaseLearnerSpec>& learners_sigma, double nu,
               int mstop_mu, int mstop_sigma);

/// (mu, sigma) predictions; sigma is strictly positive by the log link.
std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_lss(const LssFit& fit,
                                                        const Dataset& newdata);

struct LssConfig {
    std::vector<BaseLearnerSpec> learners_mu;
    std::vector<BaseLearnerSpec> learners_sigma;
    double nu = 0.1;
};

/// Exhaustive out-of-sample NLL over the (mstop_mu, mstop_sigma) cross
/// product, reusing folds and exploiting that a cyclic fit truncated at
/// iteration t equals the fit with budgets (min(a,t), min(b,t)): one fit per
/// grid row and one per grid column instead of one per cell. Ties go to the
/// smaller mstop_mu + mstop_sigma, then the smaller mstop_mu.
struct LssTuneResult {
    int mstop_mu = 0;
    int mstop_sigma = 0;
    Eigen::MatrixXd mean_nll;  // |grid_mu| x |grid_sigma|
    std::vector<int> grid_mu;
    std::vector<int> grid_sigma;
};

LssTuneResult tune_lss(const Dataset& d, const LssConfig& cfg,
                       const ResamplingPlan& plan, const std::vector<int>& grid_mu,
                       const std::vector<int>& grid_sigma, int jobs = 1);

}  // namespace statboost

#endif  // STATBOOST_LSS_HPP
