#ifndef STATBOOST_ENGINE_HPP
#define STATBOOST_ENGINE_HPP

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "statboost/base_learner.hpp"
#include "statboost/dataset.hpp"
#include "statboost/family.hpp"

namespace statboost {

struct IterationRecord {
    int selected = -1;           // j* of this iteration
    Eigen::VectorXd increment;   // coefficient increment applied to j*
    double risk = 0.0;           // training risk after the update
};

/// A fitted component-wise boosting model. Immutable after fitting;
/// set_mstop returns a new fit. The training dataset and design matrices are
/// retained so the model can be truncated, continued and inspected; call
/// release_training_data() to drop them (prediction keeps working,
/// continuation does not).
struct ModelFit {
    std::string engine;  // "gradient" | "likelihood"
    std::shared_ptr<const Family> family;
    double nu = 0.1;
    int mstop = 0;
    std::uint64_t seed = 0;
    double offset = 0.0;
    double offset_risk = 0.0;  // training risk of the offset-only model
    std::vector<Eigen::VectorXd> components;  // accumulated coefficients per learner
    std::vector<IterationRecord> history;
    std::vector<BuiltLearner> learners;
    std::vector<double> penalties;  // likelihood engine step penalties
    std::vector<std::string> warnings;

    std::shared_ptr<const Dataset> training_data;
    Eigen::VectorXd fitted;  // current additive predictor on training data

    std::size_t learner_count() const { return learners.size(); }
    double final_risk() const {
        return history.empty() ? offset_risk : history.back().risk;
    }
    bool has_training_data() const { return training_data != nullptr; }
    void release_training_data();
};

enum class PredictScale { Link, Response };

/// Component-wise gradient boosting: per iteration, every base-learner is
/// fitted to the negative gradient, the one with the smallest residual sum
/// of squares wins (ties to the lowest index), and nu times its fit is added.
ModelFit fit_gradient(const Dataset& d, std::shared_ptr<const Family> family,
                      const std::vector<BaseLearnerSpec>& learners, double nu,
                      int mstop, std::uint64_t seed = 0);

/// Gradient boosting stopped as soon as `q_distinct` different base-learners
/// have been selected; errors if `iteration_cap` is reached first.
ModelFit fit_gradient_until_q(const Dataset& d, std::shared_ptr<const Family> family,
                              const std::vector<BaseLearnerSpec>& learners, double nu,
                              int q_distinct, int iteration_cap,
                              std::uint64_t seed = 0);

/// Likelihood-based boosting: per iteration each candidate takes one
/// penalized Fisher-scoring step from zero with the current predictor as
/// offset, increment = (X'WX + penalty I)^{-1} X'u, and the candidate with
/// the largest unpenalized post-update likelihood wins. Restricted to
/// linear/categorical learners. `penalties` holds one entry per learner, a
/// single broadcast entry, or empty for the step-equivalence heuristic
/// trace(X'X)/width * (1-nu)/nu.
ModelFit fit_likelihood(const Dataset& d, std::shared_ptr<const Family> family,
                        const std::vector<BaseLearnerSpec>& learners,
                        std::vector<double> penalties, int mstop, double nu = 0.1,
                        std::uint64_t seed = 0);

/// Additive prediction offset + sum_j f_j(x) on the link scale, or pushed
/// through the inverse link on the response scale.
Eigen::VectorXd predict(const ModelFit& fit, const Dataset& newdata,
                        PredictScale scale = PredictScale::Link);

/// Truncates (m <= mstop, replaying the history) or continues (m > mstop,
/// resuming the engine loop) a fit. Continuation is bit-identical to a fresh
/// fit with the same m and requires retained training data.
ModelFit set_mstop(const ModelFit& fit, int m);

/// Accumulated scalar coefficients per iteration; row 0 is the zero state.
struct PathMatrix {
    Eigen::MatrixXd values;  // (mstop+1) x total coefficient count
    std::vector<std::string> labels;
    std::vector<int> learner_of_column;
};

PathMatrix coefficient_path(const ModelFit& fit);

/// Discrete L1 arc-length: total absolute coefficient movement along the path.
double arc_length(const PathMatrix& path);

/// Per-learner training-risk reduction attributed over the iterations where
/// the learner was selected; sums to the total risk reduction.
Eigen::VectorXd varimp(const ModelFit& fit);

/// Row-wise diagonal dominance of the inverse sample covariance of the
/// numeric covariates; margins_i = |a_ii| - sum_{k != i} |a_ik|.
struct DominanceReport {
    bool dominant = false;
    Eigen::VectorXd margins;
    std::vector<std::string> columns;
};

DominanceReport diagonal_dominance(const Dataset& d);

/// Monotonically increasing count of engine fitting runs (fresh fits,
/// until-q runs and continuations). Lets callers verify that post-processing
/// paths trigger no refits.
std::uint64_t engine_fit_count();

/// Fully specified engine setup minus the stopping iteration; the unit of
/// reuse for tuning and stability selection.
struct EngineConfig {
    std::string engine = "gradient";
    std::string family = "gaussian";
    std::vector<BaseLearnerSpec> learners;
    double nu = 0.1;
    std::vector<double> penalties;  // likelihood engine only
    std::uint64_t seed = 0;
};

ModelFit fit_with(const EngineConfig& cfg, const Dataset& d, int mstop);

}  // namespace statboost

#endif  // STATBOOST_ENGINE_HPP
