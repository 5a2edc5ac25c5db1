#ifndef STATBOOST_BASE_LEARNER_HPP
#define STATBOOST_BASE_LEARNER_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "statboost/dataset.hpp"

namespace statboost {

enum class LearnerKind { Linear, Categorical, PSpline };

/// One component-wise candidate: a penalized regression-type prediction
/// function for a single covariate.
struct BaseLearnerSpec {
    std::string column;
    LearnerKind kind = LearnerKind::Linear;
    bool intercept = false;   // linear only
    int degree = 3;           // pspline
    int interior_knots = 20;  // pspline
    int diff_order = 2;       // pspline
    double lambda = 0.0;
    std::optional<double> df_target;

    std::string name() const;

    static BaseLearnerSpec linear(const std::string& column, bool intercept = false);
    static BaseLearnerSpec categorical(const std::string& column,
                                       std::optional<double> df = std::nullopt);
    static BaseLearnerSpec pspline(const std::string& column, double df = 4.0,
                                   int degree = 3, int interior_knots = 20,
                                   int diff_order = 2);
};

struct FittedComponent {
    int learner_id = -1;
    Eigen::VectorXd coefficients;
    double rss = 0.0;
};

/// A base-learner bound to a training dataset: design matrix X, penalty K,
/// and the factorization of X'X + lambda*K shared read-only across boosting
/// iterations. Spline knot placement and categorical level coding are frozen
/// here, so the learner can score new data after the training matrices are
/// released.
class BuiltLearner {
public:
    BaseLearnerSpec spec;
    Eigen::MatrixXd X;
    Eigen::MatrixXd K;
    Eigen::MatrixXd XtX;
    Eigen::VectorXd knots;            // pspline: full knot vector
    std::vector<std::string> levels;  // categorical: training level names

    Eigen::Index width() const { return K.cols(); }

    /// Factorize X'X + spec.lambda*K for repeated solves; throws on a
    /// singular system.
    void finalize();
    bool finalized() const { return finalized_; }

    /// Penalized least-squares coefficients for target u via the shared
    /// factorization.
    Eigen::VectorXd solve(const Eigen::VectorXd& xtu) const;

    /// Design rows for new data (spline: linear extrapolation outside the
    /// boundary knots; categorical: recoded by training level names).
    Eigen::MatrixXd design_for(const Dataset& newdata) const;

    /// Releases the training-size matrices, keeping only what prediction
    /// needs (spec, knots, levels).
    void release_training_matrices();
    bool has_training_matrices() const { return X.size() > 0; }

private:
    Eigen::LDLT<Eigen::MatrixXd> solver_;
    bool finalized_ = false;
};

/// Design + penalty construction; validates column kind against learner kind.
BuiltLearner build_design(const BaseLearnerSpec& spec, const Dataset& d);

/// Penalized least squares of u on the learner design:
/// coefficients = (X'X + lambda K)^{-1} X'u, rss = |u - X beta|^2.
FittedComponent fit_to_target(const BuiltLearner& bl, const Eigen::VectorXd& u,
                              int learner_id = -1);

/// Effective degrees of freedom trace(2S - S'S) with
/// S = X (X'X + lambda K)^{-1} X', evaluated on the width-sized system
/// without forming S.
double df_of_lambda(const BuiltLearner& bl, double lambda);

/// Dimension of the penalty null space (the df floor as lambda -> infinity).
int penalty_null_dim(const BuiltLearner& bl);

/// Bisection on log10(lambda) over [-10, 12] until |df(lambda) - df_target|
/// <= 1e-6; df is monotone decreasing in lambda. Errors if df_target is
/// outside (null dim of K, df(0)].
double calibrate_lambda(const BuiltLearner& bl, double df_target);

/// X_new * coefficients on new data.
Eigen::VectorXd evaluate(const BuiltLearner& bl, const Eigen::VectorXd& coefficients,
                         const Dataset& newdata);

/// Builds all learners against a dataset, calibrating lambda where a
/// df_target is set, and precomputes the shared factorizations.
std::vector<BuiltLearner> build_learners(const std::vector<BaseLearnerSpec>& specs,
                                         const Dataset& d);

/// B-spline basis row of the given degree over a full knot vector; exposed
/// for direct evaluation. `derivative` selects d/dx of each basis function.
Eigen::VectorXd spline_basis_row(const Eigen::VectorXd& knots, int degree, double x,
                                 bool derivative = false);

}  // namespace statboost

#endif  // STATBOOST_BASE_LEARNER_HPP
