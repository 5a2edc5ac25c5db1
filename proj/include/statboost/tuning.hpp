#ifndef STATBOOST_TUNING_HPP
#define STATBOOST_TUNING_HPP

#include <Eigen/Dense>
#include <vector>

#include "statboost/engine.hpp"
#include "statboost/resampling.hpp"

namespace statboost {

/// Out-of-sample empirical risks over a grid of candidate stopping
/// iterations, one row per resampling fold.
struct RiskGrid {
    Eigen::MatrixXd risks;  // folds x grid
    std::vector<int> grid;
    ResamplingPlan plan;

    Eigen::VectorXd mean_risks() const;
};

/// Fits once per fold to max(grid) and evaluates the test risk at every grid
/// value by truncating the boosting path. Deterministic given plan.seed;
/// folds run in parallel across `jobs` workers with identical results for
/// any job count.
RiskGrid cvrisk(const Dataset& d, const EngineConfig& cfg, const ResamplingPlan& plan,
                const std::vector<int>& grid, int jobs = 1);

/// Grid value minimizing the fold-mean risk; ties go to the smallest mstop.
int select_mstop(const RiskGrid& rg);

/// Exhaustive (nu, mstop) grid search; ties go to the smaller nu, then the
/// smaller mstop.
struct Tune2Result {
    double nu = 0.0;
    int mstop = 0;
    Eigen::MatrixXd mean_risk;  // |nu_grid| x |mstop_grid|
    std::vector<double> nu_grid;
    std::vector<int> mstop_grid;
};

Tune2Result tune_grid2(const Dataset& d, const EngineConfig& cfg,
                       const ResamplingPlan& plan, const std::vector<double>& nu_grid,
                       const std::vector<int>& mstop_grid, int jobs = 1);

}  // namespace statboost

#endif  // STATBOOST_TUNING_HPP
