#include "statboost/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "statboost/parallel.hpp"

namespace statboost {

namespace {

std::vector<int> validate_grid(std::vector<int> grid) {
    if (grid.empty()) throw ConfigError("mstop grid must be non-empty");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.front() < 0) throw ConfigError("mstop grid values must be >= 0");
    return grid;
}

}  // namespace

Eigen::VectorXd RiskGrid::mean_risks() const {
    Eigen::VectorXd mean(risks.cols());
    for (Eigen::Index g = 0; g < risks.cols(); ++g)
        mean(g) = risks.col(g).sum() / static_cast<double>(risks.rows());
    return mean;
}

RiskGrid cvrisk(const Dataset& d, const EngineConfig& cfg, const ResamplingPlan& plan,
                const std::vector<int>& grid, int jobs) {
    RiskGrid rg;
    rg.grid = validate_grid(grid);
    rg.plan = plan;
    std::vector<FoldSplit> folds = make_folds(d, plan);
    rg.risks.resize(static_cast<Eigen::Index>(folds.size()),
                    static_cast<Eigen::Index>(rg.grid.size()));
    int max_m = rg.grid.back();

    parallel_for(folds.size(), jobs, [&](std::size_t f) {
        Dataset train = d.subset(folds[f].train);
        Dataset test = d.subset(folds[f].test);
        ModelFit full;
        try {
            full = fit_with(cfg, train, max_m);
        } catch (const DataError& e) {
            throw DataError("fold " + std::to_string(f) + ": " + e.what());
        } catch (const NumericError& e) {
            throw NumericError("fold " + std::to_string(f) + ": " + e.what());
        }
        for (std::size_t g = 0; g < rg.grid.size(); ++g) {
            ModelFit part = set_mstop(full, rg.grid[g]);
            Eigen::VectorXd pred = predict(part, test);
            double sum = 0.0;
            for (Eigen::Index i = 0; i < pred.size(); ++i)
                sum += full.family->loss(test.response()(i), pred(i));
            rg.risks(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(g)) =
                sum / static_cast<double>(pred.size());
        }
    });
    return rg;
}

int select_mstop(const RiskGrid& rg) {
    Eigen::VectorXd mean = rg.mean_risks();
    Eigen::Index best = 0;
    for (Eigen::Index g = 1; g < mean.size(); ++g)
        if (mean(g) < mean(best)) best = g;
    return rg.grid[static_cast<std::size_t>(best)];
}

Tune2Result tune_grid2(const Dataset& d, const EngineConfig& cfg,
                       const ResamplingPlan& plan, const std::vector<double>& nu_grid,
                       const std::vector<int>& mstop_grid, int jobs) {
    if (nu_grid.empty()) throw ConfigError("nu grid must be non-empty");
    std::vector<double> nus = nu_grid;
    std::sort(nus.begin(), nus.end());
    nus.erase(std::unique(nus.begin(), nus.end()), nus.end());

    Tune2Result result;
    result.nu_grid = nus;
    result.mstop_grid = validate_grid(mstop_grid);
    result.mean_risk.resize(static_cast<Eigen::Index>(nus.size()),
                            static_cast<Eigen::Index>(result.mstop_grid.size()));

    double best_risk = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < nus.size(); ++a) {
        EngineConfig sub = cfg;
        sub.nu = nus[a];
        RiskGrid rg = cvrisk(d, sub, plan, result.mstop_grid, jobs);
        Eigen::VectorXd mean = rg.mean_risks();
        result.mean_risk.row(static_cast<Eigen::Index>(a)) = mean.transpose();
        for (std::size_t g = 0; g < result.mstop_grid.size(); ++g) {
            double r = mean(static_cast<Eigen::Index>(g));
            if (r < best_risk) {
                best_risk = r;
                result.nu = nus[a];
                result.mstop = result.mstop_grid[g];
            }
        }
    }
    return result;
}

}  // namespace statboost
