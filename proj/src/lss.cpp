#include "statboost/lss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "statboost/parallel.hpp"

namespace statboost {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;

void apply_best_candidate(LssPredictor& pred, const Eigen::VectorXd& u, double nu,
                          Eigen::VectorXd& eta, LssStep& step) {
    int best = -1;
    double best_rss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_coef;
    for (std::size_t j = 0; j < pred.learners.size(); ++j) {
        const BuiltLearner& bl = pred.learners[j];
        Eigen::VectorXd coef = bl.solve(bl.X.transpose() * u);
        double rss = (u - bl.X * coef).squaredNorm();
        if (rss < best_rss) {
            best_rss = rss;
            best = static_cast<int>(j);
            best_coef = std::move(coef);
        }
    }
    if (best < 0)
        throw NumericError("no finite candidate fit in the location-scale step");
    step.selected = best;
    step.increment = nu * best_coef;
    eta += pred.learners[static_cast<std::size_t>(best)].X * step.increment;
    pred.components[static_cast<std::size_t>(best)] += step.increment;
}

Eigen::VectorXd canonical_eta(const LssPredictor& pred, const Dataset& data) {
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(data.rows(), pred.offset);
    for (std::size_t j = 0; j < pred.learners.size(); ++j)
        eta += evaluate(pred.learners[j], pred.components[j], data);
    return eta;
}

std::vector<int> validate_lss_grid(std::vector<int> grid, const char* which) {
    if (grid.empty())
        throw ConfigError(std::string("tune_lss: ") + which + " grid must be non-empty");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.front() < 0)
        throw ConfigError(std::string("tune_lss: ") + which + " grid values must be >= 0");
    return grid;
}

}  // namespace

double lss_nll(const Eigen::VectorXd& y, const Eigen::VectorXd& eta_mu,
               const Eigen::VectorXd& eta_sigma) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double r = y(i) - eta_mu(i);
        sum += kHalfLog2Pi + eta_sigma(i) + 0.5 * r * r * std::exp(-2.0 * eta_sigma(i));
    }
    return sum / static_cast<double>(y.size());
}

Eigen::VectorXd lss_gradient_mu(const Eigen::VectorXd& y,
                                const Eigen::VectorXd& eta_mu,
                                const Eigen::VectorXd& eta_sigma) {
    return (y - eta_mu).array() * (-2.0 * eta_sigma.array()).exp();
}

Eigen::VectorXd lss_gradient_sigma(const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& eta_mu,
                                   const Eigen::VectorXd& eta_sigma) {
    return (y - eta_mu).array().square() * (-2.0 * eta_sigma.array()).exp() - 1.0;
}

LssFit fit_lss(const Dataset& d, const std::vector<BaseLearnerSpec>& learners_mu,
               const std::vector<BaseLearnerSpec>& learners_sigma, double nu,
               int mstop_mu, int mstop_sigma) {
    if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("step length nu must be in (0, 1]");
    if (mstop_mu < 0 || mstop_sigma < 0) throw ConfigError("mstop must be >= 0");
    if (mstop_mu > 0 && learners_mu.empty())
        throw ConfigError("location predictor has no base-learners");
    if (mstop_sigma > 0 && learners_sigma.empty())
        throw ConfigError("scale predictor has no base-learners");

    const Eigen::VectorXd& y = d.response();
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!std::isfinite(y(i)))
            throw DataError("non-finite response at row " + std::to_string(i + 1));
    if (y.size() < 2) throw DataError("location-scale fit requires n >= 2");

    LssFit fit;
    fit.nu = nu;
    fit.mstop_mu = mstop_mu;
    fit.mstop_sigma = mstop_sigma;
    fit.training_data = std::make_shared<Dataset>(d);

    double mean = y.mean();
    double sd = std::sqrt((y.array() - mean).square().sum() /
                          static_cast<double>(y.size() - 1));
    if (!(sd > 0.0)) throw DataError("response has zero variance");

    fit.mu.offset = mean;
    fit.sigma.offset = std::log(sd);
    fit.mu.learners = build_learners(learners_mu, d);
    fit.sigma.learners = build_learners(learners_sigma, d);
    for (auto& bl : fit.mu.learners)
        fit.mu.components.push_back(Eigen::VectorXd::Zero(bl.width()));
    for (auto& bl : fit.sigma.learners)
        fit.sigma.components.push_back(Eigen::VectorXd::Zero(bl.width()));

    Eigen::VectorXd eta_mu = Eigen::VectorXd::Constant(d.rows(), fit.mu.offset);
    Eigen::VectorXd eta_sigma = Eigen::VectorXd::Constant(d.rows(), fit.sigma.offset);
    fit.offset_nll = lss_nll(y, eta_mu, eta_sigma);

    for (int m = 1; m <= std::max(mstop_mu, mstop_sigma); ++m) {
        if (m <= mstop_mu) {
            LssStep step;
            step.iteration = m;
            step.predictor = 0;
            Eigen::VectorXd u = lss_gradient_mu(y, eta_mu, eta_sigma);
            apply_best_candidate(fit.mu, u, nu, eta_mu, step);
            step.nll = lss_nll(y, eta_mu, eta_sigma);
            if (!std::isfinite(step.nll))
                throw NumericError("non-finite training likelihood at iteration " +
                                   std::to_string(m));
            fit.history.push_back(std::move(step));
        }
        if (m <= mstop_sigma) {
            LssStep step;
            step.iteration = m;
            step.predictor = 1;
            Eigen::VectorXd u = lss_gradient_sigma(y, eta_mu, eta_sigma);
            apply_best_candidate(fit.sigma, u, nu, eta_sigma, step);
            step.nll = lss_nll(y, eta_mu, eta_sigma);
            if (!std::isfinite(step.nll))
                throw NumericError("non-finite training likelihood at iteration " +
                                   std::to_string(m));
            fit.history.push_back(std::move(step));
        }
    }
    return fit;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_lss(const LssFit& fit,
                                                        const Dataset& newdata) {
    Eigen::VectorXd mu = canonical_eta(fit.mu, newdata);
    Eigen::VectorXd sigma = canonical_eta(fit.sigma, newdata).array().exp();
    return {std::move(mu), std::move(sigma)};
}

LssTuneResult tune_lss(const Dataset& d, const LssConfig& cfg,
                       const ResamplingPlan& plan, const std::vector<int>& grid_mu,
                       const std::vector<int>& grid_sigma, int jobs) {
    LssTuneResult result;
    result.grid_mu = validate_lss_grid(grid_mu, "mu");
    result.grid_sigma = validate_lss_grid(grid_sigma, "sigma");

    std::vector<FoldSplit> folds = make_folds(d, plan);
    Eigen::Index na = static_cast<Eigen::Index>(result.grid_mu.size());
    Eigen::Index nb = static_cast<Eigen::Index>(result.grid_sigma.size());
    int max_mu = result.grid_mu.back();
    int max_sigma = result.grid_sigma.back();

    std::vector<Eigen::MatrixXd> fold_nll(
        folds.size(), Eigen::MatrixXd::Constant(na, nb, 0.0));

    parallel_for(folds.size(), jobs, [&](std::size_t f) {
        Dataset train = d.subset(folds[f].train);
        Dataset test = d.subset(folds[f].test);
        const Eigen::VectorXd& y_test = test.response();
        Eigen::MatrixXd& cells = fold_nll[f];

        // Truncating a cyclic fit at iteration t yields the fit with budgets
        // (min(a,t), min(b,t)); one sweep per grid row plus one per column
        // covers every cell.
        auto run_sweep = [&](int budget_mu, int budget_sigma,
                             const std::vector<std::pair<int, std::pair<Eigen::Index,
                                                                        Eigen::Index>>>&
                                 targets) {
            LssFit fit;
            try {
                fit = fit_lss(train, cfg.learners_mu, cfg.learners_sigma, cfg.nu,
                              budget_mu, budget_sigma);
            } catch (const DataError& e) {
                throw DataError("fold " + std::to_string(f) + ": " + e.what());
            } catch (const NumericError& e) {
                throw NumericError("fold " + std::to_string(f) + ": " + e.what());
            }
            LssPredictor mu = fit.mu;
            LssPredictor sigma = fit.sigma;
            for (auto& c : mu.components) c.setZero();
            for (auto& c : sigma.components) c.setZero();
            std::size_t idx = 0;
            for (const auto& [t, cell] : targets) {
                while (idx < fit.history.size() && fit.history[idx].iteration <= t) {
                    const LssStep& s = fit.history[idx];
                    auto& comp = s.predictor == 0
                                     ? mu.components[static_cast<std::size_t>(s.selected)]
                                     : sigma.components[static_cast<std::size_t>(s.selected)];
                    comp += s.increment;
                    ++idx;
                }
                Eigen::VectorXd eta_mu = canonical_eta(mu, test);
                Eigen::VectorXd eta_sigma = canonical_eta(sigma, test);
                cells(cell.first, cell.second) = lss_nll(y_test, eta_mu, eta_sigma);
            }
        };

        // Row sweeps: cells (a, b) with b >= a from the fit (a, max_sigma).
        for (Eigen::Index ai = 0; ai < na; ++ai) {
            int a = result.grid_mu[static_cast<std::size_t>(ai)];
            std::vector<std::pair<int, std::pair<Eigen::Index, Eigen::Index>>> targets;
            for (Eigen::Index bi = 0; bi < nb; ++bi) {
                int b = result.grid_sigma[static_cast<std::size_t>(bi)];
                if (b >= a) targets.push_back({std::max(a, b), {ai, bi}});
            }
            if (!targets.empty()) run_sweep(a, max_sigma, targets);
        }
        // Column sweeps: remaining cells (a, b) with a > b from (max_mu, b).
        for (Eigen::Index bi = 0; bi < nb; ++bi) {
            int b = result.grid_sigma[static_cast<std::size_t>(bi)];
            std::vector<std::pair<int, std::pair<Eigen::Index, Eigen::Index>>> targets;
            for (Eigen::Index ai = 0; ai < na; ++ai) {
                int a = result.grid_mu[static_cast<std::size_t>(ai)];
                if (a > b) targets.push_back({a, {ai, bi}});
            }
            if (!targets.empty()) run_sweep(max_mu, b, targets);
        }
    });

    result.mean_nll = Eigen::MatrixXd::Zero(na, nb);
    for (const auto& cells : fold_nll) result.mean_nll += cells;
    result.mean_nll /= static_cast<double>(folds.size());

    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index ai = 0; ai < na; ++ai) {
        for (Eigen::Index bi = 0; bi < nb; ++bi) {
            double r = result.mean_nll(ai, bi);
            int a = result.grid_mu[static_cast<std::size_t>(ai)];
            int b = result.grid_sigma[static_cast<std::size_t>(bi)];
            bool better = r < best;
            if (r == best) {
                int sum = a + b, best_sum = result.mstop_mu + result.mstop_sigma;
                better = sum < best_sum || (sum == best_sum && a < result.mstop_mu);
            }
            if (better) {
                best = r;
                result.mstop_mu = a;
                result.mstop_sigma = b;
            }
        }
    }
    return result;
}

}  // namespace statboost
