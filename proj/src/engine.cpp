#include "statboost/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "statboost/detail/numeric.hpp"

namespace statboost {

namespace {

std::atomic<std::uint64_t> g_engine_fit_count{0};

void check_common_args(const std::vector<BaseLearnerSpec>& learners, double nu,
                       int mstop) {
    if (learners.empty()) throw ConfigError("at least one base-learner is required");
    if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("step length nu must be in (0, 1]");
    if (mstop < 0) throw ConfigError("mstop must be >= 0");
}

// Comparable-complexity warning per the df of each penalized learner.
void add_df_warning(ModelFit& fit) {
    if (fit.learners.size() < 2) return;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& bl : fit.learners) {
        double df = df_of_lambda(bl, bl.spec.lambda);
        lo = std::min(lo, df);
        hi = std::max(hi, df);
    }
    if (hi - lo > 0.5)
        fit.warnings.push_back(
            "base-learners have unequal degrees of freedom (" + std::to_string(lo) +
            " .. " + std::to_string(hi) + "); selection may be biased");
}

ModelFit init_fit(const std::string& engine, const Dataset& d,
                  std::shared_ptr<const Family> family,
                  const std::vector<BaseLearnerSpec>& learners, double nu,
                  std::uint64_t seed) {
    family->validate_response(d.response());
    ModelFit fit;
    fit.engine = engine;
    fit.family = std::move(family);
    fit.nu = nu;
    fit.seed = seed;
    fit.training_data = std::make_shared<Dataset>(d);
    fit.learners = build_learners(learners, d);
    fit.components.resize(fit.learners.size());
    for (std::size_t j = 0; j < fit.learners.size(); ++j)
        fit.components[j] = Eigen::VectorXd::Zero(fit.learners[j].width());
    fit.offset = fit.family->init_offset(d.response());
    fit.fitted = Eigen::VectorXd::Constant(d.rows(), fit.offset);
    fit.offset_risk = fit.family->risk(d.response(), fit.fitted);
    if (!std::isfinite(fit.offset_risk))
        throw NumericError("non-finite training risk at initialization");
    add_df_warning(fit);
    return fit;
}

// One gradient-boosting iteration; returns the selected learner index.
int gradient_step(ModelFit& fit, const Eigen::VectorXd& y) {
    Eigen::VectorXd u = fit.family->negative_gradient(y, fit.fitted);
    int best = -1;
    double best_rss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_coef;
    for (std::size_t j = 0; j < fit.learners.size(); ++j) {
        const BuiltLearner& bl = fit.learners[j];
        Eigen::VectorXd coef = bl.solve(bl.X.transpose() * u);
        double rss = (u - bl.X * coef).squaredNorm();
        if (rss < best_rss) {
            best_rss = rss;
            best = static_cast<int>(j);
            best_coef = std::move(coef);
        }
    }
    if (best < 0)
        throw NumericError("no finite candidate fit at iteration " +
                           std::to_string(fit.history.size() + 1));
    IterationRecord rec;
    rec.selected = best;
    rec.increment = fit.nu * best_coef;
    fit.fitted += fit.learners[static_cast<std::size_t>(best)].X * rec.increment;
    fit.components[static_cast<std::size_t>(best)] += rec.increment;
    rec.risk = fit.family->risk(y, fit.fitted);
    if (!std::isfinite(rec.risk))
        throw NumericError("non-finite training risk at iteration " +
                           std::to_string(fit.history.size() + 1));
    fit.history.push_back(std::move(rec));
    return best;
}

// One likelihood-boosting iteration: penalized one-step Fisher scoring per
// candidate, selection by post-update risk (equivalently, likelihood).
int likelihood_step(ModelFit& fit, const Eigen::VectorXd& y) {
    Eigen::VectorXd u = fit.family->negative_gradient(y, fit.fitted);
    Eigen::VectorXd w(fit.fitted.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w(i) = fit.family->fisher_weight(fit.fitted(i));

    int best = -1;
    double best_risk = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_coef, best_fitted;
    for (std::size_t j = 0; j < fit.learners.size(); ++j) {
        const BuiltLearner& bl = fit.learners[j];
        Eigen::MatrixXd A = bl.X.transpose() * w.asDiagonal() * bl.X;
        A.diagonal().array() += fit.penalties[j];
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (detail::ldlt_singular(ldlt))
            throw NumericError("learner " + bl.spec.name() +
                               ": singular Fisher-scoring system at iteration " +
                               std::to_string(fit.history.size() + 1));
        Eigen::VectorXd gamma = ldlt.solve(bl.X.transpose() * u);
        Eigen::VectorXd cand = fit.fitted + bl.X * gamma;
        double risk = fit.family->risk(y, cand);
        if (risk < best_risk) {
            best_risk = risk;
            best = static_cast<int>(j);
            best_coef = std::move(gamma);
            best_fitted = std::move(cand);
        }
    }
    if (best < 0)
        throw NumericError("no finite candidate fit at iteration " +
                           std::to_string(fit.history.size() + 1));
    IterationRecord rec;
    rec.selected = best;
    rec.increment = std::move(best_coef);
    fit.fitted = std::move(best_fitted);
    fit.components[static_cast<std::size_t>(best)] += rec.increment;
    rec.risk = best_risk;
    if (!std::isfinite(rec.risk))
        throw NumericError("non-finite training risk at iteration " +
                           std::to_string(fit.history.size() + 1));
    fit.history.push_back(std::move(rec));
    return best;
}

void run_engine_loop(ModelFit& fit, int target_mstop) {
    const Eigen::VectorXd& y = fit.training_data->response();
    while (static_cast<int>(fit.history.size()) < target_mstop) {
        if (fit.engine == "gradient")
            gradient_step(fit, y);
        else
            likelihood_step(fit, y);
    }
    fit.mstop = target_mstop;
}

std::vector<double> resolve_penalties(const std::vector<BuiltLearner>& built,
                                      std::vector<double> penalties, double nu) {
    if (penalties.empty()) {
        // Step-equivalence heuristic: matches gradient boosting with step nu
        // for single-column Gaussian learners.
        for (const auto& bl : built)
            penalties.push_back(bl.XtX.trace() / static_cast<double>(bl.width()) *
                                (1.0 - nu) / nu);
        return penalties;
    }
    if (penalties.size() == 1) penalties.resize(built.size(), penalties[0]);
    if (penalties.size() != built.size())
        throw ConfigError("expected one penalty per base-learner, got " +
                          std::to_string(penalties.size()));
    for (double p : penalties)
        if (!(p >= 0.0)) throw ConfigError("likelihood penalties must be >= 0");
    return penalties;
}

}  // namespace

std::uint64_t engine_fit_count() { return g_engine_fit_count.load(); }

void ModelFit::release_training_data() {
    training_data.reset();
    fitted.resize(0);
    for (auto& bl : learners) bl.release_training_matrices();
}

ModelFit fit_gradient(const Dataset& d, std::shared_ptr<const Family> family,
                      const std::vector<BaseLearnerSpec>& learners, double nu,
                      int mstop, std::uint64_t seed) {
    check_common_args(learners, nu, mstop);
    g_engine_fit_count.fetch_add(1);
    ModelFit fit = init_fit("gradient", d, std::move(family), learners, nu, seed);
    run_engine_loop(fit, mstop);
    return fit;
}

ModelFit fit_gradient_until_q(const Dataset& d, std::shared_ptr<const Family> family,
                              const std::vector<BaseLearnerSpec>& learners, double nu,
                              int q_distinct, int iteration_cap, std::uint64_t seed) {
    check_common_args(learners, nu, 0);
    if (q_distinct < 1 || q_distinct > static_cast<int>(learners.size()))
        throw ConfigError("q must be between 1 and the number of base-learners");
    if (iteration_cap < 1) throw ConfigError("iteration cap must be >= 1");
    g_engine_fit_count.fetch_add(1);
    ModelFit fit = init_fit("gradient", d, std::move(family), learners, nu, seed);
    const Eigen::VectorXd& y = fit.training_data->response();
    std::vector<bool> seen(fit.learners.size(), false);
    int distinct = 0;
    while (distinct < q_distinct) {
        if (static_cast<int>(fit.history.size()) >= iteration_cap)
            throw NumericError("iteration cap " + std::to_string(iteration_cap) +
                               " reached before selecting " +
                               std::to_string(q_distinct) +
                               " distinct base-learners");
        int j = gradient_step(fit, y);
        if (!seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = true;
            ++distinct;
        }
    }
    fit.mstop = static_cast<int>(fit.history.size());
    return fit;
}

ModelFit fit_likelihood(const Dataset& d, std::shared_ptr<const Family> family,
                        const std::vector<BaseLearnerSpec>& learners,
                        std::vector<double> penalties, int mstop, double nu,
                        std::uint64_t seed) {
    check_common_args(learners, nu, mstop);
    for (const auto& spec : learners)
        if (spec.kind == LearnerKind::PSpline)
            throw ConfigError("learner " + spec.name() +
                              ": the likelihood engine supports linear and "
                              "categorical base-learners only");
    g_engine_fit_count.fetch_add(1);
    ModelFit fit = init_fit("likelihood", d, std::move(family), learners, nu, seed);
    fit.penalties = resolve_penalties(fit.learners, std::move(penalties), nu);
    run_engine_loop(fit, mstop);
    return fit;
}

ModelFit fit_with(const EngineConfig& cfg, const Dataset& d, int mstop) {
    auto family = make_family(cfg.family);
    if (cfg.engine == "gradient")
        return fit_gradient(d, family, cfg.learners, cfg.nu, mstop, cfg.seed);
    if (cfg.engine == "likelihood")
        return fit_likelihood(d, family, cfg.learners, cfg.penalties, mstop, cfg.nu,
                              cfg.seed);
    throw ConfigError("unknown engine '" + cfg.engine +
                      "' (expected gradient or likelihood)");
}

Eigen::VectorXd predict(const ModelFit& fit, const Dataset& newdata,
                        PredictScale scale) {
    Eigen::VectorXd pred = Eigen::VectorXd::Constant(newdata.rows(), fit.offset);
    for (std::size_t j = 0; j < fit.learners.size(); ++j)
        pred += evaluate(fit.learners[j], fit.components[j], newdata);
    if (scale == PredictScale::Response)
        for (Eigen::Index i = 0; i < pred.size(); ++i)
            pred(i) = fit.family->inverse_link(pred(i));
    return pred;
}

ModelFit set_mstop(const ModelFit& fit, int m) {
    if (m < 0) throw ConfigError("mstop must be >= 0");
    if (m == fit.mstop) return fit;

    if (m < fit.mstop) {
        ModelFit out = fit;
        out.history.resize(static_cast<std::size_t>(m));
        for (std::size_t j = 0; j < out.components.size(); ++j)
            out.components[j].setZero();
        for (const auto& rec : out.history)
            out.components[static_cast<std::size_t>(rec.selected)] += rec.increment;
        if (out.has_training_data()) {
            out.fitted.setConstant(out.offset);
            for (const auto& rec : out.history)
                out.fitted += out.learners[static_cast<std::size_t>(rec.selected)].X *
                              rec.increment;
        }
        out.mstop = m;
        return out;
    }

    if (!fit.has_training_data())
        throw NumericError(
            "cannot continue fitting: training data was released from this model");
    g_engine_fit_count.fetch_add(1);
    ModelFit out = fit;
    run_engine_loop(out, m);
    return out;
}

PathMatrix coefficient_path(const ModelFit& fit) {
    PathMatrix path;
    std::vector<Eigen::Index> offsets(fit.learners.size());
    Eigen::Index total = 0;
    for (std::size_t j = 0; j < fit.learners.size(); ++j) {
        offsets[j] = total;
        Eigen::Index w = fit.components[j].size();
        total += w;
        for (Eigen::Index k = 0; k < w; ++k) {
            path.labels.push_back(w == 1 ? fit.learners[j].spec.name()
                                         : fit.learners[j].spec.name() + "[" +
                                               std::to_string(k) + "]");
            path.learner_of_column.push_back(static_cast<int>(j));
        }
    }
    path.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fit.history.size()) + 1,
                                        total);
    for (std::size_t m = 0; m < fit.history.size(); ++m) {
        const auto& rec = fit.history[m];
        Eigen::Index row = static_cast<Eigen::Index>(m) + 1;
        path.values.row(row) = path.values.row(row - 1);
        Eigen::Index off = offsets[static_cast<std::size_t>(rec.selected)];
        path.values.block(row, off, 1, rec.increment.size()) +=
            rec.increment.transpose();
    }
    return path;
}

double arc_length(const PathMatrix& path) {
    if (path.values.rows() == 0) throw ConfigError("arc_length: empty path");
    double total = 0.0;
    for (Eigen::Index m = 1; m < path.values.rows(); ++m)
        total += (path.values.row(m) - path.values.row(m - 1)).cwiseAbs().sum();
    return total;
}

Eigen::VectorXd varimp(const ModelFit& fit) {
    Eigen::VectorXd imp = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(fit.learners.size()));
    double prev = fit.offset_risk;
    for (const auto& rec : fit.history) {
        imp(rec.selected) += prev - rec.risk;
        prev = rec.risk;
    }
    return imp;
}

DominanceReport diagonal_dominance(const Dataset& d) {
    std::vector<Eigen::Index> numeric_cols;
    DominanceReport report;
    for (std::size_t j = 0; j < d.columns().size(); ++j) {
        if (d.columns()[j].kind == ColumnKind::Numeric) {
            numeric_cols.push_back(static_cast<Eigen::Index>(j));
            report.columns.push_back(d.columns()[j].name);
        }
    }
    if (numeric_cols.empty())
        throw DataError("diagonal dominance needs at least one numeric covariate");
    Eigen::Index n = d.rows(), p = static_cast<Eigen::Index>(numeric_cols.size());
    if (n < 2) throw DataError("diagonal dominance needs at least 2 rows");

    Eigen::MatrixXd Xc(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::VectorXd col = d.values().col(numeric_cols[static_cast<std::size_t>(j)]);
        Xc.col(j) = col.array() - col.mean();
    }
    Eigen::MatrixXd cov = Xc.transpose() * Xc / static_cast<double>(n - 1);

    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (detail::ldlt_singular(ldlt))
        throw NumericError("sample covariance is singular; diagonal dominance of "
                           "its inverse is undefined");
    Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));

    report.margins.resize(p);
    report.dominant = true;
    for (Eigen::Index i = 0; i < p; ++i) {
        double off = inv.row(i).cwiseAbs().sum() - std::abs(inv(i, i));
        report.margins(i) = std::abs(inv(i, i)) - off;
        if (report.margins(i) < 0.0) report.dominant = false;
    }
    return report;
}

}  // namespace statboost
