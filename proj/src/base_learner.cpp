#include "statboost/base_learner.hpp"

#include <algorithm>
#include <cmath>

#include "statboost/detail/numeric.hpp"

namespace statboost {

namespace {

using detail::kEps;
using detail::ldlt_singular;

Eigen::MatrixXd difference_matrix(Eigen::Index q, int order) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(q, q);
    for (int o = 0; o < order; ++o) {
        Eigen::Index r = D.rows() - 1;
        Eigen::MatrixXd D1 = Eigen::MatrixXd::Zero(r, D.rows());
        for (Eigen::Index i = 0; i < r; ++i) {
            D1(i, i) = -1.0;
            D1(i, i + 1) = 1.0;
        }
        D = D1 * D;
    }
    return D;
}

// Full equidistant knot vector for `q = interior + degree + 1` basis
// functions on [a, b]: interior knots plus `degree` equidistant knots beyond
// each boundary.
Eigen::VectorXd make_knots(double a, double b, int interior, int degree) {
    double h = (b - a) / static_cast<double>(interior + 1);
    Eigen::Index m = interior + 2 * (degree + 1);
    Eigen::VectorXd knots(m);
    for (Eigen::Index i = 0; i < m; ++i)
        knots(i) = a + (static_cast<double>(i) - degree) * h;
    return knots;
}

}  // namespace

Eigen::VectorXd spline_basis_row(const Eigen::VectorXd& knots, int degree, double x,
                                 bool derivative) {
    Eigen::Index m = knots.size();
    Eigen::Index q = m - degree - 1;
    double a = knots(degree);
    double b = knots(q);

    if (x < a || x > b) {
        // Linear extrapolation: row(x) = row(edge) + (x - edge) * drow(edge).
        double edge = x < a ? a : b;
        Eigen::VectorXd base = spline_basis_row(knots, degree, edge, false);
        Eigen::VectorXd slope = spline_basis_row(knots, degree, edge, true);
        if (derivative) return slope;
        return base + (x - edge) * slope;
    }

    // Knot span containing x among the degree..degree+interior data spans.
    Eigen::Index span = degree;
    while (span < q - 1 && x >= knots(span + 1)) ++span;

    // Cox-de Boor triangle up to the requested degree (or one below for the
    // derivative recurrence).
    auto triangle = [&](int upto) {
        Eigen::VectorXd N = Eigen::VectorXd::Zero(upto + 1);
        N(0) = 1.0;
        for (int r = 1; r <= upto; ++r) {
            double saved = 0.0;
            for (int j = 0; j < r; ++j) {
                Eigen::Index left_idx = span - r + 1 + j;
                double denom = knots(left_idx + r) - knots(left_idx);
                double tmp = denom > 0.0 ? N(j) / denom : 0.0;
                N(j) = saved + (knots(left_idx + r) - x) * tmp;
                saved = (x - knots(left_idx)) * tmp;
            }
            N(r) = saved;
        }
        return N;
    };

    Eigen::VectorXd row = Eigen::VectorXd::Zero(q);
    if (!derivative) {
        Eigen::VectorXd N = triangle(degree);
        for (int j = 0; j <= degree; ++j) {
            Eigen::Index idx = span - degree + j;
            if (idx >= 0 && idx < q) row(idx) = N(j);
        }
        return row;
    }

    if (degree == 0) return row;
    Eigen::VectorXd low = triangle(degree - 1);  // low(j) = B_{span-degree+1+j, degree-1}
    auto low_value = [&](Eigen::Index i) -> double {
        Eigen::Index j = i - (span - degree + 1);
        if (j < 0 || j > degree - 1) return 0.0;
        return low(j);
    };
    for (int j = 0; j <= degree; ++j) {
        Eigen::Index i = span - degree + j;
        if (i < 0 || i >= q) continue;
        double left = low_value(i) / (knots(i + degree) - knots(i));
        double right = low_value(i + 1) / (knots(i + degree + 1) - knots(i + 1));
        row(i) = degree * (left - right);
    }
    return row;
}

std::string BaseLearnerSpec::name() const {
    switch (kind) {
        case LearnerKind::Linear:
            return (intercept ? "linear1(" : "linear(") + column + ")";
        case LearnerKind::Categorical:
            return "categorical(" + column + ")";
        case LearnerKind::PSpline:
            return "pspline(" + column + ")";
    }
    return column;
}

BaseLearnerSpec BaseLearnerSpec::linear(const std::string& column, bool intercept) {
    BaseLearnerSpec s;
    s.column = column;
    s.kind = LearnerKind::Linear;
    s.intercept = intercept;
    return s;
}

BaseLearnerSpec BaseLearnerSpec::categorical(const std::string& column,
                                             std::optional<double> df) {
    BaseLearnerSpec s;
    s.column = column;
    s.kind = LearnerKind::Categorical;
    s.df_target = df;
    return s;
}

BaseLearnerSpec BaseLearnerSpec::pspline(const std::string& column, double df,
                                         int degree, int interior_knots,
                                         int diff_order) {
    BaseLearnerSpec s;
    s.column = column;
    s.kind = LearnerKind::PSpline;
    s.degree = degree;
    s.interior_knots = interior_knots;
    s.diff_order = diff_order;
    s.df_target = df;
    return s;
}

void BuiltLearner::finalize() {
    if (spec.lambda < 0.0)
        throw ConfigError("learner " + spec.name() + ": lambda must be >= 0");
    Eigen::MatrixXd A = XtX + spec.lambda * K;
    solver_.compute(A);
    if (ldlt_singular(solver_))
        throw NumericError("learner " + spec.name() +
                           ": singular penalized system; consider setting a "
                           "df_target or a ridge penalty");
    finalized_ = true;
}

Eigen::VectorXd BuiltLearner::solve(const Eigen::VectorXd& xtu) const {
    if (!finalized_)
        throw NumericError("learner " + spec.name() + ": solver not finalized");
    return solver_.solve(xtu);
}

void BuiltLearner::release_training_matrices() {
    X.resize(0, 0);
    K.resize(0, 0);
    XtX.resize(0, 0);
    solver_ = Eigen::LDLT<Eigen::MatrixXd>();
    finalized_ = false;
}

Eigen::MatrixXd BuiltLearner::design_for(const Dataset& newdata) const {
    const ColumnSpec& col = newdata.column(spec.column);
    Eigen::VectorXd x = newdata.column_values(spec.column);
    Eigen::Index n = x.size();

    switch (spec.kind) {
        case LearnerKind::Linear: {
            if (col.kind != ColumnKind::Numeric)
                throw DataError("learner " + spec.name() + ": column is not numeric");
            if (spec.intercept) {
                Eigen::MatrixXd Xn(n, 2);
                Xn.col(0).setOnes();
                Xn.col(1) = x;
                return Xn;
            }
            return x;
        }
        case LearnerKind::Categorical: {
            if (col.kind != ColumnKind::Categorical)
                throw DataError("learner " + spec.name() +
                                ": column is not categorical");
            Eigen::Index L = static_cast<Eigen::Index>(levels.size());
            // Recode by level name so datasets with their own coding still
            // evaluate correctly.
            std::vector<Eigen::Index> remap(col.levels.size());
            for (std::size_t l = 0; l < col.levels.size(); ++l) {
                auto it = std::find(levels.begin(), levels.end(), col.levels[l]);
                if (it == levels.end())
                    throw DataError("learner " + spec.name() + ": unseen level '" +
                                    col.levels[l] + "'");
                remap[l] = static_cast<Eigen::Index>(it - levels.begin());
            }
            Eigen::MatrixXd Xn = Eigen::MatrixXd::Zero(n, L);
            for (Eigen::Index i = 0; i < n; ++i) {
                auto code = static_cast<std::size_t>(x(i));
                if (x(i) < 0.0 || code >= remap.size())
                    throw DataError("learner " + spec.name() +
                                    ": level code out of range at row " +
                                    std::to_string(i + 1));
                Xn(i, remap[code]) = 1.0;
            }
            return Xn;
        }
        case LearnerKind::PSpline: {
            if (col.kind != ColumnKind::Numeric)
                throw DataError("learner " + spec.name() + ": column is not numeric");
            Eigen::Index q = knots.size() - spec.degree - 1;
            Eigen::MatrixXd Xn(n, q);
            for (Eigen::Index i = 0; i < n; ++i)
                Xn.row(i) = spline_basis_row(knots, spec.degree, x(i)).transpose();
            return Xn;
        }
    }
    throw DataError("unknown learner kind");
}

BuiltLearner build_design(const BaseLearnerSpec& spec, const Dataset& d) {
    const ColumnSpec& col = d.column(spec.column);
    BuiltLearner bl;
    bl.spec = spec;

    switch (spec.kind) {
        case LearnerKind::Linear: {
            if (col.kind != ColumnKind::Numeric)
                throw DataError("learner " + spec.name() +
                                ": linear learner needs a numeric column");
            Eigen::Index w = spec.intercept ? 2 : 1;
            bl.K = Eigen::MatrixXd::Zero(w, w);
            break;
        }
        case LearnerKind::Categorical: {
            if (col.kind != ColumnKind::Categorical)
                throw DataError("learner " + spec.name() +
                                ": categorical learner needs a categorical column");
            bl.levels = col.levels;
            bl.K = Eigen::MatrixXd::Identity(col.level_count(), col.level_count());
            break;
        }
        case LearnerKind::PSpline: {
            if (col.kind != ColumnKind::Numeric)
                throw DataError("learner " + spec.name() +
                                ": spline learner needs a numeric column");
            if (spec.degree < 1)
                throw ConfigError("learner " + spec.name() + ": degree must be >= 1");
            if (spec.diff_order != 1 && spec.diff_order != 2)
                throw ConfigError("learner " + spec.name() +
                                  ": diff_order must be 1 or 2");
            if (spec.interior_knots < spec.diff_order)
                throw ConfigError("learner " + spec.name() +
                                  ": need at least diff_order interior knots");
            Eigen::VectorXd x = d.column_values(spec.column);
            double a = x.minCoeff(), b = x.maxCoeff();
            if (!(b > a))
                throw DataError("learner " + spec.name() +
                                ": column has no variation; cannot place knots");
            bl.knots = make_knots(a, b, spec.interior_knots, spec.degree);
            Eigen::Index q = spec.interior_knots + spec.degree + 1;
            Eigen::MatrixXd D = difference_matrix(q, spec.diff_order);
            bl.K = D.transpose() * D;
            break;
        }
    }

    bl.X = bl.design_for(d);
    bl.XtX = bl.X.transpose() * bl.X;
    return bl;
}

FittedComponent fit_to_target(const BuiltLearner& bl, const Eigen::VectorXd& u,
                              int learner_id) {
    if (bl.X.rows() != u.size())
        throw NumericError("learner " + bl.spec.name() +
                           ": target length does not match design rows");
    FittedComponent fc;
    fc.learner_id = learner_id;
    if (bl.finalized()) {
        fc.coefficients = bl.solve(bl.X.transpose() * u);
    } else {
        Eigen::MatrixXd A = bl.XtX + bl.spec.lambda * bl.K;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt_singular(ldlt))
            throw NumericError("learner " + bl.spec.name() +
                               ": singular penalized system; consider setting a "
                               "df_target or a ridge penalty");
        fc.coefficients = ldlt.solve(bl.X.transpose() * u);
    }
    fc.rss = (u - bl.X * fc.coefficients).squaredNorm();
    return fc;
}

double df_of_lambda(const BuiltLearner& bl, double lambda) {
    if (lambda < 0.0) throw ConfigError("df_of_lambda: lambda must be >= 0");
    Eigen::MatrixXd A = bl.XtX + lambda * bl.K;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt_singular(ldlt))
        throw NumericError("learner " + bl.spec.name() +
                           ": singular system in df computation at lambda=" +
                           std::to_string(lambda));
    // trace(2S - S'S) with S = X A^{-1} X' reduces to traces of M = A^{-1} X'X.
    Eigen::MatrixXd M = ldlt.solve(bl.XtX);
    double tr = M.trace();
    double tr2 = (M.array() * M.transpose().array()).sum();
    return 2.0 * tr - tr2;
}

int penalty_null_dim(const BuiltLearner& bl) {
    if (bl.K.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bl.K);
    Eigen::VectorXd ev = eig.eigenvalues();
    double emax = ev.cwiseAbs().maxCoeff();
    if (!(emax > 0.0)) return static_cast<int>(bl.K.rows());  // K = 0
    int null_dim = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) <= 1e3 * kEps * emax) ++null_dim;
    return null_dim;
}

double calibrate_lambda(const BuiltLearner& bl, double df_target) {
    if (!(df_target > 0.0))
        throw ConfigError("learner " + bl.spec.name() + ": df_target must be > 0");
    // A rank-deficient unpenalized design (data gaps under some basis
    // functions) leaves df(0) undefined; the search domain starts at the
    // bisection floor 1e-10 instead.
    double df0;
    bool df0_exact = true;
    try {
        df0 = df_of_lambda(bl, 0.0);
    } catch (const NumericError&) {
        df0 = df_of_lambda(bl, 1e-10);
        df0_exact = false;
    }
    if (df0_exact && std::abs(df0 - df_target) <= 1e-6) return 0.0;

    int null_dim = penalty_null_dim(bl);
    if (df_target > df0 + 1e-6 || df_target <= static_cast<double>(null_dim))
        throw ConfigError("learner " + bl.spec.name() + ": df_target " +
                          std::to_string(df_target) +
                          " outside the attainable interval (" +
                          std::to_string(null_dim) + ", " + std::to_string(df0) + "]");

    double lo = -10.0, hi = 12.0;
    double mid = 0.0;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        double df = df_of_lambda(bl, std::pow(10.0, mid));
        if (std::abs(df - df_target) <= 1e-6) return std::pow(10.0, mid);
        if (df > df_target)
            lo = mid;  // need more penalty
        else
            hi = mid;
    }
    return std::pow(10.0, mid);
}

Eigen::VectorXd evaluate(const BuiltLearner& bl, const Eigen::VectorXd& coefficients,
                         const Dataset& newdata) {
    Eigen::MatrixXd Xn = bl.design_for(newdata);
    if (Xn.cols() != coefficients.size())
        throw NumericError("learner " + bl.spec.name() +
                           ": coefficient length does not match design width");
    return Xn * coefficients;
}

std::vector<BuiltLearner> build_learners(const std::vector<BaseLearnerSpec>& specs,
                                         const Dataset& d) {
    std::vector<BuiltLearner> built;
    built.reserve(specs.size());
    for (const auto& spec : specs) {
        BuiltLearner bl = build_design(spec, d);
        if (spec.df_target) bl.spec.lambda = calibrate_lambda(bl, *spec.df_target);
        bl.finalize();
        built.push_back(std::move(bl));
    }
    return built;
}

}  // namespace statboost
