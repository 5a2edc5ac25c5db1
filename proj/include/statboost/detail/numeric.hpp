#ifndef STATBOOST_DETAIL_NUMERIC_HPP
#define STATBOOST_DETAIL_NUMERIC_HPP

#include <Eigen/Dense>

namespace statboost::detail {

constexpr double kEps = 2.220446049250313e-16;

/// Pivot-based singularity test for an LDLT factorization of a symmetric
/// PSD system. The relative threshold is kept far below n/(lambda*||K||) so
/// heavily penalized but regular systems still pass.
inline bool ldlt_singular(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
    if (ldlt.info() != Eigen::Success) return true;
    Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    double dmax = d.maxCoeff();
    if (!(dmax > 0.0)) return true;
    return d.minCoeff() <= 16.0 * kEps * dmax;
}

}  // namespace statboost::detail

#endif  // STATBOOST_DETAIL_NUMERIC_HPP
