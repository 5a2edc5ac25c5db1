#include "statboost/family.hpp"

#include <cmath>

namespace statboost {

namespace {

double expit(double f) { return 1.0 / (1.0 + std::exp(-f)); }

// log(1 + e^f) without overflow for large |f|.
double log1pexp(double f) {
    if (f > 0.0) return f + std::log1p(std::exp(-f));
    return std::log1p(std::exp(f));
}

}  // namespace

Eigen::VectorXd Family::negative_gradient(const Eigen::VectorXd& y,
                                          const Eigen::VectorXd& f) const {
    if (y.size() != f.size())
        throw NumericError("negative_gradient: length mismatch");
    Eigen::VectorXd u(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!std::isfinite(f(i)))
            throw NumericError("non-finite predictor at row " + std::to_string(i + 1));
        u(i) = negative_gradient(y(i), f(i));
    }
    return u;
}

double Family::risk(const Eigen::VectorXd& y, const Eigen::VectorXd& f) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) sum += loss(y(i), f(i));
    return sum / static_cast<double>(y.size());
}

double GaussianFamily::init_offset(const Eigen::VectorXd& y) const {
    if (y.size() == 0) throw DataError("empty response");
    return y.mean();
}

double BinomialFamily::loss(double y, double f) const {
    return -(y * f - log1pexp(f));
}

double BinomialFamily::negative_gradient(double y, double f) const {
    return y - expit(f);
}

double BinomialFamily::init_offset(const Eigen::VectorXd& y) const {
    if (y.size() == 0) throw DataError("empty response");
    double m = y.mean();
    if (!(m > 0.0 && m < 1.0))
        throw DataError("binomial offset undefined: response mean " +
                        std::to_string(m) + " is not in (0, 1)");
    return std::log(m / (1.0 - m));
}

double BinomialFamily::fisher_weight(double f) const {
    double p = expit(f);
    return p * (1.0 - p);
}

double BinomialFamily::inverse_link(double f) const { return expit(f); }

void BinomialFamily::validate_response(const Eigen::VectorXd& y) const {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 0.0 && y(i) != 1.0)
            throw DataError("binomial response must be 0/1; row " +
                            std::to_string(i + 1) + " is " + std::to_string(y(i)));
}

double PoissonFamily::init_offset(const Eigen::VectorXd& y) const {
    if (y.size() == 0) throw DataError("empty response");
    double m = y.mean();
    if (!(m > 0.0))
        throw DataError("poisson offset undefined: response mean is not positive");
    return std::log(m);
}

void PoissonFamily::validate_response(const Eigen::VectorXd& y) const {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!(y(i) >= 0.0) || y(i) != std::floor(y(i)))
            throw DataError("poisson response must be a non-negative integer; row " +
                            std::to_string(i + 1) + " is " + std::to_string(y(i)));
    }
}

std::shared_ptr<const Family> make_family(const std::string& name) {
    if (name == "gaussian") return std::make_shared<GaussianFamily>();
    if (name == "binomial") return std::make_shared<BinomialFamily>();
    if (name == "poisson") return std::make_shared<PoissonFamily>();
    throw ConfigError("unknown family '" + name +
                      "' (expected gaussian, binomial or poisson)");
}

}  // namespace statboost
