#ifndef STATBOOST_FAMILY_HPP
#define STATBOOST_FAMILY_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "statboost/common.hpp"

namespace statboost {

/// Loss, negative gradient, offset initializer and Fisher weight for one
/// response distribution. Loss values are negative log-likelihood
/// contributions up to additive constants; the offset minimizes the
/// constant-model risk. Families are stateless and safe to share.
class Family {
public:
    virtual ~Family() = default;

    virtual std::string name() const = 0;

    /// rho(y, f); f lives on the link scale.
    virtual double loss(double y, double f) const = 0;

    /// -d rho / d f, elementwise.
    virtual Eigen::VectorXd negative_gradient(const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& f) const;
    virtual double negative_gradient(double y, double f) const = 0;

    /// Constant-model risk minimizer on the link scale.
    virtual double init_offset(const Eigen::VectorXd& y) const = 0;

    /// Second derivative of the loss in f (one-step Fisher scoring weight).
    virtual double fisher_weight(double f) const = 0;

    /// Inverse link, mapping the additive predictor to the response scale.
    virtual double inverse_link(double f) const = 0;

    /// Response-domain check; throws DataError on violations.
    virtual void validate_response(const Eigen::VectorXd& y) const {
        for (Eigen::Index i = 0; i < y.size(); ++i)
            if (!std::isfinite(y(i)))
                throw DataError("non-finite response at row " + std::to_string(i + 1));
    }

    /// Mean loss over a sample; the empirical risk used everywhere.
    double risk(const Eigen::VectorXd& y, const Eigen::VectorXd& f) const;
};

class GaussianFamily final : public Family {
public:
    using Family::negative_gradient;
    std::string name() const override { return "gaussian"; }
    double loss(double y, double f) const override { return 0.5 * (y - f) * (y - f); }
    double negative_gradient(double y, double f) const override { return y - f; }
    double init_offset(const Eigen::VectorXd& y) const override;
    double fisher_weight(double) const override { return 1.0; }
    double inverse_link(double f) const override { return f; }
};

class BinomialFamily final : public Family {
public:
    using Family::negative_gradient;
    std::string name() const override { return "binomial"; }
    double loss(double y, double f) const override;
    double negative_gradient(double y, double f) const override;
    double init_offset(const Eigen::VectorXd& y) const override;
    double fisher_weight(double f) const override;
    double inverse_link(double f) const override;
    void validate_response(const Eigen::VectorXd& y) const override;
};

class PoissonFamily final : public Family {
public:
    using Family::negative_gradient;
    std::string name() const override { return "poisson"; }
    double loss(double y, double f) const override { return std::exp(f) - y * f; }
    double negative_gradient(double y, double f) const override {
        return y - std::exp(f);
    }
    double init_offset(const Eigen::VectorXd& y) const override;
    double fisher_weight(double f) const override { return std::exp(f); }
    double inverse_link(double f) const override { return std::exp(f); }
    void validate_response(const Eigen::VectorXd& y) const override;
};

/// Family by name: "gaussian", "binomial" or "poisson".
std::shared_ptr<const Family> make_family(const std::string& name);

}  // namespace statboost

#endif  // STATBOOST_FAMILY_HPP
