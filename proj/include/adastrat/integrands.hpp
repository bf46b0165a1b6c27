#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adastrat/oracle.hpp"

namespace adastrat {

using Evaluator = std::function<double(std::span<const double>)>;

/// A test integrand on [0,1]^dim. The quantity of interest is
/// exp(log_scale) * integral of `evaluate`; log_scale is zero except for
/// integrands evaluated with a stabilizing offset.
struct IntegrandSpec {
    std::string name;
    std::size_t dim = 0;
    Evaluator evaluate;
    std::optional<double> analytic_integral;
    DeltaFn closed_form_delta;  // empty when no closed form is known
    double log_scale = 0.0;

    bool has_closed_form_delta() const { return static_cast<bool>(closed_form_delta); }
};

/// exp(sum_i x_i / i^2).
IntegrandSpec toy(std::size_t dim);

/// lambda^T x.
IntegrandSpec linear(std::vector<double> lambda);

/// lambda x[0] + sin(2 pi x[1]) on [0,1]^2.
IntegrandSpec sine_counterexample(double lambda);

/// Inverse of the standard normal CDF (Wichura's AS241 rational
/// approximations). Throws DomainError outside (0, 1).
double normal_quantile(double p);

/// Log posterior of Bayesian logistic regression with an isotropic N(0, sd^2)
/// prior: log p(beta) + sum_i log F(y_i beta^T x_i), F the logistic CDF.
class LogisticPosterior {
public:
    LogisticPosterior(Eigen::MatrixXd design, Eigen::VectorXd labels, double prior_sd);

    std::size_t dim() const { return static_cast<std::size_t>(design_.cols()); }
    double log_density(const Eigen::VectorXd& beta) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
    /// Negative Hessian of log_density (positive definite).
    Eigen::MatrixXd neg_hessian(const Eigen::VectorXd& beta) const;

private:
    Eigen::MatrixXd design_;
    Eigen::VectorXd labels_;
    double prior_sd_;
};

/// Gaussian importance proposal N(mode, H^{-1}) centered at the posterior mode.
struct LaplaceProposal {
    Eigen::VectorXd mode;
    Eigen::MatrixXd hessian;          // H, negative Hessian of the log posterior
    Eigen::MatrixXd cholesky_factor;  // lower-triangular C, C C^T = H^{-1}
    double log_det_term = 0.0;        // -(s/2) log(2 pi) - sum_i log C_ii
    double log_posterior_at_mode = 0.0;
    int iterations = 0;
    double gradient_norm = 0.0;       // max-norm at the returned mode
};

/// Newton iterations to the posterior mode (stops at gradient max-norm 1e-8,
/// at most 100 iterations), then the proposal's Cholesky factor.
LaplaceProposal fit_laplace(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels, double prior_sd);

/// Importance ratio p(beta) L(y|beta) / q(beta) at beta(x) = mode + C Phi^{-1}(x),
/// computed in log space and returned relative to exp(log_scale) with
/// log_scale = h(mode).
IntegrandSpec marginal_likelihood_integrand(const LaplaceProposal& proposal, const Eigen::MatrixXd& design,
                                            const Eigen::VectorXd& labels, double prior_sd);

}  // namespace adastrat
