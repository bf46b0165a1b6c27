#include "adastrat/integrands.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "adastrat/errors.hpp"

namespace adastrat {

namespace {

// Var/E^2 - 1 of exp(c u), u ~ U(0,1).
double exp_relative_excess(double c) {
    if (std::abs(c) < 1e-2) {
        const double c2 = c * c;
        return c2 * (1.0 / 12 + c2 * (-1.0 / 720 + c2 * (1.0 / 30240 - c2 / 1209600)));
    }
    const double g1 = std::expm1(c) / c;
    const double g2 = std::expm1(2 * c) / (2 * c);
    return g2 / (g1 * g1) - 1.0;
}

double sine_variance(double a, double b) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double mu = b - a;
    const double m1 = (std::cos(two_pi * a) - std::cos(two_pi * b)) / (two_pi * mu);
    const double m2 = 0.5 - (std::sin(2 * two_pi * b) - std::sin(2 * two_pi * a)) / (4 * two_pi * mu);
    return std::max(0.0, m2 - m1 * m1);
}

double log_logistic(double z) { return z > 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double logistic(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

IntegrandSpec toy(std::size_t dim) {
    if (dim < 1) throw ArgumentError("toy: dimension must be at least 1");
    std::vector<double> lambda(dim);
    double integral = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double l = 1.0 / static_cast<double>((i + 1) * (i + 1));
        lambda[i] = l;
        integral *= std::expm1(l) / l;
    }
    IntegrandSpec spec;
    spec.name = "toy";
    spec.dim = dim;
    spec.analytic_integral = integral;
    spec.evaluate = [lambda](std::span<const double> x) {
        double sum = 0.0;
        for (std::size_t i = 0; i < lambda.size(); ++i) sum += lambda[i] * x[i];
        return std::exp(sum);
    };
    // f factorizes, so Var[f | R] = prod m1_i^2 * (prod (1 + q_i) - 1).
    spec.closed_form_delta = [lambda](const Rectangle& r) {
        double log_mean_sq = 0.0;
        double log_ratio = 0.0;
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            const double c = lambda[i] * r.edge(i);
            const double log_g1 = c == 0.0 ? 0.0 : std::log(std::expm1(c) / c);
            log_mean_sq += 2.0 * (lambda[i] * r.lower(i) + log_g1);
            log_ratio += std::log1p(exp_relative_excess(c));
        }
        return std::exp(log_mean_sq) * std::expm1(log_ratio);
    };
    return spec;
}

IntegrandSpec linear(std::vector<double> lambda) {
    if (lambda.empty()) throw ArgumentError("linear: lambda must be nonempty");
    double sum = 0.0;
    for (double l : lambda) sum += l;
    IntegrandSpec spec;
    spec.name = "linear";
    spec.dim = lambda.size();
    spec.analytic_integral = sum / 2.0;
    spec.evaluate = [lambda](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t i = 0; i < lambda.size(); ++i) v += lambda[i] * x[i];
        return v;
    };
    spec.closed_form_delta = [lin = LinearSpec{lambda}](const Rectangle& r) { return delta_linear(lin, r); };
    return spec;
}

IntegrandSpec sine_counterexample(double lambda) {
    if (!(lambda > 0.0)) throw ArgumentError("sine_counterexample: lambda must be positive");
    IntegrandSpec spec;
    spec.name = "sine";
    spec.dim = 2;
    spec.analytic_integral = lambda / 2.0;
    spec.evaluate = [lambda](std::span<const double> x) {
        return lambda * x[0] + std::sin(2.0 * std::numbers::pi * x[1]);
    };
    // The two terms are independent under the uniform law on R.
    spec.closed_form_delta = [lambda](const Rectangle& r) {
        const double t = lambda * r.edge(0);
        return t * t / 12.0 + sine_variance(r.lower(1), r.upper(1));
    };
    return spec;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                    4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                    2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = std::sqrt(-std::log(q < 0 ? p : 1.0 - p));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                     1.27045825245236838258e+0) * r + 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                     1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                     2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                     7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0 ? -value : value;
}

LogisticPosterior::LogisticPosterior(Eigen::MatrixXd design, Eigen::VectorXd labels, double prior_sd)
    : design_(std::move(design)), labels_(std::move(labels)), prior_sd_(prior_sd) {
    if (!(prior_sd_ > 0.0)) throw ArgumentError("LogisticPosterior: prior_sd must be positive");
    if (design_.rows() != labels_.size()) throw ArgumentError("LogisticPosterior: design rows must match labels");
    if (design_.cols() < 1) throw ArgumentError("LogisticPosterior: design needs at least one column");
    if (!design_.allFinite()) throw ArgumentError("LogisticPosterior: design must be finite");
    for (Eigen::Index i = 0; i < labels_.size(); ++i)
        if (labels_[i] != 1.0 && labels_[i] != -1.0) throw ArgumentError("LogisticPosterior: labels must be +1 or -1");
}

double LogisticPosterior::log_density(const Eigen::VectorXd& beta) const {
    const double s = static_cast<double>(beta.size());
    const double var = prior_sd_ * prior_sd_;
    double h = -0.5 * s * std::log(2.0 * std::numbers::pi * var) - 0.5 * beta.squaredNorm() / var;
    const Eigen::VectorXd z = design_ * beta;
    for (Eigen::Index i = 0; i < z.size(); ++i) h += log_logistic(labels_[i] * z[i]);
    return h;
}

Eigen::VectorXd LogisticPosterior::gradient(const Eigen::VectorXd& beta) const {
    Eigen::VectorXd g = -beta / (prior_sd_ * prior_sd_);
    const Eigen::VectorXd z = design_ * beta;
    Eigen::VectorXd w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) w[i] = labels_[i] * logistic(-labels_[i] * z[i]);
    g += design_.transpose() * w;
    return g;
}

Eigen::MatrixXd LogisticPosterior::neg_hessian(const Eigen::VectorXd& beta) const {
    const Eigen::Index s = design_.cols();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(s, s) / (prior_sd_ * prior_sd_);
    const Eigen::VectorXd z = design_ * beta;
    Eigen::VectorXd w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) w[i] = logistic(z[i]) * logistic(-z[i]);
    h += design_.transpose() * w.asDiagonal() * design_;
    return 0.5 * (h + h.transpose());
}

LaplaceProposal fit_laplace(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels, double prior_sd) {
    const LogisticPosterior post(design, labels, prior_sd);
    const Eigen::Index s = design.cols();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(s);
    double h = post.log_density(beta);
    Eigen::VectorXd g = post.gradient(beta);

    int iter = 0;
    for (; iter < 100 && g.lpNorm<Eigen::Infinity>() > 1e-8; ++iter) {
        Eigen::LLT<Eigen::MatrixXd> llt(post.neg_hessian(beta));
        if (llt.info() != Eigen::Success) throw LinearAlgebraError("fit_laplace: Hessian is not positive definite");
        const Eigen::VectorXd step = llt.solve(g);
        // backtrack on the concave objective; decreases at rounding level are accepted
        const double slack = 1e-12 * (1.0 + std::abs(h));
        double t = 1.0;
        Eigen::VectorXd candidate = beta + step;
        double h_new = post.log_density(candidate);
        while (h_new < h - slack && t > 1e-12) {
            t *= 0.5;
            candidate = beta + t * step;
            h_new = post.log_density(candidate);
        }
        beta = candidate;
        h = h_new;
        g = post.gradient(beta);
    }
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm > 1e-8) throw ConvergenceError("fit_laplace: Newton did not converge in 100 iterations", gnorm);

    LaplaceProposal out;
    out.mode = beta;
    out.hessian = post.neg_hessian(beta);
    out.iterations = iter;
    out.gradient_norm = gnorm;
    out.log_posterior_at_mode = h;

    Eigen::LLT<Eigen::MatrixXd> llt_h(out.hessian);
    if (llt_h.info() != Eigen::Success) throw LinearAlgebraError("fit_laplace: Hessian at mode is not positive definite");
    // H^{-1} = L^{-T} L^{-1}; refactor it to get the lower factor C.
    const Eigen::MatrixXd l_inv =
        llt_h.matrixL().solve(Eigen::MatrixXd::Identity(s, s));
    Eigen::MatrixXd cov = l_inv.transpose() * l_inv;
    cov = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt_cov(cov);
    if (llt_cov.info() != Eigen::Success) throw LinearAlgebraError("fit_laplace: H^{-1} is not positive definite");
    out.cholesky_factor = llt_cov.matrixL();

    double log_diag = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) log_diag += std::log(out.cholesky_factor(i, i));
    out.log_det_term = -0.5 * static_cast<double>(s) * std::log(2.0 * std::numbers::pi) - log_diag;
    return out;
}

IntegrandSpec marginal_likelihood_integrand(const LaplaceProposal& proposal, const Eigen::MatrixXd& design,
                                            const Eigen::VectorXd& labels, double prior_sd) {
    auto post = std::make_shared<const LogisticPosterior>(design, labels, prior_sd);
    if (static_cast<std::size_t>(proposal.mode.size()) != post->dim())
        throw ArgumentError("marginal_likelihood_integrand: proposal dimension does not match design");

    IntegrandSpec spec;
    spec.name = "logistic";
    spec.dim = post->dim();
    spec.log_scale = post->log_density(proposal.mode);
    spec.evaluate = [post, mode = proposal.mode, chol = proposal.cholesky_factor, log_det = proposal.log_det_term,
                     offset = spec.log_scale](std::span<const double> x) {
        constexpr double kClamp = 1e-15;
        const Eigen::Index s = mode.size();
        Eigen::VectorXd z(s);
        for (Eigen::Index i = 0; i < s; ++i)
            z[i] = normal_quantile(std::clamp(x[static_cast<std::size_t>(i)], kClamp, 1.0 - kClamp));
        const Eigen::VectorXd beta = mode + chol.triangularView<Eigen::Lower>() * z;
        const double log_q = log_det - 0.5 * z.squaredNorm();
        return std::exp(post->log_density(beta) - offset - log_q);
    };
    return spec;
}

}  // namespace adastrat
