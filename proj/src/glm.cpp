#include "glmens/glm.hpp"

#include "glmens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace glmens {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kIrlsDevianceTol = 1e-8;
constexpr double kDivergenceBound = 1e4;  // |beta| beyond this flags separation
constexpr double kMuClamp = 1e-10;

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd Xa(X.rows(), X.cols() + 1);
    Xa.col(0).setOnes();
    Xa.rightCols(X.cols()) = X;
    return Xa;
}

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        const double m = std::clamp(mu[i], kMuClamp, 1.0 - kMuClamp);
        dev += y[i] * std::log(m) + (1.0 - y[i]) * std::log(1.0 - m);
    }
    return -2.0 * dev;
}

}  // namespace

std::string to_string(Family f) { return f == Family::gaussian ? "gaussian" : "binomial"; }
std::string to_string(Criterion c) { return c == Criterion::aic ? "aic" : "bic"; }

Family family_from_string(const std::string& s) {
    if (s == "gaussian") return Family::gaussian;
    if (s == "binomial") return Family::binomial;
    throw std::runtime_error("unknown family: " + s);
}

Criterion criterion_from_string(const std::string& s) {
    if (s == "aic") return Criterion::aic;
    if (s == "bic") return Criterion::bic;
    throw std::runtime_error("unknown criterion: " + s);
}

double GlmFit::linear_predictor(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    double eta = intercept;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const int j = terms[t];
        if (j < 0 || j >= row.size()) throw std::runtime_error("feature index out of range");
        eta += coefficients[t] * row[j];
    }
    return eta;
}

GlmFit fit_gaussian(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (n <= p + 1) throw std::runtime_error("fit_gaussian: need n > p + 1");
    if (y.size() != n) throw std::runtime_error("fit_gaussian: X/y size mismatch");

    const Eigen::MatrixXd Xa = with_intercept(X);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xa);
    if (qr.rank() < p + 1) throw std::runtime_error("fit_gaussian: rank-deficient design");

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - Xa * beta;
    double rss = resid.squaredNorm();
    // snap numerically-zero residuals so exact fits floor their p-values
    if (rss <= 1e-24 * y.squaredNorm()) rss = 0.0;
    const int df = n - p - 1;
    const double sigma2 = rss / df;

    const Eigen::MatrixXd xtx_inv = (Xa.transpose() * Xa).inverse();

    GlmFit fit;
    fit.family = Family::gaussian;
    fit.n_obs = n;
    fit.intercept = beta[0];
    fit.intercept_se = std::sqrt(sigma2 * xtx_inv(0, 0));
    fit.terms.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) fit.terms[static_cast<std::size_t>(j)] = j;
    fit.coefficients.resize(static_cast<std::size_t>(p));
    fit.std_errors.resize(static_cast<std::size_t>(p));
    fit.p_values.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        const double se = std::sqrt(sigma2 * xtx_inv(j + 1, j + 1));
        const double t = se > 0.0 ? beta[j + 1] / se
                                  : (beta[j + 1] == 0.0 ? 0.0
                                                        : std::numeric_limits<double>::infinity());
        fit.coefficients[static_cast<std::size_t>(j)] = beta[j + 1];
        fit.std_errors[static_cast<std::size_t>(j)] = se;
        fit.p_values[static_cast<std::size_t>(j)] = clamp_p(student_t_two_sided_p(t, df));
    }

    const double s2_mle = std::max(rss / n, 1e-300);
    fit.log_likelihood = -0.5 * (n * std::log(kTwoPi * s2_mle) + rss / s2_mle);
    return fit;
}

GlmFit fit_binomial(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int max_iter) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (y.size() != n) throw std::runtime_error("fit_binomial: X/y size mismatch");
    const int pos = static_cast<int>((y.array() == 1.0).count());
    if (pos == 0 || pos == n) throw std::runtime_error("fit_binomial: single-class outcome");

    const Eigen::MatrixXd Xa = with_intercept(X);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);

    auto mu_of = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd eta = Xa * b;
        return Eigen::VectorXd(1.0 / (1.0 + (-eta.array()).exp()));
    };

    GlmFit fit;
    Eigen::VectorXd mu = mu_of(beta);
    double dev = binomial_deviance(y, mu);
    fit.deviance_trace.push_back(dev);
    bool reached_tol = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::VectorXd w(n), z(n);
        const Eigen::VectorXd eta = Xa * beta;
        for (int i = 0; i < n; ++i) {
            const double m = std::clamp(mu[i], kMuClamp, 1.0 - kMuClamp);
            const double wi = m * (1.0 - m);
            w[i] = wi;
            z[i] = eta[i] + (y[i] - m) / wi;
        }
        const Eigen::MatrixXd XtW = Xa.transpose() * w.asDiagonal();
        Eigen::VectorXd proposal = (XtW * Xa).ldlt().solve(XtW * z);
        if (!proposal.allFinite()) throw std::runtime_error("fit_binomial: non-finite update");

        // step-halve toward the previous iterate; deviance never increases
        double new_dev = binomial_deviance(y, mu_of(proposal));
        int halvings = 0;
        while (new_dev > dev && halvings < 30) {
            proposal = 0.5 * (proposal + beta);
            new_dev = binomial_deviance(y, mu_of(proposal));
            ++halvings;
        }
        if (new_dev > dev) {
            reached_tol = true;  // no improving step exists
            break;
        }
        beta = proposal;
        mu = mu_of(beta);
        fit.deviance_trace.push_back(new_dev);
        if (!std::isfinite(new_dev)) throw std::runtime_error("fit_binomial: non-finite likelihood");
        if (std::abs(dev - new_dev) < kIrlsDevianceTol) {
            dev = new_dev;
            reached_tol = true;
            break;
        }
        dev = new_dev;
    }

    // Wald covariance at the solution
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        const double m = std::clamp(mu[i], kMuClamp, 1.0 - kMuClamp);
        w[i] = m * (1.0 - m);
    }
    const Eigen::MatrixXd fisher = Xa.transpose() * w.asDiagonal() * Xa;
    const Eigen::MatrixXd cov = fisher.inverse();

    fit.family = Family::binomial;
    fit.n_obs = n;
    fit.intercept = beta[0];
    fit.intercept_se = std::sqrt(std::max(cov(0, 0), 0.0));
    fit.terms.resize(static_cast<std::size_t>(p));
    fit.coefficients.resize(static_cast<std::size_t>(p));
    fit.std_errors.resize(static_cast<std::size_t>(p));
    fit.p_values.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        fit.terms[static_cast<std::size_t>(j)] = j;
        const double se = std::sqrt(std::max(cov(j + 1, j + 1), 0.0));
        const double z = se > 0.0 ? beta[j + 1] / se : 0.0;
        fit.coefficients[static_cast<std::size_t>(j)] = beta[j + 1];
        fit.std_errors[static_cast<std::size_t>(j)] = se;
        fit.p_values[static_cast<std::size_t>(j)] = clamp_p(normal_two_sided_p(z));
    }
    fit.log_likelihood = -0.5 * dev;
    // a near-zero deviance means separation: the ML estimate sits at infinity
    const bool separated = dev < 1e-6;
    fit.converged = reached_tol && !separated && beta.cwiseAbs().maxCoeff() <= kDivergenceBound;
    if (!std::isfinite(fit.log_likelihood))
        throw std::runtime_error("fit_binomial: non-finite likelihood");
    return fit;
}

double information_criterion(const GlmFit& fit, Criterion criterion) {
    const double params = 1.0 + static_cast<double>(fit.terms.size()) +
                          (fit.family == Family::gaussian ? 1.0 : 0.0);
    if (criterion == Criterion::aic) return -2.0 * fit.log_likelihood + 2.0 * params;
    return -2.0 * fit.log_likelihood + params * std::log(static_cast<double>(fit.n_obs));
}

GlmFit fit_terms(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const std::vector<int>& terms, Family family) {
    Eigen::MatrixXd sub(X.rows(), static_cast<int>(terms.size()));
    for (std::size_t t = 0; t < terms.size(); ++t) sub.col(static_cast<int>(t)) = X.col(terms[t]);
    GlmFit fit = family == Family::gaussian ? fit_gaussian(sub, y)
                                            : fit_binomial(sub, y);
    fit.terms = terms;  // remap local columns back to X's indices
    return fit;
}

GlmFit stepwise_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const std::vector<int>& candidate_terms, Family family,
                       const SelectionConfig& config) {
    if (candidate_terms.empty()) throw std::runtime_error("stepwise_select: no candidates");
    if (config.max_terms < 1) throw std::runtime_error("stepwise_select: max_terms must be >= 1");

    std::vector<int> candidates = candidate_terms;
    std::sort(candidates.begin(), candidates.end());

    std::vector<int> selected;
    GlmFit current = fit_terms(X, y, selected, family);
    double current_crit = information_criterion(current, config.criterion);

    while (static_cast<int>(selected.size()) < config.max_terms) {
        double best_crit = std::numeric_limits<double>::infinity();
        int best_term = -1;
        GlmFit best_fit;
        for (int c : candidates) {
            if (std::find(selected.begin(), selected.end(), c) != selected.end()) continue;
            std::vector<int> trial = selected;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
            GlmFit f;
            try {
                f = fit_terms(X, y, trial, family);
            } catch (const std::exception&) {
                continue;  // rank-deficient or saturated trial
            }
            const double crit = information_criterion(f, config.criterion);
            if (crit < best_crit) {  // candidates ascend, so ties keep the lowest index
                best_crit = crit;
                best_term = c;
                best_fit = std::move(f);
            }
        }
        if (best_term < 0 || current_crit - best_crit <= config.min_improvement) break;
        selected.insert(std::upper_bound(selected.begin(), selected.end(), best_term), best_term);
        current = std::move(best_fit);
        current_crit = best_crit;
    }
    return current;
}

}  // namespace glmens
