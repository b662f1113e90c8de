#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace glmens {

enum class Family { gaussian, binomial };
enum class Criterion { aic, bic };

std::string to_string(Family f);
std::string to_string(Criterion c);
Family family_from_string(const std::string& s);
Criterion criterion_from_string(const std::string& s);

// One fitted GLM. `terms` are column indices into the originating feature
// matrix; coefficients/std_errors/p_values are aligned with `terms`.
struct GlmFit {
    Family family = Family::gaussian;
    std::vector<int> terms;  // sorted ascending
    double intercept = 0.0;
    double intercept_se = 0.0;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> p_values;
    double log_likelihood = 0.0;
    int n_obs = 0;
    bool converged = true;
    std::vector<double> deviance_trace;  // binomial only, per IRLS iteration

    // linear predictor for one row of the full feature matrix
    double linear_predictor(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

struct SelectionConfig {
    Criterion criterion = Criterion::bic;
    int max_terms = 1;
    double min_improvement = 0.0;  // forward step accepted iff improvement > this
};

// OLS with exact Gaussian log-likelihood; X holds the term columns only, the
// intercept is added internally. p-values from two-sided Student-t, df n-p-1.
GlmFit fit_gaussian(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// IRLS logistic fit with step-halving; Wald SEs from the inverse Fisher
// information, p-values two-sided normal. Flags (never throws on)
// separation-driven divergence.
GlmFit fit_binomial(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int max_iter = 25);

// params = intercept + |terms| (+1 dispersion for gaussian)
double information_criterion(const GlmFit& fit, Criterion criterion);

// Forward stepwise search over `candidate_terms` (column indices into X),
// starting from the intercept-only model. Ties break to the lowest index.
GlmFit stepwise_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const std::vector<int>& candidate_terms, Family family,
                       const SelectionConfig& config);

// fit on an explicit term set (used by stepwise and centroid refitting)
GlmFit fit_terms(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const std::vector<int>& terms, Family family);

}  // namespace glmens
