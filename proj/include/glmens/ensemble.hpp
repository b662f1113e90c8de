#pragma once

#include "glmens/data.hpp"
#include "glmens/glm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace glmens {

struct BagConfig {
    int n_bags = 100;
    int features_per_bag = 0;  // 0 -> ceil(sqrt(p))
    int candidate_cap = 0;     // 0 -> min(30, features_per_bag)
    SelectionConfig selection{Criterion::bic, 0, 0.0};  // max_terms 0 -> features_per_bag
    std::uint64_t seed = 0;

    int resolved_features_per_bag(int n_features) const;
    int resolved_candidate_cap(int n_features) const;
    int resolved_max_terms(int n_features) const;
};

// d bagged GLM fits over the union of n selected terms. Term indices refer
// to columns of the originating dataset.
struct Ensemble {
    Family family = Family::binomial;
    std::vector<GlmFit> models;
    std::vector<int> term_union;  // sorted ascending
    std::vector<std::string> feature_names;  // all dataset features
    BagConfig config;
    // training metadata: how features were transformed before fitting
    bool standardized = false;
    StandardizeRecord transform;
    std::vector<std::string> label_mapping;

    int d() const { return static_cast<int>(models.size()); }
    int n_terms() const { return static_cast<int>(term_union.size()); }
};

struct CoefficientMatrix {
    Eigen::MatrixXd values;  // d x n, 0 where the term is absent from the model
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

struct SignificanceMatrix {
    Eigen::MatrixXd values;  // d x n, -log10(p), 0 where absent
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

// One model per bag: bootstrap rows, subsample features, screen candidates
// by absolute univariate outcome correlation, then forward stepwise.
// Deterministic in config.seed regardless of thread count.
Ensemble fit_ensemble(const Dataset& dataset, const BagConfig& config, int threads = 1);

CoefficientMatrix build_coefficient_matrix(const Ensemble& ensemble);
SignificanceMatrix build_significance_matrix(const Ensemble& ensemble);

}  // namespace glmens
