#include "glmens/ensemble.hpp"

#include "glmens/parallel.hpp"
#include "glmens/rng.hpp"
#include "glmens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace glmens {

int BagConfig::resolved_features_per_bag(int n_features) const {
    if (features_per_bag > 0) return std::min(features_per_bag, n_features);
    return std::min(n_features,
                    static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_features)))));
}

int BagConfig::resolved_candidate_cap(int n_features) const {
    const int fpb = resolved_features_per_bag(n_features);
    if (candidate_cap > 0) return std::min(candidate_cap, fpb);
    return std::min(30, fpb);
}

int BagConfig::resolved_max_terms(int n_features) const {
    if (selection.max_terms > 0) return selection.max_terms;
    return resolved_features_per_bag(n_features);
}

namespace {

// |Pearson correlation| with the outcome; 0 for zero-variance columns
double abs_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double mx = x.mean();
    const double my = y.mean();
    const Eigen::ArrayXd dx = x.array() - mx;
    const Eigen::ArrayXd dy = y.array() - my;
    const double denom = std::sqrt(dx.square().sum() * dy.square().sum());
    if (denom == 0.0) return 0.0;
    return std::abs((dx * dy).sum() / denom);
}

GlmFit fit_one_bag(const Dataset& dataset, const BagConfig& config, Family family, int bag) {
    const int n = dataset.n_obs();
    const int p = dataset.n_features();
    SplitMix64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(bag)));

    // bootstrap rows; for binary outcomes both classes must land in the bag
    std::vector<int> rows(static_cast<std::size_t>(n));
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        for (int i = 0; i < n; ++i)
            rows[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
        if (dataset.outcome_kind != OutcomeKind::binary) {
            ok = true;
        } else {
            bool has0 = false, has1 = false;
            for (int i : rows) (dataset.outcome[i] == 1.0 ? has1 : has0) = true;
            ok = has0 && has1;
        }
    }
    if (!ok) throw std::runtime_error("bag " + std::to_string(bag) +
                                      ": bootstrap never contained both classes");

    Eigen::MatrixXd Xb(n, p);
    Eigen::VectorXd yb(n);
    for (int i = 0; i < n; ++i) {
        Xb.row(i) = dataset.features.row(rows[static_cast<std::size_t>(i)]);
        yb[i] = dataset.outcome[rows[static_cast<std::size_t>(i)]];
    }

    // feature subsample without replacement (partial Fisher-Yates)
    const int fpb = config.resolved_features_per_bag(p);
    std::vector<int> pool(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) pool[static_cast<std::size_t>(j)] = j;
    for (int j = 0; j < fpb; ++j) {
        const int r = j + static_cast<int>(rng.below(static_cast<std::uint32_t>(p - j)));
        std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(r)]);
    }
    std::vector<int> sampled(pool.begin(), pool.begin() + fpb);
    std::sort(sampled.begin(), sampled.end());

    // screen by |univariate correlation| on the bag; ties to the lowest index
    const int cap = config.resolved_candidate_cap(p);
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(sampled.size());
    for (int j : sampled) ranked.emplace_back(-abs_correlation(Xb.col(j), yb), j);
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> candidates;
    for (int j = 0; j < cap && j < static_cast<int>(ranked.size()); ++j)
        candidates.push_back(ranked[static_cast<std::size_t>(j)].second);
    std::sort(candidates.begin(), candidates.end());

    SelectionConfig sel = config.selection;
    sel.max_terms = config.resolved_max_terms(p);
    if (sel.criterion != Criterion::aic && sel.criterion != Criterion::bic)
        sel.criterion = Criterion::bic;
    return stepwise_select(Xb, yb, candidates, family, sel);
}

}  // namespace

Ensemble fit_ensemble(const Dataset& dataset, const BagConfig& config, int threads) {
    if (config.n_bags < 1) throw std::runtime_error("fit_ensemble: n_bags must be >= 1");
    const int p = dataset.n_features();
    if (p < 1) throw std::runtime_error("fit_ensemble: dataset has no features");
    if (config.features_per_bag > p)
        throw std::runtime_error("fit_ensemble: features_per_bag exceeds feature count");

    Ensemble ens;
    ens.family = dataset.outcome_kind == OutcomeKind::binary ? Family::binomial : Family::gaussian;
    ens.feature_names = dataset.feature_names;
    ens.config = config;
    ens.label_mapping = dataset.label_mapping;
    ens.models.resize(static_cast<std::size_t>(config.n_bags));

    parallel_for(config.n_bags, threads, [&](int bag) {
        ens.models[static_cast<std::size_t>(bag)] = fit_one_bag(dataset, config, ens.family, bag);
    });

    std::set<int> union_set;
    for (const auto& m : ens.models) union_set.insert(m.terms.begin(), m.terms.end());
    ens.term_union.assign(union_set.begin(), union_set.end());
    return ens;
}

CoefficientMatrix build_coefficient_matrix(const Ensemble& ensemble) {
    CoefficientMatrix B;
    const int d = ensemble.d();
    const int n = ensemble.n_terms();
    B.values = Eigen::MatrixXd::Zero(d, n);
    for (int i = 0; i < d; ++i) {
        const auto& m = ensemble.models[static_cast<std::size_t>(i)];
        for (std::size_t t = 0; t < m.terms.size(); ++t) {
            const auto it = std::lower_bound(ensemble.term_union.begin(),
                                             ensemble.term_union.end(), m.terms[t]);
            const int j = static_cast<int>(it - ensemble.term_union.begin());
            B.values(i, j) = m.coefficients[t];
        }
        B.row_labels.push_back("model_" + std::to_string(i));
    }
    for (int j : ensemble.term_union)
        B.col_labels.push_back(ensemble.feature_names[static_cast<std::size_t>(j)]);
    return B;
}

SignificanceMatrix build_significance_matrix(const Ensemble& ensemble) {
    SignificanceMatrix S;
    const int d = ensemble.d();
    const int n = ensemble.n_terms();
    S.values = Eigen::MatrixXd::Zero(d, n);
    for (int i = 0; i < d; ++i) {
        const auto& m = ensemble.models[static_cast<std::size_t>(i)];
        for (std::size_t t = 0; t < m.terms.size(); ++t) {
            const auto it = std::lower_bound(ensemble.term_union.begin(),
                                             ensemble.term_union.end(), m.terms[t]);
            const int j = static_cast<int>(it - ensemble.term_union.begin());
            S.values(i, j) = -std::log10(clamp_p(m.p_values[t]));
        }
        S.row_labels.push_back("model_" + std::to_string(i));
    }
    for (int j : ensemble.term_union)
        S.col_labels.push_back(ensemble.feature_names[static_cast<std::size_t>(j)]);
    return S;
}

}  // namespace glmens
