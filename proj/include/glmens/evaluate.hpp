#pragma once

#include "glmens/compress.hpp"
#include "glmens/data.hpp"
#include "glmens/ensemble.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace glmens {

enum class Weighting { cluster_size, uniform };
std::string to_string(Weighting w);
Weighting weighting_from_string(const std::string& s);

// Weighted mean of per-model predictions: inverse-logit probabilities for
// binomial models, linear predictions for gaussian.
Eigen::VectorXd predict(const std::vector<GlmFit>& models, const std::vector<double>& weights,
                        const Eigen::MatrixXd& X);
Eigen::VectorXd predict_ensemble(const Ensemble& ensemble, const Eigen::MatrixXd& X);
Eigen::VectorXd predict_compressed(const CompressedEnsemble& compressed, const Eigen::MatrixXd& X,
                                   Weighting weighting = Weighting::cluster_size);

// Mann-Whitney AUC: (concordant + 0.5*tied) / (n_pos * n_neg)
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// One-tailed paired t-test of H0 "comparison performs as well as baseline";
// returns the upper-tail p of t = mean(baseline - comparison) / (sd/sqrt(m)).
double paired_t_test(const std::vector<double>& baseline, const std::vector<double>& comparison);

struct EvalConfig {
    BagConfig bags;
    int n_folds = 3;
    int n_repeats = 3;
    std::uint64_t seed = 0;
    bool standardize = true;
    Weighting weighting = Weighting::cluster_size;
    int k_max = 0;  // 0 -> d
    int threads = 1;
};

inline constexpr std::array<const char*, 3> kMethodNames = {"full", "medoid", "centroid"};

struct DatasetEval {
    std::string name;
    // auc[method][repeat][fold]; methods ordered as kMethodNames
    std::array<std::vector<std::vector<double>>, 3> auc;
    std::array<double, 3> mean_auc{};
    std::vector<int> selected_ks;  // one per repeat x fold

    std::vector<double> flat_aucs(int method) const;
};

struct EvalReport {
    std::vector<DatasetEval> datasets;
    std::optional<double> p_medoid;    // full vs medoid across dataset means
    std::optional<double> p_centroid;  // full vs centroid
};

// Repeated stratified CV of full vs medoid/centroid-compressed ensembles on
// one dataset. Compression is refit inside every training fold.
DatasetEval cross_validate(const Dataset& dataset, const std::string& name,
                           const EvalConfig& config);

// multi-dataset protocol: per-dataset means, then paired one-tailed t-tests
// across datasets (omitted, with a warning, for a single dataset)
EvalReport evaluate_datasets(const std::vector<std::pair<std::string, Dataset>>& datasets,
                             const EvalConfig& config);

// plain-text table: methods as rows, datasets as columns, final p-value column
std::string render_report(const EvalReport& report);

}  // namespace glmens
