#include "glmens/evaluate.hpp"

#include "glmens/parallel.hpp"
#include "glmens/rng.hpp"
#include "glmens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace glmens {

std::string to_string(Weighting w) { return w == Weighting::cluster_size ? "size" : "uniform"; }

Weighting weighting_from_string(const std::string& s) {
    if (s == "size") return Weighting::cluster_size;
    if (s == "uniform") return Weighting::uniform;
    throw std::runtime_error("unknown weighting: " + s);
}

Eigen::VectorXd predict(const std::vector<GlmFit>& models, const std::vector<double>& weights,
                        const Eigen::MatrixXd& X) {
    if (models.empty() || models.size() != weights.size())
        throw std::runtime_error("predict: models/weights mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::runtime_error("predict: negative weight");
        total += w;
    }
    if (total <= 0.0) throw std::runtime_error("predict: weights sum to zero");

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(X.rows());
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto& fit = models[m];
        for (int i = 0; i < X.rows(); ++i) {
            double pred = fit.linear_predictor(X.row(i));
            if (fit.family == Family::binomial) pred = 1.0 / (1.0 + std::exp(-pred));
            acc[i] += weights[m] * pred;
        }
    }
    return acc / total;
}

Eigen::VectorXd predict_ensemble(const Ensemble& ensemble, const Eigen::MatrixXd& X) {
    return predict(ensemble.models, std::vector<double>(ensemble.models.size(), 1.0), X);
}

Eigen::VectorXd predict_compressed(const CompressedEnsemble& compressed, const Eigen::MatrixXd& X,
                                   Weighting weighting) {
    std::vector<double> weights;
    weights.reserve(compressed.representatives.size());
    for (int s : compressed.cluster_sizes)
        weights.push_back(weighting == Weighting::cluster_size ? static_cast<double>(s) : 1.0);
    return predict(compressed.representatives, weights, X);
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::runtime_error("auc: scores/labels mismatch");
    const int n = static_cast<int>(scores.size());
    int n_pos = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw std::runtime_error("auc: labels must be 0/1");
        n_pos += l;
    }
    const int n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw std::runtime_error("auc: single-class labels");

    // midrank formulation, exact under ties
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)]; });
    double rank_sum_pos = 0.0;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j < n && scores[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] ==
                            scores[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
            ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (int t = i; t < j; ++t)
            if (labels[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] == 1)
                rank_sum_pos += midrank;
        i = j;
    }
    return (rank_sum_pos - 0.5 * n_pos * (n_pos + 1.0)) / (static_cast<double>(n_pos) * n_neg);
}

double paired_t_test(const std::vector<double>& baseline, const std::vector<double>& comparison) {
    if (baseline.size() != comparison.size())
        throw std::runtime_error("paired_t_test: length mismatch");
    const int m = static_cast<int>(baseline.size());
    if (m < 2) throw std::runtime_error("paired_t_test: need at least 2 pairs");
    std::vector<double> diff(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        diff[static_cast<std::size_t>(i)] = baseline[static_cast<std::size_t>(i)] -
                                            comparison[static_cast<std::size_t>(i)];
    const double sd = sample_sd(diff);
    if (sd == 0.0) throw std::runtime_error("paired_t_test: zero-variance differences");
    const double t = mean(diff) / (sd / std::sqrt(static_cast<double>(m)));
    return student_t_upper_p(t, static_cast<double>(m - 1));
}

std::vector<double> DatasetEval::flat_aucs(int method) const {
    std::vector<double> out;
    for (const auto& per_repeat : auc[static_cast<std::size_t>(method)])
        out.insert(out.end(), per_repeat.begin(), per_repeat.end());
    return out;
}

namespace {

struct UnitResult {
    std::array<double, 3> auc{};
    int selected_k = 0;
};

UnitResult run_unit(const Dataset& dataset, const FoldPlan& plan, int repeat, int fold,
                    const EvalConfig& config) {
    const auto train_idx = plan.training_indices(repeat, fold, dataset.n_obs());
    const auto& test_idx = plan.held_out[static_cast<std::size_t>(repeat)][static_cast<std::size_t>(fold)];

    Dataset train = dataset.subset(train_idx);
    Eigen::MatrixXd X_test(static_cast<int>(test_idx.size()), dataset.n_features());
    std::vector<int> y_test;
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
        X_test.row(static_cast<int>(i)) = dataset.features.row(test_idx[i]);
        y_test.push_back(dataset.outcome[test_idx[i]] == 1.0 ? 1 : 0);
    }

    StandardizeRecord record;
    if (config.standardize) {
        auto [std_train, rec] = standardize(train);
        train = std::move(std_train);
        record = std::move(rec);
        X_test = apply_standardize(record, X_test);
    }

    BagConfig bags = config.bags;
    bags.seed = mix_seed(config.seed,
                         0x1000 + static_cast<std::uint64_t>(repeat) * plan.n_folds + fold);
    const Ensemble ens = fit_ensemble(train, bags);
    const SignificanceMatrix S = build_significance_matrix(ens);

    UnitResult res;
    const Eigen::VectorXd full_scores = predict_ensemble(ens, X_test);

    if (ens.n_terms() == 0 || ens.d() < 2) {
        // no structure to compress; every method degenerates to the ensemble
        res.selected_k = 1;
        const double a = auc(std::vector<double>(full_scores.begin(), full_scores.end()), y_test);
        res.auc = {a, a, a};
        return res;
    }

    const Dendrogram dend = ward_cluster(S);
    const int k_max = config.k_max > 0 ? std::min(config.k_max, ens.d()) : ens.d();
    const CostProfile profile = select_k(S, dend, k_max);
    res.selected_k = profile.selected_k;

    const CompressedEnsemble medoids =
        compress(ens, S, dend, profile.selected_k, Strategy::medoid);
    const CompressedEnsemble centroids =
        compress(ens, S, dend, profile.selected_k, Strategy::centroid, &train);

    const Eigen::VectorXd medoid_scores = predict_compressed(medoids, X_test, config.weighting);
    const Eigen::VectorXd centroid_scores = predict_compressed(centroids, X_test, config.weighting);

    res.auc[0] = auc(std::vector<double>(full_scores.begin(), full_scores.end()), y_test);
    res.auc[1] = auc(std::vector<double>(medoid_scores.begin(), medoid_scores.end()), y_test);
    res.auc[2] = auc(std::vector<double>(centroid_scores.begin(), centroid_scores.end()), y_test);
    return res;
}

}  // namespace

DatasetEval cross_validate(const Dataset& dataset, const std::string& name,
                           const EvalConfig& config) {
    if (dataset.outcome_kind != OutcomeKind::binary)
        throw std::runtime_error("cross_validate: AUC evaluation needs a binary outcome");
    const FoldPlan plan = make_folds(dataset, config.n_folds, config.n_repeats, config.seed);

    const int units = config.n_repeats * config.n_folds;
    std::vector<UnitResult> results(static_cast<std::size_t>(units));
    parallel_for(units, config.threads, [&](int u) {
        results[static_cast<std::size_t>(u)] =
            run_unit(dataset, plan, u / config.n_folds, u % config.n_folds, config);
    });

    DatasetEval eval;
    eval.name = name;
    for (int m = 0; m < 3; ++m)
        eval.auc[static_cast<std::size_t>(m)].assign(
            static_cast<std::size_t>(config.n_repeats),
            std::vector<double>(static_cast<std::size_t>(config.n_folds), 0.0));
    for (int u = 0; u < units; ++u) {
        const int r = u / config.n_folds;
        const int f = u % config.n_folds;
        for (int m = 0; m < 3; ++m)
            eval.auc[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)][static_cast<std::size_t>(f)] =
                results[static_cast<std::size_t>(u)].auc[static_cast<std::size_t>(m)];
        eval.selected_ks.push_back(results[static_cast<std::size_t>(u)].selected_k);
    }
    for (int m = 0; m < 3; ++m) {
        const auto flat = eval.flat_aucs(m);
        eval.mean_auc[static_cast<std::size_t>(m)] = mean(flat);
    }
    return eval;
}

EvalReport evaluate_datasets(const std::vector<std::pair<std::string, Dataset>>& datasets,
                             const EvalConfig& config) {
    if (datasets.empty()) throw std::runtime_error("evaluate_datasets: no datasets");
    EvalReport report;
    for (const auto& [name, ds] : datasets)
        report.datasets.push_back(cross_validate(ds, name, config));

    if (report.datasets.size() >= 2) {
        std::vector<double> full, medoid, centroid;
        for (const auto& d : report.datasets) {
            full.push_back(d.mean_auc[0]);
            medoid.push_back(d.mean_auc[1]);
            centroid.push_back(d.mean_auc[2]);
        }
        // identical mean AUCs across every dataset leave the test undefined
        try {
            report.p_medoid = paired_t_test(full, medoid);
        } catch (const std::exception&) {
            report.p_medoid.reset();
        }
        try {
            report.p_centroid = paired_t_test(full, centroid);
        } catch (const std::exception&) {
            report.p_centroid.reset();
        }
    }
    return report;
}

std::string render_report(const EvalReport& report) {
    std::ostringstream os;
    std::size_t width = 12;
    for (const auto& d : report.datasets) width = std::max(width, d.name.size() + 2);

    const bool multi = report.datasets.size() >= 2;
    os << std::left << std::setw(22) << "method";
    for (const auto& d : report.datasets) os << std::setw(static_cast<int>(width)) << d.name;
    if (multi) os << std::setw(10) << "P-value";
    os << '\n';

    const std::array<std::string, 3> rows = {"full", "medoid-compressed", "centroid-compressed"};
    for (int m = 0; m < 3; ++m) {
        os << std::left << std::setw(22) << rows[static_cast<std::size_t>(m)];
        for (const auto& d : report.datasets)
            os << std::setw(static_cast<int>(width)) << std::fixed << std::setprecision(4)
               << d.mean_auc[static_cast<std::size_t>(m)];
        if (multi) {
            const std::optional<double>& p = m == 1 ? report.p_medoid : report.p_centroid;
            if (m == 0 || !p) os << std::setw(10) << "-";
            else os << std::setw(10) << std::setprecision(4) << *p;
        }
        os << '\n';
    }
    if (!multi) os << "(single dataset: paired t-test omitted)\n";
    return os.str();
}

}  // namespace glmens
