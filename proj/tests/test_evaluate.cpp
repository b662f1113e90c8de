#include "glmens/evaluate.hpp"
#include "glmens/rng.hpp"
#include "glmens/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace glmens;

namespace {

Dataset synthetic_binary(int n, int p, std::uint64_t seed, const std::map<int, double>& signal) {
    SplitMix64 rng(seed);
    Dataset ds;
    ds.features.resize(n, p);
    ds.outcome.resize(n);
    for (int j = 0; j < p; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    ds.outcome_kind = OutcomeKind::binary;
    for (int i = 0; i < n; ++i) {
        double eta = 0.0;
        for (int j = 0; j < p; ++j) {
            ds.features(i, j) = rng.normal();
            const auto it = signal.find(j);
            if (it != signal.end()) eta += it->second * ds.features(i, j);
        }
        ds.outcome[i] = rng.uniform01() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
    }
    return ds;
}

GlmFit simple_model(double intercept, double beta) {
    GlmFit f;
    f.family = Family::binomial;
    f.terms = {0};
    f.intercept = intercept;
    f.coefficients = {beta};
    f.std_errors = {1.0};
    f.p_values = {0.5};
    f.n_obs = 10;
    return f;
}

// O(n^2) all-pairs AUC oracle
double brute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double num = 0.0;
    int n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) ++n_pos;
        else ++n_neg;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[i] == 1 && labels[j] == 0) {
                if (scores[i] > scores[j]) num += 1.0;
                else if (scores[i] == scores[j]) num += 0.5;
            }
        }
    }
    return num / (static_cast<double>(n_pos) * n_neg);
}

}  // namespace

TEST_CASE("predict: single model and convexity") {
    Eigen::MatrixXd X(3, 1);
    X << -1, 0, 1;
    const GlmFit m = simple_model(0.5, 2.0);
    const Eigen::VectorXd single = predict({m}, {1.0}, X);
    for (int i = 0; i < 3; ++i) {
        const double eta = 0.5 + 2.0 * X(i, 0);
        CHECK(single[i] == doctest::Approx(1.0 / (1.0 + std::exp(-eta))).epsilon(1e-15));
    }
    // two identical models average to the same output
    const Eigen::VectorXd pair = predict({m, m}, {1.0, 1.0}, X);
    for (int i = 0; i < 3; ++i) CHECK(pair[i] == doctest::Approx(single[i]).epsilon(1e-15));
}

TEST_CASE("predict: input validation") {
    Eigen::MatrixXd X(2, 1);
    X << 0, 1;
    const GlmFit m = simple_model(0.0, 1.0);
    CHECK_THROWS(predict({m}, {-1.0}, X));
    CHECK_THROWS(predict({m}, {0.0}, X));
    GlmFit bad = m;
    bad.terms = {5};  // out of range for a 1-column matrix
    CHECK_THROWS(predict({bad}, {1.0}, X));
}

TEST_CASE("auc: examples and tie convention") {
    CHECK(auc({0.9, 0.8, 0.3, 0.2}, {1, 1, 0, 0}) == 1.0);
    CHECK(auc({0.5, 0.5}, {1, 0}) == 0.5);
    CHECK(auc({0.1, 0.9}, {1, 0}) == 0.0);
    CHECK_THROWS(auc({0.1, 0.9}, {1, 1}));
}

TEST_CASE("auc: matches the all-pairs brute force exactly") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 rng(seed);
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < 20; ++i) {
            // coarse grid so ties actually occur
            scores.push_back(static_cast<double>(rng.below(8)) / 8.0);
            labels.push_back(i < 10 ? 1 : 0);
        }
        CHECK(auc(scores, labels) == brute_auc(scores, labels));
    }
}

TEST_CASE("auc: invariant under strictly increasing transforms") {
    SplitMix64 rng(4);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) {
        scores.push_back(rng.uniform01());
        labels.push_back(static_cast<int>(rng.below(2)));
    }
    labels[0] = 1;
    labels[1] = 0;
    std::vector<double> warped;
    for (double s : scores) warped.push_back(std::exp(3.0 * s) - 7.0);
    CHECK(auc(scores, labels) == auc(warped, labels));
}

TEST_CASE("paired_t_test: reference AUC rows") {
    const std::vector<double> full = {0.67, 0.70, 0.89, 1.00, 0.95};
    const std::vector<double> medoid = {0.63, 0.64, 0.86, 0.98, 0.92};
    const std::vector<double> centroid = {0.67, 0.67, 0.79, 0.99, 0.92};
    const double p_med = paired_t_test(full, medoid);
    CHECK(p_med > 0.002);
    CHECK(p_med < 0.006);
    const double p_cen = paired_t_test(full, centroid);
    CHECK(p_cen > 0.05);
    CHECK(p_cen < 0.09);
}

TEST_CASE("paired_t_test: one-tailed direction is literal") {
    const std::vector<double> base = {0.8, 0.7, 0.9, 0.85, 0.75};
    std::vector<double> worse = base;
    std::vector<double> jitter = {0.01, 0.02, 0.015, 0.005, 0.02};
    for (std::size_t i = 0; i < worse.size(); ++i) worse[i] -= jitter[i];
    const double p = paired_t_test(base, worse);
    CHECK(p < 0.5);
    CHECK(paired_t_test(worse, base) > 0.5);

    // growing uniform shift drives p down
    auto shifted = [&](double eps) {
        std::vector<double> v = base;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= eps + jitter[i];
        return paired_t_test(base, v);
    };
    CHECK(shifted(0.2) < shifted(0.01));

    CHECK_THROWS(paired_t_test(base, base));  // zero-variance differences
}

TEST_CASE("cross_validate: determinism and aggregation") {
    const Dataset ds = synthetic_binary(90, 8, 15, {{0, 2.0}, {3, -2.0}});
    EvalConfig cfg;
    cfg.bags.n_bags = 8;
    cfg.n_folds = 3;
    cfg.n_repeats = 2;
    cfg.seed = 11;
    const DatasetEval a = cross_validate(ds, "synth", cfg);
    const DatasetEval b = cross_validate(ds, "synth", cfg);
    CHECK(a.auc == b.auc);
    CHECK(a.selected_ks == b.selected_ks);

    for (int m = 0; m < 3; ++m) {
        const auto flat = a.flat_aucs(m);
        REQUIRE(flat.size() == 6);
        double s = 0.0;
        for (double v : flat) s += v;
        CHECK(std::abs(a.mean_auc[static_cast<std::size_t>(m)] - s / 6.0) < 1e-12);
        for (double v : flat) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("cross_validate: thread count does not change the report") {
    const Dataset ds = synthetic_binary(90, 8, 16, {{1, 2.0}});
    EvalConfig cfg;
    cfg.bags.n_bags = 6;
    cfg.seed = 3;
    cfg.threads = 1;
    const DatasetEval seq = cross_validate(ds, "synth", cfg);
    cfg.threads = 8;
    const DatasetEval par = cross_validate(ds, "synth", cfg);
    CHECK(seq.auc == par.auc);
    CHECK(seq.selected_ks == par.selected_ks);
}

TEST_CASE("no leakage: permuting held-out labels cannot change fitted models") {
    // the models are functions of the training split only, so scores on a
    // fixed held-out matrix are unchanged when its labels are permuted
    const Dataset ds = synthetic_binary(60, 5, 29, {{2, 2.0}});
    const FoldPlan plan = make_folds(ds, 3, 1, 7);
    const auto train_idx = plan.training_indices(0, 0, ds.n_obs());
    Dataset train = ds.subset(train_idx);

    BagConfig cfg;
    cfg.n_bags = 5;
    cfg.seed = 13;
    const Ensemble ens = fit_ensemble(train, cfg);

    const auto& test_idx = plan.held_out[0][0];
    Eigen::MatrixXd X_test(static_cast<int>(test_idx.size()), ds.n_features());
    for (std::size_t i = 0; i < test_idx.size(); ++i)
        X_test.row(static_cast<int>(i)) = ds.features.row(test_idx[i]);
    const Eigen::VectorXd s1 = predict_ensemble(ens, X_test);

    Dataset permuted = ds;
    for (std::size_t i = 0; i + 1 < test_idx.size(); i += 2)
        std::swap(permuted.outcome[test_idx[i]], permuted.outcome[test_idx[i + 1]]);
    const Ensemble ens2 = fit_ensemble(permuted.subset(train_idx), cfg);
    const Eigen::VectorXd s2 = predict_ensemble(ens2, X_test);
    CHECK(s1 == s2);
}

TEST_CASE("evaluate_datasets: multi-dataset report carries t-tests, single omits") {
    EvalConfig cfg;
    cfg.bags.n_bags = 20;
    cfg.n_folds = 3;
    cfg.n_repeats = 2;
    cfg.seed = 19;
    std::vector<std::pair<std::string, Dataset>> two = {
        {"a", synthetic_binary(90, 16, 1, {{0, 1.5}, {4, -1.0}})},
        {"b", synthetic_binary(90, 16, 2, {{1, 1.5}, {7, 1.0}})}};
    const EvalReport multi = evaluate_datasets(two, cfg);
    CHECK(multi.p_medoid.has_value());
    CHECK(multi.p_centroid.has_value());
    const std::string table = render_report(multi);
    CHECK(table.find("P-value") != std::string::npos);
    CHECK(table.find("medoid-compressed") != std::string::npos);

    const EvalReport single = evaluate_datasets({two[0]}, cfg);
    CHECK_FALSE(single.p_medoid.has_value());
    CHECK(render_report(single).find("omitted") != std::string::npos);

    const auto j = report_to_json(multi);
    CHECK(j.at("datasets").size() == 2);
    CHECK(j.at("pValue").contains("medoid"));
}
