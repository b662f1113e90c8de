#include "glmens/ensemble.hpp"
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

GlmFit make_fit(Family family, std::vector<int> terms, std::vector<double> betas,
                std::vector<double> ps) {
    GlmFit f;
    f.family = family;
    f.terms = std::move(terms);
    f.coefficients = std::move(betas);
    f.p_values = std::move(ps);
    f.std_errors.assign(f.terms.size(), 1.0);
    f.n_obs = 10;
    return f;
}

// the two-model, three-term worked-example ensemble
Ensemble reference_fixture() {
    Ensemble ens;
    ens.family = Family::binomial;
    ens.feature_names = {"t1", "t2", "t3"};
    ens.models.push_back(make_fit(Family::binomial, {0}, {0.081}, {0.0027}));
    ens.models.push_back(make_fit(Family::binomial, {1, 2}, {0.4358, 0.1917}, {0.9990, 0.9999}));
    ens.term_union = {0, 1, 2};
    return ens;
}

}  // namespace

TEST_CASE("build_coefficient_matrix: worked-example fixture") {
    const auto B = build_coefficient_matrix(reference_fixture());
    Eigen::MatrixXd expected(2, 3);
    expected << 0.081, 0, 0, 0, 0.4358, 0.1917;
    CHECK(B.values == expected);
    CHECK(B.col_labels == std::vector<std::string>{"t1", "t2", "t3"});
}

TEST_CASE("build_coefficient_matrix: single model with all terms") {
    Ensemble ens;
    ens.family = Family::binomial;
    ens.feature_names = {"a", "b"};
    ens.models.push_back(make_fit(Family::binomial, {0, 1}, {1.5, -2.0}, {0.1, 0.2}));
    ens.term_union = {0, 1};
    const auto B = build_coefficient_matrix(ens);
    CHECK(B.values(0, 0) == 1.5);
    CHECK(B.values(0, 1) == -2.0);
}

TEST_CASE("build_significance_matrix: worked-example p-values") {
    const auto S = build_significance_matrix(reference_fixture());
    CHECK(S.values(0, 0) == doctest::Approx(2.5686).epsilon(1e-4));
    CHECK(S.values(1, 1) == doctest::Approx(0.000434).epsilon(1e-3));
    CHECK(S.values(1, 2) == doctest::Approx(4.34e-5).epsilon(1e-3));
    // absent terms are exactly zero
    CHECK(S.values(0, 1) == 0.0);
    CHECK(S.values(0, 2) == 0.0);
    CHECK(S.values(1, 0) == 0.0);
}

TEST_CASE("significance entries are bounded by the p-value floor") {
    Ensemble ens;
    ens.family = Family::binomial;
    ens.feature_names = {"a"};
    ens.models.push_back(make_fit(Family::binomial, {0}, {9.0}, {1e-300}));
    ens.term_union = {0};
    const auto S = build_significance_matrix(ens);
    CHECK(S.values(0, 0) <= 300.0);
    CHECK(S.values(0, 0) >= 0.0);
}

TEST_CASE("fit_ensemble: singleton ensemble") {
    const Dataset ds = synthetic_binary(60, 5, 4, {{0, 2.0}});
    BagConfig cfg;
    cfg.n_bags = 1;
    cfg.seed = 9;
    const Ensemble ens = fit_ensemble(ds, cfg);
    CHECK(ens.d() == 1);
    CHECK(ens.term_union == ens.models[0].terms);
}

TEST_CASE("fit_ensemble: same seed gives bitwise-identical serialization") {
    const Dataset ds = synthetic_binary(80, 10, 12, {{1, 1.5}, {4, -1.5}});
    BagConfig cfg;
    cfg.n_bags = 12;
    cfg.seed = 123;
    const auto a = ensemble_to_json(fit_ensemble(ds, cfg)).dump();
    const auto b = ensemble_to_json(fit_ensemble(ds, cfg)).dump();
    CHECK(a == b);
}

TEST_CASE("fit_ensemble: thread count does not change the result") {
    const Dataset ds = synthetic_binary(80, 10, 12, {{1, 1.5}, {4, -1.5}});
    BagConfig cfg;
    cfg.n_bags = 16;
    cfg.seed = 77;
    const auto seq = ensemble_to_json(fit_ensemble(ds, cfg, 1)).dump();
    const auto par = ensemble_to_json(fit_ensemble(ds, cfg, 8)).dump();
    CHECK(seq == par);
}

TEST_CASE("fit_ensemble: planted signals dominate term frequencies") {
    const Dataset ds = synthetic_binary(300, 20, 31, {{2, 2.0}, {7, -2.0}, {11, 2.0}});
    BagConfig cfg;
    cfg.n_bags = 100;
    cfg.features_per_bag = 8;
    cfg.seed = 5;
    const Ensemble ens = fit_ensemble(ds, cfg);

    std::map<int, int> freq;
    for (const auto& m : ens.models)
        for (int t : m.terms) freq[t] += 1;
    std::vector<std::pair<int, int>> ranked;  // (-count, term)
    for (const auto& [t, c] : freq) ranked.emplace_back(-c, t);
    std::sort(ranked.begin(), ranked.end());
    REQUIRE(ranked.size() >= 3);
    std::vector<int> top = {ranked[0].second, ranked[1].second, ranked[2].second};
    std::sort(top.begin(), top.end());
    CHECK(top == std::vector<int>{2, 7, 11});
}

TEST_CASE("B and S agree on the term presence pattern") {
    const Dataset ds = synthetic_binary(100, 8, 19, {{0, 1.8}, {3, -1.8}});
    BagConfig cfg;
    cfg.n_bags = 20;
    cfg.seed = 2;
    const Ensemble ens = fit_ensemble(ds, cfg);
    const auto B = build_coefficient_matrix(ens);
    const auto S = build_significance_matrix(ens);
    REQUIRE(B.values.rows() == S.values.rows());
    REQUIRE(B.values.cols() == S.values.cols());

    // every term-union column is present in at least one model
    for (int j = 0; j < B.values.cols(); ++j)
        CHECK(B.values.col(j).cwiseAbs().maxCoeff() > 0.0);

    for (int i = 0; i < ens.d(); ++i) {
        const auto& m = ens.models[static_cast<std::size_t>(i)];
        for (int j = 0; j < B.values.cols(); ++j) {
            const int term = ens.term_union[static_cast<std::size_t>(j)];
            const bool present =
                std::find(m.terms.begin(), m.terms.end(), term) != m.terms.end();
            if (!present) {
                CHECK(B.values(i, j) == 0.0);
                CHECK(S.values(i, j) == 0.0);
            }
        }
    }
    // n <= n_bags * max_terms
    CHECK(ens.n_terms() <= cfg.n_bags * ens.config.resolved_max_terms(ds.n_features()));
}

TEST_CASE("GlmFit JSON round-trips through ensemble serialization") {
    const Dataset ds = synthetic_binary(70, 6, 8, {{1, 2.0}});
    BagConfig cfg;
    cfg.n_bags = 5;
    cfg.seed = 42;
    const Ensemble ens = fit_ensemble(ds, cfg);
    const auto j = ensemble_to_json(ens);
    const Ensemble back = ensemble_from_json(j);
    CHECK(ensemble_to_json(back).dump() == j.dump());
    REQUIRE(back.d() == ens.d());
    for (int i = 0; i < ens.d(); ++i) {
        CHECK(back.models[static_cast<std::size_t>(i)].terms ==
              ens.models[static_cast<std::size_t>(i)].terms);
        CHECK(back.models[static_cast<std::size_t>(i)].coefficients ==
              ens.models[static_cast<std::size_t>(i)].coefficients);
    }
}
