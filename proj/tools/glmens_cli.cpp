#include "glmens/compress.hpp"
#include "glmens/data.hpp"
#include "glmens/ensemble.hpp"
#include "glmens/evaluate.hpp"
#include "glmens/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct FitArgs {
    std::string data;
    std::string outcome = "y";
    int bags = 100;
    std::string criterion = "bic";
    int features_per_bag = 0;
    int candidate_cap = 0;
    int max_terms = 0;
    double min_improvement = 0.0;
    std::uint64_t seed = 0;
    int threads = 1;
    bool no_standardize = false;
    std::string out = ".";
};

struct CompressArgs {
    std::string ensemble;
    std::string data;
    std::string outcome = "y";
    std::string strategy = "both";
    int k = 0;      // 0 -> argmin over the cost profile
    int k_max = 0;  // 0 -> d
    std::string out = ".";
};

struct EvaluateArgs {
    std::vector<std::string> data;
    std::string outcome = "y";
    int folds = 3;
    int repeats = 3;
    int bags = 100;
    std::string criterion = "bic";
    int features_per_bag = 0;
    int candidate_cap = 0;
    int max_terms = 0;
    std::string weighting = "size";
    int k_max = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    bool no_standardize = false;
    std::string out = ".";
};

glmens::BagConfig make_bag_config(int bags, const std::string& criterion, int features_per_bag,
                                  int candidate_cap, int max_terms, double min_improvement,
                                  std::uint64_t seed) {
    glmens::BagConfig cfg;
    cfg.n_bags = bags;
    cfg.features_per_bag = features_per_bag;
    cfg.candidate_cap = candidate_cap;
    cfg.selection.criterion = glmens::criterion_from_string(criterion);
    cfg.selection.max_terms = max_terms;
    cfg.selection.min_improvement = min_improvement;
    cfg.seed = seed;
    return cfg;
}

// CSVs carry the same provenance block as the JSON outputs, as a comment line
std::string csv_meta_line(const json& meta) {
    return "# " + meta.dump() + "\n";
}

std::string dataset_name(const std::string& path) {
    return fs::path(path).stem().string();
}

void cmd_fit(const FitArgs& a) {
    glmens::Dataset ds = glmens::load_csv(a.data, a.outcome);
    glmens::StandardizeRecord record;
    bool standardized = !a.no_standardize;
    if (standardized) {
        auto [std_ds, rec] = glmens::standardize(ds);
        ds = std::move(std_ds);
        record = std::move(rec);
    }

    const glmens::BagConfig cfg =
        make_bag_config(a.bags, a.criterion, a.features_per_bag, a.candidate_cap, a.max_terms,
                        a.min_improvement, a.seed);
    glmens::Ensemble ens = glmens::fit_ensemble(ds, cfg, a.threads);
    ens.standardized = standardized;
    ens.transform = record;

    fs::create_directories(a.out);
    const json meta = glmens::meta_block(a.seed, glmens::bag_config_to_json(cfg));
    glmens::write_file((fs::path(a.out) / "ensemble.json").string(),
                       glmens::ensemble_to_json(ens).dump(2) + "\n");
    const auto B = glmens::build_coefficient_matrix(ens);
    const auto S = glmens::build_significance_matrix(ens);
    glmens::write_file((fs::path(a.out) / "B.csv").string(),
                       csv_meta_line(meta) +
                           glmens::matrix_to_csv(B.values, B.row_labels, B.col_labels));
    glmens::write_file((fs::path(a.out) / "S.csv").string(),
                       csv_meta_line(meta) +
                           glmens::matrix_to_csv(S.values, S.row_labels, S.col_labels));
    std::cout << "fit: d=" << ens.d() << " terms=" << ens.n_terms() << " -> " << a.out << "\n";
}

void cmd_compress(const CompressArgs& a) {
    const json ejson = json::parse(glmens::read_file(a.ensemble));
    const glmens::Ensemble ens = glmens::ensemble_from_json(ejson);
    const std::uint64_t seed = ens.config.seed;

    const bool want_medoid = a.strategy == "medoid" || a.strategy == "both";
    const bool want_centroid = a.strategy == "centroid" || a.strategy == "both";
    if (!want_medoid && !want_centroid)
        throw std::runtime_error("strategy must be medoid, centroid or both");

    glmens::Dataset training;
    if (want_centroid) {
        if (a.data.empty())
            throw std::runtime_error("centroid strategy requires --data (training CSV)");
        training = glmens::load_csv(a.data, a.outcome);
        if (ens.standardized)
            training.features = glmens::apply_standardize(ens.transform, training.features);
    }

    const auto S = glmens::build_significance_matrix(ens);
    glmens::Dendrogram dend;
    glmens::CostProfile profile;
    int k = a.k;
    if (ens.d() >= 2 && ens.n_terms() >= 1) {
        dend = glmens::ward_cluster(S);
        const int k_max = a.k_max > 0 ? std::min(a.k_max, ens.d()) : ens.d();
        profile = glmens::select_k(S, dend, k_max);
        if (k == 0) k = profile.selected_k;
    } else {
        // nothing to cluster: single model and/or empty term union
        dend.n_leaves = ens.d();
        profile.selected_k = 1;
        if (k == 0) k = 1;
    }

    fs::create_directories(a.out);
    const json cfg = {{"strategy", a.strategy},
                      {"k", a.k},
                      {"kMax", a.k_max},
                      {"ensemble", glmens::bag_config_to_json(ens.config)}};
    const json meta = glmens::meta_block(seed, cfg);
    glmens::write_file((fs::path(a.out) / "costs.csv").string(),
                       csv_meta_line(meta) + glmens::cost_profile_to_csv(profile));

    auto write_compressed = [&](glmens::Strategy strategy, const std::string& file) {
        const glmens::CompressedEnsemble comp =
            glmens::compress(ens, S, dend, k, strategy,
                             strategy == glmens::Strategy::centroid ? &training : nullptr);
        json j = glmens::compressed_to_json(comp);
        j["meta"] = meta;
        glmens::write_file((fs::path(a.out) / file).string(), j.dump(2) + "\n");
    };
    if (want_medoid) write_compressed(glmens::Strategy::medoid, "compressed_medoid.json");
    if (want_centroid) write_compressed(glmens::Strategy::centroid, "compressed_centroid.json");
    std::cout << "compress: k=" << k << " -> " << a.out << "\n";
}

void cmd_evaluate(const EvaluateArgs& a) {
    glmens::EvalConfig cfg;
    cfg.bags = make_bag_config(a.bags, a.criterion, a.features_per_bag, a.candidate_cap,
                               a.max_terms, 0.0, a.seed);
    cfg.n_folds = a.folds;
    cfg.n_repeats = a.repeats;
    cfg.seed = a.seed;
    cfg.standardize = !a.no_standardize;
    cfg.weighting = glmens::weighting_from_string(a.weighting);
    cfg.k_max = a.k_max;
    cfg.threads = a.threads;

    std::vector<std::pair<std::string, glmens::Dataset>> datasets;
    for (const auto& path : a.data)
        datasets.emplace_back(dataset_name(path), glmens::load_csv(path, a.outcome));
    if (datasets.size() == 1)
        std::cerr << "warning: single dataset, paired t-test omitted\n";

    const glmens::EvalReport report = glmens::evaluate_datasets(datasets, cfg);

    fs::create_directories(a.out);
    const json cfg_json = {{"folds", a.folds},
                           {"repeats", a.repeats},
                           {"weighting", a.weighting},
                           {"kMax", a.k_max},
                           {"standardize", !a.no_standardize},
                           {"bags", glmens::bag_config_to_json(cfg.bags)}};
    json j = glmens::report_to_json(report);
    j["meta"] = glmens::meta_block(a.seed, cfg_json);
    glmens::write_file((fs::path(a.out) / "report.json").string(), j.dump(2) + "\n");
    glmens::write_file((fs::path(a.out) / "report.txt").string(), glmens::render_report(report));
    std::cout << glmens::render_report(report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bagged GLM ensembles with MDL-guided compression"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CompressArgs compress_args;
    EvaluateArgs eval_args;
    FitArgs pipe_fit;
    CompressArgs pipe_compress;

    auto add_fit_flags = [](CLI::App* cmd, FitArgs& a) {
        cmd->add_option("--data", a.data, "training CSV")->required();
        cmd->add_option("--outcome", a.outcome, "outcome column name");
        cmd->add_option("--bags", a.bags, "number of bags");
        cmd->add_option("--criterion", a.criterion)->check(CLI::IsMember({"aic", "bic"}));
        cmd->add_option("--features-per-bag", a.features_per_bag, "0 = ceil(sqrt(p))");
        cmd->add_option("--candidate-cap", a.candidate_cap, "0 = min(30, features-per-bag)");
        cmd->add_option("--max-terms", a.max_terms, "0 = features-per-bag");
        cmd->add_option("--min-improvement", a.min_improvement);
        cmd->add_option("--seed", a.seed);
        cmd->add_option("--threads", a.threads);
        cmd->add_flag("--no-standardize", a.no_standardize);
        cmd->add_option("--out", a.out, "output directory");
    };

    auto* fit = app.add_subcommand("fit", "fit a bagged GLM ensemble");
    add_fit_flags(fit, fit_args);

    auto* compress = app.add_subcommand("compress", "compress an ensemble to representatives");
    compress->add_option("--ensemble", compress_args.ensemble, "ensemble.json")->required();
    compress->add_option("--data", compress_args.data, "training CSV (centroid refits)");
    compress->add_option("--outcome", compress_args.outcome);
    compress->add_option("--strategy", compress_args.strategy)
        ->check(CLI::IsMember({"medoid", "centroid", "both"}));
    compress->add_option("--k", compress_args.k, "override the selected k (0 = argmin)");
    compress->add_option("--k-max", compress_args.k_max, "0 = d");
    compress->add_option("--out", compress_args.out);

    auto* evaluate = app.add_subcommand("evaluate", "cross-validate full vs compressed");
    evaluate->add_option("--data", eval_args.data, "dataset CSVs")->required()->expected(-1);
    evaluate->add_option("--outcome", eval_args.outcome);
    evaluate->add_option("--folds", eval_args.folds);
    evaluate->add_option("--repeats", eval_args.repeats);
    evaluate->add_option("--bags", eval_args.bags);
    evaluate->add_option("--criterion", eval_args.criterion)
        ->check(CLI::IsMember({"aic", "bic"}));
    evaluate->add_option("--features-per-bag", eval_args.features_per_bag);
    evaluate->add_option("--candidate-cap", eval_args.candidate_cap);
    evaluate->add_option("--max-terms", eval_args.max_terms);
    evaluate->add_option("--weighting", eval_args.weighting)
        ->check(CLI::IsMember({"size", "uniform"}));
    evaluate->add_option("--k-max", eval_args.k_max);
    evaluate->add_option("--seed", eval_args.seed);
    evaluate->add_option("--threads", eval_args.threads);
    evaluate->add_flag("--no-standardize", eval_args.no_standardize);
    evaluate->add_option("--out", eval_args.out);

    auto* pipeline = app.add_subcommand("pipeline", "fit + compress + evaluate on one dataset");
    add_fit_flags(pipeline, pipe_fit);
    pipeline->add_option("--strategy", pipe_compress.strategy)
        ->check(CLI::IsMember({"medoid", "centroid", "both"}));
    pipeline->add_option("--k", pipe_compress.k);
    pipeline->add_option("--k-max", pipe_compress.k_max);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) cmd_fit(fit_args);
        if (compress->parsed()) cmd_compress(compress_args);
        if (evaluate->parsed()) cmd_evaluate(eval_args);
        if (pipeline->parsed()) {
            cmd_fit(pipe_fit);
            pipe_compress.ensemble = (fs::path(pipe_fit.out) / "ensemble.json").string();
            pipe_compress.data = pipe_fit.data;
            pipe_compress.outcome = pipe_fit.outcome;
            pipe_compress.out = pipe_fit.out;
            cmd_compress(pipe_compress);
            EvaluateArgs e;
            e.data = {pipe_fit.data};
            e.outcome = pipe_fit.outcome;
            e.bags = pipe_fit.bags;
            e.criterion = pipe_fit.criterion;
            e.features_per_bag = pipe_fit.features_per_bag;
            e.candidate_cap = pipe_fit.candidate_cap;
            e.max_terms = pipe_fit.max_terms;
            e.seed = pipe_fit.seed;
            e.threads = pipe_fit.threads;
            e.no_standardize = pipe_fit.no_standardize;
            e.out = pipe_fit.out;
            cmd_evaluate(e);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
