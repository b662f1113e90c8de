#include "glmens/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace glmens {

using nlohmann::json;

json meta_block(std::uint64_t seed, const json& config) {
    return json{{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                {"seed", seed},
                {"config", config}};
}

json glm_fit_to_json(const GlmFit& fit, const std::vector<std::string>& feature_names) {
    json terms = json::array();
    for (std::size_t t = 0; t < fit.terms.size(); ++t) {
        terms.push_back({{"name", feature_names.at(static_cast<std::size_t>(fit.terms[t]))},
                         {"index", fit.terms[t]},
                         {"beta", fit.coefficients[t]},
                         {"se", fit.std_errors[t]},
                         {"p", fit.p_values[t]}});
    }
    return json{{"family", to_string(fit.family)},
                {"intercept", fit.intercept},
                {"interceptSe", fit.intercept_se},
                {"terms", terms},
                {"logLik", fit.log_likelihood},
                {"nObs", fit.n_obs},
                {"converged", fit.converged}};
}

GlmFit glm_fit_from_json(const json& j, const std::vector<std::string>& feature_names) {
    GlmFit fit;
    fit.family = family_from_string(j.at("family").get<std::string>());
    fit.intercept = j.at("intercept").get<double>();
    fit.intercept_se = j.value("interceptSe", 0.0);
    fit.log_likelihood = j.at("logLik").get<double>();
    fit.n_obs = j.at("nObs").get<int>();
    fit.converged = j.at("converged").get<bool>();
    for (const auto& t : j.at("terms")) {
        int idx;
        if (t.contains("index")) {
            idx = t.at("index").get<int>();
        } else {
            const std::string name = t.at("name").get<std::string>();
            const auto it = std::find(feature_names.begin(), feature_names.end(), name);
            if (it == feature_names.end())
                throw std::runtime_error("unknown term name in JSON: " + name);
            idx = static_cast<int>(it - feature_names.begin());
        }
        fit.terms.push_back(idx);
        fit.coefficients.push_back(t.at("beta").get<double>());
        fit.std_errors.push_back(t.at("se").get<double>());
        fit.p_values.push_back(t.at("p").get<double>());
    }
    return fit;
}

json bag_config_to_json(const BagConfig& config) {
    return json{{"nBags", config.n_bags},
                {"featuresPerBag", config.features_per_bag},
                {"candidateCap", config.candidate_cap},
                {"criterion", to_string(config.selection.criterion)},
                {"maxTerms", config.selection.max_terms},
                {"minImprovement", config.selection.min_improvement},
                {"seed", config.seed}};
}

BagConfig bag_config_from_json(const json& j) {
    BagConfig c;
    c.n_bags = j.at("nBags").get<int>();
    c.features_per_bag = j.at("featuresPerBag").get<int>();
    c.candidate_cap = j.at("candidateCap").get<int>();
    c.selection.criterion = criterion_from_string(j.at("criterion").get<std::string>());
    c.selection.max_terms = j.at("maxTerms").get<int>();
    c.selection.min_improvement = j.at("minImprovement").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json ensemble_to_json(const Ensemble& ensemble) {
    json models = json::array();
    for (const auto& m : ensemble.models)
        models.push_back(glm_fit_to_json(m, ensemble.feature_names));
    json term_union = json::array();
    for (int t : ensemble.term_union)
        term_union.push_back(ensemble.feature_names.at(static_cast<std::size_t>(t)));
    json transform = nullptr;
    if (ensemble.standardized) {
        transform = json{{"means", ensemble.transform.means},
                         {"scales", ensemble.transform.scales},
                         {"constantColumns", ensemble.transform.constant_columns}};
    }
    return json{{"meta", meta_block(ensemble.config.seed, bag_config_to_json(ensemble.config))},
                {"family", to_string(ensemble.family)},
                {"featureNames", ensemble.feature_names},
                {"termUnion", term_union},
                {"models", models},
                {"standardized", ensemble.standardized},
                {"transform", transform},
                {"labelMapping", ensemble.label_mapping}};
}

Ensemble ensemble_from_json(const json& j) {
    Ensemble ens;
    ens.family = family_from_string(j.at("family").get<std::string>());
    ens.feature_names = j.at("featureNames").get<std::vector<std::string>>();
    ens.config = bag_config_from_json(j.at("meta").at("config"));
    ens.standardized = j.at("standardized").get<bool>();
    if (!j.at("transform").is_null()) {
        const auto& t = j.at("transform");
        ens.transform.means = t.at("means").get<std::vector<double>>();
        ens.transform.scales = t.at("scales").get<std::vector<double>>();
        ens.transform.constant_columns = t.at("constantColumns").get<std::vector<int>>();
    }
    ens.label_mapping = j.value("labelMapping", std::vector<std::string>{});
    for (const auto& m : j.at("models"))
        ens.models.push_back(glm_fit_from_json(m, ens.feature_names));
    std::set<int> union_set;
    for (const auto& m : ens.models) union_set.insert(m.terms.begin(), m.terms.end());
    ens.term_union.assign(union_set.begin(), union_set.end());
    return ens;
}

json compressed_to_json(const CompressedEnsemble& compressed) {
    json clusters = json::array();
    for (std::size_t c = 0; c < compressed.representatives.size(); ++c) {
        clusters.push_back(
            {{"size", compressed.cluster_sizes[c]},
             {"memberIndices", compressed.provenance[c]},
             {"degenerate", static_cast<bool>(compressed.degenerate[c])},
             {"truncated", static_cast<bool>(compressed.truncated[c])},
             {"representative", glm_fit_to_json(compressed.representatives[c],
                                                compressed.feature_names)}});
    }
    return json{{"strategy", to_string(compressed.strategy)},
                {"k", compressed.k},
                {"family", to_string(compressed.family)},
                {"clusters", clusters}};
}

json fold_plan_to_json(const FoldPlan& plan) {
    json repeats = json::array();
    for (const auto& folds : plan.held_out) {
        json jf = json::array();
        for (const auto& f : folds) jf.push_back(f);
        repeats.push_back(jf);
    }
    return json{{"nFolds", plan.n_folds},
                {"nRepeats", plan.n_repeats},
                {"seed", plan.seed},
                {"heldOut", repeats}};
}

json report_to_json(const EvalReport& report) {
    json datasets = json::array();
    for (const auto& d : report.datasets) {
        json per_method;
        for (int m = 0; m < 3; ++m) {
            per_method[kMethodNames[static_cast<std::size_t>(m)]] = {
                {"aucByRepeatFold", d.auc[static_cast<std::size_t>(m)]},
                {"mean", d.mean_auc[static_cast<std::size_t>(m)]}};
        }
        datasets.push_back({{"name", d.name},
                            {"methods", per_method},
                            {"selectedK", d.selected_ks}});
    }
    json j{{"datasets", datasets}};
    j["pValue"] = json::object();
    if (report.p_medoid) {
        j["pValue"]["medoid"] = *report.p_medoid;
        j["pValue"]["centroid"] = *report.p_centroid;
    }
    return j;
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

}  // namespace

std::string matrix_to_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& row_labels,
                          const std::vector<std::string>& col_labels) {
    std::ostringstream os;
    os.precision(17);
    os << "row";
    for (const auto& c : col_labels) os << ',' << csv_quote(c);
    os << '\n';
    for (int i = 0; i < values.rows(); ++i) {
        os << csv_quote(row_labels.at(static_cast<std::size_t>(i)));
        for (int j = 0; j < values.cols(); ++j) os << ',' << values(i, j);
        os << '\n';
    }
    return os.str();
}

std::string cost_profile_to_csv(const CostProfile& profile) {
    std::ostringstream os;
    os.precision(17);
    os << "k,cost,bic_sum,selected\n";
    for (const auto& e : profile.entries)
        os << e.k << ',' << e.cost << ',' << e.bic_sum << ','
           << (e.k == profile.selected_k ? 1 : 0) << '\n';
    return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace glmens
