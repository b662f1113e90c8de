#pragma once

#include "glmens/compress.hpp"
#include "glmens/data.hpp"
#include "glmens/ensemble.hpp"
#include "glmens/evaluate.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace glmens {

inline constexpr const char* kToolName = "glmens";
inline constexpr const char* kToolVersion = "0.1.0";

// {tool:{name,version}, seed, config:{...}} block embedded in every output
nlohmann::json meta_block(std::uint64_t seed, const nlohmann::json& config);

nlohmann::json glm_fit_to_json(const GlmFit& fit, const std::vector<std::string>& feature_names);
GlmFit glm_fit_from_json(const nlohmann::json& j, const std::vector<std::string>& feature_names);

nlohmann::json bag_config_to_json(const BagConfig& config);
BagConfig bag_config_from_json(const nlohmann::json& j);

nlohmann::json ensemble_to_json(const Ensemble& ensemble);
Ensemble ensemble_from_json(const nlohmann::json& j);

nlohmann::json compressed_to_json(const CompressedEnsemble& compressed);

nlohmann::json fold_plan_to_json(const FoldPlan& plan);

nlohmann::json report_to_json(const EvalReport& report);

std::string matrix_to_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& row_labels,
                          const std::vector<std::string>& col_labels);
std::string cost_profile_to_csv(const CostProfile& profile);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace glmens
