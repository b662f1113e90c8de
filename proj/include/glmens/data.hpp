#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace glmens {

enum class OutcomeKind { binary, continuous };

struct Dataset {
    Eigen::MatrixXd features;  // rows = observations
    Eigen::VectorXd outcome;   // {0,1} when binary
    std::vector<std::string> feature_names;
    OutcomeKind outcome_kind = OutcomeKind::binary;
    // non-empty when the outcome column held string labels: [0] -> 0, [1] -> 1
    std::vector<std::string> label_mapping;

    int n_obs() const { return static_cast<int>(features.rows()); }
    int n_features() const { return static_cast<int>(features.cols()); }

    Dataset subset(const std::vector<int>& rows) const;
};

struct LoadOptions {
    bool impute_mean = false;  // default: fail on missing cells
};

Dataset load_csv(const std::string& path, const std::string& outcome_column,
                 const LoadOptions& options = {});

// per-feature transform collected on training data, reusable on held-out data
struct StandardizeRecord {
    std::vector<double> means;
    std::vector<double> scales;              // 1 for constant columns
    std::vector<int> constant_columns;
};

std::pair<Dataset, StandardizeRecord> standardize(const Dataset& dataset);
Eigen::MatrixXd apply_standardize(const StandardizeRecord& record, const Eigen::MatrixXd& features);

struct FoldPlan {
    int n_folds = 0;
    int n_repeats = 0;
    std::uint64_t seed = 0;
    // held_out[repeat][fold] = sorted observation indices
    std::vector<std::vector<std::vector<int>>> held_out;

    std::vector<int> training_indices(int repeat, int fold, int n_obs) const;
};

FoldPlan make_folds(const Dataset& dataset, int n_folds, int n_repeats, std::uint64_t seed);

}  // namespace glmens
