#pragma once

#include "glmens/ensemble.hpp"

#include <string>
#include <vector>

namespace glmens {

struct MergeStep {
    int left = 0;   // smaller cluster id
    int right = 0;  // larger cluster id
    double cost = 0.0;  // Ward merge cost (|A||B|/(|A|+|B|)) * ||c_A - c_B||^2
    int size = 0;   // size of the merged cluster
};

// Agglomerative Ward merge tree over the d rows of S. Leaves are 0..d-1;
// the cluster created by merge step t has id d+t.
struct Dendrogram {
    int n_leaves = 0;
    std::vector<MergeStep> merges;
    std::vector<int> leaf_order;
};

struct Membership {
    int k = 0;
    std::vector<int> labels;  // length d, ids in {0..k-1} by first appearance in leaf order
};

struct CostEntry {
    int k = 0;
    double cost = 0.0;     // mean per-term BIC
    double bic_sum = 0.0;  // sum over terms
};

struct CostProfile {
    std::vector<CostEntry> entries;
    // first local minimum of the traversal (the cut right before the first
    // cost upturn); k_max when the profile is monotone decreasing
    int selected_k = 0;
};

enum class Strategy { medoid, centroid };
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct CompressedEnsemble {
    Strategy strategy = Strategy::medoid;
    int k = 0;
    Family family = Family::binomial;
    std::vector<GlmFit> representatives;            // one per cluster
    std::vector<int> cluster_sizes;                 // sums to d
    std::vector<std::vector<int>> provenance;       // member model indices per cluster
    std::vector<bool> degenerate;                   // centroid refit fell back to medoid
    std::vector<bool> truncated;                    // centroid term union was capped
    std::vector<std::string> feature_names;
};

// Ward clustering of S rows (Euclidean, centroid-form merge cost) via
// Lance-Williams updates; ties break to the lexicographically smallest
// (left, right) cluster-id pair.
Dendrogram ward_cluster(const SignificanceMatrix& S);

// partition induced by undoing the last k-1 merges
Membership memberships_at(const Dendrogram& dendrogram, int k);

// BIC of the group-means model for one S column: sigma^2 = RSS/d (floored at
// 1e-12), -2L = d*(log(2*pi*sigma^2)+1), penalty (k+1)*log(d).
double term_model_bic(const Eigen::VectorXd& column, const Membership& membership);

// mean of term_model_bic over all columns of S
double cost_at_k(const SignificanceMatrix& S, const Membership& membership);

// cost profile over dendrogram cuts k = 1..k_max
CostProfile select_k(const SignificanceMatrix& S, const Dendrogram& dendrogram, int k_max);

// Representative per cluster: medoid (member minimizing summed Euclidean
// distance in S-space, verbatim) or centroid (GLM refit on the union of the
// cluster members' terms against `training`, which must carry the same
// feature transform the ensemble was fit on). Clusters are ordered by their
// smallest member model index.
CompressedEnsemble compress(const Ensemble& ensemble, const SignificanceMatrix& S,
                            const Dendrogram& dendrogram, int selected_k, Strategy strategy,
                            const Dataset* training = nullptr);

}  // namespace glmens
