#include "glmens/compress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace glmens {

namespace {

constexpr double kVarianceFloor = 1e-12;
constexpr double kTwoPi = 6.283185307179586476925286766559;

void collect_leaves(const Dendrogram& dend, int node, std::vector<int>& out) {
    if (node < dend.n_leaves) {
        out.push_back(node);
        return;
    }
    const auto& step = dend.merges[static_cast<std::size_t>(node - dend.n_leaves)];
    collect_leaves(dend, step.left, out);
    collect_leaves(dend, step.right, out);
}

}  // namespace

std::string to_string(Strategy s) { return s == Strategy::medoid ? "medoid" : "centroid"; }

Strategy strategy_from_string(const std::string& s) {
    if (s == "medoid") return Strategy::medoid;
    if (s == "centroid") return Strategy::centroid;
    throw std::runtime_error("unknown strategy: " + s);
}

Dendrogram ward_cluster(const SignificanceMatrix& S) {
    const int d = static_cast<int>(S.values.rows());
    if (d < 2) throw std::runtime_error("ward_cluster: need at least 2 models");

    // active clusters: id, size, and pairwise merge costs
    std::vector<int> ids(static_cast<std::size_t>(d));
    std::vector<double> sizes(static_cast<std::size_t>(d), 1.0);
    for (int i = 0; i < d; ++i) ids[static_cast<std::size_t>(i)] = i;
    Eigen::MatrixXd D(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            D(i, j) = D(j, i) = 0.5 * (S.values.row(i) - S.values.row(j)).squaredNorm();

    Dendrogram dend;
    dend.n_leaves = d;
    int active = d;
    for (int step = 0; step < d - 1; ++step) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < active; ++i) {
            for (int j = i + 1; j < active; ++j) {
                const int lo = std::min(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
                const int hi = std::max(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
                const double c = D(i, j);
                bool better = c < best;
                if (!better && c == best && bi >= 0) {
                    const int blo = std::min(ids[static_cast<std::size_t>(bi)], ids[static_cast<std::size_t>(bj)]);
                    const int bhi = std::max(ids[static_cast<std::size_t>(bi)], ids[static_cast<std::size_t>(bj)]);
                    better = lo < blo || (lo == blo && hi < bhi);
                }
                if (better) {
                    best = c;
                    bi = i;
                    bj = j;
                }
            }
        }

        const double ni = sizes[static_cast<std::size_t>(bi)];
        const double nj = sizes[static_cast<std::size_t>(bj)];
        MergeStep m;
        m.left = std::min(ids[static_cast<std::size_t>(bi)], ids[static_cast<std::size_t>(bj)]);
        m.right = std::max(ids[static_cast<std::size_t>(bi)], ids[static_cast<std::size_t>(bj)]);
        m.cost = best;
        m.size = static_cast<int>(ni + nj);
        dend.merges.push_back(m);

        // Lance-Williams update for Ward, applied to the merge-cost matrix
        for (int k = 0; k < active; ++k) {
            if (k == bi || k == bj) continue;
            const double nk = sizes[static_cast<std::size_t>(k)];
            const double upd = ((ni + nk) * D(bi, k) + (nj + nk) * D(bj, k) - nk * best) /
                               (ni + nj + nk);
            D(bi, k) = D(k, bi) = upd;
        }
        ids[static_cast<std::size_t>(bi)] = d + step;
        sizes[static_cast<std::size_t>(bi)] = ni + nj;
        // drop slot bj by swapping in the last active slot
        const int last = active - 1;
        if (bj != last) {
            ids[static_cast<std::size_t>(bj)] = ids[static_cast<std::size_t>(last)];
            sizes[static_cast<std::size_t>(bj)] = sizes[static_cast<std::size_t>(last)];
            for (int k = 0; k < active; ++k) {
                D(bj, k) = D(last, k);
                D(k, bj) = D(k, last);
            }
            D(bj, bj) = 0.0;
        }
        --active;
    }

    collect_leaves(dend, 2 * d - 2, dend.leaf_order);
    return dend;
}

Membership memberships_at(const Dendrogram& dendrogram, int k) {
    const int d = dendrogram.n_leaves;
    if (k < 1 || k > d) throw std::runtime_error("memberships_at: k out of range");

    // apply the first d-k merges; parent[] climbs leaf -> live cluster id
    std::vector<int> parent(static_cast<std::size_t>(2 * d - 1), -1);
    for (int t = 0; t < d - k; ++t) {
        const auto& m = dendrogram.merges[static_cast<std::size_t>(t)];
        parent[static_cast<std::size_t>(m.left)] = d + t;
        parent[static_cast<std::size_t>(m.right)] = d + t;
    }
    auto root = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] >= 0) x = parent[static_cast<std::size_t>(x)];
        return x;
    };

    Membership mem;
    mem.k = k;
    mem.labels.assign(static_cast<std::size_t>(d), -1);
    std::map<int, int> label_of_root;
    for (int leaf : dendrogram.leaf_order) {
        const int r = root(leaf);
        auto [it, inserted] = label_of_root.try_emplace(r, static_cast<int>(label_of_root.size()));
        mem.labels[static_cast<std::size_t>(leaf)] = it->second;
    }
    return mem;
}

double term_model_bic(const Eigen::VectorXd& column, const Membership& membership) {
    const int d = static_cast<int>(column.size());
    if (static_cast<int>(membership.labels.size()) != d)
        throw std::runtime_error("term_model_bic: column/membership size mismatch");
    const int k = membership.k;

    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < d; ++i) {
        sum[static_cast<std::size_t>(membership.labels[static_cast<std::size_t>(i)])] += column[i];
        count[static_cast<std::size_t>(membership.labels[static_cast<std::size_t>(i)])] += 1;
    }
    double rss = 0.0;
    for (int i = 0; i < d; ++i) {
        const int g = membership.labels[static_cast<std::size_t>(i)];
        const double mu = sum[static_cast<std::size_t>(g)] / count[static_cast<std::size_t>(g)];
        rss += (column[i] - mu) * (column[i] - mu);
    }
    const double sigma2 = std::max(rss / d, kVarianceFloor);
    const double neg2L = d * (std::log(kTwoPi * sigma2) + 1.0);
    return neg2L + (k + 1) * std::log(static_cast<double>(d));
}

double cost_at_k(const SignificanceMatrix& S, const Membership& membership) {
    const int n = static_cast<int>(S.values.cols());
    if (n == 0) throw std::runtime_error("cost_at_k: S has no term columns");
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += term_model_bic(S.values.col(j), membership);
    return sum / n;
}

CostProfile select_k(const SignificanceMatrix& S, const Dendrogram& dendrogram, int k_max) {
    const int d = dendrogram.n_leaves;
    if (k_max < 1 || k_max > d) throw std::runtime_error("select_k: k_max out of range");
    CostProfile profile;
    for (int k = 1; k <= k_max; ++k) {
        const Membership mem = memberships_at(dendrogram, k);
        CostEntry e;
        e.k = k;
        e.cost = cost_at_k(S, mem);
        e.bic_sum = e.cost * static_cast<double>(S.values.cols());
        profile.entries.push_back(e);
    }

    // The saturated end of the profile is an artifact: once cluster residuals
    // hit the variance floor the likelihood term collapses and every finer cut
    // undercuts every coarser one, so a global argmin would always sit at
    // k = d. Stop at the first upturn of the traversal instead, and fall back
    // to the global argmin only when the profile never turns.
    profile.selected_k = k_max;
    for (std::size_t i = 0; i + 1 < profile.entries.size(); ++i) {
        if (profile.entries[i].cost < profile.entries[i + 1].cost) {
            profile.selected_k = profile.entries[i].k;
            break;
        }
    }
    return profile;
}

CompressedEnsemble compress(const Ensemble& ensemble, const SignificanceMatrix& S,
                            const Dendrogram& dendrogram, int selected_k, Strategy strategy,
                            const Dataset* training) {
    const int d = ensemble.d();
    if (selected_k < 1 || selected_k > d) throw std::runtime_error("compress: k out of range");
    if (strategy == Strategy::centroid && training == nullptr)
        throw std::runtime_error("compress: centroid strategy requires training data");

    const Membership mem = d == 1 ? Membership{1, {0}} : memberships_at(dendrogram, selected_k);

    // clusters ordered by smallest member model index
    std::vector<std::vector<int>> clusters(static_cast<std::size_t>(selected_k));
    for (int i = 0; i < d; ++i)
        clusters[static_cast<std::size_t>(mem.labels[static_cast<std::size_t>(i)])].push_back(i);
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    CompressedEnsemble out;
    out.strategy = strategy;
    out.k = selected_k;
    out.family = ensemble.family;
    out.feature_names = ensemble.feature_names;

    for (const auto& members : clusters) {
        // medoid: minimize summed Euclidean distance in S-space, ties to the
        // lowest model index
        int medoid = members.front();
        double best_sum = std::numeric_limits<double>::infinity();
        for (int cand : members) {
            double s = 0.0;
            for (int other : members)
                s += (S.values.row(cand) - S.values.row(other)).norm();
            if (s < best_sum) {
                best_sum = s;
                medoid = cand;
            }
        }

        GlmFit rep;
        bool is_degenerate = false;
        bool was_truncated = false;
        if (strategy == Strategy::medoid) {
            rep = ensemble.models[static_cast<std::size_t>(medoid)];
        } else {
            // union of member terms, capped at n_obs - 2 by within-cluster
            // frequency (ties keep the lowest feature index)
            std::map<int, int> freq;
            for (int m : members)
                for (int t : ensemble.models[static_cast<std::size_t>(m)].terms) freq[t] += 1;
            std::vector<int> terms;
            for (const auto& [t, c] : freq) terms.push_back(t);
            const int cap = training->n_obs() - 2;
            if (static_cast<int>(terms.size()) > cap) {
                std::stable_sort(terms.begin(), terms.end(),
                                 [&](int a, int b) { return freq[a] > freq[b]; });
                terms.resize(static_cast<std::size_t>(std::max(cap, 0)));
                std::sort(terms.begin(), terms.end());
                was_truncated = true;
            }
            try {
                rep = fit_terms(training->features, training->outcome, terms, ensemble.family);
                if (!rep.converged)
                    throw std::runtime_error("centroid refit did not converge");
            } catch (const std::exception&) {
                rep = ensemble.models[static_cast<std::size_t>(medoid)];
                is_degenerate = true;
            }
        }
        out.representatives.push_back(std::move(rep));
        out.cluster_sizes.push_back(static_cast<int>(members.size()));
        out.provenance.push_back(members);
        out.degenerate.push_back(is_degenerate);
        out.truncated.push_back(was_truncated);
    }
    return out;
}

}  // namespace glmens
