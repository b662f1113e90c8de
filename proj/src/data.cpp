#include "glmens/data.hpp"

#include "glmens/rng.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace glmens {

namespace {

// RFC-4180 field splitter; handles quoted fields, "" escapes and newlines
// inside quotes. Returns one record per row.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t i = 0;
    auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(row);
        row.clear();
    };
    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // swallow; \n ends the row
        } else if (c == '\n') {
            end_row();
        } else {
            field.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (in_quotes) throw std::runtime_error("unterminated quoted field in CSV");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

Dataset Dataset::subset(const std::vector<int>& rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.outcome_kind = outcome_kind;
    out.label_mapping = label_mapping;
    out.features.resize(static_cast<int>(rows.size()), features.cols());
    out.outcome.resize(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<int>(i)) = features.row(rows[i]);
        out.outcome[static_cast<int>(i)] = outcome[rows[i]];
    }
    return out;
}

Dataset load_csv(const std::string& path, const std::string& outcome_column,
                 const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto rows = parse_csv(buf.str());
    if (rows.empty()) throw std::runtime_error("empty CSV: " + path);

    const auto& header = rows.front();
    int outcome_col = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == outcome_column) {
            outcome_col = static_cast<int>(j);
            break;
        }
    }
    if (outcome_col < 0)
        throw std::runtime_error("outcome column not found: " + outcome_column);

    std::unordered_set<std::string> seen_names;
    Dataset ds;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (static_cast<int>(j) == outcome_col) continue;
        if (!seen_names.insert(header[j]).second)
            throw std::runtime_error("duplicate feature name: " + header[j]);
        ds.feature_names.push_back(header[j]);
    }

    const int n = static_cast<int>(rows.size()) - 1;
    const int p = static_cast<int>(ds.feature_names.size());
    if (n < 1) throw std::runtime_error("CSV has no data rows: " + path);

    ds.features.resize(n, p);
    std::vector<std::string> outcome_raw(static_cast<std::size_t>(n));
    std::vector<std::pair<int, int>> missing;  // (row, feature col)

    for (int r = 0; r < n; ++r) {
        const auto& rec = rows[static_cast<std::size_t>(r) + 1];
        if (rec.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(r + 1) + " has " +
                                     std::to_string(rec.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        }
        int fj = 0;
        for (std::size_t j = 0; j < rec.size(); ++j) {
            if (static_cast<int>(j) == outcome_col) {
                outcome_raw[static_cast<std::size_t>(r)] = rec[j];
                continue;
            }
            double v;
            if (rec[j].empty()) {
                if (!options.impute_mean) {
                    throw std::runtime_error("missing value at row " + std::to_string(r + 1) +
                                             ", col " + std::to_string(j + 1));
                }
                missing.emplace_back(r, fj);
                ds.features(r, fj) = std::numeric_limits<double>::quiet_NaN();
            } else if (!parse_double(rec[j], v)) {
                throw std::runtime_error("non-numeric feature value \"" + rec[j] +
                                         "\" at row " + std::to_string(r + 1) + ", col " +
                                         std::to_string(j + 1));
            } else {
                ds.features(r, fj) = v;
            }
            ++fj;
        }
    }

    // mean-impute per feature column if requested
    if (!missing.empty()) {
        for (int j = 0; j < p; ++j) {
            double sum = 0.0;
            int count = 0;
            for (int r = 0; r < n; ++r) {
                if (!std::isnan(ds.features(r, j))) {
                    sum += ds.features(r, j);
                    ++count;
                }
            }
            if (count == 0) throw std::runtime_error("feature column " + std::to_string(j + 1) +
                                                     " is entirely missing");
            const double m = sum / count;
            for (int r = 0; r < n; ++r)
                if (std::isnan(ds.features(r, j))) ds.features(r, j) = m;
        }
    }

    // outcome: numeric {0,1} -> binary; other numeric -> continuous;
    // exactly two string labels -> binary, first seen -> 0
    ds.outcome.resize(n);
    bool all_numeric = true;
    std::vector<double> numeric(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        if (outcome_raw[static_cast<std::size_t>(r)].empty())
            throw std::runtime_error("missing outcome at row " + std::to_string(r + 1));
        if (!parse_double(outcome_raw[static_cast<std::size_t>(r)], numeric[static_cast<std::size_t>(r)])) {
            all_numeric = false;
            break;
        }
    }
    if (all_numeric) {
        bool zero_one = true;
        for (double v : numeric)
            if (v != 0.0 && v != 1.0) { zero_one = false; break; }
        for (int r = 0; r < n; ++r) ds.outcome[r] = numeric[static_cast<std::size_t>(r)];
        ds.outcome_kind = zero_one ? OutcomeKind::binary : OutcomeKind::continuous;
    } else {
        std::vector<std::string> labels;
        for (int r = 0; r < n; ++r) {
            const auto& s = outcome_raw[static_cast<std::size_t>(r)];
            auto it = std::find(labels.begin(), labels.end(), s);
            int idx;
            if (it == labels.end()) {
                if (labels.size() == 2)
                    throw std::runtime_error("outcome has more than two string labels");
                labels.push_back(s);
                idx = static_cast<int>(labels.size()) - 1;
            } else {
                idx = static_cast<int>(it - labels.begin());
            }
            ds.outcome[r] = idx;
        }
        if (labels.size() < 2) throw std::runtime_error("outcome has a single class");
        ds.label_mapping = labels;
        ds.outcome_kind = OutcomeKind::binary;
    }

    if (ds.outcome_kind == OutcomeKind::binary) {
        const int pos = static_cast<int>((ds.outcome.array() == 1.0).count());
        if (pos == 0 || pos == n)
            throw std::runtime_error("binary outcome has a single class");
    }
    return ds;
}

std::pair<Dataset, StandardizeRecord> standardize(const Dataset& dataset) {
    const int n = dataset.n_obs();
    const int p = dataset.n_features();
    StandardizeRecord rec;
    rec.means.resize(static_cast<std::size_t>(p));
    rec.scales.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        const double m = dataset.features.col(j).mean();
        double ss = (dataset.features.col(j).array() - m).square().sum();
        double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        rec.means[static_cast<std::size_t>(j)] = m;
        if (sd == 0.0) {
            rec.scales[static_cast<std::size_t>(j)] = 1.0;
            rec.constant_columns.push_back(j);
        } else {
            rec.scales[static_cast<std::size_t>(j)] = sd;
        }
    }
    Dataset out = dataset;
    out.features = apply_standardize(rec, dataset.features);
    return {std::move(out), std::move(rec)};
}

Eigen::MatrixXd apply_standardize(const StandardizeRecord& record, const Eigen::MatrixXd& features) {
    if (static_cast<std::size_t>(features.cols()) != record.means.size())
        throw std::runtime_error("standardize record does not match feature count");
    Eigen::MatrixXd out = features;
    for (int j = 0; j < features.cols(); ++j) {
        out.col(j) = (features.col(j).array() - record.means[static_cast<std::size_t>(j)]) /
                     record.scales[static_cast<std::size_t>(j)];
    }
    return out;
}

std::vector<int> FoldPlan::training_indices(int repeat, int fold, int n_obs) const {
    const auto& held = held_out.at(static_cast<std::size_t>(repeat)).at(static_cast<std::size_t>(fold));
    std::vector<bool> is_held(static_cast<std::size_t>(n_obs), false);
    for (int i : held) is_held[static_cast<std::size_t>(i)] = true;
    std::vector<int> train;
    train.reserve(static_cast<std::size_t>(n_obs) - held.size());
    for (int i = 0; i < n_obs; ++i)
        if (!is_held[static_cast<std::size_t>(i)]) train.push_back(i);
    return train;
}

FoldPlan make_folds(const Dataset& dataset, int n_folds, int n_repeats, std::uint64_t seed) {
    if (n_folds < 2) throw std::runtime_error("n_folds must be >= 2");
    if (n_repeats < 1) throw std::runtime_error("n_repeats must be >= 1");
    const int n = dataset.n_obs();

    // strata: both classes for binary outcomes, everything for continuous
    std::vector<std::vector<int>> strata;
    if (dataset.outcome_kind == OutcomeKind::binary) {
        strata.resize(2);
        for (int i = 0; i < n; ++i)
            strata[dataset.outcome[i] == 1.0 ? 1 : 0].push_back(i);
        for (const auto& s : strata) {
            if (static_cast<int>(s.size()) < n_folds)
                throw std::runtime_error("class too small to stratify into " +
                                         std::to_string(n_folds) + " folds");
        }
    } else {
        strata.resize(1);
        for (int i = 0; i < n; ++i) strata[0].push_back(i);
        if (n < n_folds) throw std::runtime_error("too few observations for n_folds");
    }

    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.n_repeats = n_repeats;
    plan.seed = seed;
    plan.held_out.resize(static_cast<std::size_t>(n_repeats));
    for (int r = 0; r < n_repeats; ++r) {
        auto& folds = plan.held_out[static_cast<std::size_t>(r)];
        folds.assign(static_cast<std::size_t>(n_folds), {});
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        for (const auto& stratum : strata) {
            std::vector<int> idx = stratum;
            for (std::size_t i = idx.size(); i > 1; --i)
                std::swap(idx[i - 1], idx[rng.below(static_cast<std::uint32_t>(i))]);
            for (std::size_t i = 0; i < idx.size(); ++i)
                folds[i % static_cast<std::size_t>(n_folds)].push_back(idx[i]);
        }
        for (auto& f : folds) std::sort(f.begin(), f.end());
    }
    return plan;
}

}  // namespace glmens
