#pragma once
// Ablation baselines. Each one produces a per-type score vector through the
// same Detector interface as the full method, so every comparison runs on
// identical folds, seeds and injections.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "geogap/eval.hpp"
#include "geogap/gap_scoring.hpp"

namespace geogap {

inline std::vector<double> baseline_random(std::size_t num_types, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(num_types);
    for (auto& v : s) v = u(rng);
    return s;
}

/// z-scored deficit of a target's per-type counts against per-project counts
/// (rows of `project_counts`, population spread).
inline std::vector<double> count_deficit(std::span<const double> target_counts, const Matrix& project_counts,
                                         double eps = kDefaultEpsilon) {
    const std::size_t K = project_counts.cols(), M = project_counts.rows();
    std::vector<double> out(K, 0.0);
    for (std::size_t t = 0; t < K; ++t) {
        double mean = 0.0;
        for (std::size_t j = 0; j < M; ++j) mean += project_counts(j, t);
        mean /= static_cast<double>(M);
        double var = 0.0;
        for (std::size_t j = 0; j < M; ++j) var += (project_counts(j, t) - mean) * (project_counts(j, t) - mean);
        out[t] = (mean - target_counts[t]) / (std::sqrt(var / static_cast<double>(M)) + eps);
    }
    return out;
}

/// Ground-truth label counts (evaluation-only oracle).
inline std::vector<double> baseline_gt_count(std::span<const int> target_labels, const Matrix& training_counts,
                                             double eps = kDefaultEpsilon) {
    std::vector<double> counts(training_counts.cols(), 0.0);
    for (int t : target_labels)
        if (t >= 0) counts[static_cast<std::size_t>(t)] += 1;
    return count_deficit(counts, training_counts, eps);
}

/// Nearest-centroid predicted counts, for target and training projects alike.
inline std::vector<double> baseline_classifier_count(std::span<const int> target_predicted, const CorpusArtifacts& art,
                                                     double eps = kDefaultEpsilon) {
    const std::size_t K = art.num_types();
    Matrix predicted(art.num_projects(), K);
    for (std::size_t i = 0; i < art.num_points(); ++i)
        predicted(static_cast<std::size_t>(art.point_project[i]), static_cast<std::size_t>(art.point_type[i])) += 1;
    std::vector<double> counts(K, 0.0);
    for (int t : target_predicted) counts[static_cast<std::size_t>(t)] += 1;
    return count_deficit(counts, predicted, eps);
}

/// Unbiased MMD^2 with a Gaussian kernel on cosine distance; the bandwidth is
/// the median pairwise distance of the pooled sample. nullopt when either
/// side has fewer than 2 points.
inline std::optional<double> mmd_squared(const Matrix& a, const Matrix& b) {
    const std::size_t m = a.rows(), n = b.rows();
    if (m < 2 || n < 2) return std::nullopt;
    auto row = [&](std::size_t i) { return i < m ? a.row(i) : b.row(i - m); };
    std::vector<double> pooled;
    for (std::size_t i = 0; i < m + n; ++i)
        for (std::size_t j = i + 1; j < m + n; ++j) pooled.push_back(cosine_distance(row(i), row(j)));
    std::nth_element(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(pooled.size() / 2), pooled.end());
    double median = pooled[pooled.size() / 2];
    if (pooled.size() % 2 == 0) {
        double lower = *std::max_element(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(pooled.size() / 2));
        median = 0.5 * (median + lower);
    }
    double bw = median > 0.0 ? median : 1.0;
    auto kern = [&](std::span<const double> x, std::span<const double> y) {
        double d = cosine_distance(x, y);
        return std::exp(-d * d / (2.0 * bw * bw));
    };
    double kxx = 0.0, kyy = 0.0, kxy = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) kxx += kern(a.row(i), a.row(j));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) kyy += kern(b.row(i), b.row(j));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) kxy += kern(a.row(i), b.row(j));
    auto dm = static_cast<double>(m), dn = static_cast<double>(n);
    return kxx / (dm * (dm - 1)) + kyy / (dn * (dn - 1)) - 2.0 * kxy / (dm * dn);
}

/// Raw per-type MMD^2 between the target's hard-assigned type-t points and
/// the corpus' labelled type-t points. Unscoreable types get 0.
inline TypeScores baseline_mmd(const Matrix& target, std::span<const int> target_types, const CorpusArtifacts& art) {
    const std::size_t K = art.num_types();
    TypeScores out{std::vector<double>(K, 0.0), std::vector<bool>(K, false)};
    for (std::size_t t = 0; t < K; ++t) {
        std::vector<std::size_t> ti, ci;
        for (std::size_t y = 0; y < target.rows(); ++y)
            if (target_types[y] == static_cast<int>(t)) ti.push_back(y);
        for (std::size_t x = 0; x < art.num_points(); ++x)
            if (art.point_label[x] == static_cast<int>(t)) ci.push_back(x);
        auto v = mmd_squared(target.select_rows(ti), art.points.select_rows(ci));
        if (v) {
            out.score[t] = *v;
            out.available[t] = true;
        }
    }
    return out;
}

/// Raw cosine distance between the target's and the corpus' type centroids;
/// a type missing from the target scores 2.
inline std::vector<double> baseline_centroid_distance(const Matrix& target, std::span<const int> target_types,
                                                      const TypeCentroids& corpus) {
    const std::size_t K = corpus.types();
    std::vector<int> labels(target_types.begin(), target_types.end());
    auto tc = compute_centroids(target, labels, K);
    std::vector<double> out(K, 0.0);
    for (std::size_t t = 0; t < K; ++t) {
        if (!corpus.present[t]) continue;
        out[t] = tc.present[t] ? cosine_distance(tc.mu.row(t), corpus.mu.row(t)) : kAbsentTypeDistance;
    }
    return out;
}

// ---------------------------------------------------------------- TF-IDF

/// Lowercased alphanumeric runs.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

/// TF-IDF with tf = 1 + ln(count), idf = ln((1 + n) / (1 + df)) + 1 and
/// L2-normalised rows. Vocabulary in lexicographic order.
class TfidfVectorizer {
public:
    void fit(const std::vector<std::string>& docs) {
        std::map<std::string, std::size_t> df;
        for (const auto& d : docs) {
            auto toks = tokenize(d);
            std::sort(toks.begin(), toks.end());
            toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
            for (auto& t : toks) ++df[t];
        }
        if (df.empty()) throw data_error("TF-IDF vocabulary is empty");
        vocab_.clear();
        idf_.clear();
        const auto n = static_cast<double>(docs.size());
        for (const auto& [term, count] : df) {
            vocab_.emplace(term, idf_.size());
            idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
        }
    }

    std::size_t vocabulary_size() const noexcept { return idf_.size(); }

    std::vector<double> transform(const std::string& doc) const {
        std::vector<double> v(idf_.size(), 0.0);
        std::map<std::size_t, double> tf;
        for (const auto& t : tokenize(doc))
            if (auto it = vocab_.find(t); it != vocab_.end()) tf[it->second] += 1.0;
        if (tf.empty()) throw data_error("document has no in-vocabulary tokens: '" + doc.substr(0, 40) + "'");
        for (auto [i, c] : tf) v[i] = (1.0 + std::log(c)) * idf_[i];
        return normalize(v);
    }

private:
    std::map<std::string, std::size_t> vocab_;
    std::vector<double> idf_;
};

/// Embedding store over TF-IDF vectors of `reqs`, fitted on those texts.
inline EmbeddingStore tfidf_store(const std::vector<Requirement>& reqs) {
    std::vector<std::string> texts;
    for (const auto& r : reqs) texts.push_back(r.text);
    TfidfVectorizer vec;
    vec.fit(texts);
    EmbeddingStore store(vec.vocabulary_size());
    for (const auto& r : reqs) store.insert(r.id, vec.transform(r.text));
    return store;
}

// ---------------------------------------------------------------- detectors

inline const std::vector<std::string>& baseline_names() {
    static const std::vector<std::string> names = {"random", "gt-count", "tfidf-knn", "classifier", "mmd", "centroid"};
    return names;
}

inline std::vector<int> labels_of(const std::vector<Requirement>& reqs) {
    std::vector<int> out;
    for (const auto& r : reqs) out.push_back(r.type ? *r.type : -1);
    return out;
}

/// Detector for a baseline by name.
inline Detector baseline_detector(const std::string& name) {
    if (name == "random")
        return [](const FoldContext& ctx, const std::vector<Requirement>&) {
            return baseline_random(ctx.artifacts.num_types(), derive_seed(ctx.seed, 0x52414E44));
        };
    if (name == "gt-count")
        return [](const FoldContext& ctx, const std::vector<Requirement>& target) {
            return baseline_gt_count(labels_of(target), ctx.artifacts.project_type_counts, ctx.config.scoring.eps);
        };
    if (name == "classifier")
        return [](const FoldContext& ctx, const std::vector<Requirement>& target) {
            auto v = ctx.store.gather(ids_of(target));
            return baseline_classifier_count(hard_types(v, ctx.artifacts.centroids), ctx.artifacts,
                                             ctx.config.scoring.eps);
        };
    if (name == "mmd")
        return [](const FoldContext& ctx, const std::vector<Requirement>& target) {
            auto v = ctx.store.gather(ids_of(target));
            return baseline_mmd(v, hard_types(v, ctx.artifacts.centroids), ctx.artifacts).score;
        };
    if (name == "centroid")
        return [](const FoldContext& ctx, const std::vector<Requirement>& target) {
            auto v = ctx.store.gather(ids_of(target));
            return baseline_centroid_distance(v, hard_types(v, ctx.artifacts.centroids), ctx.artifacts.centroids);
        };
    if (name == "tfidf-knn")
        return [](const FoldContext& ctx, const std::vector<Requirement>& target) {
            // Geometric-only pipeline on TF-IDF vectors of training + target.
            auto docs = ctx.dataset.of_projects(ctx.training);
            docs.insert(docs.end(), target.begin(), target.end());
            auto store = tfidf_store(docs);
            BuildOptions opts = ctx.config.build;
            opts.topics = nullptr;
            opts.seed = ctx.seed;
            auto art = build_artifacts(ctx.dataset, ctx.training, store, opts);
            return score_project(make_target(store, ids_of(target)), art, preset("geogap-g")).psi_geo;
        };
    std::string valid;
    for (const auto& n : baseline_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw usage_error("unknown baseline '" + name + "' (valid: " + valid + ")");
}

} // namespace geogap
