#pragma once
// Per-project-normalised coverage scores.
//
// Every corpus point x is measured against every training project j other
// than its own (phi(x; Y_j), mean distance to the k nearest points of j).
// Those per-project values, together with per-project type-restricted
// distances d_t(P_j) and Gibbs soft counts n_t(P_j), are kept raw so that
// any project weighting (uniform or similarity) can be applied at scoring
// time. A target is then z-scored against the weighted mean/spread and the
// three per-type signals are fused.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "geogap/corpus.hpp"
#include "geogap/embedding_store.hpp"
#include "geogap/matrix.hpp"
#include "geogap/prototype.hpp"
#include "geogap/topic.hpp"

namespace geogap {

inline constexpr double kScoreClip = 5.0;
inline constexpr double kDefaultEpsilon = 1e-6;
/// d_t of a target with no points of type t: the largest cosine distance.
inline constexpr double kAbsentTypeDistance = 2.0;

inline double clip_score(double z) { return clip(z, -kScoreClip, kScoreClip); }

inline bool is_missing(double v) { return std::isnan(v); }
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Mean distance from x to its k nearest rows of `target` (k truncated to
/// the number of rows).
inline double phi(std::span<const double> x, const Matrix& target, std::size_t k) {
    if (target.rows() == 0) throw data_error("coverage distance against an empty target");
    if (k == 0) throw data_error("k must be positive");
    k = std::min(k, target.rows());
    if (k == 1) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < target.rows(); ++i) best = std::min(best, cosine_distance(x, target.row(i)));
        return best;
    }
    std::vector<double> d(target.rows());
    for (std::size_t i = 0; i < target.rows(); ++i) d[i] = cosine_distance(x, target.row(i));
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += d[i];
    return s / static_cast<double>(k);
}

inline double phi(std::span<const double> x, const std::vector<std::string>& target_ids, std::size_t k,
                  const EmbeddingStore& store) {
    if (target_ids.empty()) throw data_error("coverage distance against an empty target");
    auto nn = store.knn(x, target_ids, k);
    double s = 0.0;
    for (double v : nn.distances) s += v;
    return s / static_cast<double>(nn.distances.size());
}

enum class WeightMode { Uniform, Similarity };

struct ProjectWeights {
    std::vector<double> w;
    WeightMode mode = WeightMode::Uniform;
};

/// Uniform weights (mode A) or a softmax of -d_cos(target, project)/tau
/// over project mean embeddings (mode B).
inline ProjectWeights project_weights(WeightMode mode, std::span<const double> target_centroid,
                                      const Matrix& training_centroids, double tau) {
    const std::size_t m = training_centroids.rows();
    if (m == 0) throw data_error("project weights need at least one training project");
    ProjectWeights pw{std::vector<double>(m, 1.0 / static_cast<double>(m)), mode};
    if (mode == WeightMode::Uniform) return pw;
    if (!(tau > 0.0)) throw usage_error("similarity weighting needs tau > 0");
    std::vector<double> dist(m);
    for (std::size_t j = 0; j < m; ++j) dist[j] = cosine_distance(target_centroid, training_centroids.row(j));
    pw.w = soft_from_distances(dist, std::vector<bool>(m, true), tau);
    return pw;
}

/// Everything fitted on the training projects that scoring a target needs.
struct CorpusArtifacts {
    Taxonomy taxonomy;
    std::size_t k = 1;

    std::vector<std::string> projects;
    Matrix project_means;               // M x d, unit mean embedding per project
    Matrix project_type_counts;         // M x K_t, labelled counts

    std::vector<std::string> point_ids;
    Matrix points;                      // N x d
    std::vector<int> point_project;     // index into projects
    std::vector<int> point_label;       // ground-truth type or -1
    std::vector<int> point_type;        // nearest-centroid type h(x)

    TypeCentroids centroids;
    double temperature = 0.0;
    double hard_accuracy = 0.0;         // nearest-centroid diagnostics on the corpus
    double macro_f1 = 0.0;
    TopicModel topic_model;
    Matrix point_topics;                // N x K_s

    // Raw per-project statistics; NaN where undefined.
    Matrix phi_by_project;              // N x M (own project is NaN)
    Matrix type_distance_by_project;    // K_t x M
    Matrix soft_count_by_project;       // K_t x M

    // Uniform-weight summaries of the above.
    std::vector<double> phi0, phi_sd;
    std::vector<double> type_distance_mean, type_distance_sd;
    std::vector<double> soft_count_mean, soft_count_sd;

    // Reverse coverage of every corpus point against the other projects.
    double novelty_mean = 0.0;
    double novelty_sd = 0.0;

    std::size_t num_types() const noexcept { return taxonomy.size(); }
    std::size_t num_topics() const noexcept { return point_topics.cols(); }
    std::size_t num_points() const noexcept { return points.rows(); }
    std::size_t num_projects() const noexcept { return projects.size(); }
};

struct WeightedStat {
    double mean = kMissing;
    double sd = kMissing;
    std::size_t count = 0;
};

/// Weighted mean and weighted population standard deviation over the
/// non-missing entries of `values`.
inline WeightedStat weighted_stat(std::span<const double> values, std::span<const double> w) {
    double sw = 0.0, s = 0.0;
    WeightedStat out;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (is_missing(values[j])) continue;
        sw += w[j];
        s += w[j] * values[j];
        ++out.count;
    }
    if (out.count == 0 || !(sw > 0.0)) return out;
    out.mean = s / sw;
    double v = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (is_missing(values[j])) continue;
        double d = values[j] - out.mean;
        v += w[j] * d * d;
    }
    out.sd = std::sqrt(v / sw);
    return out;
}

/// Baselines for one weighting of the training projects.
struct Baselines {
    std::vector<double> phi0, phi_sd;                           // per corpus point
    std::vector<double> type_distance_mean, type_distance_sd;   // per type, NaN if < 2 projects
    std::vector<double> soft_count_mean, soft_count_sd;         // per type
};

inline Baselines derive_baselines(const CorpusArtifacts& art, const ProjectWeights& weights) {
    const std::size_t n = art.num_points(), K = art.num_types();
    if (weights.w.size() != art.num_projects()) throw data_error("weight vector does not match training projects");
    Baselines b;
    b.phi0.resize(n);
    b.phi_sd.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto st = weighted_stat(art.phi_by_project.row(i), weights.w);
        b.phi0[i] = st.mean;
        b.phi_sd[i] = st.sd;
    }
    b.type_distance_mean.assign(K, kMissing);
    b.type_distance_sd.assign(K, kMissing);
    b.soft_count_mean.assign(K, kMissing);
    b.soft_count_sd.assign(K, kMissing);
    for (std::size_t t = 0; t < K; ++t) {
        auto dt = weighted_stat(art.type_distance_by_project.row(t), weights.w);
        if (dt.count >= 2) {
            b.type_distance_mean[t] = dt.mean;
            b.type_distance_sd[t] = dt.sd;
        }
        auto nt = weighted_stat(art.soft_count_by_project.row(t), weights.w);
        if (nt.count >= 2 && art.centroids.present[t]) {
            b.soft_count_mean[t] = nt.mean;
            b.soft_count_sd[t] = nt.sd;
        }
    }
    return b;
}

namespace detail {

/// d_t: mean over `reference` rows of the min distance to `candidates` rows.
inline double type_distance(const Matrix& points, std::span<const std::size_t> reference,
                            const Matrix& cand_points, std::span<const std::size_t> candidates) {
    if (reference.empty()) return kMissing;
    if (candidates.empty()) return kAbsentTypeDistance;
    double s = 0.0;
    for (auto x : reference) {
        double best = std::numeric_limits<double>::infinity();
        for (auto y : candidates) best = std::min(best, cosine_distance(points.row(x), cand_points.row(y)));
        s += best;
    }
    return s / static_cast<double>(reference.size());
}

} // namespace detail

/// Input to fit_baselines in index form: corpus rows with their project,
/// ground-truth label (or -1) and topic distribution.
struct CorpusPoints {
    std::vector<std::string> projects;
    std::vector<std::string> ids;
    Matrix points;
    std::vector<int> project;
    std::vector<int> label;
    Matrix topics;
};

inline CorpusArtifacts fit_baselines(CorpusPoints corpus, std::size_t k, const Taxonomy& taxonomy,
                                     const TypeCentroids& centroids, double temperature, TopicModel topic_model) {
    const std::size_t n = corpus.points.rows(), M = corpus.projects.size(), K = taxonomy.size();
    if (M < 2) throw data_error("baselines need at least 2 training projects, found " + std::to_string(M));
    if (k == 0) throw data_error("k must be positive");
    if (corpus.topics.rows() != n) throw data_error("topic distribution rows do not match corpus points");
    if (centroids.types() != K) throw data_error("centroids do not match the taxonomy");

    CorpusArtifacts art;
    art.taxonomy = taxonomy;
    art.k = k;
    art.projects = std::move(corpus.projects);
    art.point_ids = std::move(corpus.ids);
    art.points = std::move(corpus.points);
    art.point_project = std::move(corpus.project);
    art.point_label = std::move(corpus.label);
    art.centroids = centroids;
    art.temperature = temperature;
    art.topic_model = std::move(topic_model);
    art.point_topics = std::move(corpus.topics);

    const std::size_t d = art.points.cols();
    std::vector<std::vector<std::size_t>> members(M);
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(art.point_project[i])].push_back(i);
    for (std::size_t j = 0; j < M; ++j)
        if (members[j].empty()) throw data_error("training project '" + art.projects[j] + "' has no points");

    art.point_type.resize(n);
    for (std::size_t i = 0; i < n; ++i) art.point_type[i] = hard_assign(art.points.row(i), centroids);

    art.project_means = Matrix(M, d);
    art.project_type_counts = Matrix(M, K);
    for (std::size_t j = 0; j < M; ++j) {
        auto dst = art.project_means.row(j);
        for (auto i : members[j]) {
            auto src = art.points.row(i);
            for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
            if (art.point_label[i] >= 0) art.project_type_counts(j, static_cast<std::size_t>(art.point_label[i])) += 1;
        }
        double nn = l2_norm(dst);
        if (nn > 1e-12)
            for (auto& v : dst) v /= nn;
    }

    // phi(x; Y_j) for every other project, plus reverse-coverage minima.
    art.phi_by_project = Matrix(n, M, kMissing);
    std::vector<double> reverse(n, std::numeric_limits<double>::infinity());
    std::vector<double> buf;
    for (std::size_t i = 0; i < n; ++i) {
        auto x = art.points.row(i);
        for (std::size_t j = 0; j < M; ++j) {
            if (static_cast<int>(j) == art.point_project[i]) continue;
            buf.clear();
            for (auto y : members[j]) buf.push_back(cosine_distance(x, art.points.row(y)));
            std::size_t kk = std::min(k, buf.size());
            std::partial_sort(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(kk), buf.end());
            double s = 0.0;
            for (std::size_t q = 0; q < kk; ++q) s += buf[q];
            art.phi_by_project(i, j) = s / static_cast<double>(kk);
            reverse[i] = std::min(reverse[i], buf[0]);
        }
    }
    {
        double s = 0.0;
        for (double v : reverse) s += v;
        art.novelty_mean = s / static_cast<double>(n);
        double v2 = 0.0;
        for (double v : reverse) v2 += (v - art.novelty_mean) * (v - art.novelty_mean);
        art.novelty_sd = std::sqrt(v2 / static_cast<double>(n));
    }

    // Type-restricted distance of each project against the rest of the corpus,
    // and each project's soft count.
    std::vector<std::vector<std::size_t>> labelled(K);
    for (std::size_t i = 0; i < n; ++i)
        if (art.point_label[i] >= 0) labelled[static_cast<std::size_t>(art.point_label[i])].push_back(i);
    art.type_distance_by_project = Matrix(K, M, kMissing);
    art.soft_count_by_project = Matrix(K, M, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        for (std::size_t t = 0; t < K; ++t) {
            std::vector<std::size_t> ref, cand;
            for (auto x : labelled[t])
                if (art.point_project[x] != static_cast<int>(j)) ref.push_back(x);
            for (auto y : members[j])
                if (art.point_type[y] == static_cast<int>(t)) cand.push_back(y);
            if (ref.empty() || cand.empty()) continue;
            art.type_distance_by_project(t, j) = detail::type_distance(art.points, ref, art.points, cand);
        }
        for (auto y : members[j]) {
            auto p = soft_assign(art.points.row(y), centroids, temperature);
            for (std::size_t t = 0; t < K; ++t) art.soft_count_by_project(t, j) += p[t];
        }
    }

    auto uniform = derive_baselines(art, ProjectWeights{std::vector<double>(M, 1.0 / static_cast<double>(M))});
    art.phi0 = std::move(uniform.phi0);
    art.phi_sd = std::move(uniform.phi_sd);
    art.type_distance_mean = std::move(uniform.type_distance_mean);
    art.type_distance_sd = std::move(uniform.type_distance_sd);
    art.soft_count_mean = std::move(uniform.soft_count_mean);
    art.soft_count_sd = std::move(uniform.soft_count_sd);
    return art;
}

/// Store/partition front end: every training requirement must be embedded
/// and have a topic row.
inline CorpusArtifacts fit_baselines(const Partition& training, std::size_t k, const EmbeddingStore& store,
                                     const Taxonomy& taxonomy, const TypeCentroids& centroids, double temperature,
                                     const TopicModel& topic_model, const TopicDistribution& topics) {
    CorpusPoints cp;
    cp.points = Matrix(0, store.dim());
    cp.topics = Matrix(0, topics.num_topics());
    for (std::size_t j = 0; j < training.size(); ++j) {
        cp.projects.push_back(training[j].first);
        for (const auto& r : training[j].second) {
            cp.ids.push_back(r.id);
            cp.points.append_row(store.vector(r.id));
            cp.project.push_back(static_cast<int>(j));
            cp.label.push_back(r.type ? *r.type : -1);
            cp.topics.append_row(topics.of(r.id));
        }
    }
    return fit_baselines(std::move(cp), k, taxonomy, centroids, temperature, topic_model);
}

/// A project to be scored: unit vectors and, when the topic model cannot
/// produce them (ingested mode), externally supplied topic rows.
struct TargetProject {
    std::vector<std::string> ids;
    Matrix vectors;
    std::optional<Matrix> topics;

    std::size_t size() const noexcept { return vectors.rows(); }
};

inline TargetProject make_target(const EmbeddingStore& store, const std::vector<std::string>& ids,
                                 const TopicDistribution* topics = nullptr) {
    TargetProject t{ids, store.gather(ids), std::nullopt};
    if (store.size() && t.vectors.cols() == 0) t.vectors = Matrix(0, store.dim());
    if (topics) t.topics = topics->gather(ids);
    return t;
}

inline double psi_point(std::size_t x_index, const Matrix& target, const CorpusArtifacts& art,
                        const Baselines& base, double eps) {
    double phi_star = phi(art.points.row(x_index), target, art.k);
    double mean = base.phi0[x_index];
    if (is_missing(mean)) return 0.0;
    return clip_score((phi_star - mean) / (base.phi_sd[x_index] + eps));
}

inline double psi_point(std::size_t x_index, const Matrix& target, const CorpusArtifacts& art, double eps) {
    if (target.rows() == 0) throw data_error("coverage distance against an empty target");
    double phi_star = phi(art.points.row(x_index), target, art.k);
    if (is_missing(art.phi0[x_index])) return 0.0;
    return clip_score((phi_star - art.phi0[x_index]) / (art.phi_sd[x_index] + eps));
}

struct TypeScores {
    std::vector<double> score;
    std::vector<bool> available;
};

inline std::vector<int> hard_types(const Matrix& vectors, const TypeCentroids& c) {
    std::vector<int> out(vectors.rows());
    for (std::size_t i = 0; i < vectors.rows(); ++i) out[i] = hard_assign(vectors.row(i), c);
    return out;
}

/// Type-restricted coverage of the target, z-scored. Target type membership
/// comes from nearest-centroid assignment.
inline TypeScores psi_type_scores(const Matrix& target, std::span<const int> target_types, const CorpusArtifacts& art,
                                  const Baselines& base, double eps) {
    const std::size_t K = art.num_types();
    TypeScores out{std::vector<double>(K, 0.0), std::vector<bool>(K, false)};
    std::vector<std::vector<std::size_t>> ref(K), cand(K);
    for (std::size_t i = 0; i < art.num_points(); ++i)
        if (art.point_label[i] >= 0) ref[static_cast<std::size_t>(art.point_label[i])].push_back(i);
    for (std::size_t y = 0; y < target.rows(); ++y) cand[static_cast<std::size_t>(target_types[y])].push_back(y);
    for (std::size_t t = 0; t < K; ++t) {
        if (ref[t].empty() || is_missing(base.type_distance_mean[t])) continue;
        double dt = detail::type_distance(art.points, ref[t], target, cand[t]);
        out.score[t] = clip_score((dt - base.type_distance_mean[t]) / (base.type_distance_sd[t] + eps));
        out.available[t] = true;
    }
    return out;
}

/// Gibbs soft count of each type over the rows of `vectors`.
inline std::vector<double> soft_counts(const Matrix& vectors, const TypeCentroids& c, double temperature) {
    std::vector<double> n(c.types(), 0.0);
    for (std::size_t y = 0; y < vectors.rows(); ++y) {
        auto p = soft_assign(vectors.row(y), c, temperature);
        for (std::size_t t = 0; t < n.size(); ++t) n[t] += p[t];
    }
    return n;
}

/// z-score of the soft-count deficit (corpus mean minus target).
inline TypeScores psi_pop_scores(const Matrix& target, const CorpusArtifacts& art, const Baselines& base, double eps) {
    const std::size_t K = art.num_types();
    TypeScores out{std::vector<double>(K, 0.0), std::vector<bool>(K, false)};
    auto counts = soft_counts(target, art.centroids, art.temperature);
    for (std::size_t t = 0; t < K; ++t) {
        if (is_missing(base.soft_count_mean[t])) continue;
        out.score[t] = clip_score((base.soft_count_mean[t] - counts[t]) / (base.soft_count_sd[t] + eps));
        out.available[t] = true;
    }
    return out;
}

struct CellAggregate {
    Matrix psi_cell;               // K_t x K_s
    std::vector<double> psi_geo;   // K_t
    Matrix mass;                   // W: corpus soft topic mass per cell
};

/// Soft-weighted mean of per-point scores per (type, topic) cell, and its
/// mass-weighted marginal per type. Empty cells score 0 with mass 0.
inline CellAggregate cell_aggregate(std::span<const double> psi, std::span<const int> types, const Matrix& pi,
                                    std::size_t num_types) {
    const std::size_t S = pi.cols();
    CellAggregate out{Matrix(num_types, S), std::vector<double>(num_types, 0.0), Matrix(num_types, S)};
    Matrix num(num_types, S);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        auto t = static_cast<std::size_t>(types[i]);
        auto row = pi.row(i);
        for (std::size_t s = 0; s < S; ++s) {
            out.mass(t, s) += row[s];
            num(t, s) += row[s] * psi[i];
        }
    }
    for (std::size_t t = 0; t < num_types; ++t) {
        double wsum = 0.0, acc = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            double w = out.mass(t, s);
            if (w > 0.0) out.psi_cell(t, s) = clip_score(num(t, s) / w);
            wsum += w;
            acc += w * out.psi_cell(t, s);
        }
        out.psi_geo[t] = wsum > 0.0 ? clip_score(acc / wsum) : 0.0;
    }
    return out;
}

/// Target soft mass per (hard type, topic) cell; sums to the target size.
inline Matrix occupancy(std::span<const int> target_types, const Matrix& target_pi, std::size_t num_types) {
    Matrix m(num_types, target_pi.cols());
    for (std::size_t y = 0; y < target_pi.rows(); ++y) {
        auto row = target_pi.row(y);
        for (std::size_t s = 0; s < row.size(); ++s) m(static_cast<std::size_t>(target_types[y]), s) += row[s];
    }
    return m;
}

inline std::vector<double> fuse(std::span<const double> geo, std::span<const double> type,
                                std::span<const double> pop, double beta, double gamma) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw usage_error("beta must lie in [0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw usage_error("gamma must lie in [0, 1]");
    if (geo.size() != type.size() || geo.size() != pop.size()) throw data_error("score vectors differ in length");
    std::vector<double> out(geo.size());
    for (std::size_t t = 0; t < geo.size(); ++t)
        out[t] = clip_score((1.0 - gamma) * (beta * geo[t] + (1.0 - beta) * type[t]) + gamma * pop[t]);
    return out;
}

struct ScoringConfig {
    double beta = 0.7;
    double gamma = 0.1;
    double eps = kDefaultEpsilon;
    WeightMode mode = WeightMode::Uniform;
    double tau = 0.1;
};

struct GapResult {
    std::vector<double> psi_geo, psi_type, psi_pop, psi_fused;
    std::vector<bool> type_available, pop_available;
    Matrix psi_cell;
    Matrix cell_mass;
    Matrix occupancy;
    std::vector<double> point_psi;
    std::vector<int> target_types;
    ProjectWeights weights;
    std::size_t k = 1;
    ScoringConfig config;
    std::size_t target_size = 0;
};

inline std::vector<double> mean_direction(const Matrix& vectors) {
    std::vector<double> m(vectors.cols(), 0.0);
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        auto r = vectors.row(i);
        for (std::size_t c = 0; c < m.size(); ++c) m[c] += r[c];
    }
    double n = l2_norm(m);
    if (n > 1e-12)
        for (auto& v : m) v /= n;
    return m;
}

inline GapResult score_project(const TargetProject& target, const CorpusArtifacts& art, const ScoringConfig& cfg) {
    if (target.size() == 0) throw data_error("cannot score an empty target project");
    if (target.vectors.cols() != art.points.cols())
        throw data_error("target embedding dimension " + std::to_string(target.vectors.cols()) +
                         " does not match corpus dimension " + std::to_string(art.points.cols()));
    GapResult r;
    r.config = cfg;
    r.k = art.k;
    r.target_size = target.size();
    r.weights = project_weights(cfg.mode, mean_direction(target.vectors), art.project_means, cfg.tau);
    auto base = derive_baselines(art, r.weights);

    r.point_psi.resize(art.num_points());
    for (std::size_t i = 0; i < art.num_points(); ++i) r.point_psi[i] = psi_point(i, target.vectors, art, base, cfg.eps);
    auto cells = cell_aggregate(r.point_psi, art.point_type, art.point_topics, art.num_types());
    r.psi_cell = std::move(cells.psi_cell);
    r.cell_mass = std::move(cells.mass);
    r.psi_geo = std::move(cells.psi_geo);

    r.target_types = hard_types(target.vectors, art.centroids);
    auto ty = psi_type_scores(target.vectors, r.target_types, art, base, cfg.eps);
    auto pop = psi_pop_scores(target.vectors, art, base, cfg.eps);
    r.psi_type = std::move(ty.score);
    r.type_available = std::move(ty.available);
    r.psi_pop = std::move(pop.score);
    r.pop_available = std::move(pop.available);
    r.psi_fused = fuse(r.psi_geo, r.psi_type, r.psi_pop, cfg.beta, cfg.gamma);

    Matrix target_pi = target.topics ? *target.topics : soft_topics(target.vectors, art.topic_model);
    if (target_pi.rows() != target.size() || target_pi.cols() != art.num_topics())
        throw data_error("target topic rows do not match the target or the topic model");
    r.occupancy = occupancy(r.target_types, target_pi, art.num_types());
    return r;
}

/// Type indices ordered by descending score; ties keep taxonomy order.
inline std::vector<int> rank_descending(std::span<const double> scores) {
    std::vector<int> idx(scores.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    });
    return idx;
}

} // namespace geogap
