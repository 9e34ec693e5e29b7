#pragma once
// Soft topic distributions: ingestion of externally computed simplex rows
// and a spherical k-means fallback with Gibbs soft membership.
//
// Topic file (JSONL): first line {"K_s": n, "labels": [...]}, then one
// {"id": ..., "pi": [...]} object per requirement.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "geogap/embedding_store.hpp"
#include "geogap/matrix.hpp"
#include "geogap/prototype.hpp"

namespace geogap {

inline constexpr std::size_t kDefaultTopicCount = 8;
inline constexpr int kMaxKMeansIterations = 100;

struct TopicModel {
    std::size_t num_topics = 0;
    std::optional<Matrix> centroids;  // fallback mode only
    double temperature = 0.0;         // fallback mode only
    std::vector<std::string> labels;

    bool ingested() const noexcept { return !centroids.has_value(); }
};

class TopicDistribution {
public:
    TopicDistribution() = default;
    explicit TopicDistribution(std::size_t num_topics) : pi_(0, num_topics) {}

    std::size_t num_topics() const noexcept { return pi_.cols(); }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const Matrix& matrix() const noexcept { return pi_; }

    void add(const std::string& id, std::span<const double> pi) {
        if (index_.contains(id)) throw data_error("duplicate topic row for id '" + id + "'");
        index_.emplace(id, ids_.size());
        ids_.push_back(id);
        pi_.append_row(pi);
    }

    bool contains(const std::string& id) const { return index_.contains(id); }

    std::span<const double> of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw data_error("no topic distribution for id '" + id + "'");
        return pi_.row(it->second);
    }

    /// Rows for `ids`, in order.
    Matrix gather(const std::vector<std::string>& ids) const {
        Matrix out(ids.size(), num_topics());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            auto src = of(ids[i]);
            std::copy(src.begin(), src.end(), out.row(i).begin());
        }
        return out;
    }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    Matrix pi_;
};

/// Validate one simplex row in place: non-negative, sum within 1e-3 of 1
/// (renormalised), otherwise an error naming `id`.
inline void validate_simplex(std::vector<double>& pi, const std::string& id) {
    double s = 0.0;
    for (double v : pi) {
        if (!std::isfinite(v) || v < 0.0) throw data_error("topic row for '" + id + "' has a negative or non-finite entry");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-3)
        throw data_error("topic row for '" + id + "' sums to " + std::to_string(s) + " (tolerance 1e-3)");
    for (auto& v : pi) v /= s;
}

struct IngestedTopics {
    TopicModel model;
    TopicDistribution distribution;
};

inline IngestedTopics read_topics(std::istream& in, const std::vector<std::string>& expected_ids) {
    IngestedTopics out;
    std::string line;
    bool header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw data_error("topic file line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!header) {
            if (!j.contains("K_s")) throw data_error("topic file must start with a header line carrying K_s");
            auto ks = j["K_s"].get<long long>();
            if (ks < 1) throw data_error("topic file: K_s must be >= 1");
            out.model.num_topics = static_cast<std::size_t>(ks);
            if (j.contains("labels")) out.model.labels = j["labels"].get<std::vector<std::string>>();
            if (out.model.labels.empty())
                for (std::size_t s = 0; s < out.model.num_topics; ++s) out.model.labels.push_back("topic " + std::to_string(s));
            if (out.model.labels.size() != out.model.num_topics)
                throw data_error("topic file: label count does not match K_s");
            out.distribution = TopicDistribution(out.model.num_topics);
            header = true;
            continue;
        }
        if (!j.contains("id") || !j.contains("pi"))
            throw data_error("topic file line " + std::to_string(lineno) + ": expected fields 'id' and 'pi'");
        std::string id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
        auto pi = j["pi"].get<std::vector<double>>();
        if (pi.size() != out.model.num_topics)
            throw data_error("topic row for '" + id + "' has " + std::to_string(pi.size()) + " entries, expected " +
                             std::to_string(out.model.num_topics));
        validate_simplex(pi, id);
        out.distribution.add(id, pi);
    }
    if (!header) throw data_error("topic file is empty");
    for (const auto& id : expected_ids)
        if (!out.distribution.contains(id)) throw data_error("topic file has no distribution for id '" + id + "'");
    return out;
}

inline IngestedTopics ingest_topics(const std::string& path, const std::vector<std::string>& expected_ids) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open topic file '" + path + "'");
    return read_topics(in, expected_ids);
}

inline void write_topics(std::ostream& out, const TopicModel& model, const TopicDistribution& dist) {
    out << nlohmann::json{{"K_s", model.num_topics}, {"labels", model.labels}}.dump() << '\n';
    for (std::size_t i = 0; i < dist.size(); ++i) {
        auto row = dist.matrix().row(i);
        out << nlohmann::json{{"id", dist.ids()[i]}, {"pi", std::vector<double>(row.begin(), row.end())}}.dump()
            << '\n';
    }
}

/// Spherical k-means: k-means++ seeding on squared cosine distance, then
/// assign / renormalised-mean updates until the assignment is a fixpoint or
/// 100 iterations. Empty clusters are reseeded from the point farthest from
/// its current centroid.
inline TopicModel fit_fallback_topics(const Matrix& points, std::size_t num_topics, std::uint64_t seed,
                                      double temperature) {
    const std::size_t n = points.rows();
    if (num_topics == 0) throw data_error("number of topics must be positive");
    if (num_topics > n)
        throw data_error("cannot fit " + std::to_string(num_topics) + " topics to " + std::to_string(n) + " points");
    std::mt19937_64 rng(seed);
    const std::size_t d = points.cols();

    std::vector<std::size_t> chosen;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    chosen.push_back(pick(rng));
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < num_topics) {
        auto last = points.row(chosen.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dist = cosine_distance(points.row(i), last);
            nearest[i] = std::min(nearest[i], dist * dist);
            total += nearest[i];
        }
        std::size_t next = n;
        if (total > 0.0) {
            double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (nearest[i] <= 0.0) continue;
                acc += nearest[i];
                if (acc >= r) {
                    next = i;
                    break;
                }
            }
            if (next == n)  // rounding at the tail
                for (std::size_t i = n; i-- > 0;)
                    if (nearest[i] > 0.0) {
                        next = i;
                        break;
                    }
        } else {
            // All remaining points coincide with a chosen one.
            for (std::size_t i = 0; i < n; ++i)
                if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
                    next = i;
                    break;
                }
        }
        chosen.push_back(next);
    }

    Matrix centroids = points.select_rows(chosen);
    std::vector<std::size_t> assign(n, num_topics);
    for (int iter = 0; iter < kMaxKMeansIterations; ++iter) {
        bool changed = false;
        std::vector<double> own(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < num_topics; ++c) {
                double dist = cosine_distance(points.row(i), centroids.row(c));
                if (dist < bd) {
                    bd = dist;
                    best = c;
                }
            }
            own[i] = bd;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Matrix sums(num_topics, d);
        std::vector<std::size_t> counts(num_topics, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto dst = sums.row(assign[i]);
            auto src = points.row(i);
            for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
            ++counts[assign[i]];
        }
        std::vector<bool> taken(n, false);
        for (std::size_t c = 0; c < num_topics; ++c) {
            auto dst = centroids.row(c);
            double norm = l2_norm(sums.row(c));
            if (counts[c] > 0 && norm > 1e-12) {
                auto src = sums.row(c);
                for (std::size_t j = 0; j < d; ++j) dst[j] = src[j] / norm;
                continue;
            }
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i] && own[i] > fd) {
                    fd = own[i];
                    far = i;
                }
            taken[far] = true;
            auto src = points.row(far);
            std::copy(src.begin(), src.end(), dst.begin());
            own[far] = 0.0;
        }
    }

    TopicModel model;
    model.num_topics = num_topics;
    model.centroids = std::move(centroids);
    model.temperature = temperature;
    for (std::size_t s = 0; s < num_topics; ++s) model.labels.push_back("topic " + std::to_string(s));
    return model;
}

inline TopicModel fit_fallback_topics(const EmbeddingStore& store, const std::vector<std::string>& ids,
                                      std::size_t num_topics, std::uint64_t seed, double temperature) {
    return fit_fallback_topics(store.gather(ids), num_topics, seed, temperature);
}

/// Gibbs membership of one vector in every topic.
inline std::vector<double> topic_membership(std::span<const double> x, const TopicModel& tm) {
    if (!tm.centroids) throw data_error("topic model has no centroids (ingested mode)");
    std::vector<double> dist(tm.num_topics);
    for (std::size_t s = 0; s < tm.num_topics; ++s) dist[s] = cosine_distance(x, tm.centroids->row(s));
    return soft_from_distances(dist, std::vector<bool>(tm.num_topics, true), tm.temperature);
}

inline Matrix soft_topics(const Matrix& points, const TopicModel& tm) {
    Matrix out(points.rows(), tm.num_topics);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto p = topic_membership(points.row(i), tm);
        std::copy(p.begin(), p.end(), out.row(i).begin());
    }
    return out;
}

inline TopicDistribution soft_topics(const EmbeddingStore& store, const std::vector<std::string>& ids,
                                     const TopicModel& tm) {
    TopicDistribution out(tm.num_topics);
    for (const auto& id : ids) out.add(id, topic_membership(store.vector(id), tm));
    return out;
}

} // namespace geogap
