#pragma once
// Corpus construction: centroids -> temperature -> topics -> baselines.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geogap/corpus.hpp"
#include "geogap/embedding_store.hpp"
#include "geogap/gap_scoring.hpp"
#include "geogap/prototype.hpp"
#include "geogap/topic.hpp"

namespace geogap {

struct BuildOptions {
    std::size_t k = 1;
    std::size_t num_topics = kDefaultTopicCount;
    std::uint64_t seed = 0;
    std::optional<double> topic_temperature;   // defaults to the calibrated temperature
    std::optional<double> target_confidence;   // defaults to the corpus hard accuracy
    std::optional<double> fixed_temperature;   // skip calibration entirely
    CalibrationOptions calibration;
    const IngestedTopics* topics = nullptr;    // authoritative when set
};

/// Confidence target the temperature is calibrated to: the hard accuracy,
/// pulled strictly inside (1/K, 1).
inline double calibration_target(double accuracy, std::size_t present_types) {
    double lo = 1.0 / static_cast<double>(present_types) + 1e-3;
    return clip(accuracy, lo, 0.999);
}

/// Calibrate, falling back to the nearest bracket end when the target lies
/// outside the achievable range (e.g. a corpus whose clusters never overlap).
inline double calibrate_or_clamp(const Matrix& points, const TypeCentroids& c, double target,
                                 const CalibrationOptions& opts) {
    try {
        return calibrate_temperature(points, c, target, opts);
    } catch (const Error&) {
        auto dists = centroid_distance_matrix(points, c);
        double m_lo = mean_max_confidence(dists, c.present, opts.t_min);
        return target > m_lo ? opts.t_min : opts.t_max;
    }
}

/// Fit corpus artifacts on `training` projects of `dataset`.
inline CorpusArtifacts build_artifacts(const Dataset& dataset, const std::vector<std::string>& training,
                                       const EmbeddingStore& store, const BuildOptions& opts) {
    const auto& tax = dataset.taxonomy();
    Partition part;
    {
        auto full = project_partition(dataset);
        for (const auto& pid : training) {
            auto it = std::find_if(full.begin(), full.end(), [&](const auto& p) { return p.first == pid; });
            if (it == full.end()) throw data_error("unknown training project '" + pid + "'");
            part.push_back(*it);
        }
    }
    std::vector<std::string> ids;
    Matrix points(0, store.dim());
    std::vector<int> labels;
    for (const auto& [pid, reqs] : part)
        for (const auto& r : reqs) {
            ids.push_back(r.id);
            points.append_row(store.vector(r.id));
            labels.push_back(r.type ? *r.type : -1);
        }
    auto centroids = compute_centroids(points, labels, tax.size(), tax.names());
    if (centroids.present_count() < 2) throw data_error("corpus needs labelled points of at least 2 types");
    auto report = hard_accuracy(points, labels, centroids);

    double temperature;
    if (opts.fixed_temperature) {
        temperature = *opts.fixed_temperature;
    } else {
        double target = opts.target_confidence.value_or(calibration_target(report.accuracy, centroids.present_count()));
        temperature = calibrate_or_clamp(points, centroids, target, opts.calibration);
    }

    TopicModel tm;
    TopicDistribution dist;
    if (opts.topics) {
        tm = opts.topics->model;
        dist = TopicDistribution(tm.num_topics);
        for (const auto& id : ids) dist.add(id, opts.topics->distribution.of(id));
    } else {
        std::size_t ks = std::min(opts.num_topics, ids.size());
        tm = fit_fallback_topics(points, ks, opts.seed, opts.topic_temperature.value_or(temperature));
        dist = TopicDistribution(tm.num_topics);
        auto pi = soft_topics(points, tm);
        for (std::size_t i = 0; i < ids.size(); ++i) dist.add(ids[i], pi.row(i));
    }

    auto art = fit_baselines(part, opts.k, store, tax, centroids, temperature, tm, dist);
    art.hard_accuracy = report.accuracy;
    art.macro_f1 = report.macro_f1;
    return art;
}

} // namespace geogap
