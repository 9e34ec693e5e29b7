#pragma once
// Type centroids on the unit sphere, nearest-centroid (hard) assignment,
// Gibbs soft assignment and the temperature calibration that ties soft
// confidence to hard accuracy.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geogap/corpus.hpp"
#include "geogap/embedding_store.hpp"
#include "geogap/matrix.hpp"

namespace geogap {

struct TypeCentroids {
    Matrix mu;                   // K_t x d, zero rows for absent types
    std::vector<bool> present;   // a type is present when it had >= 1 labelled point

    std::size_t types() const noexcept { return mu.rows(); }
    std::size_t dim() const noexcept { return mu.cols(); }
    std::size_t present_count() const {
        return static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
    }

    friend bool operator==(const TypeCentroids&, const TypeCentroids&) = default;
};

/// Renormalised mean embedding per type. `labels[i]` is the type of row i
/// of `points`, or -1 for unlabelled rows, which are ignored.
inline TypeCentroids compute_centroids(const Matrix& points, std::span<const int> labels,
                                       std::size_t num_types, std::span<const std::string> type_names = {}) {
    TypeCentroids c{Matrix(num_types, points.cols()), std::vector<bool>(num_types, false)};
    for (std::size_t i = 0; i < points.rows(); ++i) {
        int t = labels[i];
        if (t < 0) continue;
        auto dst = c.mu.row(static_cast<std::size_t>(t));
        auto src = points.row(i);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        c.present[static_cast<std::size_t>(t)] = true;
    }
    for (std::size_t t = 0; t < num_types; ++t) {
        if (!c.present[t]) continue;
        auto row = c.mu.row(t);
        double n = l2_norm(row);
        if (n < 1e-12)
            throw data_error("centroid of type '" + (t < type_names.size() ? type_names[t] : std::to_string(t)) +
                             "' is undefined (summed vector has zero norm)");
        for (auto& v : row) v /= n;
    }
    return c;
}

inline TypeCentroids compute_centroids(const EmbeddingStore& store, const std::vector<Requirement>& labelled,
                                       const Taxonomy& tax) {
    Matrix points(0, store.dim());
    std::vector<int> labels;
    for (const auto& r : labelled) {
        if (!r.type) throw data_error("requirement '" + r.id + "' has no type label");
        points.append_row(store.vector(r.id));
        labels.push_back(*r.type);
    }
    return compute_centroids(points, labels, tax.size(), tax.names());
}

/// Cosine distance to every centroid; +inf for absent types.
inline std::vector<double> centroid_distances(std::span<const double> x, const TypeCentroids& c) {
    if (x.size() != c.dim()) throw data_error("dimension mismatch against centroids");
    std::vector<double> d(c.types(), std::numeric_limits<double>::infinity());
    for (std::size_t t = 0; t < c.types(); ++t)
        if (c.present[t]) d[t] = cosine_distance(x, c.mu.row(t));
    return d;
}

/// Index of the nearest present centroid; ties go to the lower index.
inline int hard_assign(std::span<const double> x, const TypeCentroids& c) {
    auto d = centroid_distances(x, c);
    int best = -1;
    for (std::size_t t = 0; t < d.size(); ++t)
        if (c.present[t] && (best < 0 || d[t] < d[static_cast<std::size_t>(best)])) best = static_cast<int>(t);
    if (best < 0) throw data_error("no centroids available for assignment");
    return best;
}

/// Softmax of -distance/T over the present types (absent types get 0).
inline std::vector<double> soft_from_distances(std::span<const double> dist, const std::vector<bool>& present,
                                               double temperature) {
    if (!(temperature > 0.0)) throw data_error("temperature must be positive");
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < dist.size(); ++t)
        if (present[t]) dmin = std::min(dmin, dist[t]);
    std::vector<double> p(dist.size(), 0.0);
    double z = 0.0;
    for (std::size_t t = 0; t < dist.size(); ++t) {
        if (!present[t]) continue;
        p[t] = std::exp(-(dist[t] - dmin) / temperature);
        z += p[t];
    }
    for (auto& v : p) v /= z;
    return p;
}

inline std::vector<double> soft_assign(std::span<const double> x, const TypeCentroids& c, double temperature) {
    return soft_from_distances(centroid_distances(x, c), c.present, temperature);
}

struct ClassificationReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<std::optional<double>> per_type_f1;  // nullopt where the type has no support
};

/// Nearest-centroid accuracy and Macro-F1 over labelled rows.
inline ClassificationReport hard_accuracy(const Matrix& points, std::span<const int> labels,
                                          const TypeCentroids& c) {
    std::size_t K = c.types();
    std::vector<double> tp(K, 0), fp(K, 0), fn(K, 0);
    std::size_t n = 0, correct = 0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        int y = labels[i];
        if (y < 0) continue;
        int h = hard_assign(points.row(i), c);
        ++n;
        if (h == y) {
            ++correct;
            tp[static_cast<std::size_t>(y)] += 1;
        } else {
            fp[static_cast<std::size_t>(h)] += 1;
            fn[static_cast<std::size_t>(y)] += 1;
        }
    }
    ClassificationReport r;
    r.per_type_f1.assign(K, std::nullopt);
    if (n == 0) return r;
    r.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    double sum = 0.0;
    int classes = 0;
    for (std::size_t t = 0; t < K; ++t) {
        if (tp[t] + fn[t] == 0) continue;
        double denom = 2 * tp[t] + fp[t] + fn[t];
        double f1 = denom > 0 ? 2 * tp[t] / denom : 0.0;
        r.per_type_f1[t] = f1;
        sum += f1;
        ++classes;
    }
    r.macro_f1 = classes ? sum / classes : 0.0;
    return r;
}

inline ClassificationReport hard_accuracy(const EmbeddingStore& store, const std::vector<Requirement>& labelled,
                                          const TypeCentroids& c) {
    Matrix points(0, store.dim());
    std::vector<int> labels;
    for (const auto& r : labelled) {
        if (!r.type) continue;
        points.append_row(store.vector(r.id));
        labels.push_back(*r.type);
    }
    return hard_accuracy(points, labels, c);
}

struct CalibrationOptions {
    double t_min = 1e-4;
    double t_max = 10.0;
    double tolerance = 1e-4;
    int max_iterations = 200;
};

/// Mean over rows of the largest Gibbs probability at temperature T.
inline double mean_max_confidence(const Matrix& centroid_dists, const std::vector<bool>& present, double T) {
    double s = 0.0;
    for (std::size_t i = 0; i < centroid_dists.rows(); ++i) {
        auto p = soft_from_distances(centroid_dists.row(i), present, T);
        s += *std::max_element(p.begin(), p.end());
    }
    return s / static_cast<double>(centroid_dists.rows());
}

inline Matrix centroid_distance_matrix(const Matrix& points, const TypeCentroids& c) {
    Matrix d(points.rows(), c.types());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto row = centroid_distances(points.row(i), c);
        std::copy(row.begin(), row.end(), d.row(i).begin());
    }
    return d;
}

/// Temperature at which the mean max-probability equals `target_confidence`,
/// by bisection on log T. Mean max-probability is non-increasing in T.
inline double calibrate_temperature(const Matrix& points, const TypeCentroids& c, double target_confidence,
                                    const CalibrationOptions& opts = {}) {
    std::size_t K = c.present_count();
    if (points.rows() == 0) throw data_error("temperature calibration needs at least one point");
    if (!(target_confidence > 1.0 / static_cast<double>(K) && target_confidence < 1.0))
        throw data_error("target confidence " + std::to_string(target_confidence) + " outside (1/K, 1) for K=" +
                         std::to_string(K));
    auto dists = centroid_distance_matrix(points, c);
    double lo = std::log(opts.t_min), hi = std::log(opts.t_max);
    double m_lo = mean_max_confidence(dists, c.present, opts.t_min);
    double m_hi = mean_max_confidence(dists, c.present, opts.t_max);
    if (target_confidence > m_lo || target_confidence < m_hi)
        throw data_error("target confidence " + std::to_string(target_confidence) +
                         " unreachable: achievable range is [" + std::to_string(m_hi) + ", " +
                         std::to_string(m_lo) + "] over T in [" + std::to_string(opts.t_min) + ", " +
                         std::to_string(opts.t_max) + "]");
    if (std::abs(m_lo - target_confidence) <= opts.tolerance * 0.1) return opts.t_min;
    if (std::abs(m_hi - target_confidence) <= opts.tolerance * 0.1) return opts.t_max;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < opts.max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        double m = mean_max_confidence(dists, c.present, std::exp(mid));
        if (std::abs(m - target_confidence) <= opts.tolerance * 0.1) break;
        if (m > target_confidence)
            lo = mid;  // too confident: raise T
        else
            hi = mid;
    }
    return std::exp(mid);
}

inline double calibrate_temperature(const EmbeddingStore& store, const std::vector<Requirement>& labelled,
                                    const TypeCentroids& c, double target_confidence,
                                    const CalibrationOptions& opts = {}) {
    Matrix points(0, store.dim());
    for (const auto& r : labelled) points.append_row(store.vector(r.id));
    return calibrate_temperature(points, c, target_confidence, opts);
}

} // namespace geogap
