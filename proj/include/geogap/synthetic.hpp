#pragma once
// Planted-cluster corpora: one well-separated direction per type, points
// scattered around it with Gaussian noise. Used by tests, the acceptance
// suite and `geogap synth`.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "geogap/corpus.hpp"
#include "geogap/embedding_store.hpp"

namespace geogap {

struct SyntheticSpec {
    std::size_t projects = 6;
    std::size_t types = 6;
    std::size_t per_type = 20;       // points per (project, type)
    std::size_t dim = 16;
    double noise = 0.15;             // per-coordinate Gaussian sd before normalisation
    std::uint64_t seed = 1;
    std::vector<std::pair<std::size_t, std::size_t>> omit;   // (project, type) cells left empty
};

struct SyntheticCorpus {
    Dataset dataset;
    EmbeddingStore store;
    Matrix centres;
};

namespace detail {

inline const std::vector<std::string>& synth_words() {
    static const std::vector<std::string> w = {
        "latency", "audit", "backup", "screen",  "upgrade", "license", "uptime", "cluster",
        "encrypt", "report", "export", "install", "monitor", "colour",  "retry",  "throughput"};
    return w;
}

} // namespace detail

inline SyntheticCorpus make_synthetic(const SyntheticSpec& spec) {
    if (spec.types < 2 || spec.projects < 1 || spec.per_type < 1 || spec.dim < 2)
        throw usage_error("synthetic corpus needs >= 2 types, >= 1 project, >= 1 point per cell and d >= 2");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Orthonormal directions when d allows it, random unit vectors otherwise.
    Matrix centres(spec.types, spec.dim);
    for (std::size_t t = 0; t < spec.types; ++t) {
        std::vector<double> c(spec.dim, 0.0);
        if (spec.types <= spec.dim) {
            c[t] = 1.0;
        } else {
            for (auto& v : c) v = gauss(rng);
        }
        auto u = normalize(c);
        std::copy(u.begin(), u.end(), centres.row(t).begin());
    }

    std::vector<std::string> names;
    for (std::size_t t = 0; t < spec.types; ++t) names.push_back("T" + std::to_string(t));
    Taxonomy tax(names);

    const auto& words = detail::synth_words();
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::vector<Requirement> reqs;
    EmbeddingStore store(spec.dim);
    for (std::size_t p = 0; p < spec.projects; ++p) {
        std::string pid = "P" + std::to_string(p);
        for (std::size_t t = 0; t < spec.types; ++t) {
            if (std::find(spec.omit.begin(), spec.omit.end(), std::pair{p, t}) != spec.omit.end()) continue;
            for (std::size_t i = 0; i < spec.per_type; ++i) {
                std::vector<double> v(spec.dim);
                auto c = centres.row(t);
                for (std::size_t j = 0; j < spec.dim; ++j) v[j] = c[j] + spec.noise * gauss(rng);
                std::string id = pid + "-T" + std::to_string(t) + "-" + std::to_string(i);
                std::string text = "The system shall handle " + names[t] + " concern " + words[t % words.size()] +
                                   " with " + words[pick(rng)] + " and " + words[pick(rng)];
                store.insert(id, v);
                reqs.push_back({id, text, pid, static_cast<int>(t)});
            }
        }
    }
    return {Dataset(std::move(reqs), std::move(tax)), std::move(store), std::move(centres)};
}

} // namespace geogap
