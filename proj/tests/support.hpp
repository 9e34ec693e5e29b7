#pragma once
// Shared fixtures: random small corpora fed both to the library and to the
// reference implementation.

#include <random>
#include <string>

#include "geogap/gap_scoring.hpp"
#include "geogap/prototype.hpp"
#include "oracle.hpp"

namespace testing_support {

struct RandomCase {
    oracle::Corpus corpus;
    oracle::Mat target, target_topics;
    oracle::Config cfg;
};

inline oracle::Vec random_unit(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    oracle::Vec v(d);
    for (auto& x : v) x = g(rng);
    return oracle::unit(v);
}

inline oracle::Vec random_simplex(std::mt19937_64& rng, int s) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    oracle::Vec v(s);
    double z = 0;
    for (auto& x : v) z += (x = u(rng));
    for (auto& x : v) x /= z;
    return v;
}

/// <= 30 corpus points, d <= 8, 2..4 projects, 2..4 types, 1..3 topics.
inline RandomCase random_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    RandomCase rc;
    auto& c = rc.corpus;
    c.num_projects = uni(2, 4);
    c.num_types = uni(2, 4);
    int d = uni(2, 8), S = uni(1, 3), n = uni(c.num_projects * 2, 30);
    for (int i = 0; i < n; ++i) {
        c.points.push_back(random_unit(rng, d));
        c.project.push_back(i < c.num_projects ? i : uni(0, c.num_projects - 1));
        c.label.push_back(i == 0 ? 0 : (uni(0, 9) == 0 ? -1 : uni(0, c.num_types - 1)));
        c.topics.push_back(random_simplex(rng, S));
    }
    int m = uni(1, 10);
    for (int i = 0; i < m; ++i) {
        rc.target.push_back(random_unit(rng, d));
        rc.target_topics.push_back(random_simplex(rng, S));
    }
    rc.cfg.k = uni(1, 4);
    rc.cfg.temperature = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    rc.cfg.beta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    rc.cfg.gamma = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    rc.cfg.similarity = uni(0, 1) == 1;
    rc.cfg.tau = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    return rc;
}

inline geogap::Matrix to_matrix(const oracle::Mat& m) {
    geogap::Matrix out;
    for (const auto& r : m) out.append_row(r);
    return out;
}

struct LibraryRun {
    geogap::CorpusArtifacts art;
    geogap::GapResult result;
};

inline LibraryRun run_library(const RandomCase& rc) {
    using namespace geogap;
    const auto& c = rc.corpus;
    std::vector<std::string> names;
    for (int t = 0; t < c.num_types; ++t) names.push_back("t" + std::to_string(t));
    Taxonomy tax(names);
    CorpusPoints cp;
    for (int j = 0; j < c.num_projects; ++j) cp.projects.push_back("p" + std::to_string(j));
    for (std::size_t i = 0; i < c.points.size(); ++i) cp.ids.push_back("x" + std::to_string(i));
    cp.points = to_matrix(c.points);
    cp.project = c.project;
    cp.label = c.label;
    cp.topics = to_matrix(c.topics);
    auto cents = compute_centroids(cp.points, cp.label, tax.size());
    TopicModel tm;
    tm.num_topics = c.topics[0].size();
    auto art = fit_baselines(std::move(cp), static_cast<std::size_t>(rc.cfg.k), tax, cents, rc.cfg.temperature, tm);

    TargetProject target;
    for (std::size_t i = 0; i < rc.target.size(); ++i) target.ids.push_back("y" + std::to_string(i));
    target.vectors = to_matrix(rc.target);
    target.topics = to_matrix(rc.target_topics);
    ScoringConfig cfg;
    cfg.beta = rc.cfg.beta;
    cfg.gamma = rc.cfg.gamma;
    cfg.eps = rc.cfg.eps;
    cfg.mode = rc.cfg.similarity ? WeightMode::Similarity : WeightMode::Uniform;
    cfg.tau = rc.cfg.tau;
    auto result = score_project(target, art, cfg);
    return {std::move(art), std::move(result)};
}

/// Largest absolute difference between library and oracle outputs.
inline double max_discrepancy(const geogap::GapResult& lib, const oracle::Result& ref) {
    double worst = 0.0;
    auto vec = [&](const std::vector<double>& a, const oracle::Vec& b) {
        if (a.size() != b.size()) worst = INFINITY;
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    };
    auto mat = [&](const geogap::Matrix& a, const oracle::Mat& b) {
        if (a.rows() != b.size()) worst = INFINITY;
        for (std::size_t i = 0; i < std::min(a.rows(), b.size()); ++i) vec({a.row(i).begin(), a.row(i).end()}, b[i]);
    };
    vec(lib.point_psi, ref.point_psi);
    vec(lib.psi_geo, ref.geo);
    vec(lib.psi_type, ref.type);
    vec(lib.psi_pop, ref.pop);
    vec(lib.psi_fused, ref.fused);
    mat(lib.psi_cell, ref.cell);
    mat(lib.occupancy, ref.occupancy);
    return worst;
}

} // namespace testing_support
