#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "geogap/synthetic.hpp"
#include "geogap/gap_scoring.hpp"
#include "geogap/pipeline.hpp"
#include "support.hpp"

using namespace geogap;

namespace {

std::vector<double> unit2(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Corpus from explicit (project, label, vector) rows; one topic.
CorpusArtifacts hand_corpus(const std::vector<std::tuple<int, int, std::vector<double>>>& rows, int M, int K,
                            std::size_t k = 1, double T = 0.1) {
    CorpusPoints cp;
    for (int j = 0; j < M; ++j) cp.projects.push_back("p" + std::to_string(j));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [p, l, v] = rows[i];
        cp.ids.push_back("x" + std::to_string(i));
        cp.points.append_row(normalize(v));
        cp.project.push_back(p);
        cp.label.push_back(l);
        cp.topics.append_row(std::vector<double>{1.0});
    }
    std::vector<std::string> names;
    for (int t = 0; t < K; ++t) names.push_back("t" + std::to_string(t));
    Taxonomy tax(names);
    auto cents = compute_centroids(cp.points, cp.label, tax.size());
    TopicModel tm;
    tm.num_topics = 1;
    return fit_baselines(std::move(cp), k, tax, cents, T, tm);
}

TargetProject hand_target(const std::vector<std::vector<double>>& vs) {
    TargetProject t;
    Matrix topics;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        t.ids.push_back("y" + std::to_string(i));
        t.vectors.append_row(normalize(vs[i]));
        topics.append_row(std::vector<double>{1.0});
    }
    t.topics = topics;
    return t;
}

} // namespace

TEST(Phi, Landmarks) {
    Matrix y;
    y.append_row(std::vector<double>{1, 0});
    EXPECT_DOUBLE_EQ(phi(std::vector<double>{1, 0}, y, 1), 0.0);
    Matrix anti;
    anti.append_row(std::vector<double>{-1, 0});
    EXPECT_DOUBLE_EQ(phi(std::vector<double>{1, 0}, anti, 1), 2.0);
    EXPECT_THROW(phi(std::vector<double>{1, 0}, Matrix(0, 2), 1), Error);
}

TEST(Phi, MatchesSortAllOracleAndTruncatesK) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        oracle::Mat ys;
        Matrix y;
        for (int i = 0; i < 4; ++i) {
            ys.push_back(testing_support::random_unit(rng, 3));
            y.append_row(ys.back());
        }
        auto x = testing_support::random_unit(rng, 3);
        for (int k : {1, 2, 4, 9}) EXPECT_NEAR(phi(x, y, static_cast<std::size_t>(k)), oracle::phi(x, ys, k), 1e-15);
    }
}

TEST(FitBaselines, IdenticalProjectsGiveZeroBaselines) {
    auto art = hand_corpus({{0, 0, unit2(0.0)}, {0, 1, unit2(1.5)}, {1, 0, unit2(0.0)}, {1, 1, unit2(1.5)}}, 2, 2);
    for (std::size_t i = 0; i < art.num_points(); ++i) {
        EXPECT_NEAR(art.phi0[i], 0.0, 1e-15);
        EXPECT_NEAR(art.phi_sd[i], 0.0, 1e-15);
    }
}

TEST(FitBaselines, TwoProjectsUseTheOtherProjectOnly) {
    auto art = hand_corpus({{0, 0, unit2(0.0)}, {1, 0, unit2(0.5)}, {1, 1, unit2(2.0)}}, 2, 2);
    EXPECT_NEAR(art.phi0[0], 1 - std::cos(0.5), 1e-15);
    EXPECT_TRUE(is_missing(art.phi_by_project(0, 0)));
    EXPECT_NEAR(art.phi0[2], 1 - std::cos(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(art.phi_sd[0], 0.0);
}

TEST(FitBaselines, ThreeProjectArithmeticOracle) {
    // p0: angle 0, p1: angle 0.2 and 1.0, p2: angle 0.6
    auto art = hand_corpus({{0, 0, unit2(0.0)}, {1, 0, unit2(0.2)}, {1, 1, unit2(1.0)}, {2, 1, unit2(0.6)}}, 3, 2);
    // Point 0 (p0, angle 0): phi vs p1 = 1-cos(0.2), vs p2 = 1-cos(0.6).
    double a = 1 - std::cos(0.2), b = 1 - std::cos(0.6);
    EXPECT_NEAR(art.phi0[0], (a + b) / 2, 1e-15);
    EXPECT_NEAR(art.phi_sd[0], std::abs(a - b) / 2, 1e-15);
    // Point 3 (p2, angle 0.6): vs p0 = 1-cos(0.6), vs p1 nearest is 1.0 (0.4 away).
    double c = 1 - std::cos(0.6), e = 1 - std::cos(0.4);
    EXPECT_NEAR(art.phi0[3], (c + e) / 2, 1e-15);
    EXPECT_NEAR(art.phi_sd[3], std::abs(c - e) / 2, 1e-15);
}

TEST(PsiPoint, ZeroOverEpsilonAndClip) {
    auto art = hand_corpus({{0, 0, unit2(0.0)}, {0, 1, unit2(1.5)}, {1, 0, unit2(0.0)}, {1, 1, unit2(1.5)}}, 2, 2);
    Matrix same;
    same.append_row(unit2(0.0));
    same.append_row(unit2(1.5));
    EXPECT_DOUBLE_EQ(psi_point(0, same, art, kDefaultEpsilon), 0.0);
    Matrix far;
    far.append_row(unit2(3.0));
    EXPECT_DOUBLE_EQ(psi_point(0, far, art, kDefaultEpsilon), 5.0);
    EXPECT_DOUBLE_EQ(clip_score(7.0), 5.0);
    EXPECT_DOUBLE_EQ(clip_score(-6.0), -5.0);
    EXPECT_DOUBLE_EQ(clip_score(1.25), 1.25);
}

TEST(PsiType, AbsentTypeClipsToFive) {
    // Three projects each holding both types near their centroids.
    std::vector<std::tuple<int, int, std::vector<double>>> rows;
    for (int j = 0; j < 3; ++j) {
        rows.push_back({j, 0, unit2(0.01 * j)});
        rows.push_back({j, 1, unit2(1.5 + 0.01 * j)});
    }
    auto art = hand_corpus(rows, 3, 2);
    auto target = hand_target({unit2(0.005)});  // only type 0
    auto r = score_project(target, art, ScoringConfig{});
    EXPECT_TRUE(r.type_available[1]);
    EXPECT_DOUBLE_EQ(r.psi_type[1], 5.0);
    EXPECT_LT(r.psi_type[0], 5.0);
}

TEST(PsiType, SingleTypeCorpusTargetEqualsCorpus) {
    std::vector<std::tuple<int, int, std::vector<double>>> rows{{0, 0, unit2(0.0)}, {1, 0, unit2(0.3)},
                                                                {2, 0, unit2(0.6)}};
    auto art = hand_corpus(rows, 3, 2);
    Matrix target;
    for (std::size_t i = 0; i < art.num_points(); ++i) target.append_row(art.points.row(i));
    std::vector<std::size_t> ref{0, 1, 2}, cand{0, 1, 2};
    EXPECT_DOUBLE_EQ(detail::type_distance(art.points, ref, target, cand), 0.0);
}

TEST(PsiType, UnavailableWithFewerThanTwoProjects) {
    // Type 1 only appears in project 0, so only project 1 yields a value.
    auto art = hand_corpus({{0, 0, unit2(0.0)}, {0, 1, unit2(1.5)}, {1, 0, unit2(0.1)}, {1, 0, unit2(0.2)}}, 2, 2);
    auto r = score_project(hand_target({unit2(0.0)}), art, ScoringConfig{});
    EXPECT_FALSE(r.type_available[1]);
    EXPECT_DOUBLE_EQ(r.psi_type[1], 0.0);
}

TEST(PsiPop, SoftCountOracleAndConservation) {
    auto art = hand_corpus({{0, 0, unit2(0.0)}, {0, 1, unit2(1.5)}, {1, 0, unit2(0.1)}, {1, 1, unit2(1.4)}}, 2, 2,
                           1, 0.1);
    Matrix t;
    for (double a : {0.2, 0.7, 1.2}) t.append_row(unit2(a));
    auto n = soft_counts(t, art.centroids, 0.1);
    double expect0 = 0;
    for (double a : {0.2, 0.7, 1.2}) {
        double d0 = cosine_distance(unit2(a), art.centroids.mu.row(0));
        double d1 = cosine_distance(unit2(a), art.centroids.mu.row(1));
        expect0 += 1.0 / (1.0 + std::exp(-(d1 - d0) / 0.1));
    }
    EXPECT_NEAR(n[0], expect0, 1e-12);
    EXPECT_NEAR(n[0] + n[1], 3.0, 1e-12);
}

TEST(PsiPop, EmptyTargetIsMaximalDeficit) {
    auto art = hand_corpus({{0, 0, unit2(0.0)}, {0, 1, unit2(1.5)}, {1, 0, unit2(0.1)}, {1, 0, unit2(0.15)},
                            {1, 1, unit2(1.4)}},
                           2, 2);
    Baselines b = derive_baselines(art, ProjectWeights{{0.5, 0.5}});
    auto pop = psi_pop_scores(Matrix(0, 2), art, b, kDefaultEpsilon);
    for (std::size_t t = 0; t < 2; ++t)
        EXPECT_DOUBLE_EQ(pop.score[t], clip_score(b.soft_count_mean[t] / (b.soft_count_sd[t] + kDefaultEpsilon)));
}

TEST(CellAggregate, ConstantScoresAndOneHot) {
    std::vector<double> psi{0.7, 0.7, 0.7};
    std::vector<int> types{0, 1, 1};
    Matrix pi;
    pi.append_row(std::vector<double>{1, 0});
    pi.append_row(std::vector<double>{0.3, 0.7});
    pi.append_row(std::vector<double>{0, 1});
    auto c = cell_aggregate(psi, types, pi, 3);
    EXPECT_DOUBLE_EQ(c.psi_cell(0, 0), 0.7);
    EXPECT_DOUBLE_EQ(c.psi_cell(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(c.mass(0, 1), 0.0);
    EXPECT_NEAR(c.psi_geo[1], 0.7, 1e-15);
    EXPECT_DOUBLE_EQ(c.psi_geo[2], 0.0);
}

TEST(CellAggregate, WeightedMeanOracle) {
    std::vector<double> psi{1.0, -2.0, 3.0, 0.5};
    std::vector<int> types{0, 0, 1, 1};
    Matrix pi;
    for (auto r : std::vector<std::vector<double>>{{0.2, 0.8}, {0.6, 0.4}, {1, 0}, {0.5, 0.5}}) pi.append_row(r);
    auto c = cell_aggregate(psi, types, pi, 2);
    double c00 = (0.2 * 1 + 0.6 * -2) / 0.8, c01 = (0.8 * 1 + 0.4 * -2) / 1.2;
    EXPECT_NEAR(c.psi_cell(0, 0), c00, 1e-15);
    EXPECT_NEAR(c.psi_cell(0, 1), c01, 1e-15);
    EXPECT_NEAR(c.psi_geo[0], (0.8 * c00 + 1.2 * c01) / 2.0, 1e-15);
    EXPECT_NEAR(c.psi_cell(1, 0), (3 + 0.25) / 1.5, 1e-15);
    EXPECT_NEAR(c.mass(1, 1), 0.5, 1e-15);
}

TEST(Occupancy, OneHotAndConservation) {
    std::vector<int> types{0, 1, 1};
    Matrix pi;
    for (auto r : std::vector<std::vector<double>>{{1, 0}, {0, 1}, {1, 0}}) pi.append_row(r);
    auto o = occupancy(types, pi, 2);
    EXPECT_DOUBLE_EQ(o(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(o(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(o(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(o(0, 1), 0.0);
    auto empty = occupancy({}, Matrix(0, 2), 2);
    for (double v : empty.data()) EXPECT_EQ(v, 0.0);
}

TEST(Fuse, Identities) {
    std::vector<double> g{1, -2, 3}, t{0.5, 4, -5}, p{-1, 2, 0};
    EXPECT_EQ(fuse(g, t, p, 1.0, 0.0), g);
    std::vector<double> v{2.5, -1, 0};
    auto same = fuse(v, v, v, 0.3, 0.6);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(same[i], v[i], 1e-15);
    auto full = fuse(g, t, p, 0.7, 0.1);
    EXPECT_NEAR(full[1], 0.9 * (0.7 * -2 + 0.3 * 4) + 0.1 * 2, 1e-15);
    EXPECT_THROW(fuse(g, t, p, 1.1, 0.0), Error);
    EXPECT_THROW(fuse(g, t, p, 0.5, -0.1), Error);
}

TEST(ProjectWeights, ModesAndOracle) {
    Matrix means;
    means.append_row(unit2(0.0));
    means.append_row(unit2(0.3));
    means.append_row(unit2(1.0));
    means.append_row(unit2(2.0));
    auto a = project_weights(WeightMode::Uniform, unit2(0.1), means, 0.1);
    for (double w : a.w) EXPECT_DOUBLE_EQ(w, 0.25);
    auto inf = project_weights(WeightMode::Similarity, unit2(0.1), means, 1e12);
    for (double w : inf.w) EXPECT_NEAR(w, 0.25, 1e-9);

    // Two projects at cosine distances 0.1 and 0.3 from the target.
    Matrix two;
    auto target = unit2(0.0);
    two.append_row(unit2(std::acos(0.9)));
    two.append_row(unit2(-std::acos(0.7)));
    auto b = project_weights(WeightMode::Similarity, target, two, 0.1);
    EXPECT_NEAR(b.w[0], 0.8808, 1e-4);
    EXPECT_NEAR(b.w[1], 0.1192, 1e-4);
    EXPECT_NEAR(b.w[0] + b.w[1], 1.0, 1e-12);
    EXPECT_THROW(project_weights(WeightMode::Similarity, target, two, 0.0), Error);
}

TEST(ScoreProject, MatchesOracleOnRandomCorpora) {
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        auto rc = testing_support::random_case(seed);
        auto lib = testing_support::run_library(rc);
        auto ref = oracle::score(rc.corpus, rc.target, rc.target_topics, rc.cfg);
        EXPECT_LE(testing_support::max_discrepancy(lib.result, ref), 1e-9) << "seed " << seed;
    }
}

TEST(ScoreProject, ClipBoundsAndOccupancyMass) {
    for (std::uint64_t seed = 200; seed < 240; ++seed) {
        auto rc = testing_support::random_case(seed);
        auto r = testing_support::run_library(rc).result;
        for (const auto* v : {&r.point_psi, &r.psi_geo, &r.psi_type, &r.psi_pop, &r.psi_fused})
            for (double x : *v) {
                EXPECT_GE(x, -5.0);
                EXPECT_LE(x, 5.0);
            }
        double mass = 0;
        for (double x : r.occupancy.data()) {
            EXPECT_GE(x, 0.0);
            mass += x;
        }
        EXPECT_NEAR(mass, static_cast<double>(rc.target.size()), 1e-6);
    }
}

TEST(ScoreProject, EmptyTargetAndDimensionMismatch) {
    auto art = hand_corpus({{0, 0, unit2(0.0)}, {1, 1, unit2(1.0)}}, 2, 2);
    EXPECT_THROW(score_project(TargetProject{{}, Matrix(0, 2), std::nullopt}, art, {}), Error);
    TargetProject wrong{{"a"}, Matrix(1, 3, 0.5), std::nullopt};
    EXPECT_THROW(score_project(wrong, art, {}), Error);
}

TEST(ScoreProject, ModeBWithHugeTauMatchesModeA) {
    for (std::uint64_t seed = 300; seed < 310; ++seed) {
        auto rc = testing_support::random_case(seed);
        rc.cfg.similarity = false;
        auto a = testing_support::run_library(rc).result;
        rc.cfg.similarity = true;
        rc.cfg.tau = 1e12;
        auto b = testing_support::run_library(rc).result;
        for (std::size_t t = 0; t < a.psi_fused.size(); ++t) EXPECT_NEAR(a.psi_fused[t], b.psi_fused[t], 1e-6);
    }
}

TEST(ScoreProject, RankingInvariantToConstantShift) {
    std::vector<double> g{1, -2, 3, 0.5}, t{0.5, 4, -5, 0}, p{-1, 2, 0, 1};
    auto base = rank_descending(fuse(g, t, p, 0.7, 0.1));
    for (auto* v : {&g, &t, &p})
        for (double& x : *v) x += 0.37;
    EXPECT_EQ(rank_descending(fuse(g, t, p, 0.7, 0.1)), base);
    std::vector<double> flat(5, 1.0);
    EXPECT_EQ(rank_descending(flat), (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(ScoreProject, GapResponseOnRemovingAType) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SyntheticSpec spec;
        spec.projects = 6;
        spec.types = 4;
        spec.per_type = 8;
        spec.dim = 8;
        spec.noise = 0.2;
        spec.seed = seed;
        auto syn = make_synthetic(spec);
        std::vector<std::string> training{"P1", "P2", "P3", "P4", "P5"};
        auto art = build_artifacts(syn.dataset, training, syn.store, BuildOptions{});
        auto target = syn.dataset.of_projects({"P0"});
        std::vector<std::string> all, depleted;
        for (const auto& r : target) {
            all.push_back(r.id);
            if (*r.type != 2) depleted.push_back(r.id);
        }
        auto before = score_project(make_target(syn.store, all), art, ScoringConfig{});
        auto after = score_project(make_target(syn.store, depleted), art, ScoringConfig{});
        EXPECT_GT(after.psi_type[2], before.psi_type[2]) << seed;
        EXPECT_GT(after.psi_pop[2], before.psi_pop[2]) << seed;
    }
}
