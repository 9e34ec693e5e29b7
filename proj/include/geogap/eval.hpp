#pragma once
// Synthetic gap-injection evaluation with leave-one-project-out folds.
//
// Per fold: fit the corpus on the other projects, pick the target's
// best-covered types, remove (a fraction of) their requirements, re-score
// the depleted target and measure how well the injected types rank.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "geogap/corpus.hpp"
#include "geogap/embedding_store.hpp"
#include "geogap/gap_scoring.hpp"
#include "geogap/pipeline.hpp"

namespace geogap {

// ---------------------------------------------------------------- metrics

/// Mann-Whitney AUROC: probability that a random positive outscores a random
/// negative, ties counting one half. Computed from midranks.
inline double auroc(std::span<const double> scores, const std::vector<bool>& positives) {
    if (scores.size() != positives.size()) throw data_error("auroc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t npos = 0;
    for (bool p : positives) npos += p ? 1 : 0;
    std::size_t nneg = n - npos;
    if (npos == 0 || nneg == 0) throw data_error("auroc needs at least one positive and one negative");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t q = i; q < j; ++q)
            if (positives[order[q]]) rank_sum += midrank;
        i = j;
    }
    double u = rank_sum - static_cast<double>(npos) * static_cast<double>(npos + 1) / 2.0;
    return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

inline double mrr(std::span<const int> ranks) {
    if (ranks.empty()) throw data_error("mrr of an empty rank list");
    double s = 0.0;
    for (int r : ranks) {
        if (r < 1) throw data_error("ranks must be >= 1");
        s += 1.0 / r;
    }
    return s / static_cast<double>(ranks.size());
}

inline double mrr(const std::vector<int>& ranks) { return mrr(std::span<const int>(ranks)); }

/// splitmix64 finaliser over (root, a, b): per-fold and per-type seeds.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Linear-interpolation percentile (q in [0, 100]).
inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) throw data_error("percentile of an empty sample");
    std::sort(v.begin(), v.end());
    double pos = q / 100.0 * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct MeanSd {
    double mean = kMissing;
    double sd = kMissing;
    std::size_t n = 0;
};

/// Mean and sample standard deviation (sd = 0 for a single value).
inline MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd out;
    out.n = v.size();
    if (v.empty()) return out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - out.mean) * (x - out.mean);
    out.sd = v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
    return out;
}

// ------------------------------------------------------------- injection

struct InjectionSpec {
    double fraction = 1.0;
    std::size_t n_targets = 3;
    std::uint64_t seed = 0;
    std::size_t min_count = 3;       // target requirements a type needs to be injectable
    std::size_t cell_min_count = 1;  // same, for cells
};

/// Presets for the fused score.
inline ScoringConfig preset(const std::string& name) {
    ScoringConfig c;
    if (name == "geogap-g") {
        c.beta = 1.0;
        c.gamma = 0.0;
    } else if (name == "geogap-gt") {
        c.beta = 0.7;
        c.gamma = 0.0;
    } else if (name == "geogap") {
        c.beta = 0.7;
        c.gamma = 0.1;
    } else {
        throw usage_error("unknown preset '" + name + "' (valid: geogap-g, geogap-gt, geogap)");
    }
    return c;
}

struct Selection {
    std::vector<int> types;
    std::optional<std::string> skip_reason;
};

/// Up to n_targets eligible types with the lowest pre-injection fused score.
/// Eligible: >= min_count target requirements of the type (by label) and the
/// type present in >= 2 training projects. Ties: larger target count, then
/// taxonomy order.
inline Selection select_covered_types(const std::vector<Requirement>& target, std::span<const double> pre_scores,
                                      const CorpusArtifacts& art, const InjectionSpec& spec) {
    const std::size_t K = art.num_types();
    if (target.empty()) return {{}, "target is empty"};
    std::vector<std::size_t> counts(K, 0);
    for (const auto& r : target)
        if (r.type) ++counts[static_cast<std::size_t>(*r.type)];
    std::vector<int> eligible;
    for (std::size_t t = 0; t < K; ++t) {
        std::size_t projects_with = 0;
        for (std::size_t j = 0; j < art.num_projects(); ++j) projects_with += art.project_type_counts(j, t) > 0 ? 1 : 0;
        if (counts[t] >= spec.min_count && projects_with >= 2) eligible.push_back(static_cast<int>(t));
    }
    if (eligible.empty()) return {{}, "no eligible type"};
    std::stable_sort(eligible.begin(), eligible.end(), [&](int a, int b) {
        auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        if (pre_scores[ua] != pre_scores[ub]) return pre_scores[ua] < pre_scores[ub];
        return counts[ua] > counts[ub];
    });
    std::size_t take = std::min({spec.n_targets, eligible.size(), K - 1});
    eligible.resize(take);
    return {eligible, std::nullopt};
}

/// Remove ceil(f * n_t) requirements of each selected type (by ground-truth
/// label). For a given seed the removed sets are nested in f.
inline std::vector<Requirement> inject(const std::vector<Requirement>& target, const std::vector<int>& types,
                                       double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw usage_error("removal fraction must lie in (0, 1]");
    std::unordered_set<std::string> removed;
    for (int t : types) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < target.size(); ++i)
            if (target[i].type && *target[i].type == t) members.push_back(i);
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::shuffle(members.begin(), members.end(), rng);
        auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(members.size()) - 1e-9));
        for (std::size_t q = 0; q < std::min(n, members.size()); ++q) removed.insert(target[members[q]].id);
    }
    std::vector<Requirement> out;
    for (const auto& r : target)
        if (!removed.contains(r.id)) out.push_back(r);
    return out;
}

// --------------------------------------------------------------- folds

struct EvalConfig {
    BuildOptions build;
    ScoringConfig scoring = preset("geogap");
    std::size_t large_threshold = 50;
    unsigned jobs = 1;
};

/// What a detector sees in one fold.
struct FoldContext {
    const Dataset& dataset;
    const EmbeddingStore& store;
    const EvalConfig& config;
    std::string target;
    std::vector<std::string> training;
    const CorpusArtifacts& artifacts;
    std::size_t fold = 0;
    std::uint64_t seed = 0;
};

/// Maps a (depleted) target project to one score per type; larger = more gap-like.
using Detector = std::function<std::vector<double>(const FoldContext&, const std::vector<Requirement>&)>;

inline std::vector<std::string> ids_of(const std::vector<Requirement>& reqs) {
    std::vector<std::string> ids;
    ids.reserve(reqs.size());
    for (const auto& r : reqs) ids.push_back(r.id);
    return ids;
}

inline TargetProject target_for(const FoldContext& ctx, const std::vector<Requirement>& reqs) {
    const TopicDistribution* topics = ctx.config.build.topics ? &ctx.config.build.topics->distribution : nullptr;
    return make_target(ctx.store, ids_of(reqs), topics);
}

inline GapResult score_requirements(const FoldContext& ctx, const std::vector<Requirement>& reqs,
                                    const ScoringConfig& cfg) {
    return score_project(target_for(ctx, reqs), ctx.artifacts, cfg);
}

inline Detector geogap_detector() {
    return [](const FoldContext& ctx, const std::vector<Requirement>& target) {
        return score_requirements(ctx, target, ctx.config.scoring).psi_fused;
    };
}

struct EvalRecord {
    std::size_t fold = 0;
    std::string target;
    std::uint64_t seed = 0;
    std::size_t size_before = 0;
    std::size_t size_after = 0;
    std::vector<int> injected;                // types (or flattened cells)
    std::vector<double> scores;               // post-injection
    std::vector<int> ranking;                 // indices, descending score
    std::vector<int> injected_ranks;          // 1-based rank of each injected item
    double auroc = kMissing;
    double reciprocal_rank = kMissing;        // 1 / rank of the best-ranked injected item
    std::optional<std::string> skip_reason;

    bool evaluated() const { return !skip_reason.has_value(); }
};

struct EvalSummary {
    MeanSd auroc_all;
    MeanSd auroc_large;
    double mrr = kMissing;
    std::size_t folds = 0;
    std::size_t skipped = 0;
};

struct EvalRun {
    std::vector<EvalRecord> records;
    EvalSummary summary;
};

inline void rank_outcome(EvalRecord& rec, std::size_t n_items) {
    rec.ranking = rank_descending(rec.scores);
    std::vector<int> pos(n_items);
    for (std::size_t r = 0; r < rec.ranking.size(); ++r) pos[static_cast<std::size_t>(rec.ranking[r])] = static_cast<int>(r + 1);
    std::vector<bool> positive(n_items, false);
    for (int t : rec.injected) {
        positive[static_cast<std::size_t>(t)] = true;
        rec.injected_ranks.push_back(pos[static_cast<std::size_t>(t)]);
    }
    rec.auroc = auroc(rec.scores, positive);
    rec.reciprocal_rank = 1.0 / *std::min_element(rec.injected_ranks.begin(), rec.injected_ranks.end());
}

inline EvalSummary summarise(const std::vector<EvalRecord>& records, std::size_t large_threshold) {
    EvalSummary s;
    std::vector<double> all, large, rr;
    for (const auto& r : records) {
        if (!r.evaluated()) {
            ++s.skipped;
            continue;
        }
        all.push_back(r.auroc);
        if (r.size_before >= large_threshold) large.push_back(r.auroc);
        rr.push_back(r.reciprocal_rank);
    }
    s.folds = all.size();
    s.auroc_all = mean_sd(all);
    s.auroc_large = mean_sd(large);
    if (!rr.empty()) s.mrr = std::accumulate(rr.begin(), rr.end(), 0.0) / static_cast<double>(rr.size());
    return s;
}

/// Run `body(i)` for i in [0, n) on up to `jobs` threads.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next = n;
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Artifacts for selection: fixed k=1 so removal sets do not depend on the
/// k or configuration under test.
struct FoldArtifacts {
    CorpusArtifacts scored;
    std::optional<CorpusArtifacts> selection;  // set when scored.k != 1

    const CorpusArtifacts& for_selection() const { return selection ? *selection : scored; }
};

inline FoldArtifacts fit_fold(const Dataset& d, const std::vector<std::string>& training, const EmbeddingStore& store,
                              const EvalConfig& cfg, std::uint64_t fold_seed) {
    BuildOptions opts = cfg.build;
    opts.seed = fold_seed;
    FoldArtifacts fa{build_artifacts(d, training, store, opts), std::nullopt};
    if (opts.k != 1) {
        opts.k = 1;
        fa.selection = build_artifacts(d, training, store, opts);
    }
    return fa;
}

/// Type-level injection experiment over all leave-one-out folds.
inline EvalRun run_type_level(const Dataset& d, const EmbeddingStore& store, const EvalConfig& cfg,
                              const InjectionSpec& spec, const Detector& detector = geogap_detector()) {
    auto splits = loo_splits(d);
    auto partition = project_partition(d);
    std::vector<EvalRecord> records(splits.size());
    parallel_for(splits.size(), cfg.jobs, [&](std::size_t f) {
        const auto& split = splits[f];
        EvalRecord& rec = records[f];
        rec.fold = f;
        rec.target = split.target;
        rec.seed = derive_seed(spec.seed, f);
        const auto& target = std::find_if(partition.begin(), partition.end(),
                                          [&](const auto& p) { return p.first == split.target; })->second;
        rec.size_before = target.size();
        auto fa = fit_fold(d, split.training, store, cfg, rec.seed);

        const auto& sel_art = fa.for_selection();
        FoldContext sel_ctx{d, store, cfg, split.target, split.training, sel_art, f, rec.seed};
        auto pre = score_requirements(sel_ctx, target, preset("geogap")).psi_fused;
        auto sel = select_covered_types(target, pre, sel_art, spec);
        if (sel.skip_reason) {
            rec.skip_reason = sel.skip_reason;
            rec.size_after = rec.size_before;
            return;
        }
        rec.injected = sel.types;
        auto depleted = inject(target, sel.types, spec.fraction, rec.seed);
        rec.size_after = depleted.size();
        if (depleted.empty()) {
            rec.skip_reason = "target empty after injection";
            return;
        }
        FoldContext ctx{d, store, cfg, split.target, split.training, fa.scored, f, rec.seed};
        rec.scores = detector(ctx, depleted);
        rank_outcome(rec, d.taxonomy().size());
    });
    EvalRun run{std::move(records), {}};
    run.summary = summarise(run.records, cfg.large_threshold);
    return run;
}

struct SweepPoint {
    double value = 0.0;  // f or k
    EvalRun run;
};

inline std::vector<SweepPoint> run_fraction_sweep(const Dataset& d, const EmbeddingStore& store, const EvalConfig& cfg,
                                                  const InjectionSpec& spec, const std::vector<double>& fractions,
                                                  const Detector& detector = geogap_detector()) {
    std::vector<SweepPoint> out;
    for (double f : fractions) {
        InjectionSpec s = spec;
        s.fraction = f;
        out.push_back({f, run_type_level(d, store, cfg, s, detector)});
    }
    return out;
}

inline std::vector<SweepPoint> run_k_sweep(const Dataset& d, const EmbeddingStore& store, const EvalConfig& cfg,
                                           const InjectionSpec& spec, const std::vector<std::size_t>& ks,
                                           const Detector& detector = geogap_detector()) {
    std::vector<SweepPoint> out;
    for (auto k : ks) {
        EvalConfig c = cfg;
        c.build.k = k;
        out.push_back({static_cast<double>(k), run_type_level(d, store, c, spec, detector)});
    }
    return out;
}

// ------------------------------------------------------- permutation test

struct ProjectScores {
    std::string project;
    std::vector<double> scores;
    double observed_auroc = kMissing;
};

struct PermutationResult {
    std::string project;
    double null_p95 = kMissing;
    double observed_auroc = kMissing;
    bool significant = false;
    std::vector<double> null_distribution;
};

/// Null AUROC distribution from labelling n_targets random types positive
/// (nothing removed); significant when the observed AUROC exceeds its 95th
/// percentile.
inline std::vector<PermutationResult> permutation_test(const std::vector<ProjectScores>& projects, std::size_t n_perm,
                                                       std::size_t n_targets, std::uint64_t seed) {
    if (n_perm < 100) throw usage_error("permutation test needs at least 100 permutations");
    std::vector<PermutationResult> out;
    for (std::size_t p = 0; p < projects.size(); ++p) {
        const auto& ps = projects[p];
        const std::size_t K = ps.scores.size();
        if (n_targets < 1 || n_targets >= K) throw usage_error("permutation targets must lie in [1, K-1]");
        std::mt19937_64 rng(derive_seed(seed, p));
        std::vector<std::size_t> idx(K);
        PermutationResult r{ps.project, kMissing, ps.observed_auroc, false, {}};
        r.null_distribution.reserve(n_perm);
        for (std::size_t i = 0; i < n_perm; ++i) {
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            std::vector<bool> positive(K, false);
            for (std::size_t q = 0; q < n_targets; ++q) positive[idx[q]] = true;
            r.null_distribution.push_back(auroc(ps.scores, positive));
        }
        r.null_p95 = percentile(r.null_distribution, 95.0);
        r.significant = !is_missing(r.observed_auroc) && r.observed_auroc > r.null_p95;
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------- cell level

/// Cell-level fused grid: geometric cell scores fused with the row's
/// type-level Psi_type and Psi_pop.
inline Matrix fused_cells(const GapResult& r) {
    Matrix out(r.psi_cell.rows(), r.psi_cell.cols());
    const auto& c = r.config;
    for (std::size_t t = 0; t < out.rows(); ++t)
        for (std::size_t s = 0; s < out.cols(); ++s)
            out(t, s) = clip_score((1.0 - c.gamma) * (c.beta * r.psi_cell(t, s) + (1.0 - c.beta) * r.psi_type[t]) +
                                   c.gamma * r.psi_pop[t]);
    return out;
}

inline std::vector<std::size_t> target_cells(const FoldContext& ctx, const std::vector<Requirement>& reqs) {
    auto tgt = target_for(ctx, reqs);
    auto types = hard_types(tgt.vectors, ctx.artifacts.centroids);
    Matrix pi = tgt.topics ? *tgt.topics : soft_topics(tgt.vectors, ctx.artifacts.topic_model);
    std::vector<std::size_t> cells(reqs.size());
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        auto row = pi.row(i);
        auto s = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
        cells[i] = static_cast<std::size_t>(types[i]) * pi.cols() + s;
    }
    return cells;
}

struct CellSpec {
    std::size_t n_cells = 5;
};

/// Cell-level injection: remove requirements whose (hard type, argmax topic)
/// cell is among the n lowest-scoring eligible cells; AUROC over every cell
/// with corpus mass.
inline EvalRun run_cell_level(const Dataset& d, const EmbeddingStore& store, const EvalConfig& cfg,
                              const InjectionSpec& spec, const CellSpec& cells_spec = {}) {
    auto splits = loo_splits(d);
    auto partition = project_partition(d);
    std::vector<EvalRecord> records(splits.size());
    parallel_for(splits.size(), cfg.jobs, [&](std::size_t f) {
        const auto& split = splits[f];
        EvalRecord& rec = records[f];
        rec.fold = f;
        rec.target = split.target;
        rec.seed = derive_seed(spec.seed, f);
        const auto& target = std::find_if(partition.begin(), partition.end(),
                                          [&](const auto& p) { return p.first == split.target; })->second;
        rec.size_before = rec.size_after = target.size();
        BuildOptions opts = cfg.build;
        opts.seed = rec.seed;
        auto art = build_artifacts(d, split.training, store, opts);
        FoldContext ctx{d, store, cfg, split.target, split.training, art, f, rec.seed};

        auto pre = score_requirements(ctx, target, cfg.scoring);
        auto pre_cells = fused_cells(pre);
        const std::size_t S = pre_cells.cols(), C = pre_cells.rows() * S;
        auto membership = target_cells(ctx, target);
        std::vector<std::size_t> count(C, 0);
        for (auto c : membership) ++count[c];
        std::vector<std::size_t> eligible, scored;
        for (std::size_t c = 0; c < C; ++c) {
            if (!(pre.cell_mass(c / S, c % S) > 0.0)) continue;
            scored.push_back(c);
            if (count[c] >= spec.cell_min_count) eligible.push_back(c);
        }
        if (eligible.empty() || scored.size() < 2) {
            rec.skip_reason = "no eligible cell";
            return;
        }
        std::stable_sort(eligible.begin(), eligible.end(), [&](auto a, auto b) {
            double sa = pre_cells.data()[a], sb = pre_cells.data()[b];
            if (sa != sb) return sa < sb;
            return count[a] > count[b];
        });
        eligible.resize(std::min({cells_spec.n_cells, eligible.size(), scored.size() - 1}));

        std::unordered_set<std::string> removed;
        for (auto c : eligible) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < target.size(); ++i)
                if (membership[i] == c) members.push_back(i);
            std::mt19937_64 rng(derive_seed(rec.seed, c));
            std::shuffle(members.begin(), members.end(), rng);
            auto n = static_cast<std::size_t>(std::ceil(spec.fraction * static_cast<double>(members.size()) - 1e-9));
            for (std::size_t q = 0; q < std::min(n, members.size()); ++q) removed.insert(target[members[q]].id);
        }
        std::vector<Requirement> depleted;
        for (const auto& r : target)
            if (!removed.contains(r.id)) depleted.push_back(r);
        rec.size_after = depleted.size();
        if (depleted.empty()) {
            rec.skip_reason = "target empty after injection";
            return;
        }
        auto post_cells = fused_cells(score_requirements(ctx, depleted, cfg.scoring));
        // Re-index onto the scored (non-empty) cells only.
        for (std::size_t q = 0; q < scored.size(); ++q) {
            rec.scores.push_back(post_cells.data()[scored[q]]);
            if (std::find(eligible.begin(), eligible.end(), scored[q]) != eligible.end())
                rec.injected.push_back(static_cast<int>(q));
        }
        rank_outcome(rec, scored.size());
        // Report injected cells in grid coordinates (t * K_s + s).
        for (auto& q : rec.injected) q = static_cast<int>(scored[static_cast<std::size_t>(q)]);
    });
    EvalRun run{std::move(records), {}};
    run.summary = summarise(run.records, cfg.large_threshold);
    return run;
}

// ------------------------------------------------------------- holdout

struct HoldoutPair {
    std::string removed;
    std::string target;
    std::vector<int> positives;
    std::vector<double> scores;
    double auroc = kMissing;
};

struct HoldoutRun {
    std::vector<HoldoutPair> pairs;  // valid pairs only
    double mean_auroc = kMissing;
    std::size_t skipped = 0;
};

/// Whole-project holdout: drop P_j from the corpus and check whether the
/// types it dominates (> share of corpus type mass) rank as gaps for every
/// other target P_k.
inline HoldoutRun run_holdout(const Dataset& d, const EmbeddingStore& store, const EvalConfig& cfg,
                              double dominance = 0.2) {
    const auto& projects = d.projects();
    const std::size_t M = projects.size(), K = d.taxonomy().size();
    if (M < 3) throw data_error("holdout needs at least 3 projects");
    std::vector<std::vector<double>> counts(M, std::vector<double>(K, 0.0));
    for (const auto& r : d.requirements()) {
        if (!r.type) continue;
        auto j = static_cast<std::size_t>(std::find(projects.begin(), projects.end(), r.project_id) - projects.begin());
        counts[j][static_cast<std::size_t>(*r.type)] += 1;
    }
    auto partition = project_partition(d);
    struct Job {
        std::size_t removed, target;
    };
    std::vector<Job> jobs;
    for (std::size_t j = 0; j < M; ++j)
        for (std::size_t k = 0; k < M; ++k)
            if (j != k) jobs.push_back({j, k});
    std::vector<std::optional<HoldoutPair>> results(jobs.size());
    parallel_for(jobs.size(), cfg.jobs, [&](std::size_t q) {
        auto [j, k] = jobs[q];
        std::vector<int> positives;
        std::vector<bool> positive(K, false);
        for (std::size_t t = 0; t < K; ++t) {
            double total = 0.0;
            for (std::size_t p = 0; p < M; ++p)
                if (p != k) total += counts[p][t];
            if (total > 0.0 && counts[j][t] / total > dominance) {
                positive[t] = true;
                positives.push_back(static_cast<int>(t));
            }
        }
        if (positives.empty() || positives.size() == K) return;
        std::vector<std::string> training;
        for (std::size_t p = 0; p < M; ++p)
            if (p != j && p != k) training.push_back(projects[p]);
        if (training.size() < 2) return;
        BuildOptions opts = cfg.build;
        opts.seed = derive_seed(opts.seed, j, k);
        CorpusArtifacts art;
        try {
            art = build_artifacts(d, training, store, opts);
        } catch (const Error&) {
            return;  // e.g. fewer than two labelled types left
        }
        FoldContext ctx{d, store, cfg, projects[k], training, art, q, opts.seed};
        auto scores = score_requirements(ctx, partition[k].second, cfg.scoring).psi_fused;
        results[q] = HoldoutPair{projects[j], projects[k], positives, scores, auroc(scores, positive)};
    });
    HoldoutRun run;
    std::vector<double> a;
    for (auto& r : results) {
        if (!r) {
            ++run.skipped;
            continue;
        }
        a.push_back(r->auroc);
        run.pairs.push_back(std::move(*r));
    }
    if (!a.empty()) run.mean_auroc = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    return run;
}

} // namespace geogap
