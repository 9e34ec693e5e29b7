#pragma once
// JSON views of evaluation outputs. Missing values are written as null.

#include <nlohmann/json.hpp>

#include "geogap/eval.hpp"

namespace geogap {

namespace detail {

inline nlohmann::json number_or_null(double v) { return is_missing(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

} // namespace detail

inline nlohmann::json record_json(const EvalRecord& r) {
    nlohmann::json j{{"fold", r.fold},
                     {"target", r.target},
                     {"seed", r.seed},
                     {"size_before", r.size_before},
                     {"size_after", r.size_after},
                     {"injected", r.injected},
                     {"scores", r.scores},
                     {"ranking", r.ranking},
                     {"injected_ranks", r.injected_ranks},
                     {"auroc", detail::number_or_null(r.auroc)},
                     {"reciprocal_rank", detail::number_or_null(r.reciprocal_rank)}};
    j["skip_reason"] = r.skip_reason ? nlohmann::json(*r.skip_reason) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json mean_sd_json(const MeanSd& m) {
    return {{"mean", detail::number_or_null(m.mean)}, {"sd", detail::number_or_null(m.sd)}, {"n", m.n}};
}

inline nlohmann::json summary_json(const EvalSummary& s) {
    return {{"auroc_all", mean_sd_json(s.auroc_all)},
            {"auroc_large", mean_sd_json(s.auroc_large)},
            {"mrr", detail::number_or_null(s.mrr)},
            {"folds", s.folds},
            {"skipped", s.skipped}};
}

inline nlohmann::json permutation_json(const PermutationResult& p) {
    return {{"project", p.project},
            {"observed_auroc", detail::number_or_null(p.observed_auroc)},
            {"null_p95", detail::number_or_null(p.null_p95)},
            {"significant", p.significant}};
}

inline nlohmann::json holdout_pair_json(const HoldoutPair& p) {
    return {{"removed", p.removed},
            {"target", p.target},
            {"positives", p.positives},
            {"scores", p.scores},
            {"auroc", detail::number_or_null(p.auroc)}};
}

} // namespace geogap
