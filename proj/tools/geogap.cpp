// geogap command-line tool: build, score, eval, synth.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "geogap/geogap.hpp"

namespace {

using namespace geogap;

struct Settings {
    std::string config_path;
    std::string data, format, types, cache, endpoint, topics;
    std::vector<std::string> exclude_types;
    std::uint64_t seed = 0;
    std::size_t k = 1;
    std::size_t num_topics = kDefaultTopicCount;
    unsigned jobs = 1;
    std::string preset;
    double beta = 0.7, gamma = 0.1, epsilon = kDefaultEpsilon, tau = 0.1;
    std::string mode = "A";
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

void add_data_options(CLI::App* app, Settings& s) {
    app->add_option("--data", s.data, "Dataset file (CSV or JSONL)");
    app->add_option("--format", s.format, "Dataset format; inferred from the extension when omitted")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    app->add_option("--types", s.types, "Comma-separated taxonomy; defaults to the PROMISE NFR classes");
    app->add_option("--cache", s.cache, "Binary embedding cache");
    app->add_option("--endpoint", s.endpoint, std::string("Embedding service URL (env ") + kEndpointEnv + ")");
    app->add_option("--topics", s.topics, "Topic-distribution JSONL; fallback clustering when omitted");
    app->add_option("--exclude-type", s.exclude_types, "Drop requirements of this type (repeatable)");
}

void add_build_options(CLI::App* app, Settings& s) {
    app->add_option("--seed", s.seed, "Root random seed")->capture_default_str();
    app->add_option("--k", s.k, "Nearest neighbours in the coverage distance")->capture_default_str();
    app->add_option("--num-topics", s.num_topics, "Fallback topic count K_s")->capture_default_str();
}

void add_scoring_options(CLI::App* app, Settings& s) {
    app->add_option("--preset", s.preset, "Named configuration")
        ->check(CLI::IsMember({"geogap-g", "geogap-gt", "geogap"}));
    app->add_option("--beta", s.beta, "Geometric weight within the type-level mix")->capture_default_str();
    app->add_option("--gamma", s.gamma, "Weight of the population component")->capture_default_str();
    app->add_option("--epsilon", s.epsilon, "Stabiliser added to spreads")->capture_default_str();
    app->add_option("--mode", s.mode, "Project weighting: A uniform, B similarity")
        ->check(CLI::IsMember({"A", "B"}))
        ->capture_default_str();
    app->add_option("--tau", s.tau, "Mode B softmax temperature")->capture_default_str();
}

/// File values fill every option not given on the command line.
void apply_config(CLI::App* app, Settings& s) {
    if (s.config_path.empty()) return;
    auto cfg = Config::load(s.config_path);
    auto unset = [&](const char* flag) {
        try {
            return app->get_option(flag)->count() == 0;
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
    };
    auto str = [&](const char* flag, const char* key, std::string& field) {
        if (unset(flag))
            if (auto v = cfg.get(key)) field = *v;
    };
    auto dbl = [&](const char* flag, const char* key, double& field) {
        if (unset(flag))
            if (auto v = cfg.get_double(key)) field = *v;
    };
    auto integer = [&](const char* flag, const char* key, auto& field) {
        if (unset(flag))
            if (auto v = cfg.get_int(key)) {
                if (*v < 0) throw usage_error(std::string("config key '") + key + "' must be non-negative");
                field = static_cast<std::remove_reference_t<decltype(field)>>(*v);
            }
    };
    str("--data", "data", s.data);
    str("--format", "format", s.format);
    str("--types", "types", s.types);
    str("--cache", "cache", s.cache);
    str("--endpoint", "endpoint", s.endpoint);
    str("--topics", "topics", s.topics);
    if (unset("--exclude-type"))
        if (auto v = cfg.get("exclude_type")) s.exclude_types = split_list(*v);
    integer("--seed", "seed", s.seed);
    integer("--k", "k", s.k);
    integer("--num-topics", "num_topics", s.num_topics);
    integer("--jobs", "jobs", s.jobs);
    str("--preset", "preset", s.preset);
    dbl("--beta", "beta", s.beta);
    dbl("--gamma", "gamma", s.gamma);
    dbl("--epsilon", "epsilon", s.epsilon);
    dbl("--tau", "tau", s.tau);
    str("--mode", "mode", s.mode);
    if (s.mode != "A" && s.mode != "B") throw usage_error("mode must be A or B, got '" + s.mode + "'");
}

Taxonomy taxonomy_for(const Settings& s) {
    if (s.types.empty()) return Taxonomy::promise();
    return Taxonomy(split_list(s.types));
}

AliasTable aliases_for(const Settings& s) {
    AliasTable aliases = s.types.empty() ? promise_aliases() : AliasTable{};
    if (!s.config_path.empty())
        for (const auto& [raw, canon] : Config::load(s.config_path).section("aliases")) aliases[raw] = canon;
    return aliases;
}

Dataset load_data(const Settings& s, const Taxonomy& tax) {
    if (s.data.empty()) throw usage_error("--data is required");
    DatasetFormat fmt = s.format.empty() ? format_from_path(s.data)
                                         : (s.format == "jsonl" ? DatasetFormat::Jsonl : DatasetFormat::Csv);
    auto d = load_dataset(s.data, fmt, tax, aliases_for(s));
    if (!s.exclude_types.empty()) d = d.without_types(s.exclude_types);
    return d;
}

EmbeddingStore load_embeddings(const Dataset& d, const Settings& s) {
    if (!s.cache.empty()) {
        auto store = load_cache(s.cache);
        for (const auto& r : d.requirements()) store.index_of(r.id);
        return store;
    }
    RemoteOptions opts;
    opts.endpoint = s.endpoint;
    opts.apply_env();
    if (opts.endpoint.empty())
        throw usage_error(std::string("no embeddings: pass --cache or --endpoint (or set ") + kEndpointEnv + ")");
    std::vector<std::string> texts;
    for (const auto& r : d.requirements()) texts.push_back(r.text);
    auto vectors = fetch_remote(texts, opts);
    if (vectors.empty()) throw data_error("dataset is empty");
    EmbeddingStore store(vectors.front().size());
    for (std::size_t i = 0; i < vectors.size(); ++i) store.insert(d.requirements()[i].id, vectors[i]);
    return store;
}

ScoringConfig scoring_for(const Settings& s) {
    ScoringConfig c;
    if (!s.preset.empty()) {
        c = preset(s.preset);
    } else {
        c.beta = s.beta;
        c.gamma = s.gamma;
    }
    c.eps = s.epsilon;
    c.mode = s.mode == "B" ? WeightMode::Similarity : WeightMode::Uniform;
    c.tau = s.tau;
    if (!(c.tau > 0.0)) throw usage_error("tau must be positive");
    return c;
}

BuildOptions build_options_for(const Settings& s) {
    if (s.k < 1) throw usage_error("k must be at least 1");
    if (s.num_topics < 1) throw usage_error("num-topics must be at least 1");
    BuildOptions o;
    o.k = s.k;
    o.num_topics = s.num_topics;
    o.seed = s.seed;
    return o;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw data_error("write failed for '" + path + "'");
}

// ------------------------------------------------------------------ build

int cmd_build(CLI::App* app, Settings& s, const std::string& out_path) {
    apply_config(app, s);
    auto tax = taxonomy_for(s);
    auto d = load_data(s, tax);
    auto store = load_embeddings(d, s);
    auto opts = build_options_for(s);
    std::optional<IngestedTopics> topics;
    if (!s.topics.empty()) {
        std::vector<std::string> ids;
        for (const auto& r : d.requirements()) ids.push_back(r.id);
        topics = ingest_topics(s.topics, ids);
        opts.topics = &*topics;
    }
    auto art = build_artifacts(d, d.projects(), store, opts);
    auto text = serialize_artifacts(art);
    write_text(out_path, text);
    std::cout << "N=" << art.num_points() << " M=" << art.num_projects() << " K_t=" << art.num_types()
              << " K_s=" << art.num_topics() << " T*=" << art.temperature << " accuracy=" << art.hard_accuracy
              << " fingerprint=" << fingerprint(text) << '\n';
    return 0;
}

// ------------------------------------------------------------------ score

struct ScoreArgs {
    std::string artifacts, out, svg;
    std::size_t top_n = 5;
    double novelty_z = 2.0;
    std::optional<double> fail_on_gap;
};

int cmd_score(CLI::App* app, Settings& s, const ScoreArgs& a) {
    apply_config(app, s);
    auto text = read_file(a.artifacts);
    auto art = artifacts_from_json([&] {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw data_error("artifact file '" + a.artifacts + "' is not valid JSON: " + e.what());
        }
    }());
    auto d = load_data(s, art.taxonomy);
    if (d.size() == 0) throw data_error("target dataset is empty");
    auto store = load_embeddings(d, s);
    std::vector<std::string> ids;
    for (const auto& r : d.requirements()) ids.push_back(r.id);
    std::optional<IngestedTopics> topics;
    if (!s.topics.empty()) {
        if (!art.topic_model.ingested())
            throw usage_error("--topics given but the artifacts were built with fallback topics");
        topics = ingest_topics(s.topics, ids);
        if (topics->model.num_topics != art.num_topics())
            throw data_error("topic file has K_s=" + std::to_string(topics->model.num_topics) +
                             " but the artifacts have K_s=" + std::to_string(art.num_topics()));
    } else if (art.topic_model.ingested()) {
        throw usage_error("artifacts use ingested topics; pass --topics with rows for the target");
    }
    auto target = make_target(store, ids, topics ? &topics->distribution : nullptr);
    auto result = score_project(target, art, scoring_for(s));
    auto report = gap_report(result, art.taxonomy, topic_labels(art.topic_model), a.top_n, fingerprint(text));
    report.novelties = novelties(ids, target.vectors, art, a.novelty_z, s.epsilon);

    if (report.below_reliability_floor)
        std::cerr << "geogap: warning: target has " << result.target_size << " requirements; scores are unreliable below "
                  << kReliableTargetSize << '\n';
    auto json = serialize_report(report);
    if (a.out.empty() || a.out == "-")
        std::cout << json;
    else
        write_text(a.out, json);
    if (!a.svg.empty()) write_text(a.svg, heatmap_svg(fused_cells(result), art.taxonomy.names(), report.topics));

    if (a.fail_on_gap) {
        double top = *std::max_element(result.psi_fused.begin(), result.psi_fused.end());
        if (top >= *a.fail_on_gap) return 4;
    }
    return 0;
}

// ------------------------------------------------------------------- eval

const std::vector<std::string>& experiments() {
    static const std::vector<std::string> names = {"type-level", "fraction", "k-sweep", "permutation",
                                                   "cell",       "holdout",  "baseline"};
    return names;
}

struct EvalArgs {
    std::string experiment, out, name;
    double fraction = 1.0;
    std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
    std::vector<std::size_t> ks = {1, 3, 5, 10};
    std::size_t n_targets = 3, min_count = 3, n_cells = 5, permutations = 1000, large_threshold = 50;
    double dominance = 0.2;
};

int cmd_eval(CLI::App* app, Settings& s, const EvalArgs& a) {
    if (std::find(experiments().begin(), experiments().end(), a.experiment) == experiments().end()) {
        std::string valid;
        for (const auto& n : experiments()) valid += (valid.empty() ? "" : ", ") + n;
        throw usage_error("unknown experiment '" + a.experiment + "' (valid: " + valid + ")");
    }
    apply_config(app, s);
    auto tax = taxonomy_for(s);
    auto d = load_data(s, tax);
    auto store = load_embeddings(d, s);

    EvalConfig cfg;
    cfg.build = build_options_for(s);
    cfg.scoring = scoring_for(s);
    cfg.jobs = std::max(1u, s.jobs);
    cfg.large_threshold = a.large_threshold;
    std::optional<IngestedTopics> topics;
    if (!s.topics.empty()) {
        std::vector<std::string> ids;
        for (const auto& r : d.requirements()) ids.push_back(r.id);
        topics = ingest_topics(s.topics, ids);
        cfg.build.topics = &*topics;
    }
    InjectionSpec spec;
    spec.fraction = a.fraction;
    spec.n_targets = a.n_targets;
    spec.min_count = a.min_count;
    spec.seed = s.seed;

    std::ofstream file;
    if (!a.out.empty() && a.out != "-") {
        file.open(a.out, std::ios::binary);
        if (!file) throw data_error("cannot write '" + a.out + "'");
    }
    std::ostream& records = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
    auto emit_run = [&](const EvalRun& run, nlohmann::json extra) {
        for (const auto& r : run.records) {
            auto j = record_json(r);
            for (auto& [key, v] : extra.items()) j[key] = v;
            records << j.dump() << '\n';
        }
        nlohmann::json summary{{"summary", summary_json(run.summary)}};
        for (auto& [key, v] : extra.items()) summary[key] = v;
        std::cout << summary.dump() << '\n';
    };

    const auto& e = a.experiment;
    if (e == "type-level") {
        emit_run(run_type_level(d, store, cfg, spec), {{"experiment", e}});
    } else if (e == "baseline") {
        if (a.name.empty()) throw usage_error("eval baseline needs --name");
        nlohmann::json extra{{"experiment", e}, {"baseline", a.name}};
        if (a.name == "classifier") extra["classifier"] = "nearest-centroid";
        emit_run(run_type_level(d, store, cfg, spec, baseline_detector(a.name)), extra);
    } else if (e == "fraction") {
        for (const auto& p : run_fraction_sweep(d, store, cfg, spec, a.fractions))
            emit_run(p.run, {{"experiment", e}, {"fraction", p.value}});
    } else if (e == "k-sweep") {
        for (const auto& p : run_k_sweep(d, store, cfg, spec, a.ks))
            emit_run(p.run, {{"experiment", e}, {"k", p.value}});
    } else if (e == "cell") {
        emit_run(run_cell_level(d, store, cfg, spec, CellSpec{a.n_cells}), {{"experiment", e}});
    } else if (e == "permutation") {
        auto run = run_type_level(d, store, cfg, spec);
        std::vector<ProjectScores> projects;
        for (const auto& r : run.records)
            if (r.evaluated()) projects.push_back({r.target, r.scores, r.auroc});
        std::size_t significant = 0;
        for (const auto& p : permutation_test(projects, a.permutations, a.n_targets, s.seed)) {
            records << permutation_json(p).dump() << '\n';
            significant += p.significant ? 1 : 0;
        }
        std::cout << nlohmann::json{{"experiment", e},
                                    {"summary", {{"projects", projects.size()}, {"significant", significant}}}}
                         .dump()
                  << '\n';
    } else if (e == "holdout") {
        auto run = run_holdout(d, store, cfg, a.dominance);
        for (const auto& p : run.pairs) records << holdout_pair_json(p).dump() << '\n';
        std::cout << nlohmann::json{{"experiment", e},
                                    {"summary",
                                     {{"pairs", run.pairs.size()},
                                      {"skipped", run.skipped},
                                      {"mean_auroc", is_missing(run.mean_auroc) ? nlohmann::json(nullptr)
                                                                                : nlohmann::json(run.mean_auroc)}}}}
                         .dump()
                  << '\n';
    }
    return 0;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    SyntheticSpec spec;
    std::string out_data, out_cache, out_config;
};

int cmd_synth(const SynthArgs& a) {
    auto corpus = make_synthetic(a.spec);
    save_dataset(a.out_data, corpus.dataset, format_from_path(a.out_data));
    cache::save(a.out_cache, corpus.store);
    std::string types;
    for (const auto& n : corpus.dataset.taxonomy().names()) types += (types.empty() ? "" : ",") + n;
    if (!a.out_config.empty())
        write_text(a.out_config, "data = \"" + a.out_data + "\"\ncache = \"" + a.out_cache + "\"\ntypes = \"" +
                                     types + "\"\nseed = " + std::to_string(a.spec.seed) + "\n");
    std::cout << "N=" << corpus.dataset.size() << " M=" << corpus.dataset.projects().size()
              << " K_t=" << corpus.dataset.taxonomy().size() << " d=" << a.spec.dim << " types=" << types << '\n';
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Coverage-gap detection for requirement sets in embedding space"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "geogap 0.1.0");
    Settings s;
    int rc = 0;

    auto* build = app.add_subcommand("build", "Fit corpus artifacts from a labelled dataset");
    std::string build_out;
    build->add_option("--config", s.config_path, "Key-value configuration file");
    add_data_options(build, s);
    add_build_options(build, s);
    build->add_option("--out", build_out, "Artifact file to write")->required();
    build->callback([&] { rc = cmd_build(build, s, build_out); });

    auto* score = app.add_subcommand("score", "Score a target project against corpus artifacts");
    ScoreArgs sa;
    score->add_option("--config", s.config_path, "Key-value configuration file");
    score->add_option("--artifacts", sa.artifacts, "Artifact file from `geogap build`")->required();
    add_data_options(score, s);
    add_scoring_options(score, s);
    score->add_option("--top-n", sa.top_n, "Entries in the report summary")->capture_default_str();
    score->add_option("--novelty-z", sa.novelty_z, "z-score above which a requirement is listed as novel")
        ->capture_default_str();
    score->add_option("--out", sa.out, "Report file (stdout when omitted)");
    score->add_option("--svg", sa.svg, "Also write the fused cell heatmap as SVG");
    score->add_option("--fail-on-gap", sa.fail_on_gap, "Exit with status 4 when any fused score reaches this value");
    score->callback([&] { rc = cmd_score(score, s, sa); });

    auto* eval = app.add_subcommand("eval", "Run an evaluation experiment");
    EvalArgs ea;
    std::string valid;
    for (const auto& n : experiments()) valid += (valid.empty() ? "" : ", ") + n;
    eval->add_option("experiment", ea.experiment, "One of: " + valid)->required();
    eval->add_option("--config", s.config_path, "Key-value configuration file");
    add_data_options(eval, s);
    add_build_options(eval, s);
    add_scoring_options(eval, s);
    eval->add_option("--jobs", s.jobs, "Worker threads across folds")->capture_default_str();
    eval->add_option("--f", ea.fraction, "Removal fraction")->capture_default_str();
    eval->add_option("--fractions", ea.fractions, "Fractions for the fraction sweep")->capture_default_str();
    eval->add_option("--ks", ea.ks, "Neighbour counts for the k sweep")->capture_default_str();
    eval->add_option("--n-targets", ea.n_targets, "Types removed per fold")->capture_default_str();
    eval->add_option("--min-count", ea.min_count, "Target requirements a type needs to be removable")
        ->capture_default_str();
    eval->add_option("--n-cells", ea.n_cells, "Cells removed per fold (cell experiment)")->capture_default_str();
    eval->add_option("--permutations", ea.permutations, "Null draws per project")->capture_default_str();
    eval->add_option("--dominance", ea.dominance, "Corpus share making a type depend on the held-out project")
        ->capture_default_str();
    eval->add_option("--large-threshold", ea.large_threshold, "Target size counted as large")->capture_default_str();
    eval->add_option("--name", ea.name, "Baseline name: random, gt-count, tfidf-knn, classifier, mmd, centroid");
    eval->add_option("--out", ea.out, "Per-fold JSONL (stdout when omitted)");
    eval->callback([&] { rc = cmd_eval(eval, s, ea); });

    auto* synth = app.add_subcommand("synth", "Generate a planted-cluster corpus with its embedding cache");
    SynthArgs ya;
    synth->add_option("--out-data", ya.out_data, "Dataset file to write")->required();
    synth->add_option("--out-cache", ya.out_cache, "Embedding cache to write")->required();
    synth->add_option("--out-config", ya.out_config, "Also write a configuration file for the corpus");
    synth->add_option("--projects", ya.spec.projects, "Projects")->capture_default_str();
    synth->add_option("--types", ya.spec.types, "Types")->capture_default_str();
    synth->add_option("--per-type", ya.spec.per_type, "Points per project and type")->capture_default_str();
    synth->add_option("--dim", ya.spec.dim, "Embedding dimension")->capture_default_str();
    synth->add_option("--noise", ya.spec.noise, "Gaussian noise per coordinate")->capture_default_str();
    synth->add_option("--seed", ya.spec.seed, "Random seed")->capture_default_str();
    synth->callback([&] { rc = cmd_synth(ya); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "geogap: usage error: " << e.what() << '\n';
        return 1;
    }
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const geogap::Error& e) {
        std::cerr << "geogap: error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "geogap: error: " << e.what() << '\n';
        return 2;
    }
}
