#pragma once
// Gap report (JSON), heatmap (SVG) and novelty listing.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geogap/error.hpp"
#include "geogap/gap_scoring.hpp"

namespace geogap {

inline constexpr std::size_t kReliableTargetSize = 50;
inline constexpr const char* kReportFormat = "geogap-gap-report";
inline constexpr int kReportVersion = 1;

struct RankedType {
    std::string type;
    int index = 0;
    double psi = 0.0;
    double psi_geo = 0.0, psi_type = 0.0, psi_pop = 0.0;
    bool type_available = false, pop_available = false;
};

struct Novelty {
    std::string id;
    double distance = 0.0;
    double z = 0.0;
};

struct GapReport {
    std::string mode = "A";
    ScoringConfig config;
    std::size_t k = 1;
    std::string corpus_fingerprint;
    std::size_t target_size = 0;
    bool below_reliability_floor = false;

    std::vector<std::string> types;
    std::vector<std::string> topics;
    std::vector<RankedType> ranking;   // all types, descending fused score
    std::vector<RankedType> top;       // first top_n of ranking
    std::vector<double> psi_geo, psi_type, psi_pop, psi_fused;
    Matrix psi_cell, cell_mass, occupancy;
    std::vector<double> project_weights;
    std::vector<Novelty> novelties;
};

inline std::vector<std::string> topic_labels(const TopicModel& tm) {
    if (tm.labels.size() == tm.num_topics) return tm.labels;
    std::vector<std::string> out;
    for (std::size_t s = 0; s < tm.num_topics; ++s) out.push_back("topic " + std::to_string(s));
    return out;
}

inline GapReport gap_report(const GapResult& r, const Taxonomy& taxonomy, std::vector<std::string> topics,
                            std::size_t top_n, std::string fingerprint = {}) {
    GapReport rep;
    rep.mode = r.config.mode == WeightMode::Uniform ? "A" : "B";
    rep.config = r.config;
    rep.k = r.k;
    rep.corpus_fingerprint = std::move(fingerprint);
    rep.target_size = r.target_size;
    rep.below_reliability_floor = r.target_size < kReliableTargetSize;
    rep.types = taxonomy.names();
    rep.topics = std::move(topics);
    for (int t : rank_descending(r.psi_fused)) {
        auto i = static_cast<std::size_t>(t);
        rep.ranking.push_back({taxonomy.name(i), t, r.psi_fused[i], r.psi_geo[i], r.psi_type[i], r.psi_pop[i],
                               r.type_available[i], r.pop_available[i]});
    }
    rep.top.assign(rep.ranking.begin(),
                   rep.ranking.begin() + static_cast<std::ptrdiff_t>(std::min(top_n, rep.ranking.size())));
    rep.psi_geo = r.psi_geo;
    rep.psi_type = r.psi_type;
    rep.psi_pop = r.psi_pop;
    rep.psi_fused = r.psi_fused;
    rep.psi_cell = r.psi_cell;
    rep.cell_mass = r.cell_mass;
    rep.occupancy = r.occupancy;
    rep.project_weights = r.weights.w;
    return rep;
}

namespace detail {

inline nlohmann::json grid_json(const Matrix& m) {
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        out.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return out;
}

inline Matrix grid_from(const nlohmann::json& j) {
    Matrix m;
    for (const auto& row : j) m.append_row(row.get<std::vector<double>>());
    return m;
}

inline nlohmann::json ranked_json(const RankedType& r) {
    return {{"type", r.type},         {"index", r.index},
            {"psi", r.psi},           {"psi_geo", r.psi_geo},
            {"psi_type", r.psi_type}, {"psi_pop", r.psi_pop},
            {"type_available", r.type_available}, {"pop_available", r.pop_available}};
}

inline RankedType ranked_from(const nlohmann::json& j) {
    return {j.at("type").get<std::string>(), j.at("index").get<int>(),        j.at("psi").get<double>(),
            j.at("psi_geo").get<double>(),   j.at("psi_type").get<double>(), j.at("psi_pop").get<double>(),
            j.at("type_available").get<bool>(), j.at("pop_available").get<bool>()};
}

} // namespace detail

inline nlohmann::json report_to_json(const GapReport& rep) {
    nlohmann::json j;
    j["format"] = kReportFormat;
    j["version"] = kReportVersion;
    j["mode"] = rep.mode;
    j["config"] = {{"k", rep.k},          {"beta", rep.config.beta}, {"gamma", rep.config.gamma},
                   {"epsilon", rep.config.eps}, {"tau", rep.config.tau}};
    j["corpus_fingerprint"] = rep.corpus_fingerprint;
    j["target_size"] = rep.target_size;
    j["below_reliability_floor"] = rep.below_reliability_floor;
    j["types"] = rep.types;
    j["topics"] = rep.topics;
    auto ranked = nlohmann::json::array();
    for (const auto& r : rep.ranking) ranked.push_back(detail::ranked_json(r));
    j["ranking"] = std::move(ranked);
    auto top = nlohmann::json::array();
    for (const auto& r : rep.top) top.push_back(detail::ranked_json(r));
    j["summary"] = {{"top_n", rep.top.size()}, {"top", std::move(top)}};
    j["components"] = {{"psi_geo", rep.psi_geo},
                       {"psi_type", rep.psi_type},
                       {"psi_pop", rep.psi_pop},
                       {"psi_fused", rep.psi_fused}};
    j["cells"] = {{"psi", detail::grid_json(rep.psi_cell)}, {"corpus_mass", detail::grid_json(rep.cell_mass)}};
    j["occupancy"] = detail::grid_json(rep.occupancy);
    j["project_weights"] = rep.project_weights;
    auto nov = nlohmann::json::array();
    for (const auto& n : rep.novelties) nov.push_back({{"id", n.id}, {"distance", n.distance}, {"z", n.z}});
    j["novelties"] = std::move(nov);
    return j;
}

inline GapReport report_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != kReportFormat) throw data_error("not a gap report");
        if (j.at("version") != kReportVersion)
            throw data_error("unsupported report version " + j.at("version").dump());
        GapReport rep;
        rep.mode = j.at("mode").get<std::string>();
        const auto& c = j.at("config");
        rep.k = c.at("k").get<std::size_t>();
        rep.config.beta = c.at("beta").get<double>();
        rep.config.gamma = c.at("gamma").get<double>();
        rep.config.eps = c.at("epsilon").get<double>();
        rep.config.tau = c.at("tau").get<double>();
        rep.config.mode = rep.mode == "B" ? WeightMode::Similarity : WeightMode::Uniform;
        rep.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
        rep.target_size = j.at("target_size").get<std::size_t>();
        rep.below_reliability_floor = j.at("below_reliability_floor").get<bool>();
        rep.types = j.at("types").get<std::vector<std::string>>();
        rep.topics = j.at("topics").get<std::vector<std::string>>();
        for (const auto& r : j.at("ranking")) rep.ranking.push_back(detail::ranked_from(r));
        for (const auto& r : j.at("summary").at("top")) rep.top.push_back(detail::ranked_from(r));
        const auto& comp = j.at("components");
        rep.psi_geo = comp.at("psi_geo").get<std::vector<double>>();
        rep.psi_type = comp.at("psi_type").get<std::vector<double>>();
        rep.psi_pop = comp.at("psi_pop").get<std::vector<double>>();
        rep.psi_fused = comp.at("psi_fused").get<std::vector<double>>();
        rep.psi_cell = detail::grid_from(j.at("cells").at("psi"));
        rep.cell_mass = detail::grid_from(j.at("cells").at("corpus_mass"));
        rep.occupancy = detail::grid_from(j.at("occupancy"));
        rep.project_weights = j.at("project_weights").get<std::vector<double>>();
        for (const auto& n : j.at("novelties"))
            rep.novelties.push_back({n.at("id").get<std::string>(), n.at("distance").get<double>(),
                                     n.at("z").get<double>()});
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("malformed gap report: ") + e.what());
    }
}

inline std::string serialize_report(const GapReport& rep) { return report_to_json(rep).dump(2) + "\n"; }

inline GapReport parse_report(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("gap report is not valid JSON: ") + e.what());
    }
    return report_from_json(j);
}

// ---------------------------------------------------------------- novelty

/// Reverse-coverage z-scores of target points against the corpus, keeping
/// those above `threshold`, most novel first.
inline std::vector<Novelty> novelties(const std::vector<std::string>& target_ids, const Matrix& target,
                                      const CorpusArtifacts& art, double threshold,
                                      double eps = kDefaultEpsilon) {
    std::vector<Novelty> out;
    for (std::size_t y = 0; y < target.rows(); ++y) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < art.num_points(); ++x)
            best = std::min(best, cosine_distance(target.row(y), art.points.row(x)));
        double z = (best - art.novelty_mean) / (art.novelty_sd + eps);
        if (z > threshold) out.push_back({target_ids[y], best, z});
    }
    std::stable_sort(out.begin(), out.end(), [](const Novelty& a, const Novelty& b) { return a.z > b.z; });
    return out;
}

// ---------------------------------------------------------------- heatmap

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string hex_colour(int r, int g, int b) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace detail

/// Diverging colour for a score: white at 0, pure red at +5, pure blue at -5.
inline std::string diverging_colour(double v) {
    double a = std::isfinite(v) ? clip_score(v) / kScoreClip : 0.0;
    int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(a))));
    if (a > 0) return detail::hex_colour(255, fade, fade);
    if (a < 0) return detail::hex_colour(fade, fade, 255);
    return detail::hex_colour(255, 255, 255);
}

inline std::string heatmap_svg(const Matrix& grid, const std::vector<std::string>& row_labels,
                               const std::vector<std::string>& col_labels, const std::string& title = "Gap scores") {
    constexpr int cell = 40, left = 140, top = 110, pad = 10;
    const int rows = static_cast<int>(grid.rows()), cols = static_cast<int>(grid.cols());
    const int width = left + cols * cell + pad, height = top + rows * cell + pad;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "<title>" << detail::xml_escape(title) << "</title>\n"
       << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int c = 0; c < cols; ++c) {
        auto label = c < static_cast<int>(col_labels.size()) ? col_labels[static_cast<std::size_t>(c)]
                                                              : std::to_string(c);
        int x = left + c * cell + cell / 2;
        os << "<text x=\"" << x << "\" y=\"" << top - 6 << "\" transform=\"rotate(-60 " << x << ' ' << top - 6
           << ")\">" << detail::xml_escape(label) << "</text>\n";
    }
    for (int r = 0; r < rows; ++r) {
        auto label = r < static_cast<int>(row_labels.size()) ? row_labels[static_cast<std::size_t>(r)]
                                                              : std::to_string(r);
        os << "<text x=\"" << left - 6 << "\" y=\"" << top + r * cell + cell / 2 + 4
           << "\" text-anchor=\"end\">" << detail::xml_escape(label) << "</text>\n";
    }
    os << "</g>\n<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
    char value[32];
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double v = grid(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            std::snprintf(value, sizeof value, "%.4f", v);
            os << "<rect x=\"" << left + c * cell << "\" y=\"" << top + r * cell << "\" width=\"" << cell
               << "\" height=\"" << cell << "\" fill=\"" << diverging_colour(v) << "\"><title>"
               << detail::xml_escape(r < static_cast<int>(row_labels.size()) ? row_labels[static_cast<std::size_t>(r)]
                                                                             : std::to_string(r))
               << " / "
               << detail::xml_escape(c < static_cast<int>(col_labels.size()) ? col_labels[static_cast<std::size_t>(c)]
                                                                             : std::to_string(c))
               << ": " << value << "</title></rect>\n";
        }
    os << "</g>\n</svg>\n";
    return os.str();
}

} // namespace geogap
