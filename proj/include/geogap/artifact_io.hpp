#pragma once
// Corpus-artifact container: a JSON document whose matrices are stored as
// base64 of little-endian IEEE-754 doubles, so every value round-trips
// bit-exactly. NaN entries (undefined per-project statistics) survive too.

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geogap/gap_scoring.hpp"

namespace geogap {

inline constexpr const char* kArtifactFormat = "geogap-corpus-artifacts";
inline constexpr int kArtifactVersion = 1;

namespace b64 {

inline constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        std::uint32_t v = (std::uint8_t(bytes[i]) << 16) | (std::uint8_t(bytes[i + 1]) << 8) | std::uint8_t(bytes[i + 2]);
        for (int s = 18; s >= 0; s -= 6) out.push_back(kAlphabet[(v >> s) & 63]);
    }
    if (std::size_t rem = bytes.size() - i; rem) {
        std::uint32_t v = std::uint8_t(bytes[i]) << 16;
        if (rem == 2) v |= std::uint8_t(bytes[i + 1]) << 8;
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(rem == 2 ? kAlphabet[(v >> 6) & 63] : '=');
        out.push_back('=');
    }
    return out;
}

inline std::string decode(std::string_view text) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (text.size() % 4 != 0) throw data_error("artifact: malformed base64 block");
    std::string out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t v = 0;
        int pad = 0;
        for (int j = 0; j < 4; ++j) {
            char c = text[i + j];
            if (c == '=') {
                ++pad;
                v <<= 6;
                continue;
            }
            int x = value(c);
            if (x < 0 || pad) throw data_error("artifact: malformed base64 block");
            v = (v << 6) | static_cast<std::uint32_t>(x);
        }
        out.push_back(static_cast<char>((v >> 16) & 0xFF));
        if (pad < 2) out.push_back(static_cast<char>((v >> 8) & 0xFF));
        if (pad < 1) out.push_back(static_cast<char>(v & 0xFF));
    }
    return out;
}

} // namespace b64

namespace detail {

inline std::string pack_doubles(std::span<const double> values) {
    std::string bytes(values.size() * 8, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto u = std::bit_cast<std::uint64_t>(values[i]);
        for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<char>((u >> (8 * b)) & 0xFF);
    }
    return b64::encode(bytes);
}

inline std::vector<double> unpack_doubles(const std::string& text) {
    auto bytes = b64::decode(text);
    if (bytes.size() % 8) throw data_error("artifact: matrix payload is not a whole number of doubles");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t u = 0;
        for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes[i * 8 + b])) << (8 * b);
        out[i] = std::bit_cast<double>(u);
    }
    return out;
}

inline nlohmann::json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"f64le", pack_doubles(m.data())}};
}

inline Matrix matrix_from(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    auto v = unpack_doubles(j.at("f64le").get<std::string>());
    if (v.size() != m.rows() * m.cols()) throw data_error("artifact: matrix payload size mismatch");
    m.data() = std::move(v);
    return m;
}

inline nlohmann::json vector_json(std::span<const double> v) { return pack_doubles(v); }
inline std::vector<double> vector_from(const nlohmann::json& j) { return unpack_doubles(j.get<std::string>()); }

} // namespace detail

inline nlohmann::json artifacts_to_json(const CorpusArtifacts& a) {
    using detail::matrix_json;
    using detail::vector_json;
    nlohmann::json j;
    j["format"] = kArtifactFormat;
    j["version"] = kArtifactVersion;
    j["taxonomy"] = {{"types", a.taxonomy.names()}, {"parents", a.taxonomy.parents()}};
    j["k"] = a.k;
    j["projects"] = a.projects;
    j["project_means"] = matrix_json(a.project_means);
    j["project_type_counts"] = matrix_json(a.project_type_counts);
    j["point_ids"] = a.point_ids;
    j["points"] = matrix_json(a.points);
    j["point_project"] = a.point_project;
    j["point_label"] = a.point_label;
    j["point_type"] = a.point_type;
    std::vector<int> present(a.centroids.present.begin(), a.centroids.present.end());
    j["centroids"] = {{"mu", matrix_json(a.centroids.mu)}, {"present", present}};
    j["temperature"] = vector_json(std::vector<double>{a.temperature});
    j["diagnostics"] = {{"hard_accuracy", a.hard_accuracy}, {"macro_f1", a.macro_f1}};
    nlohmann::json tm = {{"K_s", a.topic_model.num_topics}, {"labels", a.topic_model.labels}};
    if (a.topic_model.centroids) {
        tm["centroids"] = matrix_json(*a.topic_model.centroids);
        tm["temperature"] = vector_json(std::vector<double>{a.topic_model.temperature});
    }
    j["topic_model"] = tm;
    j["point_topics"] = matrix_json(a.point_topics);
    j["phi_by_project"] = matrix_json(a.phi_by_project);
    j["type_distance_by_project"] = matrix_json(a.type_distance_by_project);
    j["soft_count_by_project"] = matrix_json(a.soft_count_by_project);
    j["phi0"] = vector_json(a.phi0);
    j["phi_sd"] = vector_json(a.phi_sd);
    j["type_distance_mean"] = vector_json(a.type_distance_mean);
    j["type_distance_sd"] = vector_json(a.type_distance_sd);
    j["soft_count_mean"] = vector_json(a.soft_count_mean);
    j["soft_count_sd"] = vector_json(a.soft_count_sd);
    j["novelty"] = vector_json(std::vector<double>{a.novelty_mean, a.novelty_sd});
    return j;
}

inline CorpusArtifacts artifacts_from_json(const nlohmann::json& j) {
    using detail::matrix_from;
    using detail::vector_from;
    try {
        if (j.value("format", "") != kArtifactFormat) throw data_error("not a corpus-artifact file");
        if (j.value("version", 0) != kArtifactVersion)
            throw data_error("unsupported corpus-artifact version " + std::to_string(j.value("version", 0)));
        CorpusArtifacts a;
        a.taxonomy = Taxonomy(j.at("taxonomy").at("types").get<std::vector<std::string>>(),
                              j.at("taxonomy").at("parents").get<std::map<std::string, std::string>>());
        a.k = j.at("k").get<std::size_t>();
        a.projects = j.at("projects").get<std::vector<std::string>>();
        a.project_means = matrix_from(j.at("project_means"));
        a.project_type_counts = matrix_from(j.at("project_type_counts"));
        a.point_ids = j.at("point_ids").get<std::vector<std::string>>();
        a.points = matrix_from(j.at("points"));
        a.point_project = j.at("point_project").get<std::vector<int>>();
        a.point_label = j.at("point_label").get<std::vector<int>>();
        a.point_type = j.at("point_type").get<std::vector<int>>();
        a.centroids.mu = matrix_from(j.at("centroids").at("mu"));
        for (int p : j.at("centroids").at("present").get<std::vector<int>>()) a.centroids.present.push_back(p != 0);
        a.temperature = vector_from(j.at("temperature")).at(0);
        a.hard_accuracy = j.at("diagnostics").at("hard_accuracy").get<double>();
        a.macro_f1 = j.at("diagnostics").at("macro_f1").get<double>();
        const auto& tm = j.at("topic_model");
        a.topic_model.num_topics = tm.at("K_s").get<std::size_t>();
        a.topic_model.labels = tm.at("labels").get<std::vector<std::string>>();
        if (tm.contains("centroids")) {
            a.topic_model.centroids = matrix_from(tm.at("centroids"));
            a.topic_model.temperature = vector_from(tm.at("temperature")).at(0);
        }
        a.point_topics = matrix_from(j.at("point_topics"));
        a.phi_by_project = matrix_from(j.at("phi_by_project"));
        a.type_distance_by_project = matrix_from(j.at("type_distance_by_project"));
        a.soft_count_by_project = matrix_from(j.at("soft_count_by_project"));
        a.phi0 = vector_from(j.at("phi0"));
        a.phi_sd = vector_from(j.at("phi_sd"));
        a.type_distance_mean = vector_from(j.at("type_distance_mean"));
        a.type_distance_sd = vector_from(j.at("type_distance_sd"));
        a.soft_count_mean = vector_from(j.at("soft_count_mean"));
        a.soft_count_sd = vector_from(j.at("soft_count_sd"));
        auto nov = vector_from(j.at("novelty"));
        a.novelty_mean = nov.at(0);
        a.novelty_sd = nov.at(1);

        const std::size_t n = a.points.rows(), K = a.taxonomy.size(), M = a.projects.size();
        if (a.point_ids.size() != n || a.point_project.size() != n || a.point_label.size() != n ||
            a.point_type.size() != n || a.point_topics.rows() != n || a.phi_by_project.rows() != n ||
            a.phi0.size() != n || a.centroids.mu.rows() != K || a.phi_by_project.cols() != M ||
            a.type_distance_by_project.rows() != K || a.soft_count_by_project.rows() != K)
            throw data_error("corpus-artifact file is internally inconsistent");
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("corpus-artifact file is malformed: ") + e.what());
    }
}

inline std::string serialize_artifacts(const CorpusArtifacts& a) { return artifacts_to_json(a).dump(1) + "\n"; }

inline void save_artifacts(const std::string& path, const CorpusArtifacts& a) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write artifact file '" + path + "'");
    out << serialize_artifacts(a);
    if (!out) throw data_error("failed writing artifact file '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline CorpusArtifacts load_artifacts(const std::string& path) {
    auto text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw data_error("artifact file '" + path + "' is not valid JSON: " + e.what());
    }
    return artifacts_from_json(j);
}

/// FNV-1a 64-bit hash, hex encoded; identifies the corpus a report came from.
inline std::string fingerprint(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 15];
        h >>= 4;
    }
    return out;
}

} // namespace geogap
