#pragma once
// Requirement datasets: loading, validation against a type taxonomy,
// per-project partitioning and leave-one-project-out splits.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "geogap/error.hpp"

namespace geogap {

struct Requirement {
    std::string id;
    std::string text;
    std::string project_id;
    std::optional<int> type;  // index into the taxonomy

    friend bool operator==(const Requirement&, const Requirement&) = default;
};

class Taxonomy {
public:
    Taxonomy() = default;

    explicit Taxonomy(std::vector<std::string> names,
                      std::map<std::string, std::string> parents = {})
        : names_(std::move(names)), parents_(std::move(parents)) {
        if (names_.size() < 2) throw data_error("taxonomy needs at least 2 types");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (!index_.emplace(names_[i], static_cast<int>(i)).second)
                throw data_error("duplicate taxonomy type '" + names_[i] + "'");
        }
        for (const auto& [child, parent] : parents_) {
            if (!index_.contains(child))
                throw data_error("parent map key '" + child + "' is not a taxonomy type");
        }
    }

    /// The twelve PROMISE NFR quality-attribute classes with their L1 parents.
    static Taxonomy promise() {
        std::vector<std::string> names = {
            "Availability",    "Fault Tolerance", "Functional",  "Legal",
            "Look & Feel",     "Maintainability", "Operability", "Performance",
            "Portability",     "Scalability",     "Security",    "Usability"};
        std::map<std::string, std::string> parents;
        for (const auto& n : names) parents[n] = n == "Functional" ? "F" : "NF";
        return Taxonomy(std::move(names), std::move(parents));
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
    const std::map<std::string, std::string>& parents() const noexcept { return parents_; }

    std::optional<int> find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const Taxonomy& a, const Taxonomy& b) {
        return a.names_ == b.names_ && a.parents_ == b.parents_;
    }

private:
    std::vector<std::string> names_;
    std::map<std::string, std::string> parents_;
    std::unordered_map<std::string, int> index_;
};

/// Raw file label -> canonical taxonomy name.
using AliasTable = std::map<std::string, std::string>;

/// Aliases for the PROMISE short codes and the alternate spelling of Operability.
inline AliasTable promise_aliases() {
    return {{"A", "Availability"}, {"FT", "Fault Tolerance"}, {"F", "Functional"},
            {"L", "Legal"},        {"LF", "Look & Feel"},     {"MN", "Maintainability"},
            {"O", "Operability"},  {"PE", "Performance"},     {"PO", "Portability"},
            {"SC", "Scalability"}, {"SE", "Security"},        {"US", "Usability"},
            {"Operational", "Operability"}};
}

class Dataset {
public:
    Dataset() = default;

    Dataset(std::vector<Requirement> reqs, Taxonomy taxonomy)
        : reqs_(std::move(reqs)), taxonomy_(std::move(taxonomy)) {
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < reqs_.size(); ++i) {
            const auto& r = reqs_[i];
            if (!seen.insert(r.id).second)
                throw data_error("duplicate requirement id '" + r.id + "'");
            if (trimmed_empty(r.text))
                throw data_error("requirement '" + r.id + "' has empty text");
            if (r.project_id.empty())
                throw data_error("requirement '" + r.id + "' has empty project_id");
            if (r.type && (*r.type < 0 || *r.type >= static_cast<int>(taxonomy_.size())))
                throw data_error("requirement '" + r.id + "' has out-of-range type");
            if (std::find(projects_.begin(), projects_.end(), r.project_id) == projects_.end())
                projects_.push_back(r.project_id);
        }
    }

    const std::vector<Requirement>& requirements() const noexcept { return reqs_; }
    const Taxonomy& taxonomy() const noexcept { return taxonomy_; }
    /// Project ids in order of first appearance.
    const std::vector<std::string>& projects() const noexcept { return projects_; }
    std::size_t size() const noexcept { return reqs_.size(); }

    /// Requirements of the listed projects, input order preserved.
    std::vector<Requirement> of_projects(const std::vector<std::string>& pids) const {
        std::unordered_set<std::string> keep(pids.begin(), pids.end());
        std::vector<Requirement> out;
        for (const auto& r : reqs_)
            if (keep.contains(r.project_id)) out.push_back(r);
        return out;
    }

    /// Drop every requirement labelled with one of `type_names` and remove
    /// those types from the taxonomy.
    Dataset without_types(const std::vector<std::string>& type_names) const {
        std::set<int> drop;
        for (const auto& n : type_names) {
            auto t = taxonomy_.find(n);
            if (!t) throw data_error("cannot exclude unknown type '" + n + "'");
            drop.insert(*t);
        }
        std::vector<std::string> names;
        std::map<std::string, std::string> parents;
        std::vector<int> remap(taxonomy_.size(), -1);
        for (std::size_t t = 0; t < taxonomy_.size(); ++t) {
            if (drop.contains(static_cast<int>(t))) continue;
            remap[t] = static_cast<int>(names.size());
            names.push_back(taxonomy_.name(static_cast<int>(t)));
            if (auto it = taxonomy_.parents().find(names.back()); it != taxonomy_.parents().end())
                parents.insert(*it);
        }
        std::vector<Requirement> reqs;
        for (auto r : reqs_) {
            if (r.type && drop.contains(*r.type)) continue;
            if (r.type) r.type = remap[static_cast<std::size_t>(*r.type)];
            reqs.push_back(std::move(r));
        }
        return Dataset(std::move(reqs), Taxonomy(std::move(names), std::move(parents)));
    }

private:
    static bool trimmed_empty(const std::string& s) {
        return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    }

    std::vector<Requirement> reqs_;
    Taxonomy taxonomy_;
    std::vector<std::string> projects_;
};

enum class DatasetFormat { Csv, Jsonl };

namespace detail {

/// RFC 4180 record splitter: quoted fields, doubled quotes, embedded newlines.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    bool next(std::vector<std::string>& fields) {
        fields.clear();
        if (in_.peek() == std::char_traits<char>::eof()) return false;
        std::string field;
        bool quoted = false;
        bool any = false;
        char c;
        while (in_.get(c)) {
            any = true;
            if (quoted) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get(c);
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(c);
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else if (c == '\n') {
                ++line_;
                break;
            } else if (c != '\r') {
                field.push_back(c);
            }
        }
        if (quoted) throw data_error("unterminated quoted field near line " + std::to_string(line_ + 1));
        if (!any) return false;
        fields.push_back(std::move(field));
        return true;
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

struct RawRow {
    std::optional<std::string> id;
    std::optional<std::string> text;
    std::optional<std::string> project_id;
    std::optional<std::string> label;
};

inline std::string valid_labels(const Taxonomy& tax, const AliasTable& aliases) {
    std::string s;
    for (const auto& n : tax.names()) s += (s.empty() ? "" : ", ") + n;
    for (const auto& [raw, canon] : aliases) s += ", " + raw;
    return s;
}

inline Requirement make_requirement(const RawRow& row, std::size_t row_number,
                                    const Taxonomy& tax, const AliasTable& aliases) {
    auto where = [&](const char* field) {
        return "row " + std::to_string(row_number) + ", field '" + field + "': ";
    };
    Requirement r;
    r.id = row.id && !trim(*row.id).empty() ? trim(*row.id) : std::to_string(row_number);
    if (!row.text || trim(*row.text).empty()) throw data_error(where("text") + "empty text");
    r.text = *row.text;
    if (!row.project_id || trim(*row.project_id).empty())
        throw data_error(where("project_id") + "missing project id");
    r.project_id = trim(*row.project_id);
    if (row.label) {
        std::string label = trim(*row.label);
        if (!label.empty()) {
            auto t = tax.find(label);
            if (!t) {
                if (auto it = aliases.find(label); it != aliases.end()) t = tax.find(it->second);
            }
            if (!t)
                throw data_error(where("type_label") + "unknown label '" + label +
                                 "'; valid labels: " + valid_labels(tax, aliases));
            r.type = *t;
        }
    }
    return r;
}

} // namespace detail

/// Parse a dataset from a stream. Rows are numbered from 1 (the CSV header
/// is row 0); missing ids are synthesised from the row number.
inline Dataset read_dataset(std::istream& in, DatasetFormat format, const Taxonomy& tax,
                            const AliasTable& aliases = {}) {
    std::vector<Requirement> reqs;
    if (format == DatasetFormat::Csv) {
        detail::CsvReader reader(in);
        std::vector<std::string> header;
        if (!reader.next(header)) throw data_error("empty CSV file (header required)");
        std::map<std::string, std::size_t> col;
        for (std::size_t i = 0; i < header.size(); ++i) col[detail::trim(header[i])] = i;
        for (const char* required : {"text", "project_id"})
            if (!col.contains(required))
                throw data_error(std::string("CSV header lacks required column '") + required + "'");
        std::vector<std::string> fields;
        std::size_t row = 0;
        while (reader.next(fields)) {
            ++row;
            if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
            if (fields.size() != header.size())
                throw data_error("row " + std::to_string(row) + ": expected " +
                                 std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
            detail::RawRow raw;
            auto get = [&](const char* name) -> std::optional<std::string> {
                auto it = col.find(name);
                if (it == col.end()) return std::nullopt;
                return fields[it->second];
            };
            raw.id = get("id");
            raw.text = get("text");
            raw.project_id = get("project_id");
            raw.label = get("type_label");
            reqs.push_back(detail::make_requirement(raw, row, tax, aliases));
        }
    } else {
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            ++row;
            if (detail::trim(line).empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw data_error("row " + std::to_string(row) + ": invalid JSON: " + e.what());
            }
            if (!j.is_object()) throw data_error("row " + std::to_string(row) + ": expected an object");
            detail::RawRow raw;
            auto get = [&](const char* name) -> std::optional<std::string> {
                if (!j.contains(name) || j[name].is_null()) return std::nullopt;
                if (j[name].is_string()) return j[name].get<std::string>();
                if (j[name].is_number()) return j[name].dump();
                throw data_error("row " + std::to_string(row) + ", field '" + name +
                                 "': expected a string");
            };
            raw.id = get("id");
            raw.text = get("text");
            raw.project_id = get("project_id");
            raw.label = get("type_label");
            reqs.push_back(detail::make_requirement(raw, row, tax, aliases));
        }
    }
    return Dataset(std::move(reqs), tax);
}

inline DatasetFormat format_from_path(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "jsonl" || ext == "json") return DatasetFormat::Jsonl;
    return DatasetFormat::Csv;
}

inline Dataset load_dataset(const std::string& path, DatasetFormat format, const Taxonomy& tax,
                            const AliasTable& aliases = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open dataset '" + path + "'");
    return read_dataset(in, format, tax, aliases);
}

inline void write_dataset(std::ostream& out, const Dataset& d, DatasetFormat format) {
    const auto& tax = d.taxonomy();
    if (format == DatasetFormat::Csv) {
        out << "id,text,project_id,type_label\n";
        for (const auto& r : d.requirements()) {
            out << detail::csv_quote(r.id) << ',' << detail::csv_quote(r.text) << ','
                << detail::csv_quote(r.project_id) << ','
                << (r.type ? detail::csv_quote(tax.name(*r.type)) : "") << '\n';
        }
    } else {
        for (const auto& r : d.requirements()) {
            nlohmann::json j = {{"id", r.id}, {"text", r.text}, {"project_id", r.project_id}};
            j["type_label"] = r.type ? nlohmann::json(tax.name(*r.type)) : nlohmann::json(nullptr);
            out << j.dump() << '\n';
        }
    }
}

inline void save_dataset(const std::string& path, const Dataset& d, DatasetFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write dataset '" + path + "'");
    write_dataset(out, d, format);
}

/// Project id -> its requirements, projects in first-appearance order.
using Partition = std::vector<std::pair<std::string, std::vector<Requirement>>>;

inline Partition project_partition(const Dataset& d) {
    Partition out;
    std::unordered_map<std::string, std::size_t> slot;
    for (const auto& pid : d.projects()) {
        slot[pid] = out.size();
        out.emplace_back(pid, std::vector<Requirement>{});
    }
    for (const auto& r : d.requirements()) out[slot.at(r.project_id)].second.push_back(r);
    return out;
}

struct LooSplit {
    std::string target;
    std::vector<std::string> training;
};

inline std::vector<LooSplit> loo_splits(const Dataset& d) {
    const auto& projects = d.projects();
    if (projects.size() < 2)
        throw data_error("leave-one-out needs at least 2 projects, found " +
                         std::to_string(projects.size()));
    std::vector<LooSplit> out;
    for (const auto& target : projects) {
        LooSplit s{target, {}};
        for (const auto& p : projects)
            if (p != target) s.training.push_back(p);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace geogap
