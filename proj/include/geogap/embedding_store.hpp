#pragma once
// Unit-norm embedding storage, cosine geometry, exact k-NN and the binary
// embedding cache format.
//
// Cache layout (all integers little-endian):
//   8 bytes  magic "GEOGAPEC"
//   u32      version (1)
//   u32      dimension d
//   u64      record count
//   per record: u16 id length, id bytes, d x f32

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "geogap/error.hpp"
#include "geogap/matrix.hpp"

namespace geogap {

inline constexpr double kUnitNormTolerance = 1e-6;

inline std::vector<double> normalize(std::span<const double> v) {
    double n = l2_norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw data_error("cannot normalise a zero or non-finite vector");
    std::vector<double> out(v.begin(), v.end());
    for (auto& x : out) x /= n;
    return out;
}

inline void normalize_in_place(std::span<double> v) {
    double n = l2_norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw data_error("cannot normalise a zero or non-finite vector");
    for (auto& x : v) x /= n;
}

/// 1 - u.v, clamped to [0, 2] against rounding.
inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw data_error("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
    return clip(1.0 - dot(u, v), 0.0, 2.0);
}

struct NeighbourResult {
    std::vector<std::string> ids;
    std::vector<double> distances;  // ascending
};

class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dim) : vectors_(0, dim), dim_(dim) {
        if (dim == 0) throw data_error("embedding dimension must be positive");
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const Matrix& matrix() const noexcept { return vectors_; }

    bool contains(const std::string& id) const { return index_.contains(id); }

    std::size_t index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw data_error("no embedding for requirement id '" + id + "'");
        return it->second;
    }

    std::span<const double> vector(const std::string& id) const { return vectors_.row(index_of(id)); }

    /// Insert a raw vector; it is normalised on the way in.
    void insert(const std::string& id, std::span<const double> raw) {
        if (dim_ == 0) {
            dim_ = raw.size();
            vectors_ = Matrix(0, dim_);
        }
        if (raw.size() != dim_)
            throw data_error("dimension mismatch for '" + id + "': expected " +
                             std::to_string(dim_) + ", got " + std::to_string(raw.size()));
        if (index_.contains(id)) throw data_error("duplicate embedding id '" + id + "'");
        auto unit = normalize(raw);
        index_.emplace(id, ids_.size());
        ids_.push_back(id);
        vectors_.append_row(unit);
    }

    /// Stack the vectors of `ids` into a matrix, in order.
    Matrix gather(const std::vector<std::string>& ids) const {
        Matrix out(ids.size(), dim_);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            auto src = vector(ids[i]);
            std::copy(src.begin(), src.end(), out.row(i).begin());
        }
        return out;
    }

    /// Exact k nearest neighbours of `x` among `pool`. k larger than the
    /// pool is truncated; equal distances are ordered by ascending id.
    NeighbourResult knn(std::span<const double> x, const std::vector<std::string>& pool,
                        std::size_t k) const {
        if (pool.empty()) throw data_error("k-NN query against an empty pool");
        if (k == 0) throw data_error("k must be positive");
        if (x.size() != dim_) throw data_error("query dimension mismatch");
        std::vector<std::pair<double, const std::string*>> cand;
        cand.reserve(pool.size());
        for (const auto& id : pool) cand.emplace_back(cosine_distance(x, vector(id)), &id);
        k = std::min(k, cand.size());
        auto less = [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first < b.first : *a.second < *b.second;
        };
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), less);
        NeighbourResult out;
        for (std::size_t i = 0; i < k; ++i) {
            out.ids.push_back(*cand[i].second);
            out.distances.push_back(cand[i].first);
        }
        return out;
    }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    Matrix vectors_;
    std::size_t dim_ = 0;
};

namespace cache {

inline constexpr std::array<char, 8> kMagic = {'G', 'E', 'O', 'G', 'A', 'P', 'E', 'C'};
inline constexpr std::uint32_t kVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T v) {
    static_assert(std::is_integral_v<T> || std::is_same_v<T, float>);
    std::array<unsigned char, sizeof(T)> b{};
    if constexpr (std::is_same_v<T, float>) {
        auto u = std::bit_cast<std::uint32_t>(v);
        for (std::size_t i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    } else {
        using U = std::make_unsigned_t<T>;
        auto u = static_cast<U>(v);
        for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
    std::array<unsigned char, sizeof(T)> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size())))
        throw data_error(std::string("embedding cache truncated while reading ") + what);
    if constexpr (std::is_same_v<T, float>) {
        std::uint32_t u = 0;
        for (std::size_t i = 0; i < 4; ++i) u |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return std::bit_cast<float>(u);
    } else {
        using U = std::make_unsigned_t<T>;
        U u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(b[i]) << (8 * i);
        return static_cast<T>(u);
    }
}

} // namespace detail

inline void write(std::ostream& out, const EmbeddingStore& store) {
    out.write(kMagic.data(), kMagic.size());
    detail::put_le<std::uint32_t>(out, kVersion);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.dim()));
    detail::put_le<std::uint64_t>(out, store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& id = store.ids()[i];
        if (id.size() > 0xFFFF) throw data_error("id too long for cache: '" + id.substr(0, 32) + "...'");
        detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
        for (double v : store.matrix().row(i)) detail::put_le<float>(out, static_cast<float>(v));
    }
    if (!out) throw data_error("failed writing embedding cache");
}

inline EmbeddingStore read(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw data_error("embedding cache: bad magic header");
    auto version = detail::get_le<std::uint32_t>(in, "version");
    if (version != kVersion)
        throw data_error("embedding cache: unsupported version " + std::to_string(version));
    auto dim = detail::get_le<std::uint32_t>(in, "dimension");
    if (dim == 0) throw data_error("embedding cache: zero dimension");
    auto count = detail::get_le<std::uint64_t>(in, "record count");
    EmbeddingStore store(dim);
    std::vector<double> row(dim);
    for (std::uint64_t r = 0; r < count; ++r) {
        auto len = detail::get_le<std::uint16_t>(in, "id length");
        std::string id(len, '\0');
        if (!in.read(id.data(), len))
            throw data_error("embedding cache truncated in id of record " + std::to_string(r));
        for (std::uint32_t c = 0; c < dim; ++c) {
            try {
                row[c] = detail::get_le<float>(in, "vector");
            } catch (const Error&) {
                throw data_error("embedding cache truncated in vector of record " + std::to_string(r) +
                                 " ('" + id + "')");
            }
        }
        store.insert(id, row);
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw data_error("embedding cache: trailing bytes after " + std::to_string(count) + " records");
    return store;
}

inline void save(const std::string& path, const EmbeddingStore& store) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write embedding cache '" + path + "'");
    write(out, store);
}

} // namespace cache

inline EmbeddingStore load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open embedding cache '" + path + "'");
    return cache::read(in);
}

} // namespace geogap
