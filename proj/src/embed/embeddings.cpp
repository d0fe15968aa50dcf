#include "frameforge/embeddings.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "frameforge/error.hpp"
#include "frameforge/kernels.hpp"

namespace frameforge {

namespace {

constexpr char kMagic[4] = {'F', 'F', 'E', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
    char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
    }
    out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw FormatError(std::string("truncated FFE1 file while reading ") + what);
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return static_cast<T>(value);
}

std::string get_bytes(std::istream& in, std::size_t n, const char* what) {
    std::string s(n, '\0');
    if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
        throw FormatError(std::string("truncated FFE1 file while reading ") + what);
    }
    return s;
}

void put_floats(std::ostream& out, std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size_bytes()));
    } else {
        for (float v : values) {
            put_le(out, std::bit_cast<std::uint32_t>(v));
        }
    }
}

void get_floats(std::istream& in, std::span<float> values) {
    if constexpr (std::endian::native == std::endian::little) {
        if (!values.empty() && !in.read(reinterpret_cast<char*>(values.data()),
                                        static_cast<std::streamsize>(values.size_bytes()))) {
            throw FormatError("truncated FFE1 payload");
        }
    } else {
        for (float& v : values) {
            v = std::bit_cast<float>(get_le<std::uint32_t>(in, "payload"));
        }
    }
}

bool all_finite(std::span<const float> values) {
    for (float v : values) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

} // namespace

void validate(const EmbeddingSet& set) {
    if (set.dim == 0) {
        throw FormatError("embedding dim must be positive");
    }
    const auto n = set.ids.size();
    for (const MatrixF* m : {&set.word_vectors, &set.mask_vectors}) {
        if (m->rows() != n || (n > 0 && m->cols() != set.dim)) {
            throw FormatError("embedding matrices are not " + std::to_string(n) + " x " +
                              std::to_string(set.dim));
        }
        if (!all_finite(m->values())) {
            throw FormatError("embedding contains a non-finite value");
        }
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& id : set.ids) {
        if (!seen.insert(id).second) {
            throw FormatError("duplicate embedding id '" + id + "'");
        }
    }
}

std::size_t encoded_size(const EmbeddingSet& set) {
    std::size_t bytes = 4 + 4 + 4 + 8 + 4 + set.layer_spec.size();
    for (const auto& id : set.ids) {
        bytes += 2 + id.size();
    }
    return bytes + 2 * set.ids.size() * set.dim * sizeof(float);
}

void write_embeddings(const EmbeddingSet& set, std::ostream& out) {
    validate(set);
    out.write(kMagic, 4);
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim));
    put_le<std::uint64_t>(out, set.ids.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.layer_spec.size()));
    out.write(set.layer_spec.data(), static_cast<std::streamsize>(set.layer_spec.size()));
    for (const auto& id : set.ids) {
        if (id.size() > UINT16_MAX) {
            throw FormatError("instance id longer than 65535 bytes");
        }
        put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    put_floats(out, set.word_vectors.values());
    put_floats(out, set.mask_vectors.values());
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(path.string(), "cannot open for writing");
    }
    write_embeddings(set, out);
    out.flush();
    if (!out) {
        throw IoError(path.string(), "write failed");
    }
}

EmbeddingSet read_embeddings(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4)) {
        throw FormatError("truncated FFE1 file while reading magic");
    }
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("bad magic: not an FFE1 file");
    }
    if (const auto version = get_le<std::uint32_t>(in, "version"); version != kVersion) {
        throw FormatError("unsupported FFE1 version " + std::to_string(version));
    }

    EmbeddingSet set;
    set.dim = get_le<std::uint32_t>(in, "dim");
    if (set.dim == 0) {
        throw FormatError("FFE1 dim must be positive");
    }
    const auto rows = get_le<std::uint64_t>(in, "row count");
    const auto spec_len = get_le<std::uint32_t>(in, "layer_spec length");
    set.layer_spec = get_bytes(in, spec_len, "layer_spec");

    // Grow as ids arrive so a corrupt row count cannot trigger a huge allocation.
    for (std::uint64_t i = 0; i < rows; ++i) {
        const auto len = get_le<std::uint16_t>(in, "id block");
        set.ids.push_back(get_bytes(in, len, "id block"));
    }

    set.word_vectors = MatrixF(set.ids.size(), set.dim);
    set.mask_vectors = MatrixF(set.ids.size(), set.dim);
    get_floats(in, set.word_vectors.values());
    get_floats(in, set.mask_vectors.values());
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("FFE1 payload longer than " + std::to_string(rows) + " rows of dim " +
                          std::to_string(set.dim) + " (id-count mismatch)");
    }
    validate(set);
    return set;
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string(), "cannot open embeddings");
    }
    try {
        return read_embeddings(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

MixWeight::MixWeight(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("mix weight alpha must lie in [0, 1]");
    }
}

MatrixD mix_embeddings(const EmbeddingSet& set, MixWeight weight) {
    const auto& k = kernels::active();
    MatrixD out(set.ids.size(), set.dim);
    const std::size_t n = set.ids.size() * set.dim;
    if (n == 0) {
        return out;
    }
    // The endpoints are copies, so they reproduce the inputs bit-for-bit
    // (including the sign of zero).
    if (weight.alpha() == 0.0) {
        k.widen(set.word_vectors.values().data(), out.values().data(), n);
    } else if (weight.alpha() == 1.0) {
        k.widen(set.mask_vectors.values().data(), out.values().data(), n);
    } else {
        k.mix(set.word_vectors.values().data(), set.mask_vectors.values().data(), weight.alpha(),
              out.values().data(), n);
    }
    return out;
}

MatrixD mask_matrix(const EmbeddingSet& set) { return mix_embeddings(set, MixWeight(1.0)); }

EmbeddingIndex::EmbeddingIndex(const EmbeddingSet& set) : set_(&set) {
    rows_.reserve(set.ids.size());
    for (std::size_t i = 0; i < set.ids.size(); ++i) {
        rows_.emplace(set.ids[i], i);
    }
}

std::size_t EmbeddingIndex::row_of(std::string_view id) const {
    auto it = rows_.find(std::string(id));
    if (it == rows_.end()) {
        throw InvalidArgument("no embedding row for instance '" + std::string(id) + "'");
    }
    return it->second;
}

bool EmbeddingIndex::contains(std::string_view id) const { return rows_.contains(std::string(id)); }

} // namespace frameforge
