#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "frameforge/matrix.hpp"

namespace frameforge {

/// Aligned word and masked-word vectors, one row per instance id.
struct EmbeddingSet {
    std::size_t dim = 0;
    std::vector<std::string> ids;
    MatrixF word_vectors;
    MatrixF mask_vectors;
    std::string layer_spec;

    std::size_t size() const noexcept { return ids.size(); }
    bool operator==(const EmbeddingSet&) const = default;
};

/// Throws FormatError when dimensions disagree, ids repeat or any value is
/// not finite.
void validate(const EmbeddingSet& set);

/// FFE1 reader/writer. Files are little-endian regardless of host order.
EmbeddingSet read_embeddings(const std::filesystem::path& path);
EmbeddingSet read_embeddings(std::istream& in);
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
void write_embeddings(const EmbeddingSet& set, std::ostream& out);

/// Size in bytes of the FFE1 encoding of `set`.
std::size_t encoded_size(const EmbeddingSet& set);

/// Weight of the masked vector in the mix; constrained to [0, 1].
class MixWeight {
public:
    explicit MixWeight(double alpha);
    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// Row i = (1 - alpha) * word[i] + alpha * mask[i], in double precision.
MatrixD mix_embeddings(const EmbeddingSet& set, MixWeight weight);

/// Mask rows widened to double.
MatrixD mask_matrix(const EmbeddingSet& set);

/// Id -> row lookup over an EmbeddingSet.
class EmbeddingIndex {
public:
    explicit EmbeddingIndex(const EmbeddingSet& set);

    const EmbeddingSet& set() const noexcept { return *set_; }
    /// Throws InvalidArgument naming the id when it has no row.
    std::size_t row_of(std::string_view id) const;
    bool contains(std::string_view id) const;

private:
    const EmbeddingSet* set_;
    std::unordered_map<std::string, std::size_t> rows_;
};

} // namespace frameforge
