#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "frameforge/corpus.hpp"
#include "frameforge/embeddings.hpp"

namespace frameforge {

/// Planted-frame generator. Frames are Gaussian centroids kept at least
/// `min_separation` apart; each instance's masked vector is its frame
/// centroid plus unit-variance noise, and its word vector adds a fixed
/// per-verb offset of norm `offset_norm`.
struct SyntheticOptions {
    std::size_t frames = 20;
    std::size_t dim = 32;
    std::size_t verbs = 120;
    double min_separation = 10.0;
    double centroid_scale = 1.5;  // per-coordinate std-dev of the centroids
    double offset_norm = 20.0;
    std::size_t max_frames_per_verb = 3;  // verbs evoke 1..max, in equal shares
    std::size_t min_instances = 20;
    std::size_t max_instances = 40;
    std::uint64_t seed = 0;
    std::string layer_spec = "synthetic";
};

struct SyntheticData {
    Corpus corpus;
    EmbeddingSet embeddings;
    std::vector<std::vector<double>> frame_centroids;
};

SyntheticData make_synthetic(const SyntheticOptions& options);

} // namespace frameforge
