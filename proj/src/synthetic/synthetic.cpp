#include "frameforge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "frameforge/error.hpp"
#include "frameforge/rng.hpp"

namespace frameforge {

namespace {

std::vector<double> gaussian(Rng& rng, std::size_t dim, double scale) {
    std::vector<double> v(dim);
    for (auto& x : v) {
        x = scale * rng.normal();
    }
    return v;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

} // namespace

SyntheticData make_synthetic(const SyntheticOptions& o) {
    if (o.frames == 0 || o.dim == 0 || o.verbs == 0 || o.max_frames_per_verb == 0 ||
        o.max_frames_per_verb > o.frames || o.min_instances == 0 ||
        o.max_instances < o.min_instances) {
        throw InvalidArgument("make_synthetic: inconsistent options");
    }
    Rng rng(o.seed);
    SyntheticData data;

    constexpr int kMaxAttempts = 100000;
    for (std::size_t f = 0; f < o.frames; ++f) {
        int attempts = 0;
        for (;;) {
            auto c = gaussian(rng, o.dim, o.centroid_scale);
            bool far = true;
            for (const auto& other : data.frame_centroids) {
                far = far && distance(c, other) >= o.min_separation;
            }
            if (far) {
                data.frame_centroids.push_back(std::move(c));
                break;
            }
            if (++attempts == kMaxAttempts) {
                throw InvalidArgument("make_synthetic: cannot place frame centroids that far apart; "
                                      "raise centroid_scale");
            }
        }
    }

    // Frame counts 1..max in equal shares, assigned to verbs in random order.
    std::vector<std::size_t> order(o.verbs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    std::vector<std::size_t> frame_count(o.verbs);
    for (std::size_t i = 0; i < o.verbs; ++i) {
        frame_count[order[i]] = 1 + i % o.max_frames_per_verb;
    }

    // Frames are dealt from a shuffled deck so every frame heads a near-equal
    // share of LUs.
    std::vector<std::size_t> deck;
    auto draw = [&](const std::vector<std::size_t>& taken) {
        for (;;) {
            for (auto it = deck.rbegin(); it != deck.rend(); ++it) {
                if (std::find(taken.begin(), taken.end(), *it) == taken.end()) {
                    const std::size_t f = *it;
                    deck.erase(std::next(it).base());
                    return f;
                }
            }
            std::vector<std::size_t> fresh(o.frames);
            std::iota(fresh.begin(), fresh.end(), std::size_t{0});
            for (std::size_t i = fresh.size(); i > 1; --i) {
                std::swap(fresh[i - 1], fresh[rng.below(i)]);
            }
            deck.insert(deck.begin(), fresh.begin(), fresh.end());
        }
    };

    std::vector<float> word, mask;
    for (std::size_t v = 0; v < o.verbs; ++v) {
        const std::string verb = fmt::format("verb{:03}", v);
        auto offset = gaussian(rng, o.dim, 1.0);
        double norm = 0.0;
        for (double x : offset) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto& x : offset) {
            x *= o.offset_norm / norm;
        }

        std::vector<std::size_t> frames;
        for (std::size_t i = 0; i < frame_count[v]; ++i) {
            frames.push_back(draw(frames));
        }
        for (std::size_t fi = 0; fi < frame_count[v]; ++fi) {
            const std::size_t f = frames[fi];
            const std::string frame = fmt::format("FRAME_{:02}", f);
            const std::size_t count =
                o.min_instances + rng.below(o.max_instances - o.min_instances + 1);
            for (std::size_t k = 0; k < count; ++k) {
                Instance inst;
                inst.instance_id = fmt::format("{}-{:02}-{:03}", verb, f, k);
                inst.verb_lemma = verb;
                inst.tokens = {"they", verb, "it"};
                inst.target_index = 1;
                inst.gold_frame = frame;
                inst.gold_lu = make_gold_lu(verb, frame);
                data.corpus.instances.push_back(std::move(inst));
                data.embeddings.ids.push_back(data.corpus.instances.back().instance_id);
                for (std::size_t j = 0; j < o.dim; ++j) {
                    const double m = data.frame_centroids[f][j] + rng.normal();
                    mask.push_back(static_cast<float>(m));
                    word.push_back(static_cast<float>(m + offset[j]));
                }
            }
        }
    }

    data.corpus.provenance = fmt::format("synthetic(seed={},verbs={},frames={},dim={})", o.seed,
                                         o.verbs, o.frames, o.dim);
    const std::size_t n = data.embeddings.ids.size();
    data.embeddings.dim = o.dim;
    data.embeddings.layer_spec = o.layer_spec;
    data.embeddings.word_vectors = MatrixF(n, o.dim, std::move(word));
    data.embeddings.mask_vectors = MatrixF(n, o.dim, std::move(mask));
    return data;
}

} // namespace frameforge
