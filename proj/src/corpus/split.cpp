#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "frameforge/corpus.hpp"
#include "frameforge/error.hpp"
#include "frameforge/rng.hpp"

namespace frameforge {

namespace {

void shuffle(std::vector<std::string>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[rng.below(i)]);
    }
}

} // namespace

Split split_corpus(const Corpus& corpus, const SplitOptions& options) {
    if (!(options.dev_fraction > 0.0 && options.dev_fraction < 1.0)) {
        throw InvalidArgument("split_corpus: dev_fraction must lie in (0, 1)");
    }

    std::map<std::string, std::set<std::string>> frames_of;
    for (const auto& inst : corpus.instances) {
        frames_of[inst.verb_lemma].insert(inst.gold_frame);
    }
    const std::size_t total = frames_of.size();
    if (total < 2) {
        throw CorpusError("split_corpus: need at least 2 verbs, corpus has " +
                          std::to_string(total));
    }

    std::vector<std::string> poly, mono;
    for (const auto& [verb, frames] : frames_of) {
        (frames.size() > 1 ? poly : mono).push_back(verb);
    }

    // ceil rather than round: 20% of 1,272 verbs must give 255 dev verbs.
    auto n_dev = static_cast<std::size_t>(
        std::ceil(options.dev_fraction * static_cast<double>(total) - 1e-9));
    n_dev = std::clamp<std::size_t>(n_dev, 1, total - 1);
    const std::size_t n_test = total - n_dev;

    // The polysemy rates depend only on how many polysemous verbs land on
    // the dev side, so pick that count directly instead of resampling.
    const std::size_t k_lo = n_dev > mono.size() ? n_dev - mono.size() : 0;
    const std::size_t k_hi = std::min(poly.size(), n_dev);
    const double proportional =
        static_cast<double>(n_dev) * static_cast<double>(poly.size()) / static_cast<double>(total);
    std::size_t best_k = k_lo;
    double best_gap = 2.0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double gap = std::abs(static_cast<double>(k) / static_cast<double>(n_dev) -
                                    static_cast<double>(poly.size() - k) / static_cast<double>(n_test));
        const bool closer = std::abs(static_cast<double>(k) - proportional) <
                            std::abs(static_cast<double>(best_k) - proportional);
        if (gap < best_gap - 1e-15 || (std::abs(gap - best_gap) <= 1e-15 && closer)) {
            best_gap = gap;
            best_k = k;
        }
    }

    Split split;
    split.seed = options.seed;
    split.dev_polysemy_rate = static_cast<double>(best_k) / static_cast<double>(n_dev);
    split.test_polysemy_rate =
        static_cast<double>(poly.size() - best_k) / static_cast<double>(n_test);
    if (best_gap > options.balance_tolerance) {
        throw CorpusError(fmt::format(
            "split_corpus: cannot balance polysemy within {}: best achievable dev rate {:.4f} "
            "vs test rate {:.4f} ({} of {} verbs polysemous, {} dev verbs)",
            options.balance_tolerance, split.dev_polysemy_rate, split.test_polysemy_rate,
            poly.size(), total, n_dev));
    }

    Rng rng(derive_seed(options.seed, "split"));
    shuffle(poly, rng);
    shuffle(mono, rng);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        (i < best_k ? split.dev_verbs : split.test_verbs).insert(poly[i]);
    }
    for (std::size_t i = 0; i < mono.size(); ++i) {
        (i < n_dev - best_k ? split.dev_verbs : split.test_verbs).insert(mono[i]);
    }
    return split;
}

} // namespace frameforge
