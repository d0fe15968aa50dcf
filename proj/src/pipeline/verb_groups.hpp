#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "frameforge/corpus.hpp"
#include "frameforge/embeddings.hpp"
#include "frameforge/kernels.hpp"
#include "frameforge/matrix.hpp"

namespace frameforge::detail {

struct VerbGroup {
    std::string verb;
    std::vector<const Instance*> members;  // sorted by instance_id
};

inline std::vector<VerbGroup> group_by_verb(const std::vector<Instance>& instances) {
    std::map<std::string, std::vector<const Instance*>> by_verb;
    for (const auto& inst : instances) {
        by_verb[inst.verb_lemma].push_back(&inst);
    }
    std::vector<VerbGroup> groups;
    groups.reserve(by_verb.size());
    for (auto& [verb, members] : by_verb) {
        std::sort(members.begin(), members.end(), [](const Instance* a, const Instance* b) {
            return a->instance_id < b->instance_id;
        });
        groups.push_back({verb, std::move(members)});
    }
    return groups;
}

/// Masked vectors of `members`, one row each, widened to double.
inline MatrixD mask_rows(const std::vector<const Instance*>& members, const EmbeddingIndex& emb) {
    const auto& set = emb.set();
    MatrixD rows(members.size(), set.dim);
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto src = set.mask_vectors.row(emb.row_of(members[i]->instance_id));
        kernels::active().widen(src.data(), rows.row(i).data(), set.dim);
    }
    return rows;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once, so results written per index do not depend on
/// scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(guard);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace frameforge::detail
