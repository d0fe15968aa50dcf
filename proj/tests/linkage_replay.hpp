#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frameforge/linkage.hpp"
#include "oracles.hpp"

namespace oracle {

/// Replays `dendrogram` against brute-force linkage values over the live
/// clusters. Returns a description of the first wrong merge, or an empty
/// string. Pairs within `tol` (relative) of the minimum count as tied, and a
/// tie must go to the smallest (min key, max key) pair. With `theta`, every
/// merge must be within it and, if clustering stopped early, no remaining
/// pair may be.
inline std::string replay(const Rows& rows, frameforge::Linkage linkage,
                          const frameforge::Dendrogram& dendrogram,
                          std::optional<double> theta = std::nullopt, double tol = 1e-9) {
    const std::size_t n = rows.size();
    std::vector<std::vector<std::size_t>> members(n);
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {i};
        live.push_back(i);
    }
    auto value = [&](std::size_t a, std::size_t b) {
        return linkage == frameforge::Linkage::ward ? ward_link(rows, members[a], members[b])
                                                    : average_link(rows, members[a], members[b]);
    };
    auto key = [&](std::size_t node) {
        return *std::min_element(members[node].begin(), members[node].end());
    };
    auto ordered = [](std::size_t a, std::size_t b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    };
    auto minimum = [&]() {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < live.size(); ++x) {
            for (std::size_t y = x + 1; y < live.size(); ++y) {
                best = std::min(best, value(live[x], live[y]));
            }
        }
        return best;
    };

    for (std::size_t s = 0; s < dendrogram.merges.size(); ++s) {
        const auto& m = dendrogram.merges[s];
        std::ostringstream where;
        where << "merge " << s << " (" << m.first << "," << m.second << "): ";
        const bool first_live = std::find(live.begin(), live.end(), m.first) != live.end();
        const bool second_live = std::find(live.begin(), live.end(), m.second) != live.end();
        if (!first_live || !second_live || m.first == m.second || m.merged != n + s) {
            return where.str() + "references a dead or invalid node";
        }
        const double best = minimum();
        const double slack = tol * std::max(1.0, std::abs(best));
        const double chosen = value(m.first, m.second);
        if (chosen > best + slack) {
            where << "value " << chosen << " but minimum " << best;
            return where.str();
        }
        if (std::abs(m.distance - chosen) > slack) {
            where << "reported distance " << m.distance << " but linkage " << chosen;
            return where.str();
        }
        const auto chosen_keys = ordered(key(m.first), key(m.second));
        for (std::size_t x = 0; x < live.size(); ++x) {
            for (std::size_t y = x + 1; y < live.size(); ++y) {
                if (value(live[x], live[y]) <= best + slack &&
                    ordered(key(live[x]), key(live[y])) < chosen_keys) {
                    return where.str() + "tie not broken toward the smallest keys";
                }
            }
        }
        if (key(m.first) > key(m.second)) {
            return where.str() + "first node does not carry the smaller key";
        }
        if (theta && chosen > *theta + slack) {
            return where.str() + "merged above the threshold";
        }
        std::vector<std::size_t> joined = members[m.first];
        joined.insert(joined.end(), members[m.second].begin(), members[m.second].end());
        members.push_back(joined);
        if (m.size != joined.size()) {
            return where.str() + "wrong merged size";
        }
        live.erase(std::find(live.begin(), live.end(), m.first));
        live.erase(std::find(live.begin(), live.end(), m.second));
        live.push_back(n + s);
    }
    if (theta && live.size() > 1 && minimum() <= *theta) {
        return "stopped while a pair within the threshold remained";
    }
    return {};
}

/// Flat labels implied by the first `steps` merges, canonical by smallest item.
inline Labels cut(const frameforge::Dendrogram& d, std::size_t steps) {
    const std::size_t n = d.leaf_count;
    std::vector<std::size_t> parent(n + steps);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    for (std::size_t s = 0; s < steps; ++s) {
        parent[d.merges[s].first] = n + s;
        parent[d.merges[s].second] = n + s;
    }
    Labels root(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = i;
        while (parent[r] != r) r = parent[r];
        root[i] = r;
    }
    Labels labels(n);
    std::vector<std::size_t> seen;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = std::find(seen.begin(), seen.end(), root[i]);
        labels[i] = static_cast<std::size_t>(it - seen.begin());
        if (it == seen.end()) seen.push_back(root[i]);
    }
    return labels;
}

inline Rows to_rows(const frameforge::MatrixD& m) {
    Rows rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < m.cols(); ++k) rows[i][k] = m(i, k);
    return rows;
}

} // namespace oracle
