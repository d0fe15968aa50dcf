#include "frameforge/metrics.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "frameforge/error.hpp"

namespace frameforge {

namespace {

// Sparse contingency table between two labelings.
struct Contingency {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
    std::unordered_map<std::size_t, std::size_t> row_total;  // predicted cluster sizes
    std::unordered_map<std::size_t, std::size_t> col_total;  // gold class sizes
    std::size_t n = 0;
};

Contingency tabulate(std::span<const std::size_t> predicted, std::span<const std::size_t> gold) {
    if (predicted.size() != gold.size()) {
        throw InvalidArgument("predicted and gold labelings differ in length");
    }
    if (predicted.empty()) {
        throw InvalidArgument("cannot score an empty labeling");
    }
    Contingency t;
    t.n = predicted.size();
    for (std::size_t i = 0; i < t.n; ++i) {
        ++t.cells[{predicted[i], gold[i]}];
        ++t.row_total[predicted[i]];
        ++t.col_total[gold[i]];
    }
    return t;
}

std::vector<std::size_t> encode(const std::map<std::string, std::string>& labels,
                                std::map<std::string, std::size_t>& codes) {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& [id, label] : labels) {
        auto [it, fresh] = codes.emplace(label, codes.size());
        out.push_back(it->second);
    }
    return out;
}

} // namespace

double harmonic_mean(double a, double b) noexcept {
    return (a <= 0.0 || b <= 0.0) ? 0.0 : 2.0 * a * b / (a + b);
}

BCubed bcubed(std::span<const std::size_t> predicted, std::span<const std::size_t> gold) {
    const auto t = tabulate(predicted, gold);
    // Each of the n_cg items in cell (c, g) has precision n_cg / |c| and
    // recall n_cg / |g|.
    double precision = 0.0, recall = 0.0;
    for (const auto& [cell, count] : t.cells) {
        const double sq = static_cast<double>(count) * static_cast<double>(count);
        precision += sq / static_cast<double>(t.row_total.at(cell.first));
        recall += sq / static_cast<double>(t.col_total.at(cell.second));
    }
    const double n = static_cast<double>(t.n);
    BCubed b{precision / n, recall / n, 0.0};
    b.f1 = harmonic_mean(b.precision, b.recall);
    return b;
}

PurityScores purity_suite(std::span<const std::size_t> predicted,
                          std::span<const std::size_t> gold) {
    const auto t = tabulate(predicted, gold);
    std::unordered_map<std::size_t, std::size_t> best_in_cluster, best_in_class;
    for (const auto& [cell, count] : t.cells) {
        auto& bc = best_in_cluster[cell.first];
        bc = std::max(bc, count);
        auto& bg = best_in_class[cell.second];
        bg = std::max(bg, count);
    }
    std::size_t pu = 0, ipu = 0;
    for (const auto& [c, v] : best_in_cluster) {
        pu += v;
    }
    for (const auto& [g, v] : best_in_class) {
        ipu += v;
    }
    const double n = static_cast<double>(t.n);
    PurityScores p{static_cast<double>(pu) / n, static_cast<double>(ipu) / n, 0.0};
    p.f1 = harmonic_mean(p.purity, p.inverse_purity);
    return p;
}

EvalReport evaluate(std::span<const std::size_t> predicted, std::span<const std::size_t> gold) {
    const auto b = bcubed(predicted, gold);
    const auto p = purity_suite(predicted, gold);
    EvalReport r;
    r.bcp = b.precision;
    r.bcr = b.recall;
    r.bcf = b.f1;
    r.pu = p.purity;
    r.ipu = p.inverse_purity;
    r.pif = p.f1;
    std::vector<std::size_t> distinct(predicted.begin(), predicted.end());
    std::sort(distinct.begin(), distinct.end());
    r.n_clusters = static_cast<std::size_t>(
        std::unique(distinct.begin(), distinct.end()) - distinct.begin());
    return r;
}

EvalReport evaluate(const std::map<std::string, std::string>& predicted,
                    const std::map<std::string, std::string>& gold) {
    if (predicted.size() != gold.size() ||
        !std::equal(predicted.begin(), predicted.end(), gold.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
        throw InvalidArgument("predicted and gold cover different instance ids");
    }
    std::map<std::string, std::size_t> pred_codes, gold_codes;
    const auto p = encode(predicted, pred_codes);
    const auto g = encode(gold, gold_codes);
    return evaluate(p, g);
}

std::string tsv_header() {
    return "first_step\tsecond_step\talpha\tn_plu\tn_clusters\tpu\tipu\tpif\tbcp\tbcr\tbcf";
}

std::string to_tsv(const EvalReport& r, const std::string& first_step,
                   const std::string& second_step, std::optional<double> alpha) {
    const auto pct = [](double v) { return fmt::format("{:.1f}", 100.0 * v); };
    return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", first_step, second_step,
                       alpha ? fmt::format("{:.1f}", *alpha) : std::string("-"),
                       r.n_plus ? std::to_string(*r.n_plus) : std::string("-"), r.n_clusters,
                       pct(r.pu), pct(r.ipu), pct(r.pif), pct(r.bcp), pct(r.bcr), pct(r.bcf));
}

} // namespace frameforge
