#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace frameforge {

/// Harmonic mean; 0 when either argument is 0.
double harmonic_mean(double a, double b) noexcept;

struct BCubed {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct PurityScores {
    double purity = 0.0;
    double inverse_purity = 0.0;
    double f1 = 0.0;
};

/// Item-averaged B-cubed precision/recall. `predicted[i]` and `gold[i]`
/// label item i; both must be non-empty and of equal length.
BCubed bcubed(std::span<const std::size_t> predicted, std::span<const std::size_t> gold);

/// Purity of the predicted clusters against gold classes, and the reverse.
PurityScores purity_suite(std::span<const std::size_t> predicted,
                          std::span<const std::size_t> gold);

/// The six clustering scores plus cluster counts; one row of a results table.
struct EvalReport {
    double bcp = 0.0, bcr = 0.0, bcf = 0.0;
    double pu = 0.0, ipu = 0.0, pif = 0.0;
    std::size_t n_clusters = 0;
    std::optional<std::size_t> n_plus;
};

/// Scores keyed predictions against keyed gold labels. Throws
/// InvalidArgument when the key sets differ or are empty.
EvalReport evaluate(const std::map<std::string, std::string>& predicted,
                    const std::map<std::string, std::string>& gold);

EvalReport evaluate(std::span<const std::size_t> predicted, std::span<const std::size_t> gold);

/// Tab-separated row: method columns, alpha, #pLU, #C, then Pu iPu PiF BcP
/// BcR BcF as percentages with one decimal. Absent values print as "-".
std::string to_tsv(const EvalReport& report, const std::string& first_step,
                   const std::string& second_step, std::optional<double> alpha);

/// Column names matching to_tsv.
std::string tsv_header();

} // namespace frameforge
