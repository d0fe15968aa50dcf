#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace frameforge {

/// One example sentence with a frame-evoking verb occurrence.
struct Instance {
    std::string instance_id;
    std::string verb_lemma;
    std::vector<std::string> tokens;
    std::size_t target_index = 0;
    std::string gold_frame;
    std::string gold_lu;

    bool operator==(const Instance&) const = default;
};

/// Canonical rendering of a lexical unit: "lemma.v::FRAME".
std::string make_gold_lu(std::string_view verb_lemma, std::string_view gold_frame);

struct Corpus {
    std::vector<Instance> instances;
    std::string provenance;
};

/// Verb, LU, frame and example counts of a corpus side.
struct CorpusStats {
    std::size_t verbs = 0;
    std::size_t lus = 0;
    std::size_t frames = 0;
    std::size_t examples = 0;

    bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(const std::vector<Instance>& instances);

/// Reads a JSONL corpus. Throws IoError when the file cannot be opened and
/// CorpusError (carrying the line number) for malformed or inconsistent
/// records.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in, std::string provenance);

void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);

struct FilterOptions {
    std::size_t min_examples = 20;
    std::size_t max_examples = 100;
    std::uint64_t seed = 0;
};

/// Drops (verb, frame) groups with fewer than `min_examples` instances and
/// subsamples groups larger than `max_examples` uniformly without
/// replacement. Retained instances keep their input order.
Corpus filter_corpus(const Corpus& corpus, const FilterOptions& options);

struct SplitOptions {
    double dev_fraction = 0.20;
    std::uint64_t seed = 0;
    double balance_tolerance = 0.01;
};

/// Verb-level development/test split.
struct Split {
    std::set<std::string> dev_verbs;
    std::set<std::string> test_verbs;
    std::uint64_t seed = 0;
    double dev_polysemy_rate = 0.0;
    double test_polysemy_rate = 0.0;
};

/// Splits the verbs of `corpus`, stratifying on polysemy (a verb is
/// polysemous when it evokes more than one frame) so both sides carry the
/// same polysemy rate within `balance_tolerance`.
Split split_corpus(const Corpus& corpus, const SplitOptions& options);

/// Instances of `corpus` whose verb is in `verbs`, in corpus order.
std::vector<Instance> select_verbs(const Corpus& corpus, const std::set<std::string>& verbs);

/// Fraction of verbs in `instances` that evoke more than one frame.
double polysemy_rate(const std::vector<Instance>& instances);

} // namespace frameforge
