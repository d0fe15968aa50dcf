#include "frameforge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "frameforge/error.hpp"
#include "frameforge/rng.hpp"

namespace frameforge {

namespace {

using Json = nlohmann::ordered_json;

std::string require_string(const Json& record, const char* key, std::size_t line) {
    auto it = record.find(key);
    if (it == record.end()) {
        throw CorpusError(std::string("missing key '") + key + "'", line);
    }
    if (!it->is_string()) {
        throw CorpusError(std::string("key '") + key + "' must be a string", line);
    }
    return it->get<std::string>();
}

Instance parse_record(const std::string& text, std::size_t line) {
    Json record;
    try {
        record = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw CorpusError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!record.is_object()) {
        throw CorpusError("record is not a JSON object", line);
    }

    Instance inst;
    inst.instance_id = require_string(record, "instance_id", line);
    inst.verb_lemma = require_string(record, "verb_lemma", line);
    inst.gold_frame = require_string(record, "gold_frame", line);
    inst.gold_lu = require_string(record, "gold_lu", line);

    auto tokens = record.find("tokens");
    if (tokens == record.end() || !tokens->is_array()) {
        throw CorpusError("key 'tokens' must be an array of strings", line);
    }
    for (const auto& token : *tokens) {
        if (!token.is_string()) {
            throw CorpusError("key 'tokens' must be an array of strings", line);
        }
        inst.tokens.push_back(token.get<std::string>());
    }

    auto target = record.find("target_index");
    if (target == record.end() || !target->is_number_integer()) {
        throw CorpusError("key 'target_index' must be an integer", line);
    }
    if (target->is_number_unsigned() || target->get<std::int64_t>() >= 0) {
        inst.target_index = target->get<std::size_t>();
    } else {
        throw CorpusError("target_index is negative", line);
    }
    if (inst.target_index >= inst.tokens.size()) {
        throw CorpusError("target_index " + std::to_string(inst.target_index) +
                              " out of range for " + std::to_string(inst.tokens.size()) +
                              " tokens",
                          line);
    }
    return inst;
}

} // namespace

std::string make_gold_lu(std::string_view verb_lemma, std::string_view gold_frame) {
    std::string lu;
    lu.reserve(verb_lemma.size() + gold_frame.size() + 4);
    lu.append(verb_lemma).append(".v::").append(gold_frame);
    return lu;
}

CorpusStats corpus_stats(const std::vector<Instance>& instances) {
    std::unordered_set<std::string> verbs, lus, frames;
    for (const auto& inst : instances) {
        verbs.insert(inst.verb_lemma);
        lus.insert(inst.gold_lu);
        frames.insert(inst.gold_frame);
    }
    return {verbs.size(), lus.size(), frames.size(), instances.size()};
}

Corpus parse_corpus(std::istream& in, std::string provenance) {
    Corpus corpus;
    corpus.provenance = std::move(provenance);

    std::unordered_map<std::string, std::size_t> seen_ids;
    // (verb, frame) -> gold_lu and the reverse, to keep the pairing injective.
    std::map<std::pair<std::string, std::string>, std::string> lu_of;
    std::unordered_map<std::string, std::pair<std::string, std::string>> pair_of;

    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r') {
            text.pop_back();
        }
        if (text.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        Instance inst = parse_record(text, line);

        if (auto [it, fresh] = seen_ids.emplace(inst.instance_id, line); !fresh) {
            throw CorpusError("duplicate instance_id '" + inst.instance_id +
                                  "' (first seen on line " + std::to_string(it->second) + ")",
                              line);
        }
        auto key = std::make_pair(inst.verb_lemma, inst.gold_frame);
        if (auto [it, fresh] = lu_of.emplace(key, inst.gold_lu); !fresh && it->second != inst.gold_lu) {
            throw CorpusError("gold_lu '" + inst.gold_lu + "' conflicts with '" + it->second +
                                  "' for the same verb and frame",
                              line);
        }
        if (auto [it, fresh] = pair_of.emplace(inst.gold_lu, key); !fresh && it->second != key) {
            throw CorpusError("gold_lu '" + inst.gold_lu + "' is used for two verb/frame pairs",
                              line);
        }
        corpus.instances.push_back(std::move(inst));
    }
    if (in.bad()) {
        throw CorpusError("read failure after line " + std::to_string(line));
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path.string(), "cannot open corpus");
    }
    return parse_corpus(in, "jsonl:" + path.string());
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& inst : corpus.instances) {
        Json record;
        record["instance_id"] = inst.instance_id;
        record["verb_lemma"] = inst.verb_lemma;
        record["tokens"] = inst.tokens;
        record["target_index"] = inst.target_index;
        record["gold_frame"] = inst.gold_frame;
        record["gold_lu"] = inst.gold_lu;
        out << record.dump() << '\n';
    }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(path.string(), "cannot open for writing");
    }
    write_corpus(corpus, out);
    if (!out) {
        throw IoError(path.string(), "write failed");
    }
}

Corpus filter_corpus(const Corpus& corpus, const FilterOptions& options) {
    if (options.min_examples < 1 || options.max_examples < options.min_examples) {
        throw InvalidArgument("filter_corpus: require 1 <= min_examples <= max_examples");
    }

    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < corpus.instances.size(); ++i) {
        const auto& inst = corpus.instances[i];
        groups[{inst.verb_lemma, inst.gold_frame}].push_back(i);
    }

    std::vector<char> keep(corpus.instances.size(), 0);
    for (auto& [key, members] : groups) {
        if (members.size() < options.min_examples) {
            continue;
        }
        if (members.size() > options.max_examples) {
            // Partial Fisher-Yates on a per-group stream, so the sample does
            // not depend on which other groups exist.
            Rng rng(derive_seed(options.seed, key.first + '\x1f' + key.second));
            for (std::size_t i = 0; i < options.max_examples; ++i) {
                const auto j = i + rng.below(members.size() - i);
                std::swap(members[i], members[j]);
            }
            members.resize(options.max_examples);
        }
        for (auto idx : members) {
            keep[idx] = 1;
        }
    }

    Corpus out;
    for (std::size_t i = 0; i < corpus.instances.size(); ++i) {
        if (keep[i]) {
            out.instances.push_back(corpus.instances[i]);
        }
    }
    if (out.instances.empty()) {
        throw CorpusError("filter_corpus: no (verb, frame) group has at least " +
                          std::to_string(options.min_examples) + " instances");
    }
    out.provenance = corpus.provenance + "|filter(min=" + std::to_string(options.min_examples) +
                     ",max=" + std::to_string(options.max_examples) +
                     ",seed=" + std::to_string(options.seed) + ")";
    return out;
}

std::vector<Instance> select_verbs(const Corpus& corpus, const std::set<std::string>& verbs) {
    std::vector<Instance> out;
    for (const auto& inst : corpus.instances) {
        if (verbs.contains(inst.verb_lemma)) {
            out.push_back(inst);
        }
    }
    return out;
}

double polysemy_rate(const std::vector<Instance>& instances) {
    std::map<std::string, std::set<std::string>> frames_of;
    for (const auto& inst : instances) {
        frames_of[inst.verb_lemma].insert(inst.gold_frame);
    }
    if (frames_of.empty()) {
        return 0.0;
    }
    const auto poly = std::count_if(frames_of.begin(), frames_of.end(),
                                    [](const auto& kv) { return kv.second.size() > 1; });
    return static_cast<double>(poly) / static_cast<double>(frames_of.size());
}

} // namespace frameforge
