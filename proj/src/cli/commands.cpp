#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "frameforge/cli.hpp"
#include "frameforge/corpus.hpp"
#include "frameforge/embeddings.hpp"
#include "frameforge/error.hpp"
#include "frameforge/kernels.hpp"
#include "frameforge/metrics.hpp"
#include "frameforge/pipeline.hpp"
#include "frameforge/synthetic.hpp"

namespace frameforge::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json stats_json(const CorpusStats& s) {
    return Json{{"verbs", s.verbs}, {"lus", s.lus}, {"frames", s.frames}, {"examples", s.examples}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(path.string(), "cannot open for writing");
    }
    out << text;
    if (!out) {
        throw IoError(path.string(), "write failed");
    }
}

Json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path.string(), "cannot open");
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw CorpusError(path.string() + ": " + e.what());
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

double parse_number(const std::string& text, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw InvalidArgument(fmt::format("{} must be a number, got '{}'", what, text));
    }
    return v;
}

// Everything `run`/`tune` need, resolved from the flags.
struct Resolved {
    TuneOptions tune;
    std::optional<double> alpha;
    std::uint64_t split_seed = 0;
};

Resolved resolve(const RunArgs& a) {
    Resolved r;
    r.tune.first = parse_first_step(a.algo1);
    r.tune.second = parse_second_step(a.algo2);
    r.tune.one_step = a.one_step;
    if (a.one_step && r.tune.second == SecondStepAlgo::none) {
        throw InvalidArgument("--one-step needs --algo2 ward or ga");
    }
    if (a.alpha != "tune") {
        r.alpha = MixWeight(parse_number(a.alpha, "--alpha")).alpha();
    }
    if (a.theta != "calibrate") {
        const double theta = parse_number(a.theta, "--theta");
        if (theta < 0.0) {
            throw InvalidArgument("--theta must be non-negative");
        }
        r.tune.fixed_theta = theta;
    }
    if (a.theta_target == "lus") {
        r.tune.theta_target = ThetaTarget::lus;
    } else if (a.theta_target == "frames") {
        r.tune.theta_target = ThetaTarget::frames;
    } else {
        throw InvalidArgument("--theta-target must be lus or frames");
    }
    if (a.centroids != "mixed" && a.centroids != "mask") {
        throw InvalidArgument("--centroids must be mixed or mask");
    }
    r.tune.mask_centroids = a.centroids == "mask";
    r.tune.alpha_grid = default_alpha_grid();
    r.tune.seed = a.cluster_seed.value_or(a.seed);
    r.tune.threads = std::max<std::size_t>(1, a.threads);
    r.split_seed = a.seed;
    return r;
}

Json config_json(const RunArgs& a, const Resolved& r) {
    Json embeddings = Json::array();
    for (const auto& e : a.embeddings) {
        embeddings.push_back(e);
    }
    return Json{{"corpus", a.corpus},
                {"split", a.split.empty() ? Json(nullptr) : Json(a.split)},
                {"embeddings", embeddings},
                {"layers", a.layers},
                {"mode", a.one_step ? "one-step" : "two-step"},
                {"algo1", a.algo1},
                {"algo2", a.algo2},
                {"alpha", a.alpha},
                {"theta", a.theta},
                {"theta_target", a.theta_target},
                {"centroids", a.centroids},
                {"seed", r.split_seed},
                {"cluster_seed", r.tune.seed},
                {"dev_fraction", a.dev_fraction},
                {"balance_tolerance", a.balance_tolerance},
                {"threads", r.tune.threads},
                {"out", a.out_dir}};
}

struct Sides {
    Corpus corpus;
    std::vector<Instance> dev;
    std::vector<Instance> test;
};

Split read_split(const std::string& path) {
    const Json manifest = read_json(path);
    Split split;
    try {
        for (const auto& v : manifest.at("dev_verbs")) {
            split.dev_verbs.insert(v.get<std::string>());
        }
        for (const auto& v : manifest.at("test_verbs")) {
            split.test_verbs.insert(v.get<std::string>());
        }
    } catch (const Json::exception& e) {
        throw CorpusError(path + ": malformed split manifest: " + e.what());
    }
    return split;
}

Sides load_sides(const RunArgs& a) {
    Sides s;
    s.corpus = load_corpus(a.corpus);
    Split split;
    if (!a.split.empty()) {
        split = read_split(a.split);
    } else {
        split = split_corpus(s.corpus, {a.dev_fraction, a.seed, a.balance_tolerance});
    }
    s.dev = select_verbs(s.corpus, split.dev_verbs);
    s.test = select_verbs(s.corpus, split.test_verbs);
    return s;
}

std::vector<EmbeddingSet> load_layers(const RunArgs& a) {
    if (a.embeddings.empty()) {
        throw InvalidArgument("--embeddings is required");
    }
    std::vector<EmbeddingSet> sets;
    for (const auto& path : a.embeddings) {
        sets.push_back(read_embeddings(path));
    }
    const auto wanted = split_list(a.layers);
    if (wanted.empty()) {
        return sets;
    }
    std::vector<EmbeddingSet> chosen;
    for (const auto& spec : wanted) {
        auto it = std::find_if(sets.begin(), sets.end(),
                               [&](const auto& s) { return s.layer_spec == spec; });
        if (it == sets.end()) {
            throw InvalidArgument("no embedding file provides layer spec '" + spec + "'");
        }
        chosen.push_back(*it);
    }
    return chosen;
}

std::vector<LayerCandidate> candidates(const std::vector<EmbeddingSet>& sets) {
    std::vector<LayerCandidate> out;
    for (const auto& s : sets) {
        out.push_back({s.layer_spec, &s});
    }
    return out;
}

Json report_json(const EvalReport& r) {
    return Json{{"pu", r.pu},   {"ipu", r.ipu}, {"pif", r.pif},
                {"bcp", r.bcp}, {"bcr", r.bcr}, {"bcf", r.bcf},
                {"n_clusters", r.n_clusters},
                {"n_plu", r.n_plus ? Json(*r.n_plus) : Json(nullptr)}};
}

Json grid_json(const std::vector<GridPoint>& grid) {
    Json out = Json::array();
    for (const auto& g : grid) {
        out.push_back(Json{{"layer_spec", g.layer_spec},
                           {"alpha", g.alpha},
                           {"theta", g.theta ? Json(*g.theta) : Json(nullptr)},
                           {"bcf", g.report.bcf},
                           {"pif", g.report.pif},
                           {"n_clusters", g.report.n_clusters},
                           {"n_plu", g.report.n_plus ? Json(*g.report.n_plus) : Json(nullptr)}});
    }
    return out;
}

// Reference scores (percent) of each configuration on the full FrameNet
// 1.7 verb data, checked by `run --paper-repro`.
struct ReferenceRow {
    bool one_step;
    const char* algo1;
    const char* algo2;
    std::size_t clusters;
    double pif;
    double bcf;
};

constexpr ReferenceRow kReferenceRows[] = {
    {false, "1cpv", "none", 1017, 54.9, 48.7},  {true, "", "ward", 393, 56.0, 45.6},
    {true, "", "ga", 393, 48.5, 34.9},          {false, "1cpv", "ward", 164, 62.7, 51.6},
    {false, "1cpv", "ga", 412, 70.1, 61.4},     {false, "ga", "ward", 291, 58.8, 47.3},
    {false, "ga", "ga", 479, 69.0, 59.4},       {false, "xmeans", "ward", 167, 61.8, 51.1},
    {false, "xmeans", "ga", 410, 73.0, 64.4},
};

bool check_reference(const RunArgs& a, const EvalReport& r, std::ostream& out) {
    const ReferenceRow* row = nullptr;
    for (const auto& ref : kReferenceRows) {
        if (ref.one_step == a.one_step && ref.algo2 == a.algo2 &&
            (a.one_step || ref.algo1 == a.algo1)) {
            row = &ref;
        }
    }
    if (!row) {
        out << "repro: no reference row for this configuration\n";
        return false;
    }
    const double bcf = 100.0 * r.bcf, pif = 100.0 * r.pif;
    const bool bcf_ok = std::abs(bcf - row->bcf) <= 3.0;
    const bool pif_ok = std::abs(pif - row->pif) <= 3.0;
    const bool count_ok = std::abs(static_cast<double>(r.n_clusters) -
                                   static_cast<double>(row->clusters)) <=
                          0.15 * static_cast<double>(row->clusters);
    out << fmt::format("repro BcF {:.1f} vs {:.1f} (+/-3.0): {}\n", bcf, row->bcf,
                       bcf_ok ? "PASS" : "FAIL");
    out << fmt::format("repro PiF {:.1f} vs {:.1f} (+/-3.0): {}\n", pif, row->pif,
                       pif_ok ? "PASS" : "FAIL");
    out << fmt::format("repro #C {} vs {} (+/-15%): {}\n", r.n_clusters, row->clusters,
                       count_ok ? "PASS" : "FAIL");
    return bcf_ok && pif_ok && count_ok;
}

} // namespace

int cmd_prepare(const PrepareArgs& a, std::ostream& out) {
    const Corpus raw = load_corpus(a.input);
    const Corpus filtered = filter_corpus(raw, {a.min_examples, a.max_examples, a.seed});
    const Split split = split_corpus(filtered, {a.dev_fraction, a.seed, a.balance_tolerance});

    const auto dev = select_verbs(filtered, split.dev_verbs);
    const auto test = select_verbs(filtered, split.test_verbs);
    Json manifest{
        {"seed", a.seed},
        {"filter", {{"min_examples", a.min_examples}, {"max_examples", a.max_examples}}},
        {"dev_fraction", a.dev_fraction},
        {"balance_tolerance", a.balance_tolerance},
        {"dev_polysemy_rate", split.dev_polysemy_rate},
        {"test_polysemy_rate", split.test_polysemy_rate},
        {"stats",
         {{"dev", stats_json(corpus_stats(dev))},
          {"test", stats_json(corpus_stats(test))},
          {"all", stats_json(corpus_stats(filtered.instances))}}},
        {"provenance", filtered.provenance},
        {"dev_verbs", split.dev_verbs},
        {"test_verbs", split.test_verbs}};

    write_corpus(filtered, fs::path(a.output));
    write_text(a.split_out, manifest.dump(2) + "\n");

    out << "side\tverbs\tlus\tframes\texamples\n";
    for (const auto& [name, side] :
         {std::pair{"dev", &dev}, std::pair{"test", &test}, std::pair{"all", &filtered.instances}}) {
        const auto s = corpus_stats(*side);
        out << fmt::format("{}\t{}\t{}\t{}\t{}\n", name, s.verbs, s.lus, s.frames, s.examples);
    }
    return kOk;
}

int cmd_run(const RunArgs& a, std::ostream& out) {
    const Resolved r = resolve(a);
    if (a.dry_run) {
        out << config_json(a, r).dump(2) << '\n';
        return kOk;
    }
    if (a.out_dir.empty()) {
        throw InvalidArgument("--out is required");
    }

    const Sides sides = load_sides(a);
    const auto sets = load_layers(a);
    const auto layers = candidates(sets);
    const ExperimentResult result = run_experiment(sides.dev, sides.test, layers, r.tune, r.alpha);

    const bool baseline = !a.one_step && r.tune.first == FirstStepAlgo::one_cluster_per_verb &&
                          r.tune.second == SecondStepAlgo::none;
    const std::optional<double> alpha =
        baseline ? std::nullopt : std::optional<double>(result.tuning.alpha);
    const auto& term = result.clustering.termination;

    Json manifest{
        {"mode", a.one_step ? "one-step" : "two-step"},
        {"algo1", a.one_step ? "none" : a.algo1},
        {"algo2", a.algo2},
        {"alpha", alpha ? Json(*alpha) : Json(nullptr)},
        {"alpha_source", baseline ? "n/a" : (r.alpha ? "fixed" : "tuned")},
        {"theta", result.tuning.theta ? Json(*result.tuning.theta) : Json(nullptr)},
        {"theta_source", !result.tuning.theta ? "n/a"
                         : r.tune.fixed_theta ? "fixed"
                                              : "calibrated"},
        {"theta_target", a.theta_target},
        {"centroids", a.centroids},
        {"layer_spec", result.tuning.layer_spec},
        {"seeds", {{"split", r.split_seed}, {"cluster", r.tune.seed}}},
        {"p_dev", result.tuning.p_dev},
        {"n_plu", result.report.n_plus ? Json(*result.report.n_plus) : Json(nullptr)},
        {"n_clusters", result.report.n_clusters},
        {"termination",
         {{"p_same_cluster", term.p_same_cluster},
          {"merges", term.merges},
          {"plu_pair_total", term.plu_pair_total}}},
        {"metrics", report_json(result.report)},
        {"dev_bcf", result.tuning.dev_bcf},
        {"tuning_grid", grid_json(result.tuning.grid)},
        {"corpus",
         {{"path", a.corpus},
          {"provenance", sides.corpus.provenance},
          {"dev", stats_json(corpus_stats(sides.dev))},
          {"test", stats_json(corpus_stats(sides.test))}}},
        {"kernels", kernels::active().name}};

    const fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError(dir.string(), "cannot create output directory: " + ec.message());
    }
    std::string clusters;
    for (const auto& [id, label] : result.clustering.instance_assignment) {
        clusters += Json{{"instance_id", id}, {"cluster", label}}.dump() + "\n";
    }
    const std::string row = to_tsv(result.report, a.one_step ? "one-step" : a.algo1, a.algo2, alpha);
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    write_text(dir / "clusters.jsonl", clusters);
    write_text(dir / "report.tsv", row + "\n");

    out << tsv_header() << '\n' << row << '\n';
    if (a.reproduce && !check_reference(a, result.report, out)) {
        return kFailure;
    }
    return kOk;
}

int cmd_tune(const RunArgs& a, std::ostream& out) {
    const Resolved r = resolve(a);
    if (a.dry_run) {
        out << config_json(a, r).dump(2) << '\n';
        return kOk;
    }
    const Sides sides = load_sides(a);
    const auto sets = load_layers(a);
    const auto layers = candidates(sets);
    TuneOptions tune = r.tune;
    if (r.alpha) {
        tune.alpha_grid = {*r.alpha};
    }
    const TuneResult t = tune_hyperparameters(sides.dev, layers, tune);

    out << "layer_spec\talpha\ttheta\tn_plu\tn_clusters\tbcf\tpif\n";
    for (const auto& g : t.grid) {
        out << fmt::format("{}\t{:.1f}\t{}\t{}\t{}\t{:.4f}\t{:.4f}\n", g.layer_spec, g.alpha,
                           g.theta ? fmt::format("{:.6g}", *g.theta) : "-",
                           g.report.n_plus ? std::to_string(*g.report.n_plus) : "-",
                           g.report.n_clusters, g.report.bcf, g.report.pif);
    }
    out << fmt::format("best\talpha={:.1f}\tlayer_spec={}\ttheta={}\tp_dev={:.6f}\tdev_bcf={:.4f}\n",
                       t.alpha, t.layer_spec, t.theta ? fmt::format("{:.6g}", *t.theta) : "-",
                       t.p_dev, t.dev_bcf);
    return kOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    Corpus gold_corpus = load_corpus(a.gold);
    if (!a.split.empty()) {
        if (a.side != "dev" && a.side != "test") {
            throw InvalidArgument("--side must be dev or test");
        }
        const Split split = read_split(a.split);
        gold_corpus.instances =
            select_verbs(gold_corpus, a.side == "dev" ? split.dev_verbs : split.test_verbs);
    }

    std::ifstream in(a.pred);
    if (!in) {
        throw IoError(a.pred, "cannot open predictions");
    }
    std::map<std::string, std::string> predicted;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        Json rec;
        try {
            rec = Json::parse(line);
        } catch (const Json::exception& e) {
            throw CorpusError(a.pred + ": malformed JSON: " + e.what(), lineno);
        }
        if (!rec.is_object() || !rec.contains("instance_id") || !rec["instance_id"].is_string() ||
            !rec.contains("cluster") || !(rec["cluster"].is_string() || rec["cluster"].is_number_integer())) {
            throw CorpusError(a.pred + ": need string instance_id and integer or string cluster",
                              lineno);
        }
        const auto id = rec["instance_id"].get<std::string>();
        const auto label =
            rec["cluster"].is_string() ? rec["cluster"].get<std::string>() : rec["cluster"].dump();
        if (!predicted.emplace(id, label).second) {
            throw CorpusError(a.pred + ": duplicate instance_id '" + id + "'", lineno);
        }
    }

    std::map<std::string, std::string> gold;
    for (const auto& inst : gold_corpus.instances) {
        gold.emplace(inst.instance_id, inst.gold_frame);
    }

    std::vector<std::string> missing, extra;
    for (const auto& [id, frame] : gold) {
        if (!predicted.contains(id)) {
            missing.push_back(id);
        }
    }
    for (const auto& [id, label] : predicted) {
        if (!gold.contains(id)) {
            extra.push_back(id);
        }
    }
    if (!missing.empty() || !extra.empty()) {
        err << Json{{"error", "prediction ids do not match gold ids"},
                    {"kind", "id_mismatch"},
                    {"missing_count", missing.size()},
                    {"extra_count", extra.size()},
                    {"missing", missing},
                    {"extra", extra}}
                   .dump()
            << '\n';
        return kFailure;
    }

    const EvalReport r = evaluate(predicted, gold);
    out << fmt::format("instances\t{}\nclusters\t{}\nframes\t{}\n", gold.size(), r.n_clusters,
                       corpus_stats(gold_corpus.instances).frames);
    out << fmt::format("bcp\t{:.6f}\nbcr\t{:.6f}\nbcf\t{:.6f}\npu\t{:.6f}\nipu\t{:.6f}\npif\t{:.6f}\n",
                       r.bcp, r.bcr, r.bcf, r.pu, r.ipu, r.pif);
    return kOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    SyntheticOptions o;
    o.seed = a.seed;
    o.verbs = a.verbs;
    o.frames = a.frames;
    o.dim = a.dim;
    o.min_instances = a.min_instances;
    o.max_instances = a.max_instances;
    const auto data = make_synthetic(o);

    const fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError(dir.string(), "cannot create output directory: " + ec.message());
    }
    write_corpus(data.corpus, dir / "corpus.jsonl");
    write_embeddings(data.embeddings, dir / "embeddings.ffe1");
    const auto s = corpus_stats(data.corpus.instances);
    out << fmt::format("wrote {} instances ({} verbs, {} LUs, {} frames) to {}\n", s.examples,
                       s.verbs, s.lus, s.frames, dir.string());
    return kOk;
}

} // namespace frameforge::cli
