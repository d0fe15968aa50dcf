#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace frameforge::cli {

struct PrepareArgs {
    std::string input;
    std::string output;
    std::string split_out;
    std::uint64_t seed = 0;
    std::size_t min_examples = 20;
    std::size_t max_examples = 100;
    double dev_fraction = 0.20;
    double balance_tolerance = 0.01;
};

struct RunArgs {
    std::string corpus;
    std::string split;  // optional split manifest from `prepare`
    std::vector<std::string> embeddings;
    std::string layers;  // comma-separated subset of layer specs; empty: all
    std::string algo1 = "xmeans";
    std::string algo2 = "ga";
    bool one_step = false;
    std::string alpha = "tune";
    std::string theta = "calibrate";
    std::string theta_target = "lus";
    std::string centroids = "mixed";
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> cluster_seed;
    double dev_fraction = 0.20;
    double balance_tolerance = 0.01;
    std::size_t threads = 1;
    std::string out_dir;
    bool dry_run = false;
    bool reproduce = false;
};

struct EvalArgs {
    std::string pred;
    std::string gold;
    std::string split;  // optional: restrict gold to one side of this split manifest
    std::string side = "test";
};

struct SynthArgs {
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t verbs = 120;
    std::size_t frames = 20;
    std::size_t dim = 32;
    std::size_t min_instances = 20;
    std::size_t max_instances = 40;
};

int cmd_prepare(const PrepareArgs& args, std::ostream& out);
int cmd_run(const RunArgs& args, std::ostream& out);
int cmd_tune(const RunArgs& args, std::ostream& out);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out);

} // namespace frameforge::cli
