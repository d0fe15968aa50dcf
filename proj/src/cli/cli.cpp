#include "frameforge/cli.hpp"

#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "frameforge/error.hpp"

namespace frameforge::cli {

namespace {

void add_run_options(CLI::App& cmd, RunArgs& a) {
    cmd.add_option("--corpus", a.corpus, "filtered corpus JSONL")->required()->envname("FRAMEFORGE_CORPUS");
    cmd.add_option("--split", a.split, "split manifest written by prepare")->envname("FRAMEFORGE_SPLIT");
    cmd.add_option("--embeddings", a.embeddings, "FFE1 file; repeat once per layer spec")
        ->required()
        ->envname("FRAMEFORGE_EMBEDDINGS");
    cmd.add_option("--layers", a.layers, "comma-separated layer specs to consider")
        ->envname("FRAMEFORGE_LAYERS");
    cmd.add_option("--algo1", a.algo1, "first step")
        ->check(CLI::IsMember({"xmeans", "ga", "1cpv"}))
        ->envname("FRAMEFORGE_ALGO1");
    cmd.add_option("--algo2", a.algo2, "second step")
        ->check(CLI::IsMember({"ward", "ga", "none"}))
        ->envname("FRAMEFORGE_ALGO2");
    cmd.add_flag("--one-step", a.one_step, "cluster all instances at once with the oracle count");
    cmd.add_option("--alpha", a.alpha, "mix weight in [0,1] or 'tune'")->envname("FRAMEFORGE_ALPHA");
    cmd.add_option("--theta", a.theta, "group-average threshold or 'calibrate'")
        ->envname("FRAMEFORGE_THETA");
    cmd.add_option("--theta-target", a.theta_target, "calibration target")
        ->check(CLI::IsMember({"lus", "frames"}))
        ->envname("FRAMEFORGE_THETA_TARGET");
    cmd.add_option("--centroids", a.centroids, "second-step centroid vectors")
        ->check(CLI::IsMember({"mixed", "mask"}))
        ->envname("FRAMEFORGE_CENTROIDS");
    cmd.add_option("--seed", a.seed, "split seed")->envname("FRAMEFORGE_SEED");
    cmd.add_option("--cluster-seed", a.cluster_seed, "X-means seed (defaults to --seed)")
        ->envname("FRAMEFORGE_CLUSTER_SEED");
    cmd.add_option("--dev-fraction", a.dev_fraction)->envname("FRAMEFORGE_DEV_FRACTION");
    cmd.add_option("--balance-tolerance", a.balance_tolerance)
        ->envname("FRAMEFORGE_BALANCE_TOLERANCE");
    cmd.add_option("--threads", a.threads)->check(CLI::PositiveNumber)->envname("FRAMEFORGE_THREADS");
    cmd.add_flag("--dry-run", a.dry_run, "print the resolved configuration and exit");
}

int report_error(std::ostream& err, const char* kind, const std::string& message, int code) {
    err << nlohmann::ordered_json{{"error", message}, {"kind", kind}, {"exit_code", code}}.dump()
        << '\n';
    return code;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semantic frame induction from masked verb embeddings", "frameforge"};
    app.require_subcommand(1);

    PrepareArgs prepare;
    auto* prep = app.add_subcommand("prepare", "filter a corpus and split its verbs");
    prep->add_option("--input", prepare.input, "raw corpus JSONL")->required();
    prep->add_option("--output", prepare.output, "filtered corpus JSONL")->required();
    prep->add_option("--split-out", prepare.split_out, "split manifest JSON")->required();
    prep->add_option("--seed", prepare.seed)->envname("FRAMEFORGE_SEED");
    prep->add_option("--min-examples", prepare.min_examples)->check(CLI::PositiveNumber);
    prep->add_option("--max-examples", prepare.max_examples)->check(CLI::PositiveNumber);
    prep->add_option("--dev-fraction", prepare.dev_fraction)->envname("FRAMEFORGE_DEV_FRACTION");
    prep->add_option("--balance-tolerance", prepare.balance_tolerance)
        ->envname("FRAMEFORGE_BALANCE_TOLERANCE");

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "tune on dev, cluster and score test");
    add_run_options(*run_cmd, run_args);
    run_cmd->add_option("--out", run_args.out_dir, "output directory")->envname("FRAMEFORGE_OUT");
    run_cmd->add_flag("--paper-repro", run_args.reproduce,
                      "compare the scores with the published reference row");

    RunArgs tune_args;
    auto* tune_cmd = app.add_subcommand("tune", "print the development grid search");
    add_run_options(*tune_cmd, tune_args);

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "score a prediction file");
    eval_cmd->add_option("--pred", eval.pred, "JSONL of {instance_id, cluster}")->required();
    eval_cmd->add_option("--gold", eval.gold, "gold corpus JSONL")->required();
    eval_cmd->add_option("--split", eval.split, "score only one side of this split manifest");
    eval_cmd->add_option("--side", eval.side, "side selected by --split")
        ->check(CLI::IsMember({"dev", "test"}));

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus and embeddings");
    synth_cmd->add_option("--out", synth.out_dir)->required();
    synth_cmd->add_option("--seed", synth.seed)->envname("FRAMEFORGE_SEED");
    synth_cmd->add_option("--verbs", synth.verbs)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--frames", synth.frames)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--dim", synth.dim)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--min-instances", synth.min_instances)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--max-instances", synth.max_instances)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*prep) {
            return cmd_prepare(prepare, out);
        }
        if (*run_cmd) {
            return cmd_run(run_args, out);
        }
        if (*tune_cmd) {
            return cmd_tune(tune_args, out);
        }
        if (*eval_cmd) {
            return cmd_eval(eval, out, err);
        }
        return cmd_synth(synth, out);
    } catch (const IoError& e) {
        return report_error(err, "io", e.what(), kInputError);
    } catch (const CorpusError& e) {
        return report_error(err, "corpus", e.what(), kFailure);
    } catch (const FormatError& e) {
        return report_error(err, "format", e.what(), kFailure);
    } catch (const InvalidArgument& e) {
        return report_error(err, "invalid_argument", e.what(), kFailure);
    } catch (const Error& e) {
        return report_error(err, "error", e.what(), kFailure);
    }
}

} // namespace frameforge::cli
