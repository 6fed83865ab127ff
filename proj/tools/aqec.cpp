#include <CLI11.hpp>

#include "aqec/app.hpp"

// aqec: analog quantum embedding classifier.
//
// Subcommands: gen-data, train, eval, predict, grad-check, scaling-sweep.
// Every experiment is driven by a flat key=value config file; the common
// knobs are also exposed as flags that override the config.

namespace {

aqec::RunConfig load_or_default(const std::string& config_path) {
    return config_path.empty() ? aqec::RunConfig{} : aqec::RunConfig::load(config_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analog quantum embedding classifier"};
    app.require_subcommand(1);

    std::string config_path, out_dir, checkpoint, dataset, report, input_csv,
        output_csv, generator, losses_filter;
    long long seed = -1;
    int epochs = -1, qubits = -1;
    std::vector<int> qubit_list;
    std::vector<std::uint64_t> seed_list;
    bool snapshots = false;

    auto* gen = app.add_subcommand("gen-data", "generate train/test dataset CSVs");
    gen->add_option("generator", generator, "circles | spirals");
    gen->add_option("--config", config_path);
    int gd_classes = 2, gd_train = 500, gd_test = 100;
    double gd_noise = -1.0;
    gen->add_option("--classes", gd_classes);
    gen->add_option("--train", gd_train);
    gen->add_option("--test", gd_test);
    gen->add_option("--noise", gd_noise);
    gen->add_option("--seed", seed);
    gen->add_option("--out", out_dir);

    auto* tr = app.add_subcommand("train", "train a classifier per the config");
    tr->add_option("--config", config_path)->required();
    tr->add_option("--seed", seed, "single training seed override");
    tr->add_option("--seeds", seed_list, "training seed list override");
    tr->add_option("--epochs", epochs);
    tr->add_option("--qubits", qubits);
    tr->add_option("--out", out_dir);
    tr->add_flag("--snapshots", snapshots, "export the overlap-matrix sequence");

    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset CSV");
    ev->add_option("checkpoint", checkpoint)->required();
    ev->add_option("dataset", dataset)->required();
    ev->add_option("--report", report);

    auto* pr = app.add_subcommand("predict", "predict labels for feature rows");
    pr->add_option("checkpoint", checkpoint)->required();
    pr->add_option("input", input_csv)->required();
    pr->add_option("--out", output_csv);

    auto* gc = app.add_subcommand("grad-check",
                                  "adjoint vs finite-difference gradient check");
    aqec::GradCheckOptions gc_opt;
    gc->add_option("--config", config_path);
    gc->add_option("--instances", gc_opt.instances);
    gc->add_option("--max-qubits", gc_opt.max_qubits)->check(CLI::Range(1, 3));
    gc->add_option("--max-dim", gc_opt.max_dim)->check(CLI::Range(1, 4));
    gc->add_option("--seed", gc_opt.seed);
    gc->add_option("--step", gc_opt.fd_step);
    gc->add_option("--threshold", gc_opt.rel_tol);
    gc->add_option("--losses", losses_filter, "restrict to one loss kind");

    auto* sw = app.add_subcommand("scaling-sweep",
                                  "train over a qubit list x seed list");
    sw->add_option("--config", config_path)->required();
    sw->add_option("--qubits", qubit_list);
    sw->add_option("--seeds", seed_list);
    sw->add_option("--out", out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            aqec::RunConfig cfg = load_or_default(config_path);
            if (!generator.empty()) cfg.data.source = generator;
            cfg.data.classes = gd_classes;
            cfg.data.train_points = gd_train;
            cfg.data.test_points = gd_test;
            if (gd_noise >= 0.0) cfg.data.noise_std = gd_noise;
            if (seed >= 0) cfg.data.seed = static_cast<std::uint64_t>(seed);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return aqec::cmd_gen_data(cfg);
        }
        if (tr->parsed()) {
            aqec::RunConfig cfg = aqec::RunConfig::load(config_path);
            if (seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed)};
            if (!seed_list.empty()) cfg.seeds = seed_list;
            if (epochs > 0) cfg.train.epochs = epochs;
            if (qubits > 0) cfg.qubits = qubits;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (snapshots) cfg.snapshots = true;
            return aqec::cmd_train(cfg);
        }
        if (ev->parsed()) return aqec::cmd_eval(checkpoint, dataset, report);
        if (pr->parsed()) return aqec::cmd_predict(checkpoint, input_csv, output_csv);
        if (gc->parsed()) {
            if (!losses_filter.empty()) {
                gc_opt.losses = {aqec::loss_kind_from_string(losses_filter)};
            }
            return aqec::cmd_grad_check(gc_opt);
        }
        if (sw->parsed()) {
            aqec::RunConfig cfg = aqec::RunConfig::load(config_path);
            if (!qubit_list.empty()) cfg.qubit_list = qubit_list;
            if (!seed_list.empty()) cfg.seeds = seed_list;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return aqec::cmd_scaling_sweep(cfg);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
