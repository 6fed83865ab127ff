#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aqec/io.hpp"

// Command implementations behind the CLI. Each returns a process exit code:
// 0 success, 1 validation error, 2 runtime/numerical failure,
// 3 grad-check threshold failure.

namespace aqec {

int cmd_gen_data(const RunConfig& cfg);

// One training run per experiment seed; per-seed subdirectory with
// metrics.csv, checkpoint.txt, and (with snapshots on) the overlap-matrix
// sequence, plus a summary.csv across seeds.
int cmd_train(const RunConfig& cfg);

int cmd_eval(const std::string& checkpoint_path, const std::string& dataset_csv,
             const std::string& report_path = "");

int cmd_predict(const std::string& checkpoint_path, const std::string& input_csv,
                const std::string& output_csv = "");

struct GradCheckOptions {
    int instances = 20;
    int max_qubits = 3;
    int max_dim = 4;
    std::uint64_t seed = 12345;
    double fd_step = 1e-5;
    double rel_tol = 1e-4;
    double abs_tol = 1e-7;
    double grad_floor = 1e-6;  // entries below this use the absolute tolerance
    std::vector<LossKind> losses = {LossKind::BinaryNegDistance, LossKind::NegProduct,
                                    LossKind::NegSum, LossKind::NegMinOverSpread};
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
    int instances_run = 0;
    bool passed = false;
};

GradCheckReport run_grad_check(const GradCheckOptions& opt);
int cmd_grad_check(const GradCheckOptions& opt);

// Per-(qubit count, seed) training runs aggregated into a mean/std table.
struct SweepRow {
    int qubits = 0;
    int seeds_ok = 0;
    double train_mean = 0.0, train_std = 0.0;
    double test_mean = 0.0, test_std = 0.0;
};

std::vector<SweepRow> run_scaling_sweep(const RunConfig& cfg);
int cmd_scaling_sweep(const RunConfig& cfg);

// Single train+eval used by cmd_train and the sweep.
struct RunOutcome {
    TrainResult result;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

RunOutcome run_single(const RunConfig& cfg, int qubits, std::uint64_t train_seed,
                      const RunConfig::LoadedData& data);

void write_snapshots(const AnnealSpec& spec, const PauliBasis& basis,
                     const RealMatrix& w, const Dataset& train,
                     const EvolutionGrid& grid, const std::string& dir);

}  // namespace aqec
