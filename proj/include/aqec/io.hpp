#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aqec/classifier.hpp"
#include "aqec/data.hpp"
#include "aqec/schedule.hpp"

// Run configuration, checkpoints, and every file format the CLI emits.
// Configs are flat `section.key = value` documents; unknown keys are errors.
// All numeric output uses %.17g so files round-trip bit-exactly.

namespace aqec {

struct DatasetConfig {
    std::string source = "circles";  // circles | spirals | csv | digits
    int classes = 2;
    int train_points = 500;
    int test_points = 100;
    std::vector<double> radii;  // defaulted per class count when empty
    double noise_std = 0.05;
    double turns = 2.0;
    std::uint64_t seed = 7;
    std::string train_csv, test_csv;       // source = csv
    std::string digits_csv;                // source = digits
    std::set<int> label_filter;            // source = digits
    double train_fraction = 0.9;
    bool header = false;
    NormalizationMode normalization = NormalizationMode::None;
    double scale_constant = 16.0;

    std::vector<double> effective_radii() const;
};

struct RunConfig {
    // anneal.*
    int qubits = 3;
    int sine_terms = 3;
    int steps = 10;
    double t_max = 2.0;
    std::string coeff_source = "fields-fixed";
    std::string step_sampling = "midpoint";
    std::vector<double> fixed_hx, fixed_hz, fixed_j;  // defaults when empty

    TrainConfig train;
    DatasetConfig data;

    // experiment.*
    std::vector<std::uint64_t> seeds = {1};
    std::vector<int> qubit_list;

    std::string out_dir = "out";
    bool snapshots = false;

    static RunConfig load(const std::string& path);

    AnnealSpec make_spec(int qubits_override = -1) const;

    // Generated or ingested per data.source; normalization fitted on train.
    struct LoadedData {
        Dataset train, test;
        NormalizationStats norm;
    };
    LoadedData load_data() const;
};

struct Checkpoint {
    int version = 1;
    AnnealSpec spec;
    int data_dim = 0;
    NormalizationStats norm;
    std::uint64_t train_seed = 0;
    int epochs_completed = 0;
    double final_loss = 0.0;
    RealMatrix w;
    std::vector<ClassCentroid> centroids;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);
};

void write_metrics_csv(const std::vector<EpochRecord>& history,
                       const std::string& path);

void write_real_matrix_csv(const RealMatrix& m, const std::string& path);

// 8-bit grayscale PGM (P5), one pixel per entry, [0,1] -> [0,255].
void write_matrix_pgm(const RealMatrix& m, const std::string& path);

void write_text_file(const std::string& text, const std::string& path);

std::string format_double(double v);  // %.17g

}  // namespace aqec
