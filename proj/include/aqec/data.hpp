#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "aqec/linalg.hpp"

// Deterministic dataset generation and ingestion. All randomness flows from
// explicit seeds through Rng below, so identical inputs give byte-identical
// datasets on any platform.

namespace aqec {

struct Sample {
    RealVector features;
    int label = 0;
};

struct Dataset {
    std::vector<Sample> samples;
    int dim = 0;

    std::vector<int> labels_present() const;
    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

// std::mt19937_64 (the engine's output sequence is standardized) with
// hand-rolled uniform/gaussian transforms (std distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next_u64() { return engine_(); }
    double uniform();   // [0, 1)
    double gaussian();  // standard normal, Box-Muller

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Concentric circles: per class, n_points/classes points at the class
// radius with uniform angle plus isotropic Gaussian noise. d = 2.
Dataset gen_circles(int classes, int n_points, const std::vector<double>& radii,
                    double noise_std, std::uint64_t seed);

// Two interleaved Archimedean spirals, class 1 the pi-rotation of class 0.
Dataset gen_spirals(int n_points, double turns, double noise_std,
                    std::uint64_t seed);

// CSV of 64 features + 1 integer label per row, optionally filtered by label.
Dataset load_digits_csv(const std::string& path,
                        const std::optional<std::set<int>>& label_filter,
                        bool skip_header = false);

// Generic CSV ingest: d feature columns then one integer label column.
Dataset load_csv(const std::string& path, bool skip_header = false);

void write_csv(const Dataset& ds, const std::string& path);

// Seeded uniform shuffle, then a prefix split with train size
// round(train_fraction * total), half away from zero. Errors if either
// split loses a label.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

enum class NormalizationMode { None, ScaleToUnit, Standardize };

std::string to_string(NormalizationMode m);
NormalizationMode normalization_mode_from_string(const std::string& s);

struct NormalizationStats {
    NormalizationMode mode = NormalizationMode::None;
    double scale = 1.0;        // ScaleToUnit divisor
    RealVector mean, stddev;   // Standardize, from the training split
};

// Fit on train, apply to a sample/dataset. Zero-variance features pass
// through unscaled under Standardize.
NormalizationStats fit_normalization(const Dataset& train, NormalizationMode mode,
                                     double scale_constant = 16.0);
RealVector apply_normalization(const NormalizationStats& stats,
                               const RealVector& x);
Dataset apply_normalization(const NormalizationStats& stats, const Dataset& ds);

}  // namespace aqec
