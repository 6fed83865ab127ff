#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "aqec/data.hpp"
#include "aqec/evolution.hpp"
#include "aqec/linalg.hpp"
#include "aqec/loss.hpp"

// Training loop and nearest-centroid classification: per-class averaged
// density matrices are pushed apart by gradient descent on a distance loss,
// and unseen samples take the label of the closest centroid.

namespace aqec {

struct ClassCentroid {
    int label = 0;
    ComplexMatrix matrix;  // Hermitian, trace 1, PSD
    int count = 0;
};

// M = (1/K) sum_k |psi_k><psi_k|, summed in index order.
ClassCentroid centroid(const std::vector<QuantumState>& states, int label);

// Centroids for every label present, sorted by label id.
std::vector<ClassCentroid> class_centroids(const std::vector<QuantumState>& states,
                                           const std::vector<int>& labels);

// D_ij = Tr((M_i - M_j)^2), zero diagonal.
RealMatrix distance_matrix(const std::vector<ClassCentroid>& centroids);

// Loss over already-formed centroids; per_class_states are needed only by
// NegMinOverSpread (r_max) and may be empty otherwise.
double loss_value(const std::vector<ClassCentroid>& centroids,
                  const std::vector<std::vector<QuantumState>>& per_class_states,
                  LossKind kind);

// Loss plus the Hermitian cotangent dL/d(rho_k) for every sample; feeds the
// adjoint gradient pass.
struct LossCotangents {
    double loss = 0.0;
    std::vector<ComplexMatrix> d_rho;  // batch order
    std::vector<ClassCentroid> centroids;
};

LossCotangents loss_with_cotangents(const std::vector<QuantumState>& final_states,
                                    const std::vector<int>& labels, LossKind kind);

struct TrainConfig {
    int epochs = 300;
    double learning_rate = 0.05;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    LossKind loss_kind = LossKind::NegProduct;
    double w_init_scale = 0.1;
    std::uint64_t rng_seed = 0;
    int snapshot_cadence = 0;  // 0 = no overlap snapshots during training

    void validate() const;
};

struct TrainState {
    RealMatrix w;
    RealMatrix adam_m, adam_v;
    long step = 0;
    std::vector<double> loss_history;      // loss at w after each update
    std::vector<double> accuracy_history;  // train accuracy, same points
    double initial_loss = 0.0;
};

// One Adam update with bias correction. Throws on non-finite gradients.
void adam_step(TrainState& state, const RealMatrix& grad, const TrainConfig& config);

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
    double wall_ms = 0.0;
};

struct TrainResult {
    TrainState state;
    std::vector<ClassCentroid> centroids;  // at the final w
    std::vector<EpochRecord> history;
};

// Full-batch training per the centroid-separation scheme: embed everything,
// form centroids, descend on the loss, repeat. Metrics rows are measured at
// the post-update w of each epoch, so the last row matches the checkpoint.
TrainResult train(const Dataset& dataset, const AnnealSpec& spec,
                  const EvolutionGrid& grid, const TrainConfig& config);

// Nearest centroid by Hilbert-Schmidt distance; ties break to the smaller
// label id.
int predict_state(const QuantumState& psi, const std::vector<ClassCentroid>& centroids);

int predict(const RealVector& x, const RealMatrix& w,
            const std::vector<ClassCentroid>& centroids, const AnnealSpec& spec,
            const PauliBasis& basis, const EvolutionGrid& grid);

double evaluate(const Dataset& dataset, const RealMatrix& w,
                const std::vector<ClassCentroid>& centroids, const AnnealSpec& spec,
                const PauliBasis& basis, const EvolutionGrid& grid);

// Pairwise |<psi_a|psi_b>|^2 over an ordered state list.
RealMatrix overlap_matrix(const std::vector<QuantumState>& states);

// Samples reordered by label then original index; the ordering used for
// overlap exports.
std::vector<std::size_t> label_grouped_order(const std::vector<int>& labels);

// Nearest-centroid in raw feature space with Euclidean distance.
struct BaselineResult {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

BaselineResult raw_linear_baseline(const Dataset& train_set, const Dataset& test_set);

}  // namespace aqec
