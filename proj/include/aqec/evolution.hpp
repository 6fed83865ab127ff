#pragma once

#include <vector>

#include "aqec/data.hpp"
#include "aqec/linalg.hpp"
#include "aqec/loss.hpp"
#include "aqec/schedule.hpp"

// Per-sample time evolution as a product of step unitaries,
// U(t_max) = prod_n exp(-i H(s_n) dt), plus exact adjoint-mode gradients of
// the classifier losses with respect to the embedding matrix. The adjoint
// pass replays the per-step eigendecompositions retained by the forward
// pass and uses the spectral divided-difference formula for dU/dH.

namespace aqec {

struct EvolutionGrid {
    int steps = 1;
    double t_max = 0.0;
    StepSampling sampling = StepSampling::Midpoint;

    double dt() const { return t_max / steps; }
    double sample_point(int n) const {
        return sampling == StepSampling::Midpoint ? (n + 0.5) / steps
                                                  : static_cast<double>(n) / steps;
    }
    static EvolutionGrid from_spec(const AnnealSpec& spec) {
        return {spec.steps, spec.t_max, spec.step_sampling};
    }
};

// Real-symmetric eigendecomposition of one step Hamiltonian (all chain
// Hamiltonians here are real in the Z basis).
struct StepSpectrum {
    RealVector eigenvalues;
    RealMatrix eigenvectors;
};

struct Trajectory {
    std::vector<QuantumState> states;   // N+1, unit norm
    std::vector<StepSpectrum> spectra;  // N, for gradient replay
    StepSpectrum h0_spectrum;           // spectrum of H(0)
    bool degenerate_ground = false;

    const QuantumState& final_state() const { return states.back(); }
};

StepSpectrum eig_real_symmetric(const RealMatrix& h);

// Eigenvector of the smallest eigenvalue with the deterministic phase
// convention. Degenerate ground spaces (gap < 1e-9) fall back to the
// lowest-index eigenvector and set *degenerate when given.
QuantumState ground_state(const ComplexMatrix& h, bool* degenerate = nullptr);

Trajectory evolve(const AnnealSpec& spec, const PauliBasis& basis,
                  const ScheduleCoefficients& coeffs, const EvolutionGrid& grid);

QuantumState embed_state(const AnnealSpec& spec, const PauliBasis& basis,
                         const RealMatrix& w, const RealVector& x,
                         const EvolutionGrid& grid);

// Forward pass over a whole batch; shared by training, gradients, and
// diagnostics so every consumer sees identical states.
struct BatchForward {
    std::vector<Trajectory> trajectories;  // one per sample, batch order
    std::vector<int> labels;
    bool any_degenerate_ground = false;

    std::vector<QuantumState> final_states() const;
};

BatchForward forward_batch(const AnnealSpec& spec, const PauliBasis& basis,
                           const RealMatrix& w, const Dataset& batch,
                           const EvolutionGrid& grid);

struct GradientReport {
    RealMatrix grad_w;
    double loss_value = 0.0;
};

// Exact reverse-mode gradient of the scalar loss with respect to every
// entry of w. `forward` must come from forward_batch on the same inputs.
GradientReport grad_from_forward(const AnnealSpec& spec, const PauliBasis& basis,
                                 const RealMatrix& w, const Dataset& batch,
                                 const BatchForward& forward,
                                 const EvolutionGrid& grid, LossKind kind);

GradientReport grad_loss_wrt_w(const AnnealSpec& spec, const PauliBasis& basis,
                               const RealMatrix& w, const Dataset& batch,
                               const EvolutionGrid& grid, LossKind kind);

// Loss of the batch at w (forward only).
double batch_loss(const AnnealSpec& spec, const PauliBasis& basis,
                  const RealMatrix& w, const Dataset& batch,
                  const EvolutionGrid& grid, LossKind kind);

// Central finite differences over every entry of w; the independent oracle
// used by tests and the grad-check command.
RealMatrix fd_gradient_oracle(const AnnealSpec& spec, const PauliBasis& basis,
                              const RealMatrix& w, const Dataset& batch,
                              const EvolutionGrid& grid, LossKind kind,
                              double step);

}  // namespace aqec
