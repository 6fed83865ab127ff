#include "aqec/evolution.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aqec/classifier.hpp"

namespace aqec {

namespace {

constexpr double kDegenerateGap = 1e-9;

// y = V x or V^T x with V real and x complex, via two real products.
ComplexVector mul_real(const RealMatrix& v, const ComplexVector& x,
                       bool transpose) {
    RealVector re, im;
    if (transpose) {
        re = v.transpose() * x.real();
        im = v.transpose() * x.imag();
    } else {
        re = v * x.real();
        im = v * x.imag();
    }
    ComplexVector y(re.size());
    y.real() = re;
    y.imag() = im;
    return y;
}

void fix_real_column_sign(RealMatrix& v, Eigen::Index col) {
    const double tol = 1e-12;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        if (std::abs(v(i, col)) > tol) {
            if (v(i, col) < 0.0) v.col(col) = -v.col(col);
            return;
        }
    }
}

}  // namespace

StepSpectrum eig_real_symmetric(const RealMatrix& h) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed");
    }
    StepSpectrum out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
        fix_real_column_sign(out.eigenvectors, c);
    }
    return out;
}

QuantumState ground_state(const ComplexMatrix& h, bool* degenerate) {
    const HermEigen eig = herm_eig(h);
    if (degenerate) {
        *degenerate = h.rows() > 1 &&
                      eig.eigenvalues(1) - eig.eigenvalues(0) < kDegenerateGap;
    }
    return eig.eigenvectors.col(0);
}

Trajectory evolve(const AnnealSpec& spec, const PauliBasis& basis,
                  const ScheduleCoefficients& coeffs, const EvolutionGrid& grid) {
    Trajectory traj;
    traj.h0_spectrum =
        eig_real_symmetric(assemble_hamiltonian_real(spec, basis, coeffs, 0.0));
    traj.degenerate_ground =
        spec.dim() > 1 && traj.h0_spectrum.eigenvalues(1) -
                                  traj.h0_spectrum.eigenvalues(0) <
                              kDegenerateGap;

    QuantumState psi =
        traj.h0_spectrum.eigenvectors.col(0).cast<Complex>();
    traj.states.reserve(grid.steps + 1);
    traj.spectra.reserve(grid.steps);
    traj.states.push_back(psi);

    const double dt = grid.dt();
    for (int n = 0; n < grid.steps; ++n) {
        const double s = grid.sample_point(n);
        StepSpectrum eig =
            eig_real_symmetric(assemble_hamiltonian_real(spec, basis, coeffs, s));
        ComplexVector tilde = mul_real(eig.eigenvectors, psi, true);
        for (Eigen::Index i = 0; i < tilde.size(); ++i) {
            tilde(i) *= std::exp(Complex(0.0, -eig.eigenvalues(i) * dt));
        }
        psi = mul_real(eig.eigenvectors, tilde, false);
        const double norm_err = std::abs(psi.norm() - 1.0);
        if (norm_err > 1e-10) {
            throw std::runtime_error("evolution lost state norm: deviation " +
                                     std::to_string(norm_err));
        }
        traj.states.push_back(psi);
        traj.spectra.push_back(std::move(eig));
    }
    return traj;
}

QuantumState embed_state(const AnnealSpec& spec, const PauliBasis& basis,
                         const RealMatrix& w, const RealVector& x,
                         const EvolutionGrid& grid) {
    const ScheduleCoefficients coeffs = embed_coefficients(spec, w, x);
    return evolve(spec, basis, coeffs, grid).final_state();
}

std::vector<QuantumState> BatchForward::final_states() const {
    std::vector<QuantumState> out;
    out.reserve(trajectories.size());
    for (const Trajectory& t : trajectories) out.push_back(t.final_state());
    return out;
}

BatchForward forward_batch(const AnnealSpec& spec, const PauliBasis& basis,
                           const RealMatrix& w, const Dataset& batch,
                           const EvolutionGrid& grid) {
    BatchForward fwd;
    fwd.trajectories.resize(batch.size());
    fwd.labels.resize(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const Sample& smp = batch.samples[k];
        const ScheduleCoefficients coeffs = embed_coefficients(spec, w, smp.features);
        fwd.trajectories[k] = evolve(spec, basis, coeffs, grid);
        fwd.labels[k] = smp.label;
        fwd.any_degenerate_ground |= fwd.trajectories[k].degenerate_ground;
    }
    return fwd;
}

namespace {

// Backward pass for one sample: accumulates dL/dv (coefficient-vector
// cotangent) from the final-state cotangent chi_N = G psi_N. The per-step
// unitary derivative uses the spectral divided difference
// Phi(a,b) = (e^{-i a dt} - e^{-i b dt}) / (a - b), with the limiting value
// -i dt e^{-i a dt} below the degenerate-gap threshold.
RealVector backprop_sample(const AnnealSpec& spec, const PauliBasis& basis,
                           const Trajectory& traj, const ComplexMatrix& g,
                           const EvolutionGrid& grid) {
    const int dim = spec.dim();
    const int ns = spec.sine_terms;
    const int m = spec.pauli_terms();
    const int n = spec.qubits;
    const double dt = grid.dt();
    const bool data_driven = spec.coeff_source == CoeffSource::FieldsDataDriven;
    const int tail = ns * m;

    RealVector grad_v = RealVector::Zero(spec.coeff_len());
    ComplexVector chi = g * traj.final_state();

    RealMatrix k_re(dim, dim);
    std::vector<double> term_2re(m);
    for (int t = grid.steps - 1; t >= 0; --t) {
        const StepSpectrum& eig = traj.spectra[t];
        const double s = grid.sample_point(t);
        const ComplexVector psi_tilde =
            mul_real(eig.eigenvectors, traj.states[t], true);
        const ComplexVector chi_tilde = mul_real(eig.eigenvectors, chi, true);

        // Only Re(E) is needed: the per-coefficient factors are real.
        ComplexVector phase(dim);
        for (int i = 0; i < dim; ++i) {
            phase(i) = std::exp(Complex(0.0, -eig.eigenvalues(i) * dt));
        }
        for (int a = 0; a < dim; ++a) {
            const Complex ca = std::conj(chi_tilde(a));
            const double la = eig.eigenvalues(a);
            for (int b = 0; b < dim; ++b) {
                const double lb = eig.eigenvalues(b);
                const Complex phi = std::abs(la - lb) > kDegenerateGap
                                        ? (phase(a) - phase(b)) / (la - lb)
                                        : Complex(0.0, -dt) * phase(a);
                k_re(a, b) = (ca * phi * psi_tilde(b)).real();
            }
        }
        const RealMatrix e_re = eig.eigenvectors * k_re.transpose() *
                                eig.eigenvectors.transpose();
        for (int j = 0; j < m; ++j) {
            const PauliTermSparse& sp = basis.sparse[j];
            double tr = 0.0;
            for (int c = 0; c < dim; ++c) tr += sp.sign[c] * e_re(c, sp.perm[c]);
            term_2re[j] = 2.0 * tr;
        }

        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < ns; ++k) {
                grad_v(j * ns + k) +=
                    std::sin((k + 1) * std::numbers::pi * s) * term_2re[j];
            }
        }
        if (data_driven) {
            for (int i = 0; i < n; ++i) {
                grad_v(tail + i) += (1.0 - s) * term_2re[basis.x_term(i)];
                grad_v(tail + n + i) += s * term_2re[basis.z_term(i)];
            }
            for (int i = 0; i + 1 < n; ++i) {
                grad_v(tail + 2 * n + i) += s * term_2re[basis.zz_term(i)];
            }
        }

        // chi <- U_t^dagger chi.
        ComplexVector back = chi_tilde;
        for (int i = 0; i < dim; ++i) {
            back(i) *= std::exp(Complex(0.0, eig.eigenvalues(i) * dt));
        }
        chi = mul_real(eig.eigenvectors, back, false);
    }

    if (data_driven) {
        // Initial-state sensitivity: first-order eigenvector perturbation of
        // the ground state of H(0) = sum_i hx_i X_i. Only the hx tail enters
        // (every other term carries a vanishing coefficient at s = 0).
        if (traj.degenerate_ground) {
            throw std::runtime_error(
                "fields-data-driven gradient rejected: degenerate ground state "
                "of H(0)");
        }
        const StepSpectrum& eig = traj.h0_spectrum;
        const ComplexVector chi_tilde = mul_real(eig.eigenvectors, chi, true);
        ComplexVector u = ComplexVector::Zero(dim);
        for (int a = 1; a < dim; ++a) {
            u(a) = std::conj(chi_tilde(a)) /
                   (eig.eigenvalues(0) - eig.eigenvalues(a));
        }
        const ComplexVector y = mul_real(eig.eigenvectors, u, false);
        const RealVector vg = eig.eigenvectors.col(0);
        for (int i = 0; i < n; ++i) {
            const PauliTermSparse& sp = basis.sparse[basis.x_term(i)];
            Complex dot = 0.0;
            for (int c = 0; c < dim; ++c) {
                dot += y(sp.perm[c]) * sp.sign[c] * vg(c);
            }
            grad_v(tail + i) += 2.0 * dot.real();
        }
    }

    return grad_v;
}

}  // namespace

GradientReport grad_from_forward(const AnnealSpec& spec, const PauliBasis& basis,
                                 const RealMatrix& w, const Dataset& batch,
                                 const BatchForward& forward,
                                 const EvolutionGrid& grid, LossKind kind) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    const LossCotangents cot =
        loss_with_cotangents(forward.final_states(), forward.labels, kind);

    GradientReport report;
    report.loss_value = cot.loss;
    report.grad_w = RealMatrix::Zero(w.rows(), w.cols());
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const RealVector grad_v = backprop_sample(
            spec, basis, forward.trajectories[k], cot.d_rho[k], grid);
        report.grad_w.noalias() += grad_v * batch.samples[k].features.transpose();
    }
    if (!report.grad_w.allFinite()) {
        throw std::runtime_error("non-finite gradient");
    }
    return report;
}

GradientReport grad_loss_wrt_w(const AnnealSpec& spec, const PauliBasis& basis,
                               const RealMatrix& w, const Dataset& batch,
                               const EvolutionGrid& grid, LossKind kind) {
    const BatchForward fwd = forward_batch(spec, basis, w, batch, grid);
    return grad_from_forward(spec, basis, w, batch, fwd, grid, kind);
}

double batch_loss(const AnnealSpec& spec, const PauliBasis& basis,
                  const RealMatrix& w, const Dataset& batch,
                  const EvolutionGrid& grid, LossKind kind) {
    std::vector<QuantumState> finals;
    std::vector<int> labels;
    finals.reserve(batch.size());
    for (const Sample& smp : batch.samples) {
        finals.push_back(embed_state(spec, basis, w, smp.features, grid));
        labels.push_back(smp.label);
    }
    return loss_with_cotangents(finals, labels, kind).loss;
}

RealMatrix fd_gradient_oracle(const AnnealSpec& spec, const PauliBasis& basis,
                              const RealMatrix& w, const Dataset& batch,
                              const EvolutionGrid& grid, LossKind kind,
                              double step) {
    if (!(step > 0.0)) throw std::invalid_argument("fd step must be > 0");
    RealMatrix grad(w.rows(), w.cols());
    RealMatrix probe = w;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            probe(i, j) = w(i, j) + step;
            const double lp = batch_loss(spec, basis, probe, batch, grid, kind);
            probe(i, j) = w(i, j) - step;
            const double lm = batch_loss(spec, basis, probe, batch, grid, kind);
            probe(i, j) = w(i, j);
            grad(i, j) = (lp - lm) / (2.0 * step);
        }
    }
    return grad;
}

}  // namespace aqec
