#pragma once

#include <span>
#include <string>
#include <vector>

#include "aqec/linalg.hpp"

// Time-dependent Hamiltonian of a driven Ising chain,
//   H(s) = (1-s) sum_i hx_i X_i + s (sum_i hz_i Z_i + sum_i J_i Z_i Z_{i+1})
//          + sum_i P_i(s) Z_i + sum_i R_i(s) X_i + sum_i V_i(s) Z_i Z_{i+1},
// with s = t/t_max in [0,1] and each drive schedule a truncated sine series
// sum_k c_k sin((k+1) pi s) that vanishes at both endpoints.
//
// A sample's schedule coefficients come from a trainable linear map applied
// to its raw feature vector.

namespace aqec {

// Whether the hx/hz/J fields of the endpoint Hamiltonians are run constants
// or are produced per-sample by extra rows of the embedding matrix.
enum class CoeffSource { FieldsFixed, FieldsDataDriven };

// Where within each time step the Hamiltonian is sampled.
enum class StepSampling { Midpoint, LeftEndpoint };

std::string to_string(CoeffSource s);
std::string to_string(StepSampling s);
CoeffSource coeff_source_from_string(const std::string& s);
StepSampling step_sampling_from_string(const std::string& s);

// Static machine description. Immutable after construction.
struct AnnealSpec {
    int qubits = 0;      // n
    int sine_terms = 0;  // n_s
    int steps = 0;       // N
    double t_max = 0.0;
    RealVector fixed_hx;  // n entries
    RealVector fixed_hz;  // n entries
    RealVector fixed_j;   // n-1 entries (nearest-neighbor couplers)
    CoeffSource coeff_source = CoeffSource::FieldsFixed;
    StepSampling step_sampling = StepSampling::Midpoint;

    // m = 2n + (n-1): Z block + X block + ZZ block.
    int pauli_terms() const { return 3 * qubits - 1; }
    int dim() const { return 1 << qubits; }

    // Length of a per-sample coefficient vector: n_s*m, plus the 3n-1
    // appended field values in data-driven mode.
    int coeff_len() const;

    // Throws on malformed shapes; in fields-fixed mode also requires a
    // non-degenerate ground state (gap > 1e-9) of both H(0) and H(1).
    void validate() const;
};

// hx_i = -1, hz_i = 0.5 + 0.1*i, J = 1: a non-degenerate default chain.
AnnealSpec default_spec(int qubits, int sine_terms, int steps, double t_max);

// Fixed ordering of the m Pauli terms and their Fourier slots:
// Z on sites 0..n-1, then X on sites 0..n-1, then ZZ on pairs
// (0,1)..(n-2,n-1); term j owns coefficient slots j*n_s .. j*n_s+n_s-1.
struct TermDescriptor {
    PauliKind kind;
    int site;  // pair (site, site+1) for ZZ
};

std::vector<TermDescriptor> term_layout(int qubits);

// Per-sample schedule parameters in term-layout order. In data-driven mode
// the tail holds hx (n), hz (n), J (n-1), in that order.
struct ScheduleCoefficients {
    RealVector values;

    double fourier(int term, int k, int sine_terms) const {
        return values(term * sine_terms + k);
    }
};

// Number of trainable entries of the embedding matrix for data dimension d.
long param_count(const AnnealSpec& spec, int data_dim);

// sum_k c_k sin((k+1) pi s); s must lie in [0,1].
double schedule_value(std::span<const double> c, double s);

// The embedding map W applied to a raw sample: v_c = W x.
ScheduleCoefficients embed_coefficients(const AnnealSpec& spec,
                                        const RealMatrix& w,
                                        const RealVector& x);

// Dense Pauli chain operators in term-layout order, cached per qubit count.
// `perm`/`sign` give the single nonzero of each column: P e_c = sign[c] e_perm[c].
struct PauliTermSparse {
    std::vector<int> perm;
    std::vector<double> sign;
};

struct PauliBasis {
    int qubits = 0;
    std::vector<TermDescriptor> layout;
    std::vector<RealMatrix> dense;      // all Pauli chains here are real
    std::vector<PauliTermSparse> sparse;

    static PauliBasis build(int qubits);

    // Index of the term for a tail field: hx_i -> X block, hz_i -> Z block,
    // J_i -> ZZ block.
    int z_term(int site) const { return site; }
    int x_term(int site) const { return qubits + site; }
    int zz_term(int site) const { return 2 * qubits + site; }
};

// Effective hx/hz/J for one sample: the spec's fixed values or the
// data-driven tail of the coefficient vector.
struct FieldValues {
    RealVector hx, hz, j;
};

FieldValues effective_fields(const AnnealSpec& spec,
                             const ScheduleCoefficients& coeffs);

// H(s) as a real symmetric matrix (every term is real in the Z basis).
RealMatrix assemble_hamiltonian_real(const AnnealSpec& spec,
                                     const PauliBasis& basis,
                                     const ScheduleCoefficients& coeffs,
                                     double s);

// Complex view of the same, for callers working in ComplexMatrix terms.
ComplexMatrix assemble_hamiltonian(const AnnealSpec& spec,
                                   const ScheduleCoefficients& coeffs,
                                   double s);

}  // namespace aqec
