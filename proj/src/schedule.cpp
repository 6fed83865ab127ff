#include "aqec/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aqec {

std::string to_string(CoeffSource s) {
    return s == CoeffSource::FieldsFixed ? "fields-fixed" : "fields-data-driven";
}

std::string to_string(StepSampling s) {
    return s == StepSampling::Midpoint ? "midpoint" : "left-endpoint";
}

CoeffSource coeff_source_from_string(const std::string& s) {
    if (s == "fields-fixed") return CoeffSource::FieldsFixed;
    if (s == "fields-data-driven") return CoeffSource::FieldsDataDriven;
    throw std::invalid_argument("unknown coeff_source: " + s);
}

StepSampling step_sampling_from_string(const std::string& s) {
    if (s == "midpoint") return StepSampling::Midpoint;
    if (s == "left-endpoint") return StepSampling::LeftEndpoint;
    throw std::invalid_argument("unknown step_sampling: " + s);
}

int AnnealSpec::coeff_len() const {
    const int base = sine_terms * pauli_terms();
    return coeff_source == CoeffSource::FieldsDataDriven ? base + 3 * qubits - 1
                                                         : base;
}

namespace {

double ground_gap(const RealMatrix& h) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
    const RealVector& lam = solver.eigenvalues();
    return lam(1) - lam(0);
}

}  // namespace

void AnnealSpec::validate() const {
    if (qubits < 1) throw std::invalid_argument("qubit count must be >= 1");
    if (qubits > 8) throw std::invalid_argument("qubit count must be <= 8");
    if (sine_terms < 1) throw std::invalid_argument("sine_terms must be >= 1");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
        throw std::invalid_argument("t_max must be finite and >= 0");
    }
    if (coeff_source == CoeffSource::FieldsFixed) {
        if (fixed_hx.size() != qubits || fixed_hz.size() != qubits ||
            fixed_j.size() != qubits - 1) {
            throw std::invalid_argument("fixed field sizes inconsistent with n");
        }
        const PauliBasis basis = PauliBasis::build(qubits);
        ScheduleCoefficients zero{RealVector::Zero(coeff_len())};
        const double gap0 = ground_gap(assemble_hamiltonian_real(*this, basis, zero, 0.0));
        const double gap1 = ground_gap(assemble_hamiltonian_real(*this, basis, zero, 1.0));
        if (gap0 <= 1e-9 || gap1 <= 1e-9) {
            throw std::invalid_argument(
                "fixed fields give a degenerate endpoint Hamiltonian (gap0=" +
                std::to_string(gap0) + ", gap1=" + std::to_string(gap1) + ")");
        }
    }
}

AnnealSpec default_spec(int qubits, int sine_terms, int steps, double t_max) {
    AnnealSpec spec;
    spec.qubits = qubits;
    spec.sine_terms = sine_terms;
    spec.steps = steps;
    spec.t_max = t_max;
    spec.fixed_hx = RealVector::Constant(qubits, -1.0);
    spec.fixed_hz = RealVector(qubits);
    for (int i = 0; i < qubits; ++i) spec.fixed_hz(i) = 0.5 + 0.1 * i;
    spec.fixed_j = RealVector::Constant(std::max(qubits - 1, 0), 1.0);
    spec.validate();
    return spec;
}

std::vector<TermDescriptor> term_layout(int qubits) {
    std::vector<TermDescriptor> layout;
    layout.reserve(3 * qubits - 1);
    for (int i = 0; i < qubits; ++i) layout.push_back({PauliKind::Z, i});
    for (int i = 0; i < qubits; ++i) layout.push_back({PauliKind::X, i});
    for (int i = 0; i + 1 < qubits; ++i) layout.push_back({PauliKind::ZZ, i});
    return layout;
}

long param_count(const AnnealSpec& spec, int data_dim) {
    return static_cast<long>(spec.coeff_len()) * data_dim;
}

double schedule_value(std::span<const double> c, double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw std::invalid_argument("schedule point s outside [0,1]");
    }
    double v = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        v += c[k] * std::sin((k + 1) * std::numbers::pi * s);
    }
    return v;
}

ScheduleCoefficients embed_coefficients(const AnnealSpec& spec,
                                        const RealMatrix& w,
                                        const RealVector& x) {
    if (w.rows() != spec.coeff_len()) {
        throw std::invalid_argument("embedding map rows != coefficient length");
    }
    if (w.cols() != x.size()) {
        throw std::invalid_argument("sample dimension " + std::to_string(x.size()) +
                                    " != embedding map cols " +
                                    std::to_string(w.cols()));
    }
    return ScheduleCoefficients{w * x};
}

PauliBasis PauliBasis::build(int qubits) {
    PauliBasis basis;
    basis.qubits = qubits;
    basis.layout = term_layout(qubits);
    const int dim = 1 << qubits;
    for (const TermDescriptor& t : basis.layout) {
        PauliTermSparse sp;
        sp.perm.resize(dim);
        sp.sign.resize(dim);
        for (int c = 0; c < dim; ++c) {
            // site 0 is the leftmost Kronecker factor, i.e. the highest bit.
            const int bit = qubits - 1 - t.site;
            switch (t.kind) {
                case PauliKind::X:
                    sp.perm[c] = c ^ (1 << bit);
                    sp.sign[c] = 1.0;
                    break;
                case PauliKind::Z:
                    sp.perm[c] = c;
                    sp.sign[c] = (c >> bit) & 1 ? -1.0 : 1.0;
                    break;
                case PauliKind::ZZ: {
                    const int bit2 = bit - 1;  // site+1
                    const int parity = ((c >> bit) & 1) ^ ((c >> bit2) & 1);
                    sp.perm[c] = c;
                    sp.sign[c] = parity ? -1.0 : 1.0;
                    break;
                }
            }
        }
        RealMatrix dense = RealMatrix::Zero(dim, dim);
        for (int c = 0; c < dim; ++c) dense(sp.perm[c], c) = sp.sign[c];
        basis.sparse.push_back(std::move(sp));
        basis.dense.push_back(std::move(dense));
    }
    return basis;
}

FieldValues effective_fields(const AnnealSpec& spec,
                             const ScheduleCoefficients& coeffs) {
    const int n = spec.qubits;
    if (spec.coeff_source == CoeffSource::FieldsFixed) {
        return {spec.fixed_hx, spec.fixed_hz, spec.fixed_j};
    }
    const int tail = spec.sine_terms * spec.pauli_terms();
    FieldValues f;
    f.hx = coeffs.values.segment(tail, n);
    f.hz = coeffs.values.segment(tail + n, n);
    f.j = coeffs.values.segment(tail + 2 * n, n - 1);
    return f;
}

RealMatrix assemble_hamiltonian_real(const AnnealSpec& spec,
                                     const PauliBasis& basis,
                                     const ScheduleCoefficients& coeffs,
                                     double s) {
    if (coeffs.values.size() != spec.coeff_len()) {
        throw std::invalid_argument("coefficient length " +
                                    std::to_string(coeffs.values.size()) +
                                    " inconsistent with spec (" +
                                    std::to_string(spec.coeff_len()) + ")");
    }
    if (!(s >= 0.0 && s <= 1.0)) {
        throw std::invalid_argument("schedule point s outside [0,1]");
    }
    const int n = spec.qubits;
    const int ns = spec.sine_terms;
    const int m = spec.pauli_terms();
    const FieldValues fields = effective_fields(spec, coeffs);

    // Per-term scalar: endpoint interpolation plus sine drive.
    RealVector weight(m);
    for (int j = 0; j < m; ++j) {
        std::span<const double> c(coeffs.values.data() + j * ns,
                                  static_cast<std::size_t>(ns));
        weight(j) = schedule_value(c, s);
    }
    for (int i = 0; i < n; ++i) {
        weight(basis.z_term(i)) += s * fields.hz(i);
        weight(basis.x_term(i)) += (1.0 - s) * fields.hx(i);
    }
    for (int i = 0; i + 1 < n; ++i) weight(basis.zz_term(i)) += s * fields.j(i);

    const int dim = spec.dim();
    RealMatrix h = RealMatrix::Zero(dim, dim);
    for (int j = 0; j < m; ++j) {
        const PauliTermSparse& sp = basis.sparse[j];
        for (int c = 0; c < dim; ++c) h(sp.perm[c], c) += weight(j) * sp.sign[c];
    }
    return h;
}

ComplexMatrix assemble_hamiltonian(const AnnealSpec& spec,
                                   const ScheduleCoefficients& coeffs,
                                   double s) {
    const PauliBasis basis = PauliBasis::build(spec.qubits);
    return assemble_hamiltonian_real(spec, basis, coeffs, s).cast<Complex>();
}

}  // namespace aqec
