#include <doctest.h>

#include <cmath>
#include <complex>

#include "aqec/evolution.hpp"

using namespace aqec;

namespace {

// Independent forward oracle: complex matrix exponentials of the dense
// Hamiltonian, no shared code with evolve()'s real-symmetric path.
QuantumState evolve_oracle(const AnnealSpec& spec, const ScheduleCoefficients& coeffs,
                           const EvolutionGrid& grid) {
    QuantumState psi = ground_state(assemble_hamiltonian(spec, coeffs, 0.0));
    for (int n = 0; n < grid.steps; ++n) {
        const ComplexMatrix h =
            assemble_hamiltonian(spec, coeffs, grid.sample_point(n));
        psi = expm_minus_i(h, grid.dt()) * psi;
    }
    return psi;
}

ScheduleCoefficients random_coeffs(const AnnealSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    RealVector v(spec.coeff_len());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.gaussian() * 0.5;
    return {v};
}

}  // namespace

TEST_CASE("grid sampling points") {
    EvolutionGrid mid{10, 2.0, StepSampling::Midpoint};
    CHECK(mid.dt() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mid.sample_point(0) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(mid.sample_point(9) == doctest::Approx(0.95).epsilon(1e-15));

    EvolutionGrid left{10, 2.0, StepSampling::LeftEndpoint};
    CHECK(left.sample_point(0) == 0.0);
    CHECK(left.sample_point(9) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("eig_real_symmetric reconstructs and is deterministic") {
    Rng rng(17);
    RealMatrix a(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = rng.gaussian();
    const RealMatrix h = 0.5 * (a + a.transpose());
    const StepSpectrum s1 = eig_real_symmetric(h);
    const RealMatrix rebuilt =
        s1.eigenvectors * s1.eigenvalues.asDiagonal() * s1.eigenvectors.transpose();
    CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i + 1 < 6; ++i) CHECK(s1.eigenvalues(i) <= s1.eigenvalues(i + 1));

    const StepSpectrum s2 = eig_real_symmetric(h);
    CHECK((s1.eigenvectors - s2.eigenvectors).norm() == 0.0);
}

TEST_CASE("ground_state hand cases") {
    // ground of -X is |+> with positive components
    const QuantumState plus = ground_state(-pauli_x());
    CHECK(plus(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(plus(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(plus(0).imag()) < 1e-15);

    // ground of Z is |1>
    const QuantumState one = ground_state(pauli_z());
    CHECK(std::abs(one(1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(one(0)) < 1e-12);

    bool degenerate = false;
    ground_state(ComplexMatrix::Identity(4, 4), &degenerate);
    CHECK(degenerate);
    degenerate = true;
    ground_state(-pauli_x(), &degenerate);
    CHECK_FALSE(degenerate);
}

TEST_CASE("single-qubit analytic evolution") {
    // hx = -1, hz = 0, no drives, one midpoint step of length 1:
    // H(0.5) = -X/2, initial state |+>, so U|+> = e^{i/2}|+>.
    AnnealSpec spec = default_spec(1, 1, 1, 1.0);
    spec.fixed_hx(0) = -1.0;
    spec.fixed_hz(0) = 0.0;
    const PauliBasis basis = PauliBasis::build(1);
    const EvolutionGrid grid = EvolutionGrid::from_spec(spec);
    const ScheduleCoefficients zero{RealVector::Zero(spec.coeff_len())};

    const Trajectory traj = evolve(spec, basis, zero, grid);
    REQUIRE(traj.states.size() == 2);
    const Complex phase = std::exp(Complex(0.0, 0.5)) / std::sqrt(2.0);
    CHECK(std::abs(traj.final_state()(0) - phase) < 1e-12);
    CHECK(std::abs(traj.final_state()(1) - phase) < 1e-12);
}

TEST_CASE("evolve matches the complex-exponential oracle") {
    for (int qubits : {1, 2, 3}) {
        AnnealSpec spec = default_spec(qubits, 3, 7, 1.7);
        const PauliBasis basis = PauliBasis::build(qubits);
        const EvolutionGrid grid = EvolutionGrid::from_spec(spec);
        const ScheduleCoefficients coeffs = random_coeffs(spec, 100 + qubits);

        const Trajectory traj = evolve(spec, basis, coeffs, grid);
        REQUIRE(static_cast<int>(traj.states.size()) == spec.steps + 1);
        const QuantumState oracle = evolve_oracle(spec, coeffs, grid);
        CHECK((traj.final_state() - oracle).norm() < 1e-10);
        for (const QuantumState& psi : traj.states) {
            CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("left-endpoint sampling changes the trajectory as specified") {
    AnnealSpec spec = default_spec(2, 3, 5, 1.2);
    spec.step_sampling = StepSampling::LeftEndpoint;
    const PauliBasis basis = PauliBasis::build(2);
    const EvolutionGrid grid = EvolutionGrid::from_spec(spec);
    CHECK(grid.sampling == StepSampling::LeftEndpoint);
    const ScheduleCoefficients coeffs = random_coeffs(spec, 21);

    const QuantumState got = evolve(spec, basis, coeffs, grid).final_state();
    const QuantumState oracle = evolve_oracle(spec, coeffs, grid);
    CHECK((got - oracle).norm() < 1e-10);

    AnnealSpec mid_spec = spec;
    mid_spec.step_sampling = StepSampling::Midpoint;
    const QuantumState mid =
        evolve(mid_spec, basis, coeffs, EvolutionGrid::from_spec(mid_spec))
            .final_state();
    CHECK((got - mid).norm() > 1e-6);  // distinct rule, distinct state
}

TEST_CASE("data-driven initial state follows the sample's fields") {
    AnnealSpec spec = default_spec(2, 2, 4, 1.0);
    spec.coeff_source = CoeffSource::FieldsDataDriven;
    const PauliBasis basis = PauliBasis::build(2);
    const EvolutionGrid grid = EvolutionGrid::from_spec(spec);

    RealVector v = RealVector::Zero(spec.coeff_len());
    // tail order: hx (2), hz (2), J (1)
    const int tail = spec.sine_terms * spec.pauli_terms();
    v(tail + 0) = -1.0;
    v(tail + 1) = -2.0;
    v(tail + 2) = 0.4;
    v(tail + 3) = 0.7;
    v(tail + 4) = 1.3;
    const Trajectory traj = evolve(spec, basis, {v}, grid);

    const ComplexMatrix h0 =
        -1.0 * pauli_chain_op(PauliKind::X, 0, 2) -
        2.0 * pauli_chain_op(PauliKind::X, 1, 2);
    CHECK((traj.states[0] - ground_state(h0)).norm() < 1e-12);

    // the schedule-coefficient part of the vector does not move H(0)
    RealVector v2 = v;
    v2.head(tail).setConstant(0.9);
    const Trajectory traj2 = evolve(spec, basis, {v2}, grid);
    CHECK((traj2.states[0] - traj.states[0]).norm() < 1e-12);
    CHECK((traj2.final_state() - traj.final_state()).norm() > 1e-8);
}

TEST_CASE("embed_state equals manual embed + evolve") {
    AnnealSpec spec = default_spec(2, 2, 3, 0.9);
    const PauliBasis basis = PauliBasis::build(2);
    const EvolutionGrid grid = EvolutionGrid::from_spec(spec);
    Rng rng(5);
    RealMatrix w(spec.coeff_len(), 2);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.gaussian() * 0.1;
    RealVector x(2);
    x << 0.8, -0.3;

    const QuantumState direct = embed_state(spec, basis, w, x, grid);
    const QuantumState manual =
        evolve(spec, basis, embed_coefficients(spec, w, x), grid).final_state();
    CHECK((direct - manual).norm() == 0.0);
}

TEST_CASE("forward_batch covers every sample in order") {
    AnnealSpec spec = default_spec(2, 2, 3, 1.0);
    const PauliBasis basis = PauliBasis::build(2);
    const EvolutionGrid grid = EvolutionGrid::from_spec(spec);
    const Dataset ds = gen_circles(2, 8, {1.0, 0.5}, 0.02, 3);
    const RealMatrix w = RealMatrix::Constant(spec.coeff_len(), 2, 0.05);

    const BatchForward fwd = forward_batch(spec, basis, w, ds, grid);
    REQUIRE(fwd.trajectories.size() == ds.size());
    REQUIRE(fwd.labels.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(fwd.labels[i] == ds.samples[i].label);
        const QuantumState expect =
            embed_state(spec, basis, w, ds.samples[i].features, grid);
        CHECK((fwd.trajectories[i].final_state() - expect).norm() == 0.0);
    }
    CHECK_FALSE(fwd.any_degenerate_ground);
}
