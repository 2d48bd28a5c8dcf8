#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgslab/pauli.hpp"
#include "sgslab/state.hpp"

namespace sgs {

enum class GateKind { GPI2, RZ, MS, H, X, CNOT, PauliRot };

struct Gate {
    GateKind kind = GateKind::H;
    std::vector<int> qubits;
    std::vector<double> angles;
    Word axes;  // PauliRot only: full-register word

    static Gate gpi2(int q, double phi) { return {GateKind::GPI2, {q}, {phi}, {}}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, {q}, {theta}, {}}; }
    static Gate ms(int a, int b, double phi0, double phi1, double theta) {
        return {GateKind::MS, {a, b}, {phi0, phi1, theta}, {}};
    }
    static Gate h(int q) { return {GateKind::H, {q}, {}, {}}; }
    static Gate x(int q) { return {GateKind::X, {q}, {}, {}}; }
    static Gate cnot(int c, int t) { return {GateKind::CNOT, {c, t}, {}, {}}; }
    // exp(-i angle P) with P the word (identity letters allowed).
    static Gate pauli_rotation(const Word& w, double angle);

    bool is_native() const { return kind == GateKind::GPI2 || kind == GateKind::RZ || kind == GateKind::MS; }
    std::string name() const;
};

// Unitary on the gate's qubits in listed order (first qubit is the high bit). Not for PauliRot.
Eigen::MatrixXcd gate_matrix(const Gate& g);

struct Circuit {
    int num_qubits = 0;
    std::vector<Gate> gates;
    double global_phase = 0.0;  // overall factor exp(i global_phase)
    int trotter_steps = 0;      // product-formula steps contained

    Circuit() = default;
    explicit Circuit(int n) : num_qubits(n) {}

    void add(Gate g);
    void append(const Circuit& c);

    // Same operator up to global phase, built from GPI2, RZ and MS only.
    Circuit native() const;
    // Counts and depth refer to the native compilation.
    int one_qubit_count() const;
    int two_qubit_count() const;
    int two_qubit_depth() const;
    // One line per gate: "NAME q0,q1 angle..."
    std::string dump() const;
};

void apply_gate(StateVector& s, const Gate& g);
// Applies a k-qubit unitary to every column of a 2^n x m block.
void apply_local(Eigen::MatrixXcd& block, int n, const std::vector<int>& qubits, const Eigen::MatrixXcd& u);
void apply_gate_columns(Eigen::MatrixXcd& block, int n, const Gate& g);

void simulate(const Circuit& c, StateVector& s);
Eigen::MatrixXcd circuit_unitary(const Circuit& c);

// Non-identity terms in product-formula order with their coefficients.
std::vector<std::pair<Word, double>> trotter_order(const QubitHamiltonian& h);
Circuit trotter_step(const QubitHamiltonian& h, double dt);
Circuit time_evolution_circuit(const QubitHamiltonian& h, double t, int n_steps);
QubitHamiltonian interpolate(const QubitHamiltonian& h0, const QubitHamiltonian& h, double s);
// Midpoint-sampled linear schedule, one product-formula step per schedule step.
Circuit adiabatic_circuit(const QubitHamiltonian& h0, const QubitHamiltonian& h, double tau, int n_steps);

StateVector exact_evolve(const StateVector& s, const QubitHamiltonian& h, double t);
Eigen::MatrixXcd exact_unitary(const QubitHamiltonian& h, double t);

// C with C^dagger Z_S C = O, S the support of O.
Circuit basis_change_circuit(const PauliString& o);

struct ExpectationSample {
    double mean = 0.0;
    double std_error = 0.0;
    int shots = 0;
    int plus = 0;
    int minus = 0;
};

ExpectationSample make_sample(int plus, int shots);
void check_measurable(const PauliString& o);
ExpectationSample sample_expectation(const StateVector& s, const PauliString& o, int shots, std::uint64_t seed);

}  // namespace sgs
