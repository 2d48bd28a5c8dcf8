#pragma once

#include <optional>

#include "sgslab/circuit.hpp"

namespace sgs {

struct NoiseModel {
    double fidelity_1q = 1.0;
    double fidelity_2q = 1.0;
    double T1 = 100.0;  // s
    double T2 = 1.0;    // s
    double t_gate_1q = 135e-6;
    double t_gate_2q = 600e-6;
    double readout_flip = 0.0039;

    // Aria-like constants; the two fidelities are this library's choice.
    static NoiseModel aria();
    static NoiseModel noiseless();
    void validate() const;
};

struct DepolarizingParam {
    double p = 0.0;
    bool clamped = false;
};

// p = 1 + 3(2 eps - 1)/d, eps = 1 - F, d = exp(-Tg/T1) + 2 exp(-Tg/T2)
DepolarizingParam depolarizing_param(double fidelity, double t_gate, double T1, double T2);

constexpr int kDensityQubitLimit = 8;

struct DensityMatrix {
    int num_qubits = 0;
    Eigen::MatrixXcd m;

    DensityMatrix() = default;
    explicit DensityMatrix(int n);  // |0..0><0..0|
    static DensityMatrix from_state(const StateVector& s);

    double trace_real() const { return m.trace().real(); }
    double expectation(const PauliString& p) const;
};

// (1-p) rho + p (I/2 (x) Tr_q rho)
void apply_depolarizing(DensityMatrix& rho, int qubit, double p);
void apply_unitary_gate(DensityMatrix& rho, const Gate& g);

DensityMatrix run_noisy(const Circuit& c, const NoiseModel& noise, DensityMatrix rho);

ExpectationSample sample_expectation_noisy(const DensityMatrix& rho, const PauliString& o, int shots,
                                           double readout_flip, std::uint64_t seed);

}  // namespace sgs
