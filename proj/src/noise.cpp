#include "sgslab/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sgslab/rng.hpp"

namespace sgs {

NoiseModel NoiseModel::aria() {
    NoiseModel m;
    m.fidelity_1q = 0.9998;
    m.fidelity_2q = 0.99;
    return m;
}

NoiseModel NoiseModel::noiseless() {
    NoiseModel m;
    m.t_gate_1q = 0.0;
    m.t_gate_2q = 0.0;
    m.readout_flip = 0.0;
    return m;
}

void NoiseModel::validate() const {
    auto fid = [](double f) { return f > 0.0 && f <= 1.0; };
    if (!fid(fidelity_1q)) throw Error("noise.fidelity_1q must lie in (0, 1]");
    if (!fid(fidelity_2q)) throw Error("noise.fidelity_2q must lie in (0, 1]");
    if (!(T1 > 0.0)) throw Error("noise.T1 must be positive");
    if (!(T2 > 0.0)) throw Error("noise.T2 must be positive");
    if (!(t_gate_1q >= 0.0)) throw Error("noise.t_gate_1q must be >= 0");
    if (!(t_gate_2q >= 0.0)) throw Error("noise.t_gate_2q must be >= 0");
    if (!(readout_flip >= 0.0 && readout_flip <= 1.0)) throw Error("noise.readout_flip must lie in [0, 1]");
}

DepolarizingParam depolarizing_param(double fidelity, double t_gate, double T1, double T2) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw Error("depolarizing_param: fidelity outside [0, 1]");
    if (!(t_gate >= 0.0) || !(T1 > 0.0) || !(T2 > 0.0)) throw Error("depolarizing_param: nonphysical times");
    const double eps = 1.0 - fidelity;
    const double d = std::exp(-t_gate / T1) + 2.0 * std::exp(-t_gate / T2);
    const double raw = 1.0 + 3.0 * (2.0 * eps - 1.0) / d;
    DepolarizingParam out;
    out.p = std::clamp(raw, 0.0, 1.0);
    out.clamped = out.p != raw;
    return out;
}

DensityMatrix::DensityMatrix(int n) : num_qubits(n) {
    if (n > kDensityQubitLimit)
        throw Error("density matrix limit exceeded: " + std::to_string(n) + " qubits > " +
                    std::to_string(kDensityQubitLimit));
    const Eigen::Index dim = Eigen::Index{1} << n;
    m = Eigen::MatrixXcd::Zero(dim, dim);
    m(0, 0) = 1.0;
}

DensityMatrix DensityMatrix::from_state(const StateVector& s) {
    DensityMatrix r(s.num_qubits);
    r.m = s.amp * s.amp.adjoint();
    return r;
}

double DensityMatrix::expectation(const PauliString& p) const {
    // Tr(P rho) = sum_b <b|P rho|b>
    const auto mk = p.masks();
    static const cplx ip[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const auto dim = static_cast<std::uint64_t>(m.rows());
    cplx acc = 0.0;
    for (std::uint64_t b = 0; b < dim; ++b) {
        // P|b> = phase(b)|b^flip>, so <c|P rho|c> sums rho[b, c] * phase(b) with c = b^flip
        const cplx t = m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ mk.flip));
        acc += (std::popcount(b & mk.sign) & 1) ? -t : t;
    }
    return (acc * p.coeff * ip[mk.ny & 3]).real();
}

void apply_depolarizing(DensityMatrix& rho, int qubit, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("apply_depolarizing: p outside [0, 1]");
    if (qubit < 0 || qubit >= rho.num_qubits) throw Error("apply_depolarizing: qubit out of range");
    if (p == 0.0) return;
    const auto bit = qubit_bit(rho.num_qubits, qubit);
    const auto dim = static_cast<std::uint64_t>(rho.m.rows());
    auto& m = rho.m;
    for (std::uint64_t r = 0; r < dim; ++r) {
        if (r & bit) continue;
        for (std::uint64_t c = 0; c < dim; ++c) {
            if (c & bit) continue;
            const auto R0 = static_cast<Eigen::Index>(r), R1 = static_cast<Eigen::Index>(r | bit);
            const auto C0 = static_cast<Eigen::Index>(c), C1 = static_cast<Eigen::Index>(c | bit);
            const cplx avg = 0.5 * (m(R0, C0) + m(R1, C1));
            m(R0, C0) = (1.0 - p) * m(R0, C0) + p * avg;
            m(R1, C1) = (1.0 - p) * m(R1, C1) + p * avg;
            m(R0, C1) *= (1.0 - p);
            m(R1, C0) *= (1.0 - p);
        }
    }
}

void apply_unitary_gate(DensityMatrix& rho, const Gate& g) {
    // U rho U^dagger = (U (U rho)^dagger)^dagger
    apply_gate_columns(rho.m, rho.num_qubits, g);
    Eigen::MatrixXcd t = rho.m.adjoint();
    apply_gate_columns(t, rho.num_qubits, g);
    rho.m = t.adjoint();
}

DensityMatrix run_noisy(const Circuit& c, const NoiseModel& noise, DensityMatrix rho) {
    noise.validate();
    if (c.num_qubits != rho.num_qubits) throw Error("run_noisy: qubit count mismatch");
    const double p1 = depolarizing_param(noise.fidelity_1q, noise.t_gate_1q, noise.T1, noise.T2).p;
    const double p2 = depolarizing_param(noise.fidelity_2q, noise.t_gate_2q, noise.T1, noise.T2).p;
    const Circuit nat = c.native();
    for (const auto& g : nat.gates) {
        apply_unitary_gate(rho, g);
        const double p = g.qubits.size() == 2 ? p2 : p1;
        for (int q : g.qubits) apply_depolarizing(rho, q, p);
    }
    return rho;
}

ExpectationSample sample_expectation_noisy(const DensityMatrix& rho, const PauliString& o, int shots,
                                           double readout_flip, std::uint64_t seed) {
    check_measurable(o);
    if (shots < 1) throw Error("sample_expectation_noisy: shots must be >= 1");
    if (!(readout_flip >= 0.0 && readout_flip <= 1.0)) throw Error("readout_flip outside [0, 1]");
    DensityMatrix rot = rho;
    for (const auto& g : basis_change_circuit(o).gates) apply_unitary_gate(rot, g);

    const auto dim = static_cast<std::size_t>(rot.m.rows());
    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
        acc += std::max(0.0, rot.m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)).real());
        cdf[b] = acc;
    }
    std::uint64_t zmask = 0;
    std::vector<std::uint64_t> sup_bits;
    for (int q : o.support()) {
        sup_bits.push_back(qubit_bit(o.num_qubits(), q));
        zmask |= sup_bits.back();
    }
    const bool negative = o.coeff.real() < 0.0;
    Rng rng(seed);
    int plus = 0;
    for (int k = 0; k < shots; ++k) {
        const double u = rng.uniform() * acc;
        auto b = static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        b = std::min<std::uint64_t>(b, dim - 1);
        if (readout_flip > 0.0)
            for (auto bit : sup_bits)
                if (rng.uniform() < readout_flip) b ^= bit;
        const bool even = (std::popcount(b & zmask) & 1) == 0;
        plus += even != negative;
    }
    return make_sample(plus, shots);
}

}  // namespace sgs
