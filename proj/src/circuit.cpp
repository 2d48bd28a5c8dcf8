#include "sgslab/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sgslab/rng.hpp"

namespace sgs {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

void check_targets(const Gate& g, int n) {
    for (std::size_t a = 0; a < g.qubits.size(); ++a) {
        if (g.qubits[a] < 0 || g.qubits[a] >= n) throw Error("gate " + g.name() + ": qubit index out of range");
        for (std::size_t b = 0; b < a; ++b)
            if (g.qubits[a] == g.qubits[b]) throw Error("gate " + g.name() + ": repeated qubit");
    }
}

}  // namespace

Gate Gate::pauli_rotation(const Word& w, double angle) {
    Gate g{GateKind::PauliRot, {}, {angle}, w};
    for (int q = 0; q < static_cast<int>(w.size()); ++q)
        if (w[q]) g.qubits.push_back(q);
    return g;
}

std::string Gate::name() const {
    switch (kind) {
        case GateKind::GPI2: return "GPI2";
        case GateKind::RZ: return "RZ";
        case GateKind::MS: return "MS";
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::CNOT: return "CNOT";
        case GateKind::PauliRot: return "PAULIROT";
    }
    return "?";
}

Eigen::MatrixXcd gate_matrix(const Gate& g) {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd m;
    switch (g.kind) {
        case GateKind::GPI2: {
            const double phi = g.angles.at(0);
            m.resize(2, 2);
            m << r, -kI * std::exp(-kI * phi) * r, -kI * std::exp(kI * phi) * r, r;
            return m;
        }
        case GateKind::RZ: {
            const double th = g.angles.at(0);
            m = Eigen::MatrixXcd::Zero(2, 2);
            m(0, 0) = std::exp(-kI * th / 2.0);
            m(1, 1) = std::exp(kI * th / 2.0);
            return m;
        }
        case GateKind::MS: {
            const double p0 = g.angles.at(0), p1 = g.angles.at(1), th = g.angles.at(2);
            const double c = std::cos(th / 2.0), s = std::sin(th / 2.0);
            m = Eigen::MatrixXcd::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = c;
            m(0, 3) = -kI * std::exp(-kI * (p0 + p1)) * s;
            m(1, 2) = -kI * std::exp(-kI * (p0 - p1)) * s;
            m(2, 1) = -kI * std::exp(kI * (p0 - p1)) * s;
            m(3, 0) = -kI * std::exp(kI * (p0 + p1)) * s;
            return m;
        }
        case GateKind::H:
            m.resize(2, 2);
            m << r, r, r, -r;
            return m;
        case GateKind::X:
            m.resize(2, 2);
            m << 0, 1, 1, 0;
            return m;
        case GateKind::CNOT:
            m = Eigen::MatrixXcd::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
            return m;
        case GateKind::PauliRot: break;
    }
    throw Error("gate_matrix: no local matrix for " + g.name());
}

void Circuit::add(Gate g) {
    check_targets(g, num_qubits);
    if (g.kind == GateKind::PauliRot && static_cast<int>(g.axes.size()) != num_qubits)
        throw Error("PauliRot word length does not match circuit");
    gates.push_back(std::move(g));
}

void Circuit::append(const Circuit& c) {
    if (c.num_qubits != num_qubits) throw Error("circuit append: qubit count mismatch");
    gates.insert(gates.end(), c.gates.begin(), c.gates.end());
    global_phase += c.global_phase;
    trotter_steps += c.trotter_steps;
}

namespace {

void native_h(Circuit& out, int q) {
    out.gates.push_back(Gate::rz(q, kPi));
    out.gates.push_back(Gate::gpi2(q, kPi / 2));
}

void native_cnot(Circuit& out, int c, int t) {
    native_h(out, c);
    out.gates.push_back(Gate::ms(c, t, 0.0, 0.0, -kPi / 2));
    native_h(out, c);
    native_h(out, t);
    out.gates.push_back(Gate::rz(c, kPi / 2));
    out.gates.push_back(Gate::rz(t, kPi / 2));
    native_h(out, t);
}

void native_pauli_rotation(Circuit& out, const Gate& g) {
    const double a = g.angles.at(0);
    const auto& sup = g.qubits;
    auto letter = [&](int q) { return g.axes[q]; };
    if (sup.empty()) {
        out.global_phase -= a;
        return;
    }
    if (sup.size() == 1) {
        const int q = sup[0];
        switch (letter(q)) {
            case 3: out.gates.push_back(Gate::rz(q, 2 * a)); break;
            case 1:
                out.gates.push_back(Gate::gpi2(q, -kPi / 2));
                out.gates.push_back(Gate::rz(q, 2 * a));
                out.gates.push_back(Gate::gpi2(q, kPi / 2));
                break;
            default:
                out.gates.push_back(Gate::gpi2(q, 0.0));
                out.gates.push_back(Gate::rz(q, 2 * a));
                out.gates.push_back(Gate::gpi2(q, kPi));
                break;
        }
        return;
    }
    if (sup.size() == 2) {
        // map each letter to X, MS(0,0,2a), map back
        for (int q : sup) {
            if (letter(q) == 3) out.gates.push_back(Gate::gpi2(q, kPi / 2));
            if (letter(q) == 2) out.gates.push_back(Gate::rz(q, -kPi / 2));
        }
        out.gates.push_back(Gate::ms(sup[0], sup[1], 0.0, 0.0, 2 * a));
        for (int q : sup) {
            if (letter(q) == 3) out.gates.push_back(Gate::gpi2(q, -kPi / 2));
            if (letter(q) == 2) out.gates.push_back(Gate::rz(q, kPi / 2));
        }
        return;
    }
    // map each letter to Z, parity ladder, RZ, unladder
    for (int q : sup) {
        if (letter(q) == 1) out.gates.push_back(Gate::gpi2(q, -kPi / 2));
        if (letter(q) == 2) out.gates.push_back(Gate::gpi2(q, 0.0));
    }
    for (std::size_t k = 0; k + 1 < sup.size(); ++k) native_cnot(out, sup[k], sup[k + 1]);
    out.gates.push_back(Gate::rz(sup.back(), 2 * a));
    for (std::size_t k = sup.size() - 1; k-- > 0;) native_cnot(out, sup[k], sup[k + 1]);
    for (int q : sup) {
        if (letter(q) == 1) out.gates.push_back(Gate::gpi2(q, kPi / 2));
        if (letter(q) == 2) out.gates.push_back(Gate::gpi2(q, kPi));
    }
}

}  // namespace

Circuit Circuit::native() const {
    Circuit out(num_qubits);
    out.global_phase = global_phase;
    out.trotter_steps = trotter_steps;
    for (const auto& g : gates) {
        switch (g.kind) {
            case GateKind::GPI2:
            case GateKind::RZ:
            case GateKind::MS: out.gates.push_back(g); break;
            case GateKind::H: native_h(out, g.qubits[0]); break;
            case GateKind::X:
                out.gates.push_back(Gate::gpi2(g.qubits[0], 0.0));
                out.gates.push_back(Gate::gpi2(g.qubits[0], 0.0));
                break;
            case GateKind::CNOT: native_cnot(out, g.qubits[0], g.qubits[1]); break;
            case GateKind::PauliRot: native_pauli_rotation(out, g); break;
        }
    }
    return out;
}

int Circuit::one_qubit_count() const {
    const Circuit nat = native();
    return static_cast<int>(std::count_if(nat.gates.begin(), nat.gates.end(),
                                          [](const Gate& g) { return g.qubits.size() == 1; }));
}

int Circuit::two_qubit_count() const {
    const Circuit nat = native();
    return static_cast<int>(std::count_if(nat.gates.begin(), nat.gates.end(),
                                          [](const Gate& g) { return g.qubits.size() == 2; }));
}

int Circuit::two_qubit_depth() const {
    const Circuit nat = native();
    std::vector<int> layer(num_qubits, 0);
    int depth = 0;
    for (const auto& g : nat.gates) {
        if (g.qubits.size() != 2) continue;
        const int l = std::max(layer[g.qubits[0]], layer[g.qubits[1]]) + 1;
        layer[g.qubits[0]] = layer[g.qubits[1]] = l;
        depth = std::max(depth, l);
    }
    return depth;
}

std::string Circuit::dump() const {
    std::string out;
    char buf[64];
    for (const auto& g : gates) {
        out += g.name() + " ";
        for (std::size_t k = 0; k < g.qubits.size(); ++k) out += (k ? "," : "") + std::to_string(g.qubits[k]);
        if (g.kind == GateKind::PauliRot) {
            out += " ";
            for (int q : g.qubits) out += "IXYZ"[g.axes[q]];
        }
        for (double a : g.angles) {
            std::snprintf(buf, sizeof buf, " %.17g", a);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

void apply_local(Eigen::MatrixXcd& block, int n, const std::vector<int>& qubits, const Eigen::MatrixXcd& u) {
    const int k = static_cast<int>(qubits.size());
    const Eigen::Index local = Eigen::Index{1} << k;
    std::vector<std::uint64_t> off(static_cast<std::size_t>(local), 0);
    std::uint64_t tmask = 0;
    for (int i = 0; i < k; ++i) tmask |= qubit_bit(n, qubits[i]);
    for (Eigen::Index l = 0; l < local; ++l)
        for (int i = 0; i < k; ++i)
            if ((l >> (k - 1 - i)) & 1) off[static_cast<std::size_t>(l)] |= qubit_bit(n, qubits[i]);
    const auto dim = static_cast<std::uint64_t>(block.rows());
    Eigen::VectorXcd v(local), w(local);
    for (Eigen::Index col = 0; col < block.cols(); ++col) {
        for (std::uint64_t base = 0; base < dim; ++base) {
            if (base & tmask) continue;
            for (Eigen::Index l = 0; l < local; ++l) v[l] = block(static_cast<Eigen::Index>(base | off[l]), col);
            w.noalias() = u * v;
            for (Eigen::Index l = 0; l < local; ++l) block(static_cast<Eigen::Index>(base | off[l]), col) = w[l];
        }
    }
}

void apply_gate_columns(Eigen::MatrixXcd& block, int n, const Gate& g) {
    if (g.kind != GateKind::PauliRot) {
        apply_local(block, n, g.qubits, gate_matrix(g));
        return;
    }
    const double a = g.angles.at(0);
    const PauliString p(g.axes, 1.0);
    Eigen::VectorXcd col, pcol;
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
        col = block.col(c);
        apply_pauli(p, col, pcol);
        block.col(c) = std::cos(a) * col - kI * std::sin(a) * pcol;
    }
}

void apply_gate(StateVector& s, const Gate& g) {
    check_targets(g, s.num_qubits);
    Eigen::MatrixXcd block = std::move(s.amp);
    apply_gate_columns(block, s.num_qubits, g);
    s.amp = std::move(block);
}

void simulate(const Circuit& c, StateVector& s) {
    if (c.num_qubits != s.num_qubits) throw Error("simulate: qubit count mismatch");
    Eigen::MatrixXcd block = std::move(s.amp);
    for (const auto& g : c.gates) apply_gate_columns(block, c.num_qubits, g);
    if (c.global_phase != 0.0) block *= std::exp(kI * c.global_phase);
    s.amp = std::move(block);
}

Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
    check_oracle_limit(c.num_qubits);
    const Eigen::Index dim = Eigen::Index{1} << c.num_qubits;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& g : c.gates) apply_gate_columns(u, c.num_qubits, g);
    return u * std::exp(kI * c.global_phase);
}

std::vector<std::pair<Word, double>> trotter_order(const QubitHamiltonian& h) {
    std::vector<std::pair<Word, double>> offdiag, diag;
    for (const auto& [w, c] : h.terms()) {
        PauliString p(w);
        if (p.weight() == 0) continue;
        (p.is_diagonal() ? diag : offdiag).emplace_back(w, c);
    }
    std::vector<std::pair<Word, double>> seq = offdiag;
    seq.insert(seq.end(), diag.begin(), diag.end());

    // Within runs of mutually commuting terms, pack disjoint supports into layers.
    std::vector<std::pair<Word, double>> out;
    std::size_t i = 0;
    while (i < seq.size()) {
        std::size_t j = i + 1;
        while (j < seq.size()) {
            bool ok = true;
            for (std::size_t k = i; k < j && ok; ++k) ok = commutes(seq[k].first, seq[j].first);
            if (!ok) break;
            ++j;
        }
        std::vector<std::pair<Word, double>> rest(seq.begin() + static_cast<long>(i), seq.begin() + static_cast<long>(j));
        while (!rest.empty()) {
            std::vector<bool> used(h.num_qubits(), false);
            std::vector<std::pair<Word, double>> keep;
            for (auto& t : rest) {
                bool free = true;
                for (int q = 0; q < h.num_qubits(); ++q) free = free && !(t.first[q] && used[q]);
                if (free) {
                    for (int q = 0; q < h.num_qubits(); ++q)
                        if (t.first[q]) used[q] = true;
                    out.push_back(t);
                } else {
                    keep.push_back(t);
                }
            }
            rest.swap(keep);
        }
        i = j;
    }
    return out;
}

Circuit trotter_step(const QubitHamiltonian& h, double dt) {
    Circuit c(h.num_qubits());
    c.global_phase = -h.coefficient(Word(h.num_qubits(), 0)) * dt;
    for (const auto& [w, coeff] : trotter_order(h)) c.add(Gate::pauli_rotation(w, coeff * dt));
    c.trotter_steps = 1;
    return c;
}

Circuit time_evolution_circuit(const QubitHamiltonian& h, double t, int n_steps) {
    if (n_steps < 1) throw Error("time_evolution_circuit: n_steps must be >= 1");
    Circuit c(h.num_qubits());
    if (t == 0.0) {
        c.trotter_steps = n_steps;
        return c;
    }
    const Circuit step = trotter_step(h, t / n_steps);
    for (int m = 0; m < n_steps; ++m) c.append(step);
    return c;
}

QubitHamiltonian interpolate(const QubitHamiltonian& h0, const QubitHamiltonian& h, double s) {
    if (h0.num_qubits() != h.num_qubits()) throw Error("interpolate: qubit count mismatch");
    return h0.scaled(1.0 - s) + h.scaled(s);
}

Circuit adiabatic_circuit(const QubitHamiltonian& h0, const QubitHamiltonian& h, double tau, int n_steps) {
    if (n_steps < 1 || !(tau > 0.0)) throw Error("adiabatic_circuit: need n_steps >= 1 and tau > 0");
    Circuit c(h.num_qubits());
    for (int m = 1; m <= n_steps; ++m) {
        const double s = (m - 0.5) / n_steps;
        c.append(trotter_step(interpolate(h0, h, s), tau / n_steps));
    }
    return c;
}

Eigen::MatrixXcd exact_unitary(const QubitHamiltonian& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_dense(h));
    const Eigen::VectorXcd ph = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

StateVector exact_evolve(const StateVector& s, const QubitHamiltonian& h, double t) {
    if (s.num_qubits != h.num_qubits()) throw Error("exact_evolve: qubit count mismatch");
    check_oracle_limit(s.num_qubits);
    if (t == 0.0) return s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_dense(h));
    const Eigen::VectorXcd ph = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp();
    Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * s.amp;
    return StateVector(s.num_qubits, es.eigenvectors() * ph.cwiseProduct(coeffs));
}

void check_measurable(const PauliString& o) {
    if (!o.is_hermitian() || std::abs(std::abs(o.coeff.real()) - 1.0) > 1e-12)
        throw Error("observable must be a Pauli string with coefficient +1 or -1");
}

Circuit basis_change_circuit(const PauliString& o) {
    check_measurable(o);
    Circuit c(o.num_qubits());
    for (int q = 0; q < o.num_qubits(); ++q) {
        if (o.axes[q] == 1) c.add(Gate::h(q));
        if (o.axes[q] == 2) {
            c.add(Gate::rz(q, -kPi / 2));
            c.add(Gate::h(q));
        }
    }
    return c;
}

ExpectationSample make_sample(int plus, int shots) {
    ExpectationSample s;
    s.shots = shots;
    s.plus = plus;
    s.minus = shots - plus;
    s.mean = static_cast<double>(plus - s.minus) / shots;
    s.std_error = std::sqrt(std::max(0.0, 1.0 - s.mean * s.mean) / shots);
    return s;
}

ExpectationSample sample_expectation(const StateVector& s, const PauliString& o, int shots, std::uint64_t seed) {
    check_measurable(o);
    if (shots < 1) throw Error("sample_expectation: shots must be >= 1");
    const double e = std::clamp(expectation(o, s), -1.0, 1.0);
    const double p_plus = 0.5 * (1.0 + e);
    Rng rng(seed);
    int plus = 0;
    for (int k = 0; k < shots; ++k) plus += rng.uniform() < p_plus;
    return make_sample(plus, shots);
}

}  // namespace sgs
