#pragma once

#include <random>

#include "sgslab/pauli.hpp"

namespace testutil {

inline sgs::Word random_word(std::mt19937_64& g, int n) {
    sgs::Word w(n);
    for (auto& a : w) a = static_cast<std::uint8_t>(g() % 4);
    return w;
}

inline sgs::QubitHamiltonian random_hamiltonian(std::mt19937_64& g, int n, int terms) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    sgs::QubitHamiltonian h(n);
    for (int k = 0; k < terms; ++k) h.add(random_word(g, n), u(g));
    return h;
}

// max |a - e^{i phi} b| after removing the best global phase
inline double phase_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const std::complex<double> ov = (b.adjoint() * a).trace();
    const std::complex<double> ph = std::abs(ov) > 0 ? ov / std::abs(ov) : 1.0;
    return (a - ph * b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
