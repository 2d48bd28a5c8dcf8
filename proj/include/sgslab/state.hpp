#pragma once

#include "sgslab/pauli.hpp"

namespace sgs {

struct StateVector {
    int num_qubits = 0;
    Eigen::VectorXcd amp;

    StateVector() = default;
    explicit StateVector(int n);  // |0...0>
    StateVector(int n, Eigen::VectorXcd a);

    static StateVector basis(int n, std::uint64_t index);
    std::size_t dim() const { return static_cast<std::size_t>(amp.size()); }
    double norm() const { return amp.norm(); }
};

double expectation(const PauliString& p, const StateVector& v);

}  // namespace sgs
