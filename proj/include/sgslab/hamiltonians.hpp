#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sgslab/pauli.hpp"

namespace sgs {

struct IsingSpec {
    enum class Geometry { Chain, Lattice };
    Geometry geometry = Geometry::Chain;
    int rows = 1;  // chain: rows = 1, cols = L
    int cols = 4;
    double J1 = 1.0;
    double h3 = 0.0;

    static IsingSpec chain(int L, double J1, double h3);
    static IsingSpec lattice(int rows, int cols, double J1, double h3);

    int num_sites() const { return rows * cols; }
    void validate() const;
    std::string describe() const;
};

// Distinct undirected PBC nearest-neighbour pairs (i < j), sorted.
std::vector<std::pair<int, int>> ising_edges(const IsingSpec& spec);

// H = -(J1/2) sum XX - (h3/2) sum Z
QubitHamiltonian build_ising(const IsingSpec& spec);
// H0 = -(J1/2) sum XX
QubitHamiltonian ising_auxiliary(const IsingSpec& spec);

struct FermionHamiltonian {
    int num_orbitals = 0;
    std::map<std::array<int, 2>, double> one_body;
    std::map<std::array<int, 4>, double> two_body;

    void validate() const;
};

// Pauli sum with complex coefficients, used while expanding fermionic products.
using PauliSum = std::map<Word, cplx>;

PauliSum jw_annihilation(int p, int n);
PauliSum jw_creation(int p, int n);
PauliSum multiply(const PauliSum& a, const PauliSum& b);
Eigen::MatrixXcd to_dense(const PauliSum& s, int n);

// c_p = Z_0..Z_{p-1} (X_p + i Y_p)/2; H = sum h_pq c+_p c_q + 1/2 sum h_pqrs c+_p c+_q c_r c_s
QubitHamiltonian jordan_wigner(const FermionHamiltonian& f);

QubitHamiltonian parse_qubit_hamiltonian(const std::string& text);
QubitHamiltonian load_qubit_hamiltonian(const std::filesystem::path& path);
std::string format_qubit_hamiltonian(const QubitHamiltonian& h);
void write_qubit_hamiltonian(const std::filesystem::path& path, const QubitHamiltonian& h);

// num_orbitals = 0 infers max index + 1.
FermionHamiltonian parse_fermion_hamiltonian(const std::string& text, int num_orbitals = 0);
FermionHamiltonian load_fermion_hamiltonian(const std::filesystem::path& path, int num_orbitals = 0);
std::string format_fermion_hamiltonian(const FermionHamiltonian& f);

// Loads either format: *.fermion goes through jordan_wigner, everything else is a qubit file.
QubitHamiltonian load_any_hamiltonian(const std::filesystem::path& path);

std::string format_real(double v);  // 17 significant digits
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sgs
