#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace sgs {

using cplx = std::complex<double>;
using Word = std::vector<std::uint8_t>;  // 0=I 1=X 2=Y 3=Z, qubit 0 first

constexpr double kPruneTol = 1e-12;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Qubit count ceiling for dense oracles; SGSLAB_ORACLE_LIMIT overrides 12.
int oracle_qubit_limit();
void check_oracle_limit(int n);

Word parse_word(std::string_view s);
std::string word_string(const Word& w);

// Bit of qubit q in an n-qubit basis index (qubit 0 is the MSB).
inline std::uint64_t qubit_bit(int n, int q) { return std::uint64_t{1} << (n - 1 - q); }

struct PauliMasks {
    std::uint64_t flip = 0;  // X or Y
    std::uint64_t sign = 0;  // Y or Z
    int ny = 0;
};
PauliMasks masks_of(const Word& w);

struct PauliString {
    Word axes;
    cplx coeff{1.0, 0.0};

    PauliString() = default;
    PauliString(Word a, cplx c = 1.0) : axes(std::move(a)), coeff(c) {}

    // "XZ", "-YY", "-0.5 XXII", "i XY", "(0.5,-1) ZZ"
    static PauliString parse(std::string_view text);

    int num_qubits() const { return static_cast<int>(axes.size()); }
    std::string word() const { return word_string(axes); }
    bool is_hermitian(double tol = 1e-12) const { return std::abs(coeff.imag()) <= tol; }
    bool is_diagonal() const;
    int weight() const;
    std::vector<int> support() const;
    PauliMasks masks() const { return masks_of(axes); }
};

PauliString multiply(const PauliString& a, const PauliString& b);
bool commutes(const Word& a, const Word& b);

class QubitHamiltonian {
public:
    QubitHamiltonian() = default;
    explicit QubitHamiltonian(int n) : n_(n) {}

    int num_qubits() const { return n_; }
    const std::map<Word, double>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add(const Word& w, double c);
    double coefficient(const Word& w) const;
    // Sum of |coeff| over non-identity terms.
    double one_norm() const;

    QubitHamiltonian scaled(double s) const;
    friend QubitHamiltonian operator+(const QubitHamiltonian& a, const QubitHamiltonian& b);
    bool operator==(const QubitHamiltonian& o) const { return n_ == o.n_ && terms_ == o.terms_; }

private:
    int n_ = 0;
    std::map<Word, double> terms_;
};

QubitHamiltonian add_term(QubitHamiltonian h, const PauliString& p);
QubitHamiltonian diagonal_part(const QubitHamiltonian& h);
bool is_diagonal(const QubitHamiltonian& h);
// Diagonal of the matrix, one entry per basis index.
std::vector<double> diagonal_energies(const QubitHamiltonian& h);

Eigen::MatrixXcd to_dense(const QubitHamiltonian& h);
Eigen::MatrixXcd to_dense(const PauliString& p);

// out = P in (coefficient included), vectors of length 2^n.
void apply_pauli(const PauliString& p, const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
// <u|P|v>
cplx matrix_element(const PauliString& p, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v);

}  // namespace sgs
