#include "sgslab/pauli.hpp"
#include "sgslab/state.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace sgs {

int oracle_qubit_limit() {
    if (const char* env = std::getenv("SGSLAB_ORACLE_LIMIT")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 30) return static_cast<int>(v);
    }
    return 12;
}

void check_oracle_limit(int n) {
    if (n > oracle_qubit_limit())
        throw Error("dense oracle limit exceeded: " + std::to_string(n) + " qubits > " +
                    std::to_string(oracle_qubit_limit()));
}

Word parse_word(std::string_view s) {
    if (s.empty()) throw Error("empty Pauli word");
    Word w;
    w.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case 'I': w.push_back(0); break;
            case 'X': w.push_back(1); break;
            case 'Y': w.push_back(2); break;
            case 'Z': w.push_back(3); break;
            default: throw Error(std::string("bad Pauli letter '") + ch + "'");
        }
    }
    return w;
}

std::string word_string(const Word& w) {
    static const char kLetters[] = "IXYZ";
    std::string s;
    s.reserve(w.size());
    for (auto a : w) s.push_back(kLetters[a]);
    return s;
}

PauliMasks masks_of(const Word& w) {
    PauliMasks m;
    const int n = static_cast<int>(w.size());
    for (int q = 0; q < n; ++q) {
        const auto bit = qubit_bit(n, q);
        if (w[q] == 1 || w[q] == 2) m.flip |= bit;
        if (w[q] == 2 || w[q] == 3) m.sign |= bit;
        if (w[q] == 2) ++m.ny;
    }
    return m;
}

namespace {

bool parse_real(std::string_view s, double& out) {
    if (s.empty()) return false;
    std::string tmp(s);
    char* end = nullptr;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size();
}

cplx parse_coefficient(std::string_view s) {
    double re = 0.0;
    if (parse_real(s, re)) return {re, 0.0};
    if (s == "i" || s == "+i") return {0.0, 1.0};
    if (s == "-i") return {0.0, -1.0};
    if (s.size() > 1 && s.back() == 'i') {
        double im = 0.0;
        if (parse_real(s.substr(0, s.size() - 1), im)) return {0.0, im};
    }
    if (s.size() > 4 && s.front() == '(' && s.back() == ')') {
        auto inner = s.substr(1, s.size() - 2);
        auto comma = inner.find(',');
        double im = 0.0;
        if (comma != std::string_view::npos && parse_real(inner.substr(0, comma), re) &&
            parse_real(inner.substr(comma + 1), im))
            return {re, im};
    }
    throw Error("bad coefficient '" + std::string(s) + "'");
}

}  // namespace

PauliString PauliString::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<std::string> tok;
    for (std::string t; in >> t;) tok.push_back(t);
    if (tok.size() == 1) {
        std::string_view w = tok[0];
        cplx c = 1.0;
        if (!w.empty() && (w[0] == '-' || w[0] == '+')) {
            if (w[0] == '-') c = -1.0;
            w.remove_prefix(1);
        }
        return {parse_word(w), c};
    }
    if (tok.size() == 2) return {parse_word(tok[1]), parse_coefficient(tok[0])};
    throw Error("cannot parse Pauli string '" + std::string(text) + "'");
}

bool PauliString::is_diagonal() const {
    for (auto a : axes)
        if (a == 1 || a == 2) return false;
    return true;
}

int PauliString::weight() const {
    int k = 0;
    for (auto a : axes) k += a != 0;
    return k;
}

std::vector<int> PauliString::support() const {
    std::vector<int> s;
    for (int q = 0; q < num_qubits(); ++q)
        if (axes[q]) s.push_back(q);
    return s;
}

PauliString multiply(const PauliString& a, const PauliString& b) {
    if (a.num_qubits() != b.num_qubits()) throw Error("qubit count mismatch in multiply");
    PauliString r;
    r.axes.resize(a.axes.size());
    cplx phase = a.coeff * b.coeff;
    const cplx i{0.0, 1.0};
    for (std::size_t q = 0; q < a.axes.size(); ++q) {
        const int x = a.axes[q], y = b.axes[q];
        r.axes[q] = static_cast<std::uint8_t>(x ^ y);
        if (x && y && x != y) phase *= ((y - x + 3) % 3 == 1) ? i : -i;
    }
    r.coeff = phase;
    return r;
}

bool commutes(const Word& a, const Word& b) {
    int anti = 0;
    for (std::size_t q = 0; q < a.size(); ++q) anti += a[q] && b[q] && a[q] != b[q];
    return anti % 2 == 0;
}

void QubitHamiltonian::add(const Word& w, double c) {
    if (n_ == 0) n_ = static_cast<int>(w.size());
    if (static_cast<int>(w.size()) != n_) throw Error("qubit count mismatch in add_term");
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        if (std::abs(c) > kPruneTol) terms_.emplace(w, c);
        return;
    }
    it->second += c;
    if (std::abs(it->second) <= kPruneTol) terms_.erase(it);
}

double QubitHamiltonian::coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? 0.0 : it->second;
}

double QubitHamiltonian::one_norm() const {
    double s = 0.0;
    for (const auto& [w, c] : terms_) {
        bool identity = true;
        for (auto a : w) identity = identity && a == 0;
        if (!identity) s += std::abs(c);
    }
    return s;
}

QubitHamiltonian QubitHamiltonian::scaled(double s) const {
    QubitHamiltonian r(n_);
    for (const auto& [w, c] : terms_) r.add(w, s * c);
    return r;
}

QubitHamiltonian operator+(const QubitHamiltonian& a, const QubitHamiltonian& b) {
    if (a.n_ && b.n_ && a.n_ != b.n_) throw Error("qubit count mismatch in Hamiltonian sum");
    QubitHamiltonian r = a;
    if (r.n_ == 0) r.n_ = b.n_;
    for (const auto& [w, c] : b.terms_) r.add(w, c);
    return r;
}

QubitHamiltonian add_term(QubitHamiltonian h, const PauliString& p) {
    if (!p.is_hermitian(0.0)) throw Error("add_term: non-real coefficient");
    h.add(p.axes, p.coeff.real());
    return h;
}

QubitHamiltonian diagonal_part(const QubitHamiltonian& h) {
    QubitHamiltonian r(h.num_qubits());
    for (const auto& [w, c] : h.terms())
        if (PauliString(w).is_diagonal()) r.add(w, c);
    return r;
}

bool is_diagonal(const QubitHamiltonian& h) {
    for (const auto& [w, c] : h.terms())
        if (!PauliString(w).is_diagonal()) return false;
    return true;
}

std::vector<double> diagonal_energies(const QubitHamiltonian& h) {
    const int n = h.num_qubits();
    if (n > 30) throw Error("diagonal_energies: too many qubits");
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<double> e(dim, 0.0);
    for (const auto& [w, c] : h.terms()) {
        PauliString p(w);
        if (!p.is_diagonal()) continue;
        const auto m = p.masks();
        for (std::uint64_t b = 0; b < dim; ++b) e[b] += (std::popcount(b & m.sign) & 1) ? -c : c;
    }
    return e;
}

namespace {

cplx ipow(int k) {
    static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[k & 3];
}

void accumulate_dense(Eigen::MatrixXcd& m, const Word& w, cplx c) {
    const auto mk = masks_of(w);
    const cplx base = c * ipow(mk.ny);
    const auto dim = static_cast<std::uint64_t>(m.rows());
    for (std::uint64_t b = 0; b < dim; ++b)
        m(static_cast<Eigen::Index>(b ^ mk.flip), static_cast<Eigen::Index>(b)) +=
            (std::popcount(b & mk.sign) & 1) ? -base : base;
}

}  // namespace

Eigen::MatrixXcd to_dense(const QubitHamiltonian& h) {
    const int n = h.num_qubits();
    check_oracle_limit(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [w, c] : h.terms()) accumulate_dense(m, w, c);
    return m;
}

Eigen::MatrixXcd to_dense(const PauliString& p) {
    const int n = p.num_qubits();
    check_oracle_limit(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    accumulate_dense(m, p.axes, p.coeff);
    return m;
}

void apply_pauli(const PauliString& p, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    const auto mk = p.masks();
    const cplx base = p.coeff * ipow(mk.ny);
    const auto dim = static_cast<std::uint64_t>(in.size());
    out.resize(in.size());
    for (std::uint64_t b = 0; b < dim; ++b)
        out[static_cast<Eigen::Index>(b ^ mk.flip)] =
            ((std::popcount(b & mk.sign) & 1) ? -base : base) * in[static_cast<Eigen::Index>(b)];
}

cplx matrix_element(const PauliString& p, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    const auto mk = p.masks();
    const auto dim = static_cast<std::uint64_t>(v.size());
    cplx acc = 0.0;
    for (std::uint64_t b = 0; b < dim; ++b) {
        const cplx t = std::conj(u[static_cast<Eigen::Index>(b ^ mk.flip)]) * v[static_cast<Eigen::Index>(b)];
        acc += (std::popcount(b & mk.sign) & 1) ? -t : t;
    }
    return acc * p.coeff * ipow(mk.ny);
}

StateVector::StateVector(int n) : num_qubits(n), amp(Eigen::VectorXcd::Zero(Eigen::Index{1} << n)) {
    amp[0] = 1.0;
}

StateVector::StateVector(int n, Eigen::VectorXcd a) : num_qubits(n), amp(std::move(a)) {
    if (amp.size() != (Eigen::Index{1} << n)) throw Error("state dimension does not match qubit count");
}

StateVector StateVector::basis(int n, std::uint64_t index) {
    StateVector s(n);
    s.amp[0] = 0.0;
    s.amp[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

double expectation(const PauliString& p, const StateVector& v) {
    if (!p.is_hermitian()) throw Error("expectation: non-Hermitian Pauli string");
    if (p.num_qubits() != v.num_qubits) throw Error("expectation: qubit count mismatch");
    return matrix_element(p, v.amp, v.amp).real();
}

}  // namespace sgs
