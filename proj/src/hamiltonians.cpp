#include "sgslab/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace sgs {

IsingSpec IsingSpec::chain(int L, double J1, double h3) {
    IsingSpec s;
    s.geometry = Geometry::Chain;
    s.rows = 1;
    s.cols = L;
    s.J1 = J1;
    s.h3 = h3;
    return s;
}

IsingSpec IsingSpec::lattice(int rows, int cols, double J1, double h3) {
    IsingSpec s;
    s.geometry = Geometry::Lattice;
    s.rows = rows;
    s.cols = cols;
    s.J1 = J1;
    s.h3 = h3;
    return s;
}

void IsingSpec::validate() const {
    if (geometry == Geometry::Chain && (rows != 1 || cols < 2)) throw Error("Ising chain needs L >= 2");
    if (geometry == Geometry::Lattice && (rows < 1 || cols < 1 || rows * cols < 2))
        throw Error("Ising lattice needs rows*cols >= 2");
    if (!(J1 >= 0.0) || !(h3 >= 0.0)) throw Error("Ising couplings must satisfy J1 >= 0, h3 >= 0");
}

std::string IsingSpec::describe() const {
    if (geometry == Geometry::Chain) return "chain " + std::to_string(cols);
    return "lattice " + std::to_string(rows) + "x" + std::to_string(cols);
}

std::vector<std::pair<int, int>> ising_edges(const IsingSpec& spec) {
    spec.validate();
    std::set<std::pair<int, int>> e;
    auto add = [&](int a, int b) {
        if (a != b) e.emplace(std::min(a, b), std::max(a, b));
    };
    const int R = spec.rows, C = spec.cols;
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            const int i = r * C + c;
            add(i, r * C + (c + 1) % C);
            if (spec.geometry == IsingSpec::Geometry::Lattice) add(i, ((r + 1) % R) * C + c);
        }
    return {e.begin(), e.end()};
}

QubitHamiltonian build_ising(const IsingSpec& spec) {
    const int n = spec.num_sites();
    QubitHamiltonian h(n);
    for (auto [i, j] : ising_edges(spec)) {
        Word w(n, 0);
        w[i] = w[j] = 1;
        h.add(w, -spec.J1 / 2.0);
    }
    for (int i = 0; i < n; ++i) {
        Word w(n, 0);
        w[i] = 3;
        h.add(w, -spec.h3 / 2.0);
    }
    return h;
}

QubitHamiltonian ising_auxiliary(const IsingSpec& spec) {
    IsingSpec s = spec;
    s.h3 = 0.0;
    return build_ising(s);
}

void FermionHamiltonian::validate() const {
    if (num_orbitals <= 0) throw Error("fermion Hamiltonian: num_orbitals must be positive");
    auto in_range = [&](int p) { return p >= 0 && p < num_orbitals; };
    for (const auto& [k, v] : one_body) {
        if (!in_range(k[0]) || !in_range(k[1])) throw Error("fermion Hamiltonian: one-body index out of range");
        auto it = one_body.find({k[1], k[0]});
        const double other = it == one_body.end() ? 0.0 : it->second;
        if (std::abs(other - v) > 1e-12) throw Error("fermion Hamiltonian: one-body matrix not symmetric");
    }
    for (const auto& [k, v] : two_body)
        for (int p : k)
            if (!in_range(p)) throw Error("fermion Hamiltonian: two-body index out of range");
}

PauliSum jw_annihilation(int p, int n) {
    Word w(n, 0);
    for (int j = 0; j < p; ++j) w[j] = 3;
    PauliSum s;
    w[p] = 1;
    s[w] = 0.5;
    w[p] = 2;
    s[w] = cplx(0.0, 0.5);
    return s;
}

PauliSum jw_creation(int p, int n) {
    PauliSum s = jw_annihilation(p, n);
    for (auto& [w, c] : s) c = std::conj(c);
    return s;
}

PauliSum multiply(const PauliSum& a, const PauliSum& b) {
    PauliSum r;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) {
            auto p = multiply(PauliString(wa, ca), PauliString(wb, cb));
            r[p.axes] += p.coeff;
        }
    for (auto it = r.begin(); it != r.end();)
        it = std::abs(it->second) <= kPruneTol ? r.erase(it) : std::next(it);
    return r;
}

Eigen::MatrixXcd to_dense(const PauliSum& s, int n) {
    check_oracle_limit(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [w, c] : s) m += to_dense(PauliString(w, c));
    return m;
}

QubitHamiltonian jordan_wigner(const FermionHamiltonian& f) {
    f.validate();
    const int n = f.num_orbitals;
    std::vector<PauliSum> cre(n), ann(n);
    for (int p = 0; p < n; ++p) {
        cre[p] = jw_creation(p, n);
        ann[p] = jw_annihilation(p, n);
    }
    PauliSum acc;
    auto accumulate = [&](const PauliSum& s, double scale) {
        for (const auto& [w, c] : s) acc[w] += scale * c;
    };
    for (const auto& [k, v] : f.one_body) accumulate(multiply(cre[k[0]], ann[k[1]]), v);
    for (const auto& [k, v] : f.two_body) {
        auto s = multiply(multiply(cre[k[0]], cre[k[1]]), multiply(ann[k[2]], ann[k[3]]));
        accumulate(s, 0.5 * v);
    }
    QubitHamiltonian h(n);
    for (const auto& [w, c] : acc) {
        if (std::abs(c.imag()) > 1e-9)
            throw Error("jordan_wigner: non-Hermitian input (imaginary coefficient on " + word_string(w) + ")");
        h.add(w, c.real());
    }
    return h;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tok;
    for (std::string t; in >> t;) tok.push_back(t);
    return tok;
}

double parse_decimal(const std::string& s, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v))
        throw Error("line " + std::to_string(line_no) + ": bad real '" + s + "'");
    return v;
}

int parse_index(const std::string& s, int line_no) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) throw Error("line " + std::to_string(line_no) + ": bad index '" + s + "'");
    if (v < 0) throw Error("line " + std::to_string(line_no) + ": index out of range");
    return static_cast<int>(v);
}

template <class F>
void for_data_lines(const std::string& text, F&& f) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        f(line, line_no);
    }
}

}  // namespace

QubitHamiltonian parse_qubit_hamiltonian(const std::string& text) {
    QubitHamiltonian h;
    int n = 0;
    for_data_lines(text, [&](const std::string& line, int line_no) {
        auto tok = split_ws(line);
        if (tok.size() != 2) throw Error("line " + std::to_string(line_no) + ": expected '<coefficient> <word>'");
        PauliString p;
        try {
            p = PauliString::parse(line);
        } catch (const Error& e) {
            throw Error("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!p.is_hermitian(0.0)) throw Error("line " + std::to_string(line_no) + ": non-real coefficient");
        if (n == 0) n = p.num_qubits();
        if (p.num_qubits() != n) throw Error("line " + std::to_string(line_no) + ": inconsistent word length");
        if (h.num_qubits() == 0) h = QubitHamiltonian(n);
        h.add(p.axes, p.coeff.real());
    });
    if (h.empty()) throw Error("qubit Hamiltonian has no terms");
    return h;
}

QubitHamiltonian load_qubit_hamiltonian(const std::filesystem::path& path) {
    try {
        return parse_qubit_hamiltonian(read_text_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string format_qubit_hamiltonian(const QubitHamiltonian& h) {
    std::string out;
    for (const auto& [w, c] : h.terms()) out += format_real(c) + " " + word_string(w) + "\n";
    return out;
}

void write_qubit_hamiltonian(const std::filesystem::path& path, const QubitHamiltonian& h) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << format_qubit_hamiltonian(h);
}

FermionHamiltonian parse_fermion_hamiltonian(const std::string& text, int num_orbitals) {
    FermionHamiltonian f;
    int max_index = -1;
    for_data_lines(text, [&](const std::string& line, int line_no) {
        auto tok = split_ws(line);
        auto check = [&](int p) {
            if (num_orbitals > 0 && p >= num_orbitals)
                throw Error("line " + std::to_string(line_no) + ": index out of range");
            max_index = std::max(max_index, p);
            return p;
        };
        if (tok.size() == 4 && tok[0] == "1B") {
            std::array<int, 2> k{check(parse_index(tok[1], line_no)), check(parse_index(tok[2], line_no))};
            f.one_body[k] += parse_decimal(tok[3], line_no);
        } else if (tok.size() == 6 && tok[0] == "2B") {
            std::array<int, 4> k{};
            for (int i = 0; i < 4; ++i) k[i] = check(parse_index(tok[1 + i], line_no));
            f.two_body[k] += parse_decimal(tok[5], line_no);
        } else {
            throw Error("line " + std::to_string(line_no) + ": expected '1B p q v' or '2B p q r s v'");
        }
    });
    if (f.one_body.empty() && f.two_body.empty()) throw Error("fermion Hamiltonian has no terms");
    f.num_orbitals = num_orbitals > 0 ? num_orbitals : max_index + 1;
    f.validate();
    return f;
}

FermionHamiltonian load_fermion_hamiltonian(const std::filesystem::path& path, int num_orbitals) {
    try {
        return parse_fermion_hamiltonian(read_text_file(path), num_orbitals);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string format_fermion_hamiltonian(const FermionHamiltonian& f) {
    std::string out;
    for (const auto& [k, v] : f.one_body)
        out += "1B " + std::to_string(k[0]) + " " + std::to_string(k[1]) + " " + format_real(v) + "\n";
    for (const auto& [k, v] : f.two_body) {
        out += "2B";
        for (int p : k) out += " " + std::to_string(p);
        out += " " + format_real(v) + "\n";
    }
    return out;
}

QubitHamiltonian load_any_hamiltonian(const std::filesystem::path& path) {
    if (path.extension() == ".fermion") return jordan_wigner(load_fermion_hamiltonian(path));
    return load_qubit_hamiltonian(path);
}

}  // namespace sgs
