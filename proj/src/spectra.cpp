#include "sgslab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgslab/hamiltonians.hpp"

namespace sgs {

double wrap_angle(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

bool SpectrumResult::degenerate(int k) const {
    const double tol = 1e-10 * std::max(norm, 1e-300);
    if (k > 0 && std::abs(eigenvalues[k] - eigenvalues[k - 1]) < tol) return true;
    if (k + 1 < size() && std::abs(eigenvalues[k + 1] - eigenvalues[k]) < tol) return true;
    return false;
}

SpectrumResult exact_spectrum(const QubitHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_dense(h));
    if (es.info() != Eigen::Success) throw Error("exact_spectrum: eigensolver failed");
    SpectrumResult r;
    r.eigenvalues = es.eigenvalues();
    r.eigenvectors = es.eigenvectors();
    r.norm = r.eigenvalues.cwiseAbs().maxCoeff();
    return r;
}

namespace {

void check_levels(const SpectrumResult& s, int i, int j) {
    if (i < 0 || j < 0 || i >= s.size() || j >= s.size()) throw Error("level index out of range");
}

}  // namespace

GapResult benchmark_gap(const SpectrumResult& s, int i, int j) {
    check_levels(s, i, j);
    if (!(j > i)) throw Error("benchmark_gap: need j > i");
    return {s.eigenvalues[j] - s.eigenvalues[i], s.degenerate(i) || s.degenerate(j)};
}

GapResult benchmark_gap(const QubitHamiltonian& h, int i, int j) { return benchmark_gap(exact_spectrum(h), i, j); }

Coherence coherence(const SpectrumResult& s, const PauliString& o, int i, int j) {
    check_levels(s, i, j);
    const cplx z = matrix_element(o, s.eigenvectors.col(j), s.eigenvectors.col(i));
    Coherence c;
    c.rho = std::abs(z);
    c.theta = c.rho > 0.0 ? wrap_angle(std::arg(z)) : 0.0;
    c.degenerate = s.degenerate(i) || s.degenerate(j);
    return c;
}

Coherence coherence(const QubitHamiltonian& h, const PauliString& o, int i, int j) {
    return coherence(exact_spectrum(h), o, i, j);
}

SearchResult observable_search(const SpectrumResult& s, int n, int i, int j, SearchFamily family) {
    check_levels(s, i, j);
    SearchResult out;
    if (s.degenerate(i) || s.degenerate(j)) {
        out.degenerate = true;
        return out;
    }
    std::vector<Word> words;
    if (family == SearchFamily::Exhaustive) {
        if (n > kExhaustiveQubitLimit) throw Error("observable_search: exhaustive family limited to 7 qubits");
        const std::uint64_t count = std::uint64_t{1} << (2 * n);
        words.reserve(count);
        for (std::uint64_t k = 0; k < count; ++k) {
            Word w(n);
            for (int q = 0; q < n; ++q) w[q] = static_cast<std::uint8_t>((k >> (2 * (n - 1 - q))) & 3);
            words.push_back(std::move(w));
        }
    } else {
        for (std::uint8_t a = 0; a < 4; ++a)
            for (std::uint8_t b = 0; b < 4; ++b) {
                if (a == b) continue;
                for (int site = 0; site < n; ++site) {
                    Word w(n, b);
                    w[site] = a;
                    words.push_back(std::move(w));
                }
            }
    }
    const Eigen::VectorXcd vi = s.eigenvectors.col(i), vj = s.eigenvectors.col(j);
    out.ranking.reserve(words.size());
    for (const auto& w : words) {
        const cplx z = matrix_element(PauliString(w), vj, vi);
        const double rho = std::abs(z);
        out.ranking.push_back({word_string(w), rho, rho > 0.0 ? wrap_angle(std::arg(z)) : 0.0});
    }
    auto key = [](double rho) { return std::llround(rho * 1e9); };
    std::stable_sort(out.ranking.begin(), out.ranking.end(), [&](const SearchEntry& a, const SearchEntry& b) {
        const auto ka = key(a.rho), kb = key(b.rho);
        if (ka != kb) return ka > kb;
        return a.word < b.word;
    });
    return out;
}

SearchResult observable_search(const QubitHamiltonian& h, int i, int j, SearchFamily family) {
    return observable_search(exact_spectrum(h), h.num_qubits(), i, j, family);
}

std::vector<std::string> top_tied(const SearchResult& r) {
    std::vector<std::string> out;
    if (r.ranking.empty()) return out;
    const auto top = std::llround(r.ranking.front().rho * 1e9);
    for (const auto& e : r.ranking) {
        if (std::llround(e.rho * 1e9) != top) break;
        out.push_back(e.word);
    }
    return out;
}

std::string format_search_csv(const SearchResult& r) {
    std::string out = "pauli_word,rho,theta\n";
    for (const auto& e : r.ranking) out += e.word + "," + format_real(e.rho) + "," + format_real(e.theta) + "\n";
    return out;
}

double sgs_closed_form(const SpectrumResult& s, const PauliString& o, int i, int j, double t) {
    check_levels(s, i, j);
    const double oii = matrix_element(o, s.eigenvectors.col(i), s.eigenvectors.col(i)).real();
    const double ojj = matrix_element(o, s.eigenvectors.col(j), s.eigenvectors.col(j)).real();
    const Coherence c = coherence(s, o, i, j);
    const double de = s.eigenvalues[j] - s.eigenvalues[i];
    return 0.5 * (oii + ojj) + c.rho * std::cos(de * t + c.theta);
}

double sgs_closed_form(const QubitHamiltonian& h, const PauliString& o, int i, int j, double t) {
    return sgs_closed_form(exact_spectrum(h), o, i, j, t);
}

}  // namespace sgs
