#pragma once

#include <string>
#include <vector>

#include "sgslab/pauli.hpp"

namespace sgs {

struct SpectrumResult {
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXcd eigenvectors;  // columns
    double norm = 0.0;              // max |E|

    int size() const { return static_cast<int>(eigenvalues.size()); }
    // Level k shares its energy with a neighbour within 1e-10 * norm.
    bool degenerate(int k) const;
};

SpectrumResult exact_spectrum(const QubitHamiltonian& h);

struct GapResult {
    double gap = 0.0;
    bool degenerate = false;
};
GapResult benchmark_gap(const SpectrumResult& s, int i, int j);
GapResult benchmark_gap(const QubitHamiltonian& h, int i, int j);

struct Coherence {
    double rho = 0.0;
    double theta = 0.0;  // [0, 2pi)
    bool degenerate = false;
};
// Polar form of <Omega_j|O|Omega_i>.
Coherence coherence(const SpectrumResult& s, const PauliString& o, int i, int j);
Coherence coherence(const QubitHamiltonian& h, const PauliString& o, int i, int j);

enum class SearchFamily { Exhaustive, OneDefect };
constexpr int kExhaustiveQubitLimit = 7;

struct SearchEntry {
    std::string word;
    double rho = 0.0;
    double theta = 0.0;
};
struct SearchResult {
    std::vector<SearchEntry> ranking;  // descending rho, ties by word
    bool degenerate = false;           // pair skipped
};

SearchResult observable_search(const SpectrumResult& s, int num_qubits, int i, int j, SearchFamily family);
SearchResult observable_search(const QubitHamiltonian& h, int i, int j, SearchFamily family);
// Entries tied with the first one (rho within 1e-9).
std::vector<std::string> top_tied(const SearchResult& r);
std::string format_search_csv(const SearchResult& r);

// 1/2 (O_ii + O_jj) + rho cos(dE t + theta)
double sgs_closed_form(const SpectrumResult& s, const PauliString& o, int i, int j, double t);
double sgs_closed_form(const QubitHamiltonian& h, const PauliString& o, int i, int j, double t);

double wrap_angle(double a);  // to [0, 2pi)

}  // namespace sgs
