#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgslab/circuit.hpp"
#include "sgslab/fit.hpp"
#include "sgslab/noise.hpp"

namespace sgs {

// H on every qubit: |0..0> -> |+>^L
Circuit prepare_sgs0_ising(int L);
// (|a> + |b>)/sqrt(2) from |0..0>; a, b are bitstrings with qubit 0 first.
Circuit prepare_sgs0_basis_pair(const std::string& a, const std::string& b);

std::string to_bits(std::uint64_t index, int n);
std::uint64_t from_bits(const std::string& bits);

// Lowest and second-lowest diagonal energies of a diagonal H0; ties to the smaller index.
std::pair<std::string, std::string> select_aux_pair(const QubitHamiltonian& h0);
// X on every qubit where a and b differ.
PauliString x_string_observable(const std::string& a, const std::string& b);

std::vector<double> chebyshev_times(int n, double t_min, double t_max);

enum class Allocation { Cumulative, Fixed };
enum class Execution { Sequential, Independent };

struct ExperimentConfig {
    int therm_steps = 15;
    int evo_steps = 25;
    int num_times = 0;  // fixed allocation only; 0 means evo_steps
    double tau = 6.0;
    double t_min = 0.0;
    double t_max = 0.0;  // <= t_min selects the pilot-based window
    double window_periods = 2.5;
    double trotter_clamp = 0.0;  // > 0 caps max dt * ||H||_1 on automatic windows
    int shots = 8192;
    int pilot_shots = 0;  // 0 means max(256, shots / 8)
    std::uint64_t seed = 1;
    bool native_mode = false;
    std::optional<NoiseModel> noise;
    Allocation allocation = Allocation::Cumulative;
    Execution execution = Execution::Sequential;
    int workers = 1;
    int step_budget = 40;
    bool override_step_budget = false;

    static ExperimentConfig ising_defaults();
    static ExperimentConfig molecule_defaults();
    void validate() const;
    int points() const { return allocation == Allocation::Fixed && num_times > 0 ? num_times : evo_steps; }
};

struct ExperimentResult {
    TimeSeries series;
    double t_min = 0.0;
    double t_max = 0.0;
    std::string window_source;  // "config", "pilot_fit", "pilot_grid", "pilot_window"
    double gap_guess = 0.0;
    int max_circuit_steps = 0;  // Trotter steps in the longest circuit
    int two_qubit_count = 0;    // longest circuit, native units
    int two_qubit_depth = 0;
};

ExperimentResult run_experiment(const QubitHamiltonian& h, const QubitHamiltonian& h0, const Circuit& prep,
                                const PauliString& o, const ExperimentConfig& cfg);
// Starts from a given state and skips thermalization (therm_steps is ignored).
ExperimentResult run_experiment(const QubitHamiltonian& h, const StateVector& initial, const PauliString& o,
                                const ExperimentConfig& cfg);

// Branch fidelities |<Omega_0|U|Phi+>|^2 and |<Omega_1|U|Phi->|^2 for an Ising spec after adiabatic_circuit.
std::pair<double, double> ising_branch_fidelities(const QubitHamiltonian& h, const QubitHamiltonian& h0, double tau,
                                                  int steps);

// Runs f(0..n-1) on up to `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& f);

}  // namespace sgs
