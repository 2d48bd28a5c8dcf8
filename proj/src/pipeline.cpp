#include "sgslab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "sgslab/rng.hpp"
#include "sgslab/spectra.hpp"

namespace sgs {

Circuit prepare_sgs0_ising(int L) {
    if (L < 1) throw Error("prepare_sgs0_ising: need L >= 1");
    Circuit c(L);
    for (int q = 0; q < L; ++q) c.add(Gate::h(q));
    return c;
}

std::string to_bits(std::uint64_t index, int n) {
    std::string s(n, '0');
    for (int q = 0; q < n; ++q)
        if (index & qubit_bit(n, q)) s[q] = '1';
    return s;
}

std::uint64_t from_bits(const std::string& bits) {
    if (bits.empty() || bits.size() > 62) throw Error("bitstring length out of range");
    std::uint64_t v = 0;
    for (char ch : bits) {
        if (ch != '0' && ch != '1') throw Error("bad bitstring '" + bits + "'");
        v = (v << 1) | static_cast<std::uint64_t>(ch == '1');
    }
    return v;
}

Circuit prepare_sgs0_basis_pair(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) throw Error("prepare_sgs0_basis_pair: length mismatch");
    from_bits(a);
    from_bits(b);
    if (a == b) throw Error("prepare_sgs0_basis_pair: a == b");
    const int n = static_cast<int>(a.size());
    Circuit c(n);
    std::vector<int> diff;
    for (int q = 0; q < n; ++q) {
        if (a[q] != b[q])
            diff.push_back(q);
        else if (a[q] == '1')
            c.add(Gate::x(q));
    }
    const int pivot = diff.front();
    c.add(Gate::h(pivot));
    for (std::size_t k = 1; k < diff.size(); ++k) c.add(Gate::cnot(pivot, diff[k]));
    for (int q : diff)
        if (a[q] == '1') c.add(Gate::x(q));
    return c;
}

std::pair<std::string, std::string> select_aux_pair(const QubitHamiltonian& h0) {
    if (!is_diagonal(h0)) throw Error("select_aux_pair: H0 is not diagonal");
    const int n = h0.num_qubits();
    const auto e = diagonal_energies(h0);
    if (e.size() < 2) throw Error("select_aux_pair: need at least one qubit");
    constexpr double kTie = 1e-12;
    auto lowest = [&](std::int64_t skip) {
        std::int64_t best = -1;
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (static_cast<std::int64_t>(k) == skip) continue;
            if (best < 0 || e[k] < e[static_cast<std::size_t>(best)] - kTie) best = static_cast<std::int64_t>(k);
        }
        return best;
    };
    const auto a = lowest(-1);
    const auto b = lowest(a);
    return {to_bits(static_cast<std::uint64_t>(a), n), to_bits(static_cast<std::uint64_t>(b), n)};
}

PauliString x_string_observable(const std::string& a, const std::string& b) {
    if (a.size() != b.size() || a == b) throw Error("x_string_observable: need distinct equal-length bitstrings");
    Word w(a.size(), 0);
    for (std::size_t q = 0; q < a.size(); ++q)
        if (a[q] != b[q]) w[q] = 1;
    return {w, 1.0};
}

std::vector<double> chebyshev_times(int n, double t_min, double t_max) {
    if (n < 3) throw Error("chebyshev_times: need n >= 3");
    if (!(t_max > t_min)) throw Error("chebyshev_times: need t_max > t_min");
    std::vector<double> t(n);
    const double mid = 0.5 * (t_min + t_max), half = 0.5 * (t_max - t_min);
    for (int k = 1; k <= n; ++k) t[k - 1] = mid + half * std::cos((2.0 * k - 1.0) * std::numbers::pi / (2.0 * n));
    std::sort(t.begin(), t.end());
    return t;
}

ExperimentConfig ExperimentConfig::ising_defaults() { return {}; }

ExperimentConfig ExperimentConfig::molecule_defaults() {
    ExperimentConfig c;
    c.therm_steps = 5;
    c.evo_steps = 35;
    c.tau = 1.0;
    return c;
}

void ExperimentConfig::validate() const {
    if (therm_steps < 0) throw Error("experiment.therm_steps must be >= 0");
    if (evo_steps < 3) throw Error("experiment.evo_steps must be >= 3");
    if (therm_steps > 0 && !(tau > 0.0)) throw Error("experiment.tau must be positive");
    if (allocation == Allocation::Cumulative && num_times != 0 && num_times != evo_steps)
        throw Error("experiment.num_times must equal evo_steps under cumulative allocation");
    if (allocation == Allocation::Fixed && num_times != 0 && num_times < 3)
        throw Error("experiment.num_times must be >= 3");
    if (!override_step_budget && therm_steps + evo_steps > step_budget)
        throw Error("experiment: therm_steps + evo_steps = " + std::to_string(therm_steps + evo_steps) +
                    " exceeds the step budget " + std::to_string(step_budget));
    if (!(t_min >= 0.0)) throw Error("experiment.t_min must be >= 0");
    if (t_max != 0.0 && !(t_max > t_min)) throw Error("experiment.t_max must exceed t_min (or be 0 for auto)");
    if (!(window_periods > 0.0)) throw Error("experiment.window_periods must be positive");
    if (trotter_clamp < 0.0) throw Error("experiment.trotter_clamp must be >= 0");
    if (shots < 1) throw Error("experiment.shots must be >= 1");
    if (pilot_shots < 0) throw Error("experiment.pilot_shots must be >= 0");
    if (workers < 1) throw Error("experiment.workers must be >= 1");
    if (noise) noise->validate();
}

void parallel_for(int n, int workers, const std::function<void(int)>& f) {
    if (workers <= 1 || n <= 1) {
        for (int k = 0; k < n; ++k) f(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(workers, n); ++w)
        pool.emplace_back([&] {
            for (int k; (k = next.fetch_add(1)) < n;) {
                try {
                    f(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

namespace {

// One simulated register, pure or mixed; segments are applied in a fixed order so every
// execution mode performs identical floating-point work for a given time point.
struct Register {
    bool noisy = false;
    StateVector psi;
    DensityMatrix rho;
    const NoiseModel* noise = nullptr;
    bool native = false;

    void run(const Circuit& c) {
        if (noisy)
            rho = run_noisy(c, *noise, std::move(rho));
        else
            simulate(native ? c.native() : c, psi);
    }
    ExpectationSample measure(const PauliString& o, int shots, std::uint64_t seed) const {
        if (noisy) return sample_expectation_noisy(rho, o, shots, noise->readout_flip, seed);
        return sample_expectation(psi, o, shots, seed);
    }
};

struct Plan {
    std::vector<double> times;
    std::vector<Circuit> segments;  // per time point (cumulative) or one per point (fixed)
};

Plan make_plan(const QubitHamiltonian& h, const ExperimentConfig& cfg, double t_min, double t_max) {
    Plan p;
    p.times = chebyshev_times(cfg.points(), t_min, t_max);
    if (cfg.allocation == Allocation::Cumulative) {
        double prev = t_min;
        for (double t : p.times) {
            p.segments.push_back(time_evolution_circuit(h, t - prev, 1));
            prev = t;
        }
    } else {
        for (double t : p.times) p.segments.push_back(time_evolution_circuit(h, t - t_min, cfg.evo_steps));
    }
    return p;
}

struct Start {
    const Circuit* prep = nullptr;
    const Circuit* therm = nullptr;
    const StateVector* initial = nullptr;
};

Register fresh_register(int n, const Start& st, const ExperimentConfig& cfg) {
    Register r;
    r.noisy = cfg.noise.has_value();
    r.noise = cfg.noise ? &*cfg.noise : nullptr;
    r.native = cfg.native_mode;
    if (st.initial) {
        if (r.noisy)
            r.rho = DensityMatrix::from_state(*st.initial);
        else
            r.psi = *st.initial;
    } else {
        if (r.noisy)
            r.rho = DensityMatrix(n);
        else
            r.psi = StateVector(n);
    }
    if (st.prep) r.run(*st.prep);
    if (st.therm) r.run(*st.therm);
    return r;
}

TimeSeries measure_series(int n, const Start& st, const Plan& plan, const PauliString& o, const ExperimentConfig& cfg,
                          int shots, std::uint64_t seed) {
    const int m = static_cast<int>(plan.times.size());
    TimeSeries s;
    s.times = plan.times;
    s.values.assign(m, 0.0);
    s.sigmas.assign(m, 0.0);
    auto record = [&](int k, const Register& r) {
        const auto smp = r.measure(o, shots, derive_seed(seed, {static_cast<std::uint64_t>(k)}));
        s.values[k] = smp.mean;
        s.sigmas[k] = smp.std_error;
    };
    if (cfg.allocation == Allocation::Cumulative && cfg.execution == Execution::Sequential) {
        Register r = fresh_register(n, st, cfg);
        for (int k = 0; k < m; ++k) {
            r.run(plan.segments[k]);
            record(k, r);
        }
        return s;
    }
    const int workers = cfg.execution == Execution::Independent ? cfg.workers : 1;
    if (cfg.allocation == Allocation::Cumulative) {
        parallel_for(m, workers, [&](int k) {
            Register r = fresh_register(n, st, cfg);
            for (int j = 0; j <= k; ++j) r.run(plan.segments[j]);
            record(k, r);
        });
    } else {
        const Register base = fresh_register(n, st, cfg);
        parallel_for(m, workers, [&](int k) {
            Register r = base;
            r.run(plan.segments[k]);
            record(k, r);
        });
    }
    return s;
}

double max_step_fraction(int points, Allocation alloc, int evo_steps) {
    // largest single Trotter step as a fraction of the window length
    const auto t = chebyshev_times(points, 0.0, 1.0);
    if (alloc == Allocation::Fixed) return t.back() / evo_steps;
    double m = t.front();
    for (std::size_t k = 1; k < t.size(); ++k) m = std::max(m, t[k] - t[k - 1]);
    return m;
}

ExperimentResult run_core(const QubitHamiltonian& h, const Start& st, const PauliString& o,
                          const ExperimentConfig& cfg) {
    cfg.validate();
    check_measurable(o);
    const int n = h.num_qubits();
    if (o.num_qubits() != n) throw Error("run_experiment: observable qubit count mismatch");
    if (cfg.noise && n > kDensityQubitLimit) throw Error("run_experiment: noisy path limited to 8 qubits");

    ExperimentResult res;
    res.t_min = cfg.t_min;
    const double norm1 = h.one_norm();
    if (cfg.t_max > cfg.t_min) {
        res.t_max = cfg.t_max;
        res.window_source = "config";
    } else {
        if (!(norm1 > 0.0)) throw Error("run_experiment: Hamiltonian has no non-identity terms");
        const double tp = cfg.t_min + cfg.points() / norm1;
        const Plan pilot = make_plan(h, cfg, cfg.t_min, tp);
        const int pshots = cfg.pilot_shots > 0 ? cfg.pilot_shots : std::max(256, cfg.shots / 8);
        const TimeSeries ps = measure_series(n, st, pilot, o, cfg, pshots, derive_seed(cfg.seed, {0x9170u}));
        const FitResult pf = fit_gap(ps);
        const GridResult pg = frequency_grid_search(ps);
        if (pf.converged && !pf.flat && pf.gap > 0.0) {
            res.gap_guess = pf.gap;
            res.window_source = "pilot_fit";
        } else if (pg.significant) {
            res.gap_guess = pg.candidates.front();
            res.window_source = "pilot_grid";
        }
        if (res.gap_guess > 0.0) {
            res.t_max = cfg.t_min + cfg.window_periods * 2.0 * std::numbers::pi / res.gap_guess;
        } else {
            res.t_max = tp;
            res.window_source = "pilot_window";
        }
        if (cfg.trotter_clamp > 0.0) {
            const double cap = cfg.trotter_clamp / (norm1 * max_step_fraction(cfg.points(), cfg.allocation, cfg.evo_steps));
            res.t_max = std::min(res.t_max, cfg.t_min + cap);
        }
    }

    const Plan plan = make_plan(h, cfg, res.t_min, res.t_max);
    res.series = measure_series(n, st, plan, o, cfg, cfg.shots, derive_seed(cfg.seed, {0x5e41u}));

    // longest emitted circuit
    Circuit longest(n);
    if (st.prep) longest.append(*st.prep);
    if (st.therm) longest.append(*st.therm);
    if (cfg.allocation == Allocation::Cumulative)
        for (const auto& seg : plan.segments) longest.append(seg);
    else
        longest.append(plan.segments.back());
    res.max_circuit_steps = longest.trotter_steps;
    res.two_qubit_count = longest.two_qubit_count();
    res.two_qubit_depth = longest.two_qubit_depth();
    if (!cfg.override_step_budget && res.max_circuit_steps > cfg.step_budget)
        throw Error("run_experiment: circuit exceeds the step budget");
    return res;
}

}  // namespace

ExperimentResult run_experiment(const QubitHamiltonian& h, const QubitHamiltonian& h0, const Circuit& prep,
                                const PauliString& o, const ExperimentConfig& cfg) {
    if (h0.num_qubits() != h.num_qubits() || prep.num_qubits != h.num_qubits())
        throw Error("run_experiment: qubit count mismatch");
    Circuit therm(h.num_qubits());
    if (cfg.therm_steps > 0) therm = adiabatic_circuit(h0, h, cfg.tau, cfg.therm_steps);
    Start st;
    st.prep = &prep;
    st.therm = &therm;
    return run_core(h, st, o, cfg);
}

ExperimentResult run_experiment(const QubitHamiltonian& h, const StateVector& initial, const PauliString& o,
                                const ExperimentConfig& cfg) {
    if (initial.num_qubits != h.num_qubits()) throw Error("run_experiment: qubit count mismatch");
    ExperimentConfig c = cfg;
    c.therm_steps = 0;
    Start st;
    st.initial = &initial;
    return run_core(h, st, o, c);
}

std::pair<double, double> ising_branch_fidelities(const QubitHamiltonian& h, const QubitHamiltonian& h0, double tau,
                                                  int steps) {
    const int n = h.num_qubits();
    const auto spec = exact_spectrum(h);
    const Eigen::Index dim = Eigen::Index{1} << n;
    // Phi+- = (|+>^n +- |->^n)/sqrt(2): even / odd parity halves of the uniform state
    Eigen::VectorXcd plus(dim), minus(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        const bool odd = std::popcount(static_cast<std::uint64_t>(b)) & 1;
        const double v = std::sqrt(2.0) / std::sqrt(static_cast<double>(dim));
        plus[b] = odd ? 0.0 : v;
        minus[b] = odd ? v : 0.0;
    }
    const Circuit u = adiabatic_circuit(h0, h, tau, steps);
    StateVector sp(n, plus), sm(n, minus);
    simulate(u, sp);
    simulate(u, sm);
    const double f0 = std::norm(spec.eigenvectors.col(0).dot(sp.amp));
    const double f1 = std::norm(spec.eigenvectors.col(1).dot(sm.amp));
    return {f0, f1};
}

}  // namespace sgs
