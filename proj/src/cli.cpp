#include "sgslab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "sgslab/rng.hpp"
#include "sgslab/spectra.hpp"

namespace sgs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }
    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items())
            if (!ok.count(k)) throw ConfigError(at(k) + ": unknown key");
    }
    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& raw(const char* key) const { return j_.at(key); }
    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void get(const char* key, int& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
        out = v.get<int>();
    }
    void get(const char* key, std::uint64_t& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ConfigError(at(key) + ": expected a non-negative integer");
        out = v.get<std::uint64_t>();
    }
    void get(const char* key, double& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(at(key) + ": expected a number");
        out = v.get<double>();
    }
    void get(const char* key, bool& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(at(key) + ": expected true or false");
        out = v.get<bool>();
    }
    void get(const char* key, std::string& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(at(key) + ": expected a string");
        out = v.get<std::string>();
    }

private:
    const json& j_;
    std::string path_;
};

Allocation parse_allocation(const std::string& s, const std::string& where) {
    if (s == "cumulative") return Allocation::Cumulative;
    if (s == "fixed") return Allocation::Fixed;
    throw ConfigError(where + ": expected \"cumulative\" or \"fixed\"");
}

Execution parse_execution(const std::string& s, const std::string& where) {
    if (s == "sequential") return Execution::Sequential;
    if (s == "independent") return Execution::Independent;
    throw ConfigError(where + ": expected \"sequential\" or \"independent\"");
}

}  // namespace

NoiseModel parse_noise_model(const json& j, const std::string& path) {
    Fields f(j, path);
    f.allow({"fidelity_1q", "fidelity_2q", "T1", "T2", "t_gate_1q", "t_gate_2q", "readout_flip"});
    if (!f.has("fidelity_1q")) throw ConfigError(f.at("fidelity_1q") + ": required");
    if (!f.has("fidelity_2q")) throw ConfigError(f.at("fidelity_2q") + ": required");
    NoiseModel m;
    f.get("fidelity_1q", m.fidelity_1q);
    f.get("fidelity_2q", m.fidelity_2q);
    f.get("T1", m.T1);
    f.get("T2", m.T2);
    f.get("t_gate_1q", m.t_gate_1q);
    f.get("t_gate_2q", m.t_gate_2q);
    f.get("readout_flip", m.readout_flip);
    try {
        m.validate();
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return m;
}

json to_json(const NoiseModel& m) {
    return {{"fidelity_1q", m.fidelity_1q}, {"fidelity_2q", m.fidelity_2q}, {"T1", m.T1},
            {"T2", m.T2},                   {"t_gate_1q", m.t_gate_1q},     {"t_gate_2q", m.t_gate_2q},
            {"readout_flip", m.readout_flip}};
}

RunConfig parse_run_config(const json& j, const ExperimentConfig& defaults) {
    RunConfig rc;
    rc.experiment = defaults;
    Fields root(j, "");
    root.allow({"experiment", "noise", "ising", "molecule"});

    if (root.has("experiment")) {
        Fields f(root.raw("experiment"), "experiment");
        f.allow({"therm_steps", "evo_steps", "num_times", "tau", "t_min", "t_max", "window_periods", "trotter_clamp",
                 "shots", "pilot_shots", "seed", "native_mode", "allocation", "execution", "workers", "step_budget",
                 "override_step_budget"});
        auto& e = rc.experiment;
        f.get("therm_steps", e.therm_steps);
        f.get("evo_steps", e.evo_steps);
        f.get("num_times", e.num_times);
        f.get("tau", e.tau);
        f.get("t_min", e.t_min);
        f.get("t_max", e.t_max);
        f.get("window_periods", e.window_periods);
        f.get("trotter_clamp", e.trotter_clamp);
        f.get("shots", e.shots);
        f.get("pilot_shots", e.pilot_shots);
        f.get("seed", e.seed);
        f.get("native_mode", e.native_mode);
        f.get("workers", e.workers);
        f.get("step_budget", e.step_budget);
        f.get("override_step_budget", e.override_step_budget);
        std::string s;
        f.get("allocation", s);
        if (!s.empty()) e.allocation = parse_allocation(s, "experiment.allocation");
        s.clear();
        f.get("execution", s);
        if (!s.empty()) e.execution = parse_execution(s, "experiment.execution");
    }

    if (root.has("noise")) {
        const json& n = root.raw("noise");
        if (n.is_string()) {
            const auto s = n.get<std::string>();
            if (s == "none") {
                rc.experiment.noise.reset();
                rc.noise_label = "none";
            } else if (s == "aria") {
                rc.experiment.noise = NoiseModel::aria();
                rc.noise_label = "aria";
            } else {
                throw ConfigError("noise: expected \"none\", \"aria\" or an object");
            }
        } else {
            rc.experiment.noise = parse_noise_model(n, "noise");
            rc.noise_label = "custom";
        }
    }

    if (root.has("ising")) {
        Fields f(root.raw("ising"), "ising");
        f.allow({"geometry", "L", "rows", "cols", "J1", "h3_values", "observable"});
        std::string geom = "chain";
        f.get("geometry", geom);
        int L = 4, rows = 2, cols = 2;
        double J1 = 1.0;
        f.get("L", L);
        f.get("rows", rows);
        f.get("cols", cols);
        f.get("J1", J1);
        if (geom == "chain")
            rc.ising = IsingSpec::chain(L, J1, 0.0);
        else if (geom == "lattice")
            rc.ising = IsingSpec::lattice(rows, cols, J1, 0.0);
        else
            throw ConfigError("ising.geometry: expected \"chain\" or \"lattice\"");
        try {
            rc.ising.validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("ising: ") + e.what());
        }
        if (f.has("h3_values")) {
            const json& hv = f.raw("h3_values");
            if (!hv.is_array() || hv.empty()) throw ConfigError("ising.h3_values: expected a non-empty array");
            rc.h3_values.clear();
            for (std::size_t k = 0; k < hv.size(); ++k) {
                if (!hv[k].is_number() || hv[k].get<double>() < 0.0)
                    throw ConfigError("ising.h3_values[" + std::to_string(k) + "]: expected a number >= 0");
                rc.h3_values.push_back(hv[k].get<double>());
            }
        }
        f.get("observable", rc.observable);
    }

    if (root.has("molecule")) {
        Fields f(root.raw("molecule"), "molecule");
        f.allow({"hamiltonians"});
        if (f.has("hamiltonians")) {
            const json& arr = f.raw("hamiltonians");
            if (!arr.is_array()) throw ConfigError("molecule.hamiltonians: expected an array");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const std::string where = "molecule.hamiltonians[" + std::to_string(k) + "]";
                Fields e(arr[k], where);
                e.allow({"label", "path"});
                MoleculeInput m;
                e.get("label", m.label);
                e.get("path", m.path);
                if (m.label.empty()) throw ConfigError(where + ".label: required");
                if (m.path.empty()) throw ConfigError(where + ".path: required");
                rc.molecules.push_back(m);
            }
        }
    }
    try {
        rc.experiment.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

json to_json(const RunConfig& c, bool molecule) {
    const auto& e = c.experiment;
    json ex = {
        {"therm_steps", e.therm_steps},
        {"evo_steps", e.evo_steps},
        {"num_times", e.points()},
        {"tau", e.tau},
        {"t_min", e.t_min},
        {"t_max", e.t_max},
        {"window_periods", e.window_periods},
        {"trotter_clamp", e.trotter_clamp},
        {"shots", e.shots},
        {"pilot_shots", e.pilot_shots},
        {"seed", e.seed},
        {"native_mode", e.native_mode},
        {"allocation", e.allocation == Allocation::Cumulative ? "cumulative" : "fixed"},
        {"execution", e.execution == Execution::Sequential ? "sequential" : "independent"},
        {"step_budget", e.step_budget},
        {"override_step_budget", e.override_step_budget},
    };
    json out = {{"experiment", ex}};
    out["noise"] = e.noise ? json{{"preset", c.noise_label}, {"model", to_json(*e.noise)}} : json("none");
    if (molecule) {
        json arr = json::array();
        for (const auto& m : c.molecules) arr.push_back({{"label", m.label}, {"path", m.path}});
        out["molecule"] = {{"hamiltonians", arr}};
    } else {
        json ising = {{"geometry", c.ising.geometry == IsingSpec::Geometry::Chain ? "chain" : "lattice"},
                      {"J1", c.ising.J1},
                      {"h3_values", c.h3_values},
                      {"observable", c.observable}};
        if (c.ising.geometry == IsingSpec::Geometry::Chain)
            ising["L"] = c.ising.cols;
        else {
            ising["rows"] = c.ising.rows;
            ising["cols"] = c.ising.cols;
        }
        out["ising"] = ising;
    }
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& data) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << data;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string number_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string safe_label(const std::string& s) {
    std::string out;
    for (char ch : s) out.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_' ? ch : '_');
    return out;
}

struct CommonFlags {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> shots;
    std::string noise;
    std::optional<int> workers;
    bool override_budget = false;
    std::string execution;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON experiment config");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "base RNG seed");
    cmd->add_option("--shots", f.shots, "shots per time point");
    cmd->add_option("--noise", f.noise, "none | aria | custom:<path>");
    cmd->add_option("--workers", f.workers, "parallel sweep workers");
    cmd->add_flag("--override-step-budget", f.override_budget, "allow therm + evo steps above the budget");
    cmd->add_option("--execution", f.execution, "sequential | independent");
}

struct Inputs {
    std::map<std::string, std::string> digests;
};

RunConfig load_config(const CommonFlags& f, const ExperimentConfig& defaults, Inputs& inputs, fs::path& base_dir) {
    json j = json::object();
    base_dir = fs::current_path();
    if (!f.config.empty()) {
        std::string text;
        try {
            text = read_text_file(f.config);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        inputs.digests["config"] = sha256_hex(text);
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(f.config + ": " + e.what());
        }
        base_dir = fs::absolute(f.config).parent_path();
    }
    RunConfig rc = parse_run_config(j, defaults);
    auto& e = rc.experiment;
    if (f.seed) e.seed = *f.seed;
    if (f.shots) e.shots = *f.shots;
    if (f.workers) e.workers = *f.workers;
    if (f.override_budget) e.override_step_budget = true;
    if (!f.execution.empty()) e.execution = parse_execution(f.execution, "--execution");
    if (!f.noise.empty()) {
        if (f.noise == "none") {
            e.noise.reset();
            rc.noise_label = "none";
        } else if (f.noise == "aria") {
            e.noise = NoiseModel::aria();
            rc.noise_label = "aria";
        } else if (f.noise.rfind("custom:", 0) == 0) {
            const std::string path = f.noise.substr(7);
            std::string text;
            try {
                text = read_text_file(path);
            } catch (const Error& err) {
                throw ConfigError(std::string("--noise: ") + err.what());
            }
            inputs.digests["noise"] = sha256_hex(text);
            json nj;
            try {
                nj = json::parse(text);
            } catch (const json::parse_error& err) {
                throw ConfigError(path + ": " + err.what());
            }
            e.noise = parse_noise_model(nj, "noise");
            rc.noise_label = "custom";
        } else {
            throw ConfigError("--noise: expected none, aria or custom:<path>");
        }
    }
    try {
        e.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& err) {
        throw ConfigError(err.what());
    }
    return rc;
}

struct PointOutcome {
    std::string label;
    json record;
    std::string series_csv;
    std::string sweep_row;
    bool converged = false;
    bool flat = false;
    std::string summary;
};

json benchmark_block(double gap_exact, double gap_fit, bool degenerate) {
    const double rel = gap_exact > 0.0 ? std::abs(gap_fit - gap_exact) / gap_exact : std::nan("");
    json b = {{"gap_exact", gap_exact}, {"gap_fitted", gap_fit}, {"degenerate", degenerate}};
    b["relative_error"] = std::isfinite(rel) ? json(rel) : json(nullptr);
    return b;
}

std::string csv_num(double v) { return std::isfinite(v) ? format_real(v) : std::string("nan"); }

PointOutcome finish_point(const std::string& label, const ExperimentResult& ex, const FitResult& fit,
                          const std::optional<GapResult>& gap, const std::optional<Coherence>& coh, json extra) {
    PointOutcome p;
    p.label = label;
    p.converged = fit.converged;
    p.flat = fit.flat;
    p.series_csv = ex.series.to_csv();
    json rec = std::move(extra);
    rec["label"] = label;
    rec["fit"] = to_json(fit);
    rec["window"] = {{"t_min", ex.t_min}, {"t_max", ex.t_max}, {"source", ex.window_source}, {"gap_guess", ex.gap_guess}};
    rec["circuit"] = {{"max_trotter_steps", ex.max_circuit_steps},
                      {"two_qubit_count", ex.two_qubit_count},
                      {"two_qubit_depth", ex.two_qubit_depth}};
    double gap_exact = std::nan("");
    if (gap) {
        rec["benchmark"] = benchmark_block(gap->gap, fit.gap, gap->degenerate);
        gap_exact = gap->gap;
    }
    if (coh) rec["coherence_exact"] = {{"rho", coh->rho}, {"theta", coh->theta}, {"degenerate", coh->degenerate}};
    std::vector<std::string> flags;
    if (!fit.converged) flags.push_back("nonconverged");
    if (fit.flat) flags.push_back("flat");
    if (gap && gap->degenerate) flags.push_back("degenerate_levels");
    rec["flags"] = flags;
    p.record = rec;
    const double rel = std::isfinite(gap_exact) && gap_exact > 0 ? std::abs(fit.gap - gap_exact) / gap_exact : std::nan("");
    std::string fl;
    for (const auto& s : flags) fl += (fl.empty() ? "" : ";") + s;
    p.sweep_row = csv_num(fit.gap) + "," + csv_num(fit.gap_err) + "," + csv_num(gap_exact) + "," + csv_num(rel) + "," +
                  csv_num(fit.rho) + "," + csv_num(fit.rho_err) + "," + fl;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s gap_fit=%.6f +- %.6f  gap_exact=%.6f  rel_err=%.4f%s", label.c_str(), fit.gap,
                  fit.gap_err, gap_exact, rel, fl.empty() ? "" : ("  [" + fl + "]").c_str());
    p.summary = buf;
    return p;
}

int write_outputs(const fs::path& out, const std::string& command, const std::string& key_header,
                  const std::vector<std::string>& keys, const std::vector<PointOutcome>& pts, const json& config,
                  const json& seeds, const Inputs& inputs) {
    fs::create_directories(out);
    std::string sweep = key_header + ",gap_fit,gap_err,gap_exact,rel_error,rho,rho_err,flags\n";
    json points = json::array();
    bool all_ok = true;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        write_file_atomic(out / ("series_" + safe_label(pts[k].label) + ".csv"), pts[k].series_csv);
        sweep += keys[k] + "," + pts[k].sweep_row + "\n";
        points.push_back(pts[k].record);
        all_ok = all_ok && pts[k].converged;
        std::cout << pts[k].summary << "\n";
    }
    write_file_atomic(out / "sweep.csv", sweep);
    write_file_atomic(out / "result.json", json{{"command", command}, {"points", points}}.dump(2) + "\n");
    json manifest = {{"tool", "sgslab"},       {"version", kToolVersion}, {"command", command},
                     {"config", config},       {"seeds", seeds},          {"inputs", inputs.digests},
                     {"timestamp", utc_timestamp()}};
    write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    if (!all_ok) std::cerr << "warning: at least one fit did not converge\n";
    return all_ok ? kExitOk : kExitFit;
}

PauliString ising_observable(const RunConfig& rc) {
    const int n = rc.ising.num_sites();
    if (rc.observable.empty()) {
        Word w(n, 0);
        w[0] = 1;
        return {w, 1.0};
    }
    PauliString o = PauliString::parse(rc.observable);
    if (o.num_qubits() != n) throw ConfigError("ising.observable: word length must equal the number of sites");
    return o;
}

int cmd_ising(const CommonFlags& f, const std::vector<std::string>& geometry, const std::vector<double>& h3,
              std::optional<double> J1, std::optional<double> tau) {
    Inputs inputs;
    fs::path base;
    RunConfig rc = load_config(f, ExperimentConfig::ising_defaults(), inputs, base);
    if (!geometry.empty()) {
        try {
            if (geometry[0] == "chain" && geometry.size() == 2)
                rc.ising = IsingSpec::chain(std::stoi(geometry[1]), rc.ising.J1, 0.0);
            else if (geometry[0] == "lattice" && geometry.size() == 3)
                rc.ising = IsingSpec::lattice(std::stoi(geometry[1]), std::stoi(geometry[2]), rc.ising.J1, 0.0);
            else
                throw ConfigError("--geometry: expected 'chain L' or 'lattice R C'");
            rc.ising.validate();
        } catch (const std::logic_error&) {
            throw ConfigError("--geometry: bad integer");
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("--geometry: ") + e.what());
        }
    }
    if (J1) rc.ising.J1 = *J1;
    if (!h3.empty()) rc.h3_values = h3;
    if (tau) rc.experiment.tau = *tau;
    rc.experiment.validate();
    const PauliString o = ising_observable(rc);
    const int n = rc.ising.num_sites();
    if (rc.experiment.noise && n > kDensityQubitLimit) throw ConfigError("noisy runs are limited to 8 qubits");

    const int m = static_cast<int>(rc.h3_values.size());
    std::vector<PointOutcome> pts(m);
    json seeds = {{"base", rc.experiment.seed}, {"points", json::array()}};
    std::vector<std::uint64_t> point_seeds(m);
    for (int k = 0; k < m; ++k) {
        point_seeds[k] = derive_seed(rc.experiment.seed, {static_cast<std::uint64_t>(k)});
        seeds["points"].push_back(point_seeds[k]);
    }
    const int workers = rc.experiment.workers;
    parallel_for(m, workers, [&](int k) {
        IsingSpec spec = rc.ising;
        spec.h3 = rc.h3_values[k];
        const auto h = build_ising(spec);
        const auto h0 = ising_auxiliary(spec);
        ExperimentConfig cfg = rc.experiment;
        cfg.seed = point_seeds[k];
        cfg.workers = m > 1 ? 1 : workers;
        const auto ex = run_experiment(h, h0, prepare_sgs0_ising(n), o, cfg);
        const auto fit = fit_gap(ex.series);
        std::optional<GapResult> gap;
        std::optional<Coherence> coh;
        if (n <= oracle_qubit_limit()) {
            const auto sp = exact_spectrum(h);
            gap = benchmark_gap(sp, 0, 1);
            coh = coherence(sp, o, 0, 1);
        }
        const double ratio = spec.J1 > 0 ? spec.h3 / spec.J1 : spec.h3;
        json extra = {{"h3", spec.h3}, {"J1", spec.J1}, {"h3_over_J1", ratio}, {"observable", o.word()},
                      {"seed", point_seeds[k]}};
        pts[k] = finish_point("h3_" + number_label(spec.h3), ex, fit, gap, coh, extra);
    });
    std::vector<std::string> keys;
    for (double v : rc.h3_values) keys.push_back(format_real(rc.ising.J1 > 0 ? v / rc.ising.J1 : v));
    return write_outputs(f.out, "ising", "h3_over_J1", keys, pts, to_json(rc, false), seeds, inputs);
}

int cmd_molecule(const CommonFlags& f, const std::vector<std::string>& hams, std::optional<double> tau) {
    Inputs inputs;
    fs::path base;
    RunConfig rc = load_config(f, ExperimentConfig::molecule_defaults(), inputs, base);
    for (const auto& s : hams) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
            throw ConfigError("--hamiltonian: expected label=path");
        rc.molecules.push_back({s.substr(0, eq), s.substr(eq + 1)});
    }
    if (tau) rc.experiment.tau = *tau;
    rc.experiment.validate();
    if (rc.molecules.empty()) throw ConfigError("molecule.hamiltonians: at least one entry required");

    std::vector<QubitHamiltonian> hs;
    for (std::size_t k = 0; k < rc.molecules.size(); ++k) {
        fs::path p = rc.molecules[k].path;
        if (p.is_relative() && !f.config.empty() && !fs::exists(p)) p = base / p;
        std::string text;
        try {
            text = read_text_file(p);
            hs.push_back(load_any_hamiltonian(p));
        } catch (const Error& e) {
            throw ConfigError("molecule.hamiltonians[" + std::to_string(k) + "].path: " + e.what());
        }
        inputs.digests["hamiltonian:" + rc.molecules[k].label] = sha256_hex(text);
        if (rc.experiment.noise && hs.back().num_qubits() > kDensityQubitLimit)
            throw ConfigError("noisy runs are limited to 8 qubits");
    }

    const int m = static_cast<int>(hs.size());
    std::vector<PointOutcome> pts(m);
    json seeds = {{"base", rc.experiment.seed}, {"points", json::array()}};
    std::vector<std::uint64_t> point_seeds(m);
    for (int k = 0; k < m; ++k) {
        point_seeds[k] = derive_seed(rc.experiment.seed, {static_cast<std::uint64_t>(k)});
        seeds["points"].push_back(point_seeds[k]);
    }
    const int workers = rc.experiment.workers;
    parallel_for(m, workers, [&](int k) {
        const auto& h = hs[k];
        const int n = h.num_qubits();
        const auto h0 = diagonal_part(h);
        const auto [a, b] = select_aux_pair(h0);
        const PauliString o = x_string_observable(a, b);
        const double link = std::abs(matrix_element(o, StateVector::basis(n, from_bits(b)).amp,
                                                    StateVector::basis(n, from_bits(a)).amp));
        ExperimentConfig cfg = rc.experiment;
        cfg.seed = point_seeds[k];
        cfg.workers = m > 1 ? 1 : workers;
        const auto ex = run_experiment(h, h0, prepare_sgs0_basis_pair(a, b), o, cfg);
        const auto fit = fit_gap(ex.series);
        std::optional<GapResult> gap;
        std::optional<Coherence> coh;
        if (n <= oracle_qubit_limit()) {
            const auto sp = exact_spectrum(h);
            gap = benchmark_gap(sp, 0, 1);
            coh = coherence(sp, o, 0, 1);
        }
        json extra = {{"qubits", n},    {"pair", {a, b}},        {"observable", o.word()},
                      {"aux_link", link}, {"seed", point_seeds[k]}};
        pts[k] = finish_point(rc.molecules[k].label, ex, fit, gap, coh, extra);
    });
    std::vector<std::string> keys;
    for (const auto& mi : rc.molecules) keys.push_back(mi.label);
    return write_outputs(f.out, "molecule", "label", keys, pts, to_json(rc, true), seeds, inputs);
}

struct TargetFlags {
    std::vector<std::string> geometry;
    double J1 = 1.0;
    double h3 = 3.0;
    std::string hamiltonian;
    std::vector<int> levels{0, 1};
};

void add_target(CLI::App* cmd, TargetFlags& t) {
    cmd->add_option("--geometry", t.geometry, "chain L | lattice R C")->expected(2, 3);
    cmd->add_option("--J1", t.J1, "Ising coupling");
    cmd->add_option("--h3", t.h3, "Ising transverse field");
    cmd->add_option("--hamiltonian", t.hamiltonian, "qubit (.qubit) or fermionic (.fermion) Hamiltonian file");
    cmd->add_option("--levels", t.levels, "level pair i j")->expected(2);
}

QubitHamiltonian resolve_target(const TargetFlags& t, Inputs& inputs, json& described) {
    if (!t.hamiltonian.empty()) {
        if (!t.geometry.empty()) throw ConfigError("--hamiltonian and --geometry are exclusive");
        try {
            inputs.digests["hamiltonian"] = sha256_hex(read_text_file(t.hamiltonian));
            described = {{"hamiltonian", t.hamiltonian}};
            return load_any_hamiltonian(t.hamiltonian);
        } catch (const Error& e) {
            throw ConfigError(std::string("--hamiltonian: ") + e.what());
        }
    }
    IsingSpec spec = IsingSpec::chain(4, t.J1, t.h3);
    try {
        if (!t.geometry.empty()) {
            if (t.geometry[0] == "chain" && t.geometry.size() == 2)
                spec = IsingSpec::chain(std::stoi(t.geometry[1]), t.J1, t.h3);
            else if (t.geometry[0] == "lattice" && t.geometry.size() == 3)
                spec = IsingSpec::lattice(std::stoi(t.geometry[1]), std::stoi(t.geometry[2]), t.J1, t.h3);
            else
                throw ConfigError("--geometry: expected 'chain L' or 'lattice R C'");
        }
        spec.validate();
    } catch (const std::logic_error&) {
        throw ConfigError("--geometry: bad integer");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    described = {{"ising", spec.describe()}, {"J1", spec.J1}, {"h3", spec.h3}};
    return build_ising(spec);
}

void write_manifest(const fs::path& out, const std::string& command, const json& config, const Inputs& inputs) {
    json manifest = {{"tool", "sgslab"}, {"version", kToolVersion}, {"command", command},
                     {"config", config}, {"seeds", json::object()}, {"inputs", inputs.digests},
                     {"timestamp", utc_timestamp()}};
    write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
}

int cmd_search(const TargetFlags& t, const std::string& family, const std::string& out, int show) {
    Inputs inputs;
    json described;
    const auto h = resolve_target(t, inputs, described);
    SearchFamily fam;
    if (family == "exhaustive")
        fam = SearchFamily::Exhaustive;
    else if (family == "one_defect")
        fam = SearchFamily::OneDefect;
    else
        throw ConfigError("--family: expected exhaustive or one_defect");
    if (fam == SearchFamily::Exhaustive && h.num_qubits() > kExhaustiveQubitLimit)
        throw ConfigError("--family exhaustive is limited to 7 qubits");
    const auto r = observable_search(h, t.levels[0], t.levels[1], fam);
    fs::create_directories(out);
    write_file_atomic(fs::path(out) / "search.csv", format_search_csv(r));
    described["family"] = family;
    described["levels"] = t.levels;
    write_manifest(out, "search", described, inputs);
    if (r.degenerate) {
        std::cout << "levels are degenerate; search skipped\n";
        return kExitOk;
    }
    const auto tied = top_tied(r);
    std::cout << "top rho " << format_real(r.ranking.front().rho) << " shared by " << tied.size() << " words:";
    for (const auto& w : tied) std::cout << " " << w;
    std::cout << "\n";
    for (int k = 0; k < show && k < static_cast<int>(r.ranking.size()); ++k)
        std::cout << r.ranking[k].word << " " << format_real(r.ranking[k].rho) << "\n";
    return kExitOk;
}

int cmd_benchmark(const TargetFlags& t, const std::string& out) {
    Inputs inputs;
    json described;
    const auto h = resolve_target(t, inputs, described);
    const auto sp = exact_spectrum(h);
    const auto g = benchmark_gap(sp, t.levels[0], t.levels[1]);
    json levels = json::array();
    for (int k = 0; k < std::min(sp.size(), 8); ++k) levels.push_back(sp.eigenvalues[k]);
    json res = {{"levels", t.levels}, {"gap", g.gap}, {"degenerate", g.degenerate}, {"lowest_eigenvalues", levels},
                {"qubits", h.num_qubits()}};
    fs::create_directories(out);
    write_file_atomic(fs::path(out) / "benchmark.json", res.dump(2) + "\n");
    described["levels"] = t.levels;
    write_manifest(out, "benchmark", described, inputs);
    std::cout << "gap(" << t.levels[0] << "," << t.levels[1] << ") = " << format_real(g.gap)
              << (g.degenerate ? "  [degenerate levels]" : "") << "\n";
    return kExitOk;
}

int cmd_fit(const std::string& input, std::optional<double> hint, const std::string& out) {
    Inputs inputs;
    TimeSeries s;
    try {
        const std::string text = read_text_file(input);
        inputs.digests["input"] = sha256_hex(text);
        s = TimeSeries::parse_csv(text);
    } catch (const Error& e) {
        throw ConfigError(std::string("--input: ") + e.what());
    }
    const auto fit = fit_gap(s, hint);
    fs::create_directories(out);
    json res = {{"command", "fit"}, {"fit", to_json(fit)}};
    write_file_atomic(fs::path(out) / "result.json", res.dump(2) + "\n");
    json cfg = {{"input", input}};
    cfg["hint"] = hint ? json(*hint) : json(nullptr);
    write_manifest(out, "fit", cfg, inputs);
    std::cout << "gap = " << format_real(fit.gap) << " +- " << format_real(fit.gap_err) << "  rho = " << format_real(fit.rho)
              << (fit.converged ? "" : "  [nonconverged]") << (fit.flat ? "  [flat]" : "") << "\n";
    return fit.converged ? kExitOk : kExitFit;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Spectral gap estimation from SGS time series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonFlags ising_f, mol_f;
    std::vector<std::string> geometry;
    std::vector<double> h3;
    std::optional<double> J1, ising_tau, mol_tau;
    auto* ising = app.add_subcommand("ising", "Ising chain/lattice gap sweep");
    add_common(ising, ising_f);
    ising->add_option("--geometry", geometry, "chain L | lattice R C")->expected(2, 3);
    ising->add_option("--h3", h3, "transverse field values");
    ising->add_option("--J1", J1, "coupling");
    ising->add_option("--tau", ising_tau, "thermalization time");

    std::vector<std::string> hams;
    auto* mol = app.add_subcommand("molecule", "molecular Hamiltonian gaps");
    add_common(mol, mol_f);
    mol->add_option("--hamiltonian", hams, "label=path (repeatable)");
    mol->add_option("--tau", mol_tau, "thermalization time");

    TargetFlags search_t, bench_t;
    std::string family = "exhaustive", search_out = ".", bench_out = ".";
    int show = 10;
    auto* search = app.add_subcommand("search", "rank Pauli observables by coherence amplitude");
    add_target(search, search_t);
    search->add_option("--family", family, "exhaustive | one_defect");
    search->add_option("--out", search_out, "output directory");
    search->add_option("--show", show, "ranked rows to print");

    auto* bench = app.add_subcommand("benchmark", "exact-diagonalization gap");
    add_target(bench, bench_t);
    bench->add_option("--out", bench_out, "output directory");

    std::string fit_input, fit_out = ".";
    std::optional<double> hint;
    auto* fit = app.add_subcommand("fit", "fit c + rho cos(w t + theta) to a t,mean,sigma CSV");
    fit->add_option("--input", fit_input, "CSV file")->required();
    fit->add_option("--hint", hint, "starting frequency");
    fit->add_option("--out", fit_out, "output directory");

    std::vector<std::string> storage = args;
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    try {
        if (*ising) return cmd_ising(ising_f, geometry, h3, J1, ising_tau);
        if (*mol) return cmd_molecule(mol_f, hams, mol_tau);
        if (*search) return cmd_search(search_t, family, search_out, show);
        if (*bench) return cmd_benchmark(bench_t, bench_out);
        if (*fit) return cmd_fit(fit_input, hint, fit_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace sgs
