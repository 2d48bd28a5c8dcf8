#include "sgslab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sgslab/hamiltonians.hpp"
#include "sgslab/spectra.hpp"

namespace sgs {

void TimeSeries::validate() const {
    if (values.size() != times.size() || sigmas.size() != times.size())
        throw Error("time series: column lengths differ");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || !std::isfinite(values[k]) || !std::isfinite(sigmas[k]))
            throw Error("time series: non-finite entry at row " + std::to_string(k + 1));
        if (sigmas[k] < 0.0) throw Error("time series: negative sigma at row " + std::to_string(k + 1));
        if (k && !(times[k] > times[k - 1])) throw Error("time series: times not strictly increasing");
    }
}

std::string TimeSeries::to_csv() const {
    std::string out = "t,mean,sigma\n";
    for (std::size_t k = 0; k < times.size(); ++k)
        out += format_real(times[k]) + "," + format_real(values[k]) + "," + format_real(sigmas[k]) + "\n";
    return out;
}

TimeSeries TimeSeries::parse_csv(const std::string& text) {
    TimeSeries s;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("t,", 0) == 0) continue;
        std::vector<double> cols;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || *end != '\0') throw Error("csv line " + std::to_string(line_no) + ": bad number");
            cols.push_back(v);
        }
        if (cols.size() != 3) throw Error("csv line " + std::to_string(line_no) + ": expected t,mean,sigma");
        s.times.push_back(cols[0]);
        s.values.push_back(cols[1]);
        s.sigmas.push_back(cols[2]);
    }
    s.validate();
    return s;
}

double FitResult::model(double t) const { return offset + rho * std::cos(gap * t + theta); }

namespace {

std::vector<double> weights(const TimeSeries& s) {
    std::vector<double> w(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) w[k] = 1.0 / std::max(s.sigmas[k], kSigmaFloor);
    return w;
}

struct Linear {
    double c = 0, a = 0, b = 0, chi2 = 0;
};

Linear linear_fit(const TimeSeries& s, const std::vector<double>& w, double omega) {
    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd m(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = s.times[k];
        m(k, 0) = w[k];
        m(k, 1) = w[k] * std::cos(omega * t);
        m(k, 2) = w[k] * std::sin(omega * t);
        y[k] = w[k] * s.values[k];
    }
    const Eigen::VectorXd x = m.colPivHouseholderQr().solve(y);
    return {x[0], x[1], x[2], (m * x - y).squaredNorm()};
}

double constant_chi2(const TimeSeries& s, const std::vector<double>& w) {
    double sw = 0, swy = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        sw += w[k] * w[k];
        swy += w[k] * w[k] * s.values[k];
    }
    const double c = swy / sw;
    double chi2 = 0;
    for (std::size_t k = 0; k < s.size(); ++k) chi2 += std::pow(w[k] * (s.values[k] - c), 2);
    return chi2;
}

using Vec4 = Eigen::Vector4d;

struct LmOutcome {
    Vec4 p;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
    Eigen::MatrixXd jac;
};

void residuals(const TimeSeries& s, const std::vector<double>& w, const Vec4& p, Eigen::VectorXd& r,
               Eigen::MatrixXd* jac) {
    const auto n = static_cast<Eigen::Index>(s.size());
    r.resize(n);
    if (jac) jac->resize(n, 4);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = s.times[k];
        const double arg = p[2] * t + p[3];
        const double cs = std::cos(arg), sn = std::sin(arg);
        r[k] = w[k] * (p[0] + p[1] * cs - s.values[k]);
        if (jac) {
            (*jac)(k, 0) = w[k];
            (*jac)(k, 1) = w[k] * cs;
            (*jac)(k, 2) = -w[k] * p[1] * t * sn;
            (*jac)(k, 3) = -w[k] * p[1] * sn;
        }
    }
}

LmOutcome levenberg_marquardt(const TimeSeries& s, const std::vector<double>& w, Vec4 p) {
    constexpr int kMaxIter = 500;
    Eigen::VectorXd r, r_new;
    Eigen::MatrixXd jac;
    residuals(s, w, p, r, &jac);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    LmOutcome out;
    int it = 0;
    for (; it < kMaxIter; ++it) {
        if (cost == 0.0) {
            out.converged = true;
            break;
        }
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Vec4 g = jac.transpose() * r;
        bool accepted = false;
        Vec4 step = Vec4::Zero();
        for (int tries = 0; tries < 60 && !accepted; ++tries) {
            Eigen::Matrix4d a = jtj;
            for (int d = 0; d < 4; ++d) a(d, d) += lambda * std::max(jtj(d, d), 1e-12);
            step = a.ldlt().solve(-g);
            const Vec4 trial = p + step;
            residuals(s, w, trial, r_new, nullptr);
            const double c_new = r_new.squaredNorm();
            if (std::isfinite(c_new) && c_new <= cost) {
                const double drop = cost - c_new;
                p = trial;
                r = r_new;
                cost = c_new;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                residuals(s, w, p, r, &jac);
                const bool small_step = step.norm() <= 1e-12 * (p.norm() + 1e-12);
                if (drop <= 1e-14 * cost || small_step) out.converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) {
            // no downhill step at any damping: stationary point
            out.converged = g.norm() <= 1e-6 * std::max(1.0, std::sqrt(cost));
            break;
        }
        if (out.converged) break;
    }
    out.p = p;
    out.cost = cost;
    out.iterations = it + 1;
    out.jac = jac;
    return out;
}

}  // namespace

GridResult frequency_grid_search(const TimeSeries& s) {
    s.validate();
    if (s.size() < 5) throw Error("frequency_grid_search: need at least 5 points");
    const double span = s.times.back() - s.times.front();
    double min_dt = span;
    for (std::size_t k = 1; k < s.size(); ++k) min_dt = std::min(min_dt, s.times[k] - s.times[k - 1]);
    if (!(span > 0.0)) throw Error("frequency_grid_search: empty time window");
    GridResult g;
    const double pi = std::numbers::pi;
    g.omega_lo = pi / (2.0 * span);
    g.omega_hi = pi / min_dt;
    g.step = pi / (8.0 * span);
    const auto w = weights(s);
    g.chi2_constant = constant_chi2(s, w);

    std::vector<double> om, chi;
    for (int k = 0;; ++k) {
        const double o = g.omega_lo + k * g.step;
        if (o > g.omega_hi + 1e-12 * g.omega_hi) break;
        om.push_back(o);
        chi.push_back(linear_fit(s, w, o).chi2);
    }
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k + 1 < om.size(); ++k)
        if (chi[k] <= chi[k - 1] && chi[k] <= chi[k + 1]) idx.push_back(k);
    if (idx.empty()) idx.push_back(static_cast<std::size_t>(std::min_element(chi.begin(), chi.end()) - chi.begin()));
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return chi[a] < chi[b]; });
    if (idx.size() > 3) idx.resize(3);
    for (auto k : idx) {
        g.candidates.push_back(om[k]);
        g.candidate_chi2.push_back(chi[k]);
    }
    const double best = g.candidate_chi2.front();
    g.significant = best < 0.5 * g.chi2_constant && g.chi2_constant - best > 9.0;
    return g;
}

FitResult fit_gap(const TimeSeries& s, std::optional<double> freq_hint) {
    s.validate();
    if (s.size() < 5) throw Error("fit_gap: need at least 5 points");
    const auto w = weights(s);
    std::vector<double> starts;
    FitResult best;
    if (freq_hint) {
        starts.push_back(*freq_hint);
    } else {
        const GridResult g = frequency_grid_search(s);
        starts = g.candidates;
        best.grid_significant = g.significant;
    }
    const bool significant = best.grid_significant;

    bool have = false;
    LmOutcome chosen;
    double chosen_start = 0.0;
    for (double o : starts) {
        const Linear lin = linear_fit(s, w, o);
        Vec4 p0(lin.c, std::hypot(lin.a, lin.b), o, std::atan2(-lin.b, lin.a));
        LmOutcome r = levenberg_marquardt(s, w, p0);
        if (!r.p.allFinite()) continue;
        const bool better = !have || (r.converged && !chosen.converged) ||
                            (r.converged == chosen.converged && r.cost < chosen.cost);
        if (better) {
            chosen = r;
            chosen_start = o;
            have = true;
        }
    }
    if (!have) {
        best.converged = false;
        return best;
    }

    Vec4 p = chosen.p;
    const int n = static_cast<int>(s.size());
    best.dof = n - 4;
    best.chi2 = chosen.cost;
    best.reduced_chi2 = best.dof > 0 ? chosen.cost / best.dof : 0.0;
    best.iterations = chosen.iterations;
    best.converged = chosen.converged;
    best.start_omega = chosen_start;
    best.grid_significant = significant;

    const Eigen::Matrix4d jtj = chosen.jac.transpose() * chosen.jac;
    Eigen::Matrix4d cov = jtj.completeOrthogonalDecomposition().pseudoInverse();
    cov *= best.dof > 0 ? best.reduced_chi2 : 1.0;

    // canonical signs: w > 0, rho >= 0
    Vec4 flip = Vec4::Ones();
    if (p[2] < 0.0) {
        p[2] = -p[2];
        p[3] = -p[3];
        flip[2] = -flip[2];
        flip[3] = -flip[3];
    }
    if (p[1] < 0.0) {
        p[1] = -p[1];
        p[3] += std::numbers::pi;
        flip[1] = -flip[1];
    }
    cov = flip.asDiagonal() * cov * flip.asDiagonal();
    p[3] = wrap_angle(p[3]);

    best.offset = p[0];
    best.rho = p[1];
    best.gap = p[2];
    best.theta = p[3];
    best.covariance = cov;
    best.offset_err = std::sqrt(std::max(0.0, cov(0, 0)));
    best.rho_err = std::sqrt(std::max(0.0, cov(1, 1)));
    best.gap_err = std::sqrt(std::max(0.0, cov(2, 2)));
    best.theta_err = std::sqrt(std::max(0.0, cov(3, 3)));
    // a free-frequency fit always finds some amplitude in pure noise; trust the grid test there
    best.flat = best.rho < 2.0 * best.rho_err || (!freq_hint && !significant);
    return best;
}

nlohmann::json to_json(const FitResult& f) {
    nlohmann::json cov = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < 4; ++c) row.push_back(f.covariance(r, c));
        cov.push_back(row);
    }
    return {
        {"gap", f.gap},
        {"gap_err", f.gap_err},
        {"rho", f.rho},
        {"rho_err", f.rho_err},
        {"theta", f.theta},
        {"theta_err", f.theta_err},
        {"offset", f.offset},
        {"offset_err", f.offset_err},
        {"covariance_order", {"offset", "rho", "gap", "theta"}},
        {"covariance", cov},
        {"chi2", f.chi2},
        {"reduced_chi2", f.reduced_chi2},
        {"dof", f.dof},
        {"iterations", f.iterations},
        {"converged", f.converged},
        {"flat", f.flat},
        {"start_omega", f.start_omega},
        {"grid_significant", f.grid_significant},
    };
}

}  // namespace sgs
