#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgslab/pauli.hpp"

namespace sgs {

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> sigmas;

    std::size_t size() const { return times.size(); }
    void validate() const;
    std::string to_csv() const;  // "t,mean,sigma"
    static TimeSeries parse_csv(const std::string& text);
};

constexpr double kSigmaFloor = 1e-4;

struct GridResult {
    std::vector<double> candidates;  // best first, at most 3
    std::vector<double> candidate_chi2;
    double chi2_constant = 0.0;
    bool significant = false;
    double omega_lo = 0.0, omega_hi = 0.0, step = 0.0;
};

// Linearized least squares c + A cos wt + B sin wt on a frequency grid.
GridResult frequency_grid_search(const TimeSeries& s);

struct FitResult {
    double offset = 0.0, rho = 0.0, gap = 0.0, theta = 0.0;
    double offset_err = 0.0, rho_err = 0.0, gap_err = 0.0, theta_err = 0.0;
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // order: offset, rho, gap, theta
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
    bool converged = false;
    bool flat = false;  // rho < 2 sigma_rho
    double start_omega = 0.0;
    bool grid_significant = false;

    double model(double t) const;
};

// Weighted fit of c + rho cos(w t + theta); multi-start from the grid unless a hint is given.
FitResult fit_gap(const TimeSeries& s, std::optional<double> freq_hint = std::nullopt);

nlohmann::json to_json(const FitResult& f);

}  // namespace sgs
