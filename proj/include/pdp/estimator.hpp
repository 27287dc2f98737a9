#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pdp/wpdp.hpp"

namespace pdp {

/// Result of the grid-less phase-difference projection estimator.
struct DoaEstimate {
    double theta = 0.0;        // radians, [-pi/2, pi/2]
    double sin_theta = 0.0;    // unclamped readout
    std::size_t line = 0;      // selected WPDP line, zero-based
    double residual = 0.0;     // |p_line - p_hat|
    bool clamped = false;      // sin_theta fell outside [-1, 1]
};

/// Estimate plus the intermediate vectors, for diagnostics.
struct PdpSolution {
    DoaEstimate estimate;
    std::vector<double> projected;  // p_hat
    std::vector<double> debiased;   // psi_tilde = p_line + normal component of psi_hat
    std::vector<double> unwrapped;  // phi_hat = psi_tilde + h_line
};

struct NearestLine {
    std::size_t line = 0;
    double distance = 0.0;
};

/// argmin_k |p_k - p_hat|; lowest index wins ties.
NearestLine nearest_projection_point(std::span<const double> p_hat, const WpdpModel& model);

PdpSolution solve_pdp(std::span<const double> psi_hat, const WpdpModel& model);

inline DoaEstimate estimate_pdp(std::span<const double> psi_hat, const WpdpModel& model) {
    return solve_pdp(psi_hat, model).estimate;
}

}  // namespace pdp
