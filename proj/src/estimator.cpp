#include "pdp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pdp {

NearestLine nearest_projection_point(std::span<const double> p_hat, const WpdpModel& model) {
    const std::size_t m = model.dimension();
    if (p_hat.size() != m) {
        throw ValidationError("projected vector has length " + std::to_string(p_hat.size()) +
                              ", model expects " + std::to_string(m));
    }
    const auto points = model.projection_points();
    NearestLine best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; k < model.line_count(); ++k) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double e = points[k * m + i] - p_hat[i];
            d2 += e * e;
        }
        if (d2 < best.distance) best = {k, d2};
    }
    best.distance = std::sqrt(best.distance);
    return best;
}

PdpSolution solve_pdp(std::span<const double> psi_hat, const WpdpModel& model) {
    const std::size_t m = model.dimension();
    if (psi_hat.size() != m) {
        throw ValidationError("phase-difference vector has length " +
                              std::to_string(psi_hat.size()) + ", model expects " +
                              std::to_string(m));
    }
    const auto d = model.spacings();
    const double norm2 = model.spacing_norm_squared();

    double along = 0.0;  // d^T psi_hat / |d|^2
    for (std::size_t i = 0; i < m; ++i) along += d[i] * psi_hat[i];
    along /= norm2;

    PdpSolution out;
    out.projected.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.projected[i] = psi_hat[i] - along * d[i];

    const auto nearest = nearest_projection_point(out.projected, model);
    const auto p = model.projection_point(nearest.line);
    const auto q = model.wrap_counts(nearest.line);

    out.debiased.resize(m);
    out.unwrapped.resize(m);
    double readout = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        out.debiased[i] = p[i] + along * d[i];
        out.unwrapped[i] = out.debiased[i] + kTwoPi * static_cast<double>(q[i]);
        readout += d[i] * out.unwrapped[i];
    }

    auto& est = out.estimate;
    est.line = nearest.line;
    est.residual = nearest.distance;
    // Least-squares readout along d; every coordinate of phi_hat gives the same value.
    est.sin_theta = readout / (kPi * norm2);
    est.clamped = est.sin_theta < -1.0 || est.sin_theta > 1.0;
    est.theta = std::asin(std::clamp(est.sin_theta, -1.0, 1.0));
    return out;
}

}  // namespace pdp
