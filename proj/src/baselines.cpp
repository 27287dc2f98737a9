#include "pdp/baselines.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace pdp {

namespace {

// Evaluates `objective(theta)` over the coarse grid, then over the fine window
// around the coarse winner. Lowest index wins ties in both stages.
template <typename Objective>
GridEstimate two_stage_search(const GridSpec& grid, Objective&& objective) {
    grid.validate();
    GridEstimate best;
    best.coarse_objective = -std::numeric_limits<double>::infinity();
    const std::size_t kc = grid.coarse_count();
    for (std::size_t i = 0; i < kc; ++i) {
        const double theta = deg_to_rad(grid.coarse_lo + static_cast<double>(i) * grid.coarse_step);
        const double value = objective(theta);
        if (value > best.coarse_objective) {
            best.coarse_objective = value;
            best.coarse_theta = theta;
        }
    }

    const double center_deg = rad_to_deg(best.coarse_theta);
    const auto half = static_cast<std::int64_t>((grid.fine_count() - 1) / 2);
    best.theta = best.coarse_theta;
    best.objective = best.coarse_objective;
    for (std::int64_t j = -half; j <= half; ++j) {
        if (j == 0) continue;  // the coarse winner is already the incumbent
        const double deg = center_deg + static_cast<double>(j) * grid.fine_step;
        if (deg < -90.0 || deg > 90.0) continue;
        const double theta = deg_to_rad(deg);
        const double value = objective(theta);
        if (value > best.objective || (value == best.objective && theta < best.theta)) {
            best.objective = value;
            best.theta = theta;
        }
    }
    return best;
}

void check_snapshot(std::span<const Complex> snapshot, const ArrayGeometry& geometry) {
    if (snapshot.size() != geometry.size()) {
        throw ValidationError("snapshot has " + std::to_string(snapshot.size()) +
                              " entries, geometry has " + std::to_string(geometry.size()));
    }
}

std::int64_t require(const std::optional<std::int64_t>& value, const char* name) {
    if (!value) throw ValidationError(std::string("op count needs parameter ") + name);
    if (*value < 0) throw ValidationError(std::string("op count parameter ") + name + " is negative");
    return *value;
}

// Rounds num / den (den > 0, num >= 0) to the nearest integer, halves up.
std::int64_t round_ratio(std::int64_t num, std::int64_t den) { return (2 * num + den) / (2 * den); }

}  // namespace

void GridSpec::validate() const {
    if (!(coarse_step > 0.0) || !(fine_step > 0.0)) throw ValidationError("grid steps must be positive");
    if (fine_step > coarse_step) throw ValidationError("fine step must not exceed the coarse step");
    if (!(fine_halfwidth >= 0.0)) throw ValidationError("fine half-width must be non-negative");
    if (!(coarse_lo <= coarse_hi)) throw ValidationError("coarse grid bounds are reversed");
    if (coarse_lo < -90.0 || coarse_hi > 90.0) throw ValidationError("grid exceeds [-90, 90] degrees");
}

std::size_t GridSpec::coarse_count() const {
    return static_cast<std::size_t>(std::llround((coarse_hi - coarse_lo) / coarse_step)) + 1;
}

std::size_t GridSpec::fine_count() const {
    return 2 * static_cast<std::size_t>(std::llround(fine_halfwidth / fine_step)) + 1;
}

GridEstimate estimate_mle(std::span<const Complex> snapshot, const ArrayGeometry& geometry,
                          const GridSpec& grid) {
    check_snapshot(snapshot, geometry);
    const auto r = geometry.positions();
    return two_stage_search(grid, [&](double theta) {
        const double s = std::sin(theta);
        Complex acc(0.0, 0.0);
        // conj(a_n) x_n with a_n = exp(-j pi r_n s)
        for (std::size_t n = 0; n < r.size(); ++n) acc += std::polar(1.0, kPi * r[n] * s) * snapshot[n];
        return std::norm(acc);
    });
}

GridEstimate estimate_music(std::span<const Complex> snapshot, const ArrayGeometry& geometry,
                            const GridSpec& grid, std::size_t num_sources) {
    check_snapshot(snapshot, geometry);
    const auto n = static_cast<Eigen::Index>(geometry.size());
    if (num_sources < 1 || num_sources >= geometry.size()) {
        throw ValidationError("MUSIC needs 1 <= num_sources < N (noise subspace would be empty)");
    }
    const Eigen::Map<const Eigen::VectorXcd> x(snapshot.data(), n);
    const Eigen::MatrixXcd covariance = x * x.adjoint();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(covariance);
    if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    // Eigenvalues are ascending: the first N - num_sources vectors span the noise subspace.
    const Eigen::MatrixXcd noise =
        eig.eigenvectors().leftCols(n - static_cast<Eigen::Index>(num_sources));

    const auto r = geometry.positions();
    Eigen::VectorXcd a(n);
    return two_stage_search(grid, [&](double theta) {
        const double s = std::sin(theta);
        for (Eigen::Index i = 0; i < n; ++i) a[i] = std::polar(1.0, -kPi * r[static_cast<std::size_t>(i)] * s);
        const double den = (noise.adjoint() * a).squaredNorm();
        return den > 0.0 ? 1.0 / den : std::numeric_limits<double>::infinity();
    });
}

double position_spread(const ArrayGeometry& geometry) {
    const auto r = geometry.positions();
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (double v : r) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(r.size());
}

double crlb(const ArrayGeometry& geometry, double snr_linear, double theta, CrlbForm form) {
    if (!(snr_linear > 0.0) || !std::isfinite(snr_linear)) {
        throw ValidationError("CRLB needs a positive, finite SNR");
    }
    const double angular = form == CrlbForm::as_printed ? std::sin(theta)
                                                        : std::cos(theta) * std::cos(theta);
    if (!(angular > 0.0)) {
        throw ValidationError(form == CrlbForm::as_printed
                                  ? "CRLB (as printed) is undefined for sin(theta) <= 0"
                                  : "CRLB is undefined at theta = +-90 degrees");
    }
    const double n = static_cast<double>(geometry.size());
    return 1.0 / (2.0 * kPi * kPi * n * snr_linear * position_spread(geometry) * angular);
}

CostMethod parse_cost_method(const std::string& name) {
    if (name == "pdp") return CostMethod::pdp;
    if (name == "two-step") return CostMethod::two_step;
    if (name == "2q-order") return CostMethod::q2_order;
    if (name == "em-esprit") return CostMethod::em_esprit;
    if (name == "music") return CostMethod::music;
    if (name == "mle") return CostMethod::mle;
    throw ValidationError("unknown method '" + name +
                          "' (expected pdp|two-step|2q-order|em-esprit|music|mle)");
}

std::string to_string(CostMethod method) {
    switch (method) {
        case CostMethod::pdp: return "pdp";
        case CostMethod::two_step: return "two-step";
        case CostMethod::q2_order: return "2q-order";
        case CostMethod::em_esprit: return "em-esprit";
        case CostMethod::music: return "music";
        case CostMethod::mle: return "mle";
    }
    return "pdp";
}

std::int64_t op_count(CostMethod method, const OpCountParams& params) {
    switch (method) {
        case CostMethod::pdp: {
            const auto n = require(params.antennas, "N");
            const auto k = require(params.lines, "K");
            return (k + 6) * (n * (n - 1) / 2);
        }
        case CostMethod::two_step: {
            const auto n = require(params.antennas, "N");
            return (require(params.coarse_points, "K_c") + 1) * n;
        }
        case CostMethod::q2_order:
            return require(params.antennas, "N");
        case CostMethod::em_esprit: {
            const auto ki = require(params.iterations, "K_i");
            const auto nv = require(params.virtual_antennas, "N_v");
            return round_ratio(ki * (10 * nv * nv + 16 * nv * nv * nv), 5);
        }
        case CostMethod::music: {
            const auto n = require(params.antennas, "N");
            const auto kc = require(params.coarse_points, "K_c");
            const auto kf = require(params.fine_points, "K_f");
            return round_ratio(32 * n * n * n + (10 * kc + 10 * kf + 5 * n) * n * (n + 1), 10);
        }
        case CostMethod::mle: {
            const auto n = require(params.antennas, "N");
            const auto kc = require(params.coarse_points, "K_c");
            const auto kf = require(params.fine_points, "K_f");
            return round_ratio((2 * kc + 2 * kf + 1) * n * (n + 1), 2);
        }
    }
    return 0;
}

}  // namespace pdp
