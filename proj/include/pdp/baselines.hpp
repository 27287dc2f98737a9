#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "pdp/geometry.hpp"
#include "pdp/signal.hpp"

namespace pdp {

/// Two-stage search grid, in degrees: a coarse sweep over [coarse_lo, coarse_hi]
/// followed by a fine sweep of +-fine_halfwidth around the coarse winner.
struct GridSpec {
    double coarse_lo = -70.0;
    double coarse_hi = 70.0;
    double coarse_step = 0.2;
    double fine_halfwidth = 0.1;
    double fine_step = 0.01;

    void validate() const;
    std::size_t coarse_count() const;  // K_c
    std::size_t fine_count() const;    // K_f
    bool operator==(const GridSpec&) const = default;
};

/// Result of a grid-search estimator.
struct GridEstimate {
    double theta = 0.0;         // radians
    double coarse_theta = 0.0;  // radians, winner of the coarse stage
    double objective = 0.0;     // objective at theta
    double coarse_objective = 0.0;
};

/// Maximises |a(theta)^H x|^2, the single-source concentrated likelihood.
GridEstimate estimate_mle(std::span<const Complex> snapshot, const ArrayGeometry& geometry,
                          const GridSpec& grid = {});

/// Maximises 1 / |E_n^H a(theta)|^2 with E_n the noise subspace of x x^H.
GridEstimate estimate_music(std::span<const Complex> snapshot, const ArrayGeometry& geometry,
                            const GridSpec& grid = {}, std::size_t num_sources = 1);

enum class CrlbForm {
    as_printed,    // 1 / (2 pi^2 N S U sin(theta))
    conventional,  // 1 / (2 pi^2 N S U cos^2(theta)), for sensitivity checks only
};

/// Variance bound in rad^2. `snr_linear` is S = A^2 / sigma^2.
double crlb(const ArrayGeometry& geometry, double snr_linear, double theta,
            CrlbForm form = CrlbForm::as_printed);

/// U = (1/N) sum (r_n - mean(r))^2.
double position_spread(const ArrayGeometry& geometry);

enum class CostMethod { pdp, two_step, q2_order, em_esprit, music, mle };

CostMethod parse_cost_method(const std::string& name);
std::string to_string(CostMethod method);

struct OpCountParams {
    std::optional<std::int64_t> antennas;          // N
    std::optional<std::int64_t> lines;             // K
    std::optional<std::int64_t> coarse_points;     // K_c
    std::optional<std::int64_t> fine_points;       // K_f
    std::optional<std::int64_t> iterations;        // K_i
    std::optional<std::int64_t> virtual_antennas;  // N_v
};

/// Online multiplication count per method, rounded to the nearest integer.
std::int64_t op_count(CostMethod method, const OpCountParams& params);

}  // namespace pdp
