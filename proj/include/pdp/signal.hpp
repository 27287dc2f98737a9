#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "pdp/geometry.hpp"

namespace pdp {

using Complex = std::complex<double>;
/// One time sample of the full array output, one entry per antenna.
using Snapshot = std::vector<Complex>;
/// Wrapped phase differences in radians, one entry per pair, each in [-pi, pi).
using PhaseDiffVector = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kNoiseFree = std::numeric_limits<double>::infinity();

inline constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

struct SourceParams {
    double theta = 0.0;        // radians, [-pi/2, pi/2]
    double amplitude = 1.0;    // linear, > 0
    double snr_db = kNoiseFree;  // A^2 / sigma^2 with sigma^2 the complex noise variance per element

    void validate() const;
    /// Total complex noise variance per element; 0 when noise-free.
    double noise_variance() const;
};

/// Per-trial RNG seed derived from (master seed, scenario id, trial index).
/// Streams do not depend on the order in which trials are evaluated.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t scenario_id, std::uint64_t trial);

/// Stable 64-bit id for a scenario name (FNV-1a).
std::uint64_t scenario_id(std::string_view name);

/// a(theta)_n = exp(-j pi r_n sin(theta)).
std::vector<Complex> steering_vector(const ArrayGeometry& geometry, double theta);

Snapshot synthesize_snapshot(const ArrayGeometry& geometry, const SourceParams& source,
                             std::uint64_t seed);

/// `count` consecutive snapshots drawn from one stream. The first equals
/// synthesize_snapshot(geometry, source, seed).
std::vector<Snapshot> synthesize_snapshots(const ArrayGeometry& geometry,
                                           const SourceParams& source, std::uint64_t seed,
                                           std::size_t count);

/// Integer q with phi - 2 pi q in [-pi, pi). Ties (phi an odd multiple of pi)
/// round upward, matching the half-open interval of wrap().
std::int64_t phase_wrap_count(double phi);

/// mod(phi + pi, 2 pi) - pi, always in [-pi, pi). Equals phi - 2 pi phase_wrap_count(phi).
double wrap(double phi);

/// Number of 2 pi wraps of the pair phase pi d sin(theta).
std::int64_t wrap_count(double spacing, double theta);

/// psi_m = angle(x_u conj(x_v)) for every pair m = (u, v).
PhaseDiffVector measure_wpd(std::span<const Complex> snapshot, const PairSet& pairs);

/// Multi-snapshot variant: angle of the summed pair products.
PhaseDiffVector measure_wpd(std::span<const Snapshot> snapshots, const PairSet& pairs);

}  // namespace pdp
