#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "pdp/geometry.hpp"
#include "pdp/signal.hpp"

namespace pdp {

/// Angular interval swept while tracing, in radians.
struct ThetaRange {
    double min = -kPi / 2;
    double max = kPi / 2;

    static ThetaRange degrees(double lo, double hi) { return {deg_to_rad(lo), deg_to_rad(hi)}; }
    void validate() const;
    bool operator==(const ThetaRange&) const = default;
};

/// sin(theta) interval covered by one traced line.
struct SegmentBounds {
    double sin_start = 0.0;
    double sin_end = 0.0;
    double width() const { return sin_end - sin_start; }
};

/// psi - (d^T psi / |d|^2) d: the point where the line through psi along d meets
/// the hyperplane d^T x = 0.
std::vector<double> project(std::span<const double> psi, std::span<const double> d);

/// Signed distance d^T psi / |d| from psi to the hyperplane d^T x = 0.
double hyperplane_distance(std::span<const double> psi, std::span<const double> d);

/// Closed-form line count for the full [-90, 90] degree sweep,
/// 2 * sum_i ceil((d_i - 1) / 2) + 1, counting coincident wraps separately.
std::size_t count_lines_formula(const PairSet& pairs);

/// The offline wrapped phase-difference pattern: K parallel lines, each with a
/// projection point p_k on the hyperplane d^T x = 0 and an unwrapping vector
/// h_k = 2 pi q_k. Immutable once built.
class WpdpModel {
public:
    /// Checks every structural invariant; used by the tracer and the file loader.
    WpdpModel(ArrayGeometry geometry, PairSet pairs, ThetaRange range,
              std::vector<std::int64_t> wrap_counts, std::vector<double> points,
              std::vector<SegmentBounds> segments);

    const ArrayGeometry& geometry() const { return geometry_; }
    const PairSet& pairs() const { return pairs_; }
    std::span<const double> spacings() const { return pairs_.spacings(); }
    std::span<const double> unit_direction() const { return unit_dir_; }
    double spacing_norm_squared() const { return norm2_; }
    const ThetaRange& theta_range() const { return range_; }

    std::size_t line_count() const { return segments_.size(); }
    std::size_t dimension() const { return pairs_.size(); }

    /// p_k, length M.
    std::span<const double> projection_point(std::size_t k) const;
    /// q_k = h_k / (2 pi), length M.
    std::span<const std::int64_t> wrap_counts(std::size_t k) const;
    /// h_k = 2 pi q_k.
    std::vector<double> unwrap_vector(std::size_t k) const;
    const SegmentBounds& segment(std::size_t k) const { return segments_.at(k); }
    std::span<const SegmentBounds> segments() const { return segments_; }

    /// Row-major K x M storage of all projection points.
    std::span<const double> projection_points() const { return points_; }

private:
    ArrayGeometry geometry_;
    PairSet pairs_;
    ThetaRange range_;
    std::vector<double> unit_dir_;
    double norm2_ = 0.0;
    std::vector<std::int64_t> wrap_counts_;
    std::vector<double> points_;
    std::vector<SegmentBounds> segments_;
};

/// Traces the pattern from range.min upward. Every wrap event opens a new line,
/// so coincident wraps yield zero-length lines.
WpdpModel trace_wpdp(const ArrayGeometry& geometry, const PairSet& pairs,
                     ThetaRange range = {});

struct AmbiguityReport {
    std::vector<std::pair<std::size_t, std::size_t>> collisions;  // k < k'
    double min_distance = 0.0;  // +inf when K == 1
};

/// Line pairs whose projection points are closer than `tol`.
AmbiguityReport detect_ambiguity(const WpdpModel& model, double tol);

inline constexpr int kModelFormatVersion = 1;

void save_model(const WpdpModel& model, std::ostream& out);
WpdpModel load_model(std::istream& in);

/// Plot-ready table: segment_id, sin_theta_start, sin_theta_end, psi_1..psi_M
/// (line start point), p_1..p_M.
void write_segments_csv(const WpdpModel& model, std::ostream& out);

}  // namespace pdp
