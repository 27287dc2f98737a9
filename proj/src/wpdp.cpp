#include "pdp/wpdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <json.hpp>

namespace pdp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(std::span<const double> d) {
    const double n2 = dot(d, d);
    if (!(n2 > 0.0)) throw ValidationError("spacing vector has zero length");
    return n2;
}

void check_lengths(std::span<const double> psi, std::span<const double> d) {
    if (psi.size() != d.size()) {
        throw ValidationError("vector length " + std::to_string(psi.size()) +
                              " does not match spacing vector length " + std::to_string(d.size()));
    }
}

}  // namespace

void ThetaRange::validate() const {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
        throw ValidationError("theta range is empty");
    }
    // Allow a few ulps so that degree-specified +-90 survives the conversion.
    constexpr double limit = kPi / 2 + 1e-12;
    if (min < -limit || max > limit) throw ValidationError("theta range exceeds [-90, 90] degrees");
}

std::vector<double> project(std::span<const double> psi, std::span<const double> d) {
    check_lengths(psi, d);
    const double scale = dot(d, psi) / squared_norm(d);
    std::vector<double> p(psi.begin(), psi.end());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= scale * d[i];
    return p;
}

double hyperplane_distance(std::span<const double> psi, std::span<const double> d) {
    check_lengths(psi, d);
    return dot(d, psi) / std::sqrt(squared_norm(d));
}

std::size_t count_lines_formula(const PairSet& pairs) {
    std::size_t wraps = 0;
    for (double d : pairs.spacings()) {
        const double c = std::ceil((d - 1.0) / 2.0);
        if (c > 0.0) wraps += static_cast<std::size_t>(c);
    }
    return 2 * wraps + 1;
}

WpdpModel::WpdpModel(ArrayGeometry geometry, PairSet pairs, ThetaRange range,
                     std::vector<std::int64_t> wrap_counts, std::vector<double> points,
                     std::vector<SegmentBounds> segments)
    : geometry_(std::move(geometry)),
      pairs_(std::move(pairs)),
      range_(range),
      wrap_counts_(std::move(wrap_counts)),
      points_(std::move(points)),
      segments_(std::move(segments)) {
    range_.validate();
    if (pairs_.antenna_count() != geometry_.size()) {
        throw ValidationError("pair set was built for a different geometry");
    }
    const PairSet rebuilt(geometry_, {pairs_.pairs().begin(), pairs_.pairs().end()});
    if (!std::equal(rebuilt.spacings().begin(), rebuilt.spacings().end(),
                    pairs_.spacings().begin())) {
        throw ValidationError("pair spacings are inconsistent with the geometry");
    }
    const std::size_t m = pairs_.size();
    if (m < 2) throw ValidationError("phase-difference projection needs at least 2 pairs");
    const std::size_t k = segments_.size();
    if (k == 0) throw ValidationError("model has no lines");
    if (wrap_counts_.size() != k * m || points_.size() != k * m) {
        throw ValidationError("model tables do not have K x M entries");
    }

    const auto d = pairs_.spacings();
    norm2_ = squared_norm(d);
    const double norm = std::sqrt(norm2_);
    for (double di : d) unit_dir_.push_back(di / norm);

    for (std::size_t line = 0; line < k; ++line) {
        const auto p = projection_point(line);
        if (std::abs(dot(d, p)) > 1e-9 * norm * kPi) {
            throw ValidationError("projection point " + std::to_string(line) +
                                  " is off the hyperplane");
        }
        if (line > 0) {
            for (std::size_t i = 0; i < m; ++i) {
                if (wrap_counts_[line * m + i] < wrap_counts_[(line - 1) * m + i]) {
                    throw ValidationError("unwrapping vectors must be nondecreasing along the trace");
                }
            }
        }
    }
}

std::span<const double> WpdpModel::projection_point(std::size_t k) const {
    const std::size_t m = pairs_.size();
    return std::span<const double>(points_).subspan(k * m, m);
}

std::span<const std::int64_t> WpdpModel::wrap_counts(std::size_t k) const {
    const std::size_t m = pairs_.size();
    return std::span<const std::int64_t>(wrap_counts_).subspan(k * m, m);
}

std::vector<double> WpdpModel::unwrap_vector(std::size_t k) const {
    std::vector<double> h;
    for (auto q : wrap_counts(k)) h.push_back(kTwoPi * static_cast<double>(q));
    return h;
}

WpdpModel trace_wpdp(const ArrayGeometry& geometry, const PairSet& pairs, ThetaRange range) {
    range.validate();
    const std::size_t m = pairs.size();
    if (m < 2) throw ValidationError("phase-difference projection needs at least 2 pairs");
    const auto d = pairs.spacings();

    const double s_min = std::max(-1.0, std::sin(range.min));
    const double s_max = std::min(1.0, std::sin(range.max));

    // Work in units of pi: coordinate i sits at d_i s - 2 q_i and wraps when
    // d_i s reaches 2 q_i + 1, so each break is located by a single division
    // instead of accumulating steps.
    std::vector<std::int64_t> q(m);
    for (std::size_t i = 0; i < m; ++i) {
        q[i] = static_cast<std::int64_t>(std::floor((d[i] * s_min + 1.0) / 2.0));
    }
    // psi + h lies on the line through the origin along d, so P psi = -P h.
    std::vector<double> neg_h(m);

    std::vector<std::int64_t> counts;
    std::vector<double> points;
    std::vector<SegmentBounds> segments;
    double s = s_min;
    for (;;) {
        counts.insert(counts.end(), q.begin(), q.end());
        for (std::size_t i = 0; i < m; ++i) neg_h[i] = -kTwoPi * static_cast<double>(q[i]);
        const auto p = project(neg_h, d);
        points.insert(points.end(), p.begin(), p.end());

        std::size_t next = 0;
        double next_break = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            const double b = (2.0 * static_cast<double>(q[i]) + 1.0) / d[i];
            if (b < next_break) {
                next_break = b;
                next = i;
            }
        }
        next_break = std::max(next_break, s);
        if (!(next_break < s_max)) {
            segments.push_back({s, s_max});
            break;
        }
        segments.push_back({s, next_break});
        s = next_break;
        ++q[next];
    }
    return WpdpModel(geometry, pairs, range, std::move(counts), std::move(points),
                     std::move(segments));
}

AmbiguityReport detect_ambiguity(const WpdpModel& model, double tol) {
    AmbiguityReport report;
    report.min_distance = std::numeric_limits<double>::infinity();
    const std::size_t k = model.line_count();
    for (std::size_t a = 0; a < k; ++a) {
        const auto pa = model.projection_point(a);
        for (std::size_t b = a + 1; b < k; ++b) {
            const auto pb = model.projection_point(b);
            double d2 = 0.0;
            for (std::size_t i = 0; i < pa.size(); ++i) d2 += (pa[i] - pb[i]) * (pa[i] - pb[i]);
            const double dist = std::sqrt(d2);
            report.min_distance = std::min(report.min_distance, dist);
            if (dist < tol) report.collisions.emplace_back(a, b);
        }
    }
    return report;
}

// --- persistence -----------------------------------------------------------

void save_model(const WpdpModel& model, std::ostream& out) {
    using nlohmann::json;
    json pairs = json::array();
    for (const auto& [u, v] : model.pairs().pairs()) pairs.push_back({u, v});
    json points = json::array();
    json counts = json::array();
    json bounds = json::array();
    for (std::size_t k = 0; k < model.line_count(); ++k) {
        const auto p = model.projection_point(k);
        const auto q = model.wrap_counts(k);
        points.push_back(std::vector<double>(p.begin(), p.end()));
        counts.push_back(std::vector<std::int64_t>(q.begin(), q.end()));
        bounds.push_back({model.segment(k).sin_start, model.segment(k).sin_end});
    }
    const auto positions = model.geometry().positions();
    const auto d = model.spacings();
    json doc = {
        {"format", "pdp-wpdp"},
        {"version", kModelFormatVersion},
        {"geometry", std::vector<double>(positions.begin(), positions.end())},
        {"pairs", pairs},
        {"d", std::vector<double>(d.begin(), d.end())},
        {"theta_range", {model.theta_range().min, model.theta_range().max}},
        {"K", model.line_count()},
        {"projection_points", points},
        {"wrap_counts", counts},
        {"segment_bounds", bounds},
    };
    out << doc.dump(1) << '\n';
}

WpdpModel load_model(std::istream& in) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format") != "pdp-wpdp") throw ValidationError("not a pdp-wpdp model file");
        const int version = doc.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw ValidationError("unsupported model version " + std::to_string(version));
        }
        ArrayGeometry geometry(doc.at("geometry").get<std::vector<double>>());
        std::vector<AntennaPair> pair_list;
        for (const auto& p : doc.at("pairs")) {
            pair_list.push_back({p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>()});
        }
        PairSet pairs(geometry, std::move(pair_list));
        const auto stored_d = doc.at("d").get<std::vector<double>>();
        if (!std::equal(stored_d.begin(), stored_d.end(), pairs.spacings().begin(),
                        pairs.spacings().end())) {
            throw ValidationError("stored spacing vector does not match geometry and pairs");
        }
        const auto range = doc.at("theta_range").get<std::vector<double>>();
        if (range.size() != 2) throw ValidationError("theta_range must have 2 entries");
        const auto k = doc.at("K").get<std::size_t>();
        const std::size_t m = pairs.size();

        std::vector<double> points;
        std::vector<std::int64_t> counts;
        std::vector<SegmentBounds> segments;
        const auto& jp = doc.at("projection_points");
        const auto& jq = doc.at("wrap_counts");
        const auto& jb = doc.at("segment_bounds");
        if (jp.size() != k || jq.size() != k || jb.size() != k) {
            throw ValidationError("model tables do not have K rows");
        }
        for (std::size_t line = 0; line < k; ++line) {
            const auto p = jp.at(line).get<std::vector<double>>();
            const auto q = jq.at(line).get<std::vector<std::int64_t>>();
            if (p.size() != m || q.size() != m) throw ValidationError("model row has wrong width");
            points.insert(points.end(), p.begin(), p.end());
            counts.insert(counts.end(), q.begin(), q.end());
            segments.push_back({jb.at(line).at(0).get<double>(), jb.at(line).at(1).get<double>()});
        }
        return WpdpModel(std::move(geometry), std::move(pairs), {range[0], range[1]},
                         std::move(counts), std::move(points), std::move(segments));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed model file: ") + e.what());
    }
}

void write_segments_csv(const WpdpModel& model, std::ostream& out) {
    const std::size_t m = model.dimension();
    const auto d = model.spacings();
    out << "segment_id,sin_theta_start,sin_theta_end";
    for (std::size_t i = 1; i <= m; ++i) out << ",psi_" << i;
    for (std::size_t i = 1; i <= m; ++i) out << ",p_" << i;
    out << '\n';
    const auto old_precision = out.precision(17);
    for (std::size_t k = 0; k < model.line_count(); ++k) {
        const auto& seg = model.segment(k);
        const auto q = model.wrap_counts(k);
        out << k << ',' << seg.sin_start << ',' << seg.sin_end;
        for (std::size_t i = 0; i < m; ++i) {
            out << ',' << kPi * (d[i] * seg.sin_start - 2.0 * static_cast<double>(q[i]));
        }
        for (double p : model.projection_point(k)) out << ',' << p;
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace pdp
