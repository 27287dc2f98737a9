#include "pdp/geometry.hpp"

#include <cmath>

namespace pdp {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

}  // namespace

ArrayGeometry::ArrayGeometry(std::vector<double> positions) : positions_(std::move(positions)) {
    if (positions_.size() < 2) {
        throw ValidationError("geometry needs at least 2 antennas, got " +
                              std::to_string(positions_.size()));
    }
    for (double p : positions_) {
        if (!std::isfinite(p)) throw ValidationError("geometry positions must be finite");
    }
    if (positions_.front() != 0.0) {
        throw ValidationError("first antenna position must be 0");
    }
    for (std::size_t n = 1; n < positions_.size(); ++n) {
        if (positions_[n] == positions_[n - 1]) {
            throw ValidationError("duplicate antenna position at index " + std::to_string(n));
        }
        if (positions_[n] < positions_[n - 1]) {
            throw ValidationError("antenna positions must be strictly increasing (index " +
                                  std::to_string(n) + ")");
        }
    }
}

ArrayGeometry make_geometry(std::vector<double> positions) {
    return ArrayGeometry(std::move(positions));
}

ArrayGeometry geometry_from_metric(std::span<const double> positions_m, double carrier_hz) {
    if (!(carrier_hz > 0.0)) throw ValidationError("carrier frequency must be positive");
    if (positions_m.empty()) throw ValidationError("no positions given");
    const double half_wavelength = 0.5 * kSpeedOfLight / carrier_hz;
    std::vector<double> normalized;
    normalized.reserve(positions_m.size());
    for (double p : positions_m) normalized.push_back((p - positions_m.front()) / half_wavelength);
    return ArrayGeometry(std::move(normalized));
}

PairMode parse_pair_mode(const std::string& text) {
    if (text == "all") return PairMode::all;
    if (text == "adjacent") return PairMode::adjacent;
    if (text == "explicit") return PairMode::explicit_list;
    throw ValidationError("unknown pair mode '" + text + "' (expected all|adjacent|explicit)");
}

std::string to_string(PairMode mode) {
    switch (mode) {
        case PairMode::all: return "all";
        case PairMode::adjacent: return "adjacent";
        case PairMode::explicit_list: return "explicit";
    }
    return "all";
}

PairSet::PairSet(const ArrayGeometry& geometry, std::vector<AntennaPair> pairs)
    : pairs_(std::move(pairs)), antenna_count_(geometry.size()) {
    const std::size_t n = geometry.size();
    if (pairs_.empty()) throw ValidationError("pair set is empty");
    if (pairs_.size() > n * (n - 1) / 2) {
        throw ValidationError("more pairs than distinct antenna pairs");
    }
    spacings_.reserve(pairs_.size());
    for (const auto& [u, v] : pairs_) {
        if (u >= n || v >= n) {
            throw ValidationError("pair (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") is out of range for " + std::to_string(n) + " antennas");
        }
        if (u >= v) {
            throw ValidationError("pair (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") must have u < v");
        }
        spacings_.push_back(geometry.position(v) - geometry.position(u));
    }
    for (std::size_t a = 0; a < pairs_.size(); ++a) {
        for (std::size_t b = a + 1; b < pairs_.size(); ++b) {
            if (pairs_[a] == pairs_[b]) throw ValidationError("pair listed twice");
        }
    }
}

PairSet make_pairs(const ArrayGeometry& geometry, PairMode mode,
                   std::vector<AntennaPair> explicit_pairs) {
    const std::size_t n = geometry.size();
    std::vector<AntennaPair> pairs;
    switch (mode) {
        case PairMode::all:
            for (std::size_t u = 0; u < n; ++u)
                for (std::size_t v = u + 1; v < n; ++v) pairs.push_back({u, v});
            break;
        case PairMode::adjacent:
            for (std::size_t u = 0; u + 1 < n; ++u) pairs.push_back({u, u + 1});
            break;
        case PairMode::explicit_list:
            pairs = std::move(explicit_pairs);
            break;
    }
    return PairSet(geometry, std::move(pairs));
}

}  // namespace pdp
