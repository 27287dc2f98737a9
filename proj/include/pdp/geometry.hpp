#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdp {

/// Raised for malformed user input (geometry, pairs, config values).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Antenna positions along a line, in units of half a wavelength.
/// The first element sits at the origin and positions are strictly increasing.
class ArrayGeometry {
public:
    explicit ArrayGeometry(std::vector<double> positions);

    std::span<const double> positions() const { return positions_; }
    double position(std::size_t n) const { return positions_.at(n); }
    std::size_t size() const { return positions_.size(); }

    /// Array aperture (last position).
    double aperture() const { return positions_.back(); }

    bool operator==(const ArrayGeometry&) const = default;

private:
    std::vector<double> positions_;
};

ArrayGeometry make_geometry(std::vector<double> positions);

/// Converts metric positions to half-wavelength units for a carrier in Hz.
/// Positions are shifted so the first element is at 0.
ArrayGeometry geometry_from_metric(std::span<const double> positions_m, double carrier_hz);

struct AntennaPair {
    std::size_t u = 0;
    std::size_t v = 0;
    bool operator==(const AntennaPair&) const = default;
};

enum class PairMode { all, adjacent, explicit_list };

PairMode parse_pair_mode(const std::string& text);
std::string to_string(PairMode mode);

/// Selected antenna pairs (u < v) and their spacing vector d, d_m = r_v - r_u.
class PairSet {
public:
    PairSet(const ArrayGeometry& geometry, std::vector<AntennaPair> pairs);

    std::span<const AntennaPair> pairs() const { return pairs_; }
    std::span<const double> spacings() const { return spacings_; }
    std::size_t size() const { return pairs_.size(); }
    std::size_t antenna_count() const { return antenna_count_; }

    bool operator==(const PairSet&) const = default;

private:
    std::vector<AntennaPair> pairs_;
    std::vector<double> spacings_;
    std::size_t antenna_count_ = 0;
};

/// Enumerates pairs in lexicographic (u, then v) order. `explicit_pairs` is only
/// read for PairMode::explicit_list; it is kept in the given order after validation.
PairSet make_pairs(const ArrayGeometry& geometry, PairMode mode,
                   std::vector<AntennaPair> explicit_pairs = {});

}  // namespace pdp
