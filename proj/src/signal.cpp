#include "pdp/signal.hpp"

#include <cmath>
#include <random>
#include <string>

namespace pdp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void append_snapshot(const ArrayGeometry& geometry, const SourceParams& source,
                     std::mt19937_64& rng, std::vector<Snapshot>& out) {
    const auto a = steering_vector(geometry, source.theta);
    const double sigma2 = source.noise_variance();
    Snapshot x(a.size());
    if (sigma2 == 0.0) {
        for (std::size_t n = 0; n < a.size(); ++n) x[n] = source.amplitude * a[n];
    } else {
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * sigma2));
        for (std::size_t n = 0; n < a.size(); ++n) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            x[n] = source.amplitude * a[n] + Complex(re, im);
        }
    }
    out.push_back(std::move(x));
}

}  // namespace

void SourceParams::validate() const {
    if (!(theta >= -kPi / 2 && theta <= kPi / 2)) {
        throw ValidationError("source angle must lie in [-pi/2, pi/2]");
    }
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
        throw ValidationError("source amplitude must be positive");
    }
    if (std::isnan(snr_db)) throw ValidationError("snr_db is NaN");
}

double SourceParams::noise_variance() const {
    if (snr_db == kNoiseFree) return 0.0;
    return amplitude * amplitude / std::pow(10.0, snr_db / 10.0);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t scenario, std::uint64_t trial) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ scenario);
    return splitmix64(s ^ trial);
}

std::uint64_t scenario_id(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<Complex> steering_vector(const ArrayGeometry& geometry, double theta) {
    const double s = std::sin(theta);
    std::vector<Complex> a;
    a.reserve(geometry.size());
    for (double r : geometry.positions()) a.push_back(std::polar(1.0, -kPi * r * s));
    return a;
}

Snapshot synthesize_snapshot(const ArrayGeometry& geometry, const SourceParams& source,
                             std::uint64_t seed) {
    return std::move(synthesize_snapshots(geometry, source, seed, 1).front());
}

std::vector<Snapshot> synthesize_snapshots(const ArrayGeometry& geometry,
                                           const SourceParams& source, std::uint64_t seed,
                                           std::size_t count) {
    source.validate();
    if (count == 0) throw ValidationError("snapshot count must be at least 1");
    std::mt19937_64 rng(seed);
    std::vector<Snapshot> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) append_snapshot(geometry, source, rng, out);
    return out;
}

std::int64_t phase_wrap_count(double phi) {
    auto q = static_cast<std::int64_t>(std::floor((phi + kPi) / kTwoPi));
    // The floor above can be off by one when phi + pi rounds across a boundary.
    while (phi - kTwoPi * static_cast<double>(q) >= kPi) ++q;
    while (phi - kTwoPi * static_cast<double>(q) < -kPi) --q;
    return q;
}

double wrap(double phi) {
    return phi - kTwoPi * static_cast<double>(phase_wrap_count(phi));
}

std::int64_t wrap_count(double spacing, double theta) {
    return phase_wrap_count(kPi * spacing * std::sin(theta));
}

PhaseDiffVector measure_wpd(std::span<const Complex> snapshot, const PairSet& pairs) {
    if (snapshot.size() != pairs.antenna_count()) {
        throw ValidationError("snapshot has " + std::to_string(snapshot.size()) +
                              " entries, geometry has " + std::to_string(pairs.antenna_count()));
    }
    for (const auto& x : snapshot) {
        if (x == Complex(0.0, 0.0)) throw ValidationError("snapshot entry with zero magnitude");
    }
    PhaseDiffVector psi;
    psi.reserve(pairs.size());
    for (const auto& [u, v] : pairs.pairs()) {
        // std::arg is in (-pi, pi]; wrap() moves +pi to -pi.
        psi.push_back(wrap(std::arg(snapshot[u] * std::conj(snapshot[v]))));
    }
    return psi;
}

PhaseDiffVector measure_wpd(std::span<const Snapshot> snapshots, const PairSet& pairs) {
    if (snapshots.empty()) throw ValidationError("no snapshots given");
    if (snapshots.size() == 1) return measure_wpd(std::span<const Complex>(snapshots[0]), pairs);
    std::vector<Complex> sums(pairs.size());
    for (const auto& x : snapshots) {
        if (x.size() != pairs.antenna_count()) throw ValidationError("snapshot length mismatch");
        const auto ps = pairs.pairs();
        for (std::size_t m = 0; m < ps.size(); ++m) {
            if (x[ps[m].u] == Complex(0.0, 0.0) || x[ps[m].v] == Complex(0.0, 0.0)) {
                throw ValidationError("snapshot entry with zero magnitude");
            }
            sums[m] += x[ps[m].u] * std::conj(x[ps[m].v]);
        }
    }
    PhaseDiffVector psi;
    psi.reserve(sums.size());
    for (const auto& s : sums) psi.push_back(wrap(std::arg(s)));
    return psi;
}

}  // namespace pdp
