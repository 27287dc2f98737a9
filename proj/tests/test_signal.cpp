#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pdp/signal.hpp"

using namespace pdp;

TEST_CASE("steering vector") {
    const auto g = make_geometry({0, 5, 10.5});
    for (const auto& a : steering_vector(g, 0.0)) CHECK(a == Complex(1.0, 0.0));

    const auto a90 = steering_vector(g, kPi / 2);
    CHECK(a90[0] == Complex(1.0, 0.0));
    // phases -5 pi and -10.5 pi
    CHECK(a90[1].real() == doctest::Approx(-1.0));
    CHECK(a90[1].imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a90[2].real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a90[2].imag() == doctest::Approx(-1.0));  // exp(-j 10.5 pi) = exp(-j pi/2)

    // -pi * 2.3 * sin(40 deg) = -4.644566714542483 (wrapped by arg)
    const auto a40 = steering_vector(make_geometry({0, 2.3}), deg_to_rad(40.0));
    CHECK(std::arg(a40[1]) == doctest::Approx(wrap(-4.644566714542483)).epsilon(1e-12));
    CHECK(std::abs(a40[1]) == doctest::Approx(1.0));
}

TEST_CASE("wrap boundary values") {
    CHECK(wrap(0.0) == 0.0);
    CHECK(wrap(kPi) == -kPi);
    CHECK(wrap(-kPi) == -kPi);
    CHECK(wrap(3 * kPi) == doctest::Approx(-kPi));
    // pi * 5 * sin(40 deg) = 10.096884162048877 wraps to -2.469486452310296 with q = 2
    const double phi = kPi * 5 * std::sin(deg_to_rad(40.0));
    CHECK(phi == doctest::Approx(10.096884162048877));
    CHECK(wrap(phi) == doctest::Approx(-2.469486452310296).epsilon(1e-13));
    CHECK(phase_wrap_count(phi) == 2);
    CHECK(wrap_count(5.0, deg_to_rad(40.0)) == 2);
}

TEST_CASE("wrap agrees with the integer-search oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> phi(-200.0, 200.0);
    for (int i = 0; i < 20000; ++i) {
        const double x = phi(rng);
        const auto expected = oracle::brute_force_wrap(x);
        CHECK(phase_wrap_count(x) == expected.q);
        CHECK(wrap(x) == expected.value);
    }
}

TEST_CASE("wrap is idempotent and stays in [-pi, pi)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> phi(-1e4, 1e4);
    for (int i = 0; i < 10000; ++i) {
        const double w = wrap(phi(rng));
        CHECK(w >= -kPi);
        CHECK(w < kPi);
        CHECK(wrap(w) == w);
    }
    // values just below pi survive, values at +-pi collapse to -pi
    const double below = std::nextafter(kPi, 0.0);
    CHECK(wrap(below) == below);
}

TEST_CASE("wrap_count") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> small_d(0.01, 1.0);
    std::uniform_real_distribution<double> theta(-kPi / 2, kPi / 2);
    for (int i = 0; i < 2000; ++i) CHECK(wrap_count(small_d(rng), theta(rng)) == 0);
    CHECK(wrap_count(1.0, kPi / 2 - 1e-6) == 0);
    CHECK(wrap_count(1.0, -kPi / 2) == 0);
    CHECK(wrap_count(17.3, 0.0) == 0);

    // Reconstruction identity
    std::uniform_real_distribution<double> d(0.1, 50.0);
    for (int i = 0; i < 5000; ++i) {
        const double dd = d(rng), th = theta(rng);
        const double phi = kPi * dd * std::sin(th);
        CHECK(std::abs(wrap(phi) + kTwoPi * static_cast<double>(wrap_count(dd, th)) - phi) < 1e-12);
    }
}

TEST_CASE("synthesize_snapshot") {
    const auto g = make_geometry({0, 5, 10.5, 16.5});
    SUBCASE("noise free equals A a(theta)") {
        const SourceParams src{deg_to_rad(33.0), 2.5, kNoiseFree};
        const auto x = synthesize_snapshot(g, src, 1);
        const auto a = steering_vector(g, src.theta);
        for (std::size_t n = 0; n < x.size(); ++n) CHECK(x[n] == 2.5 * a[n]);
    }
    SUBCASE("deterministic given seed") {
        const SourceParams src{0.3, 1.0, 5.0};
        CHECK(synthesize_snapshot(g, src, 42) == synthesize_snapshot(g, src, 42));
        CHECK(synthesize_snapshot(g, src, 42) != synthesize_snapshot(g, src, 43));
    }
    SUBCASE("noise variance matches the SNR convention") {
        const auto g1 = make_geometry({0, 1});
        const SourceParams src{0.0, 2.0, 10.0};  // sigma^2 = 4 / 10 = 0.4
        const auto a = steering_vector(g1, src.theta);
        double total = 0.0, re2 = 0.0;
        const int draws = 50000;
        for (int t = 0; t < draws; ++t) {
            const auto x = synthesize_snapshot(g1, src, stream_seed(9, 1, static_cast<std::uint64_t>(t)));
            for (std::size_t n = 0; n < 2; ++n) {
                const Complex w = x[n] - src.amplitude * a[n];
                total += std::norm(w);
                re2 += w.real() * w.real();
            }
        }
        const double var = total / (2.0 * draws);
        CHECK(var == doctest::Approx(0.4).epsilon(0.02));
        CHECK(re2 / (2.0 * draws) == doctest::Approx(0.2).epsilon(0.02));
    }
    SUBCASE("invalid source") {
        CHECK_THROWS_AS(synthesize_snapshot(g, {2.0, 1.0, 10.0}, 1), ValidationError);
        CHECK_THROWS_AS(synthesize_snapshot(g, {0.0, 0.0, 10.0}, 1), ValidationError);
    }
    SUBCASE("multiple snapshots start with the single-snapshot draw") {
        const SourceParams src{0.2, 1.0, 0.0};
        const auto xs = synthesize_snapshots(g, src, 77, 3);
        CHECK(xs.size() == 3);
        CHECK(xs[0] == synthesize_snapshot(g, src, 77));
        CHECK(xs[1] != xs[0]);
    }
}

TEST_CASE("stream seeds are distinct across trials and scenarios") {
    CHECK(stream_seed(1, 2, 3) == stream_seed(1, 2, 3));
    CHECK(stream_seed(1, 2, 3) != stream_seed(1, 2, 4));
    CHECK(stream_seed(1, 2, 3) != stream_seed(1, 3, 3));
    CHECK(stream_seed(1, 2, 3) != stream_seed(2, 2, 3));
    CHECK(scenario_id("r1-3") != scenario_id("r1-5"));
}

TEST_CASE("measure_wpd") {
    const auto g = make_geometry({0, 2.3, 5.18});
    const auto ps = make_pairs(g, PairMode::all);

    SUBCASE("zero angle gives zero phase differences") {
        const auto x = synthesize_snapshot(g, {0.0, 1.0, kNoiseFree}, 0);
        for (double p : measure_wpd(x, ps)) CHECK(p == 0.0);
    }
    SUBCASE("zero-magnitude entry is rejected") {
        Snapshot x{{1, 0}, {0, 0}, {1, 1}};
        CHECK_THROWS_AS(measure_wpd(x, ps), ValidationError);
    }
    SUBCASE("length mismatch is rejected") {
        Snapshot x{{1, 0}, {0, 1}};
        CHECK_THROWS_AS(measure_wpd(x, ps), ValidationError);
    }
    SUBCASE("noise-free snapshots reproduce the model WPD") {
        std::mt19937_64 rng(21);
        std::uniform_int_distribution<std::size_t> size(2, 8);
        std::uniform_real_distribution<double> theta(-kPi / 2, kPi / 2);
        for (int i = 0; i < 1000; ++i) {
            const auto r = oracle::random_array(rng, size(rng), 0.2, 9.0);
            const auto gi = make_geometry(r);
            const auto pi = make_pairs(gi, PairMode::all);
            const double th = theta(rng);
            const auto psi = measure_wpd(synthesize_snapshot(gi, {th, 1.0, kNoiseFree}, 0), pi);
            for (std::size_t m = 0; m < pi.size(); ++m) {
                CHECK(std::abs(psi[m] - wrap(kPi * pi.spacings()[m] * std::sin(th))) < 1e-12);
                CHECK(psi[m] >= -kPi);
                CHECK(psi[m] < kPi);
            }
        }
    }
    SUBCASE("multi-snapshot phasor averaging") {
        const SourceParams src{deg_to_rad(20.0), 1.0, kNoiseFree};
        const auto xs = synthesize_snapshots(g, src, 1, 4);
        const auto single = measure_wpd(std::span<const Complex>(xs[0]), ps);
        const auto avg = measure_wpd(std::span<const Snapshot>(xs), ps);
        for (std::size_t m = 0; m < ps.size(); ++m) CHECK(avg[m] == doctest::Approx(single[m]));
    }
}
