#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pdp/harness.hpp"
#include "pdp/signal.hpp"

using namespace pdp;

namespace {

ScenarioConfig small_config() {
    auto c = preset("r1-3");
    c.trials = 40;
    c.snr_db = {10, 20};
    return c;
}

std::string summary_csv(const ScenarioResult& r) {
    std::ostringstream out;
    write_summary_csv(r, out);
    return out.str();
}

std::string records_csv(const ScenarioResult& r) {
    std::ostringstream out;
    write_records_csv(r, out);
    return out.str();
}

const SummaryRow& row(const ScenarioResult& r, EstimatorKind e, double snr) {
    for (const auto& s : r.summary)
        if (s.estimator == e && s.snr_db == snr) return s;
    throw std::logic_error("row not found");
}

}  // namespace

TEST_CASE("rmse_deg") {
    CHECK(rmse_deg(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK(rmse_deg(std::vector<double>{deg_to_rad(1.0), deg_to_rad(-1.0)}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(rmse_deg(std::vector<double>{}), ValidationError);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> err(0.0, deg_to_rad(0.1));
    std::vector<double> errors(10000);
    for (auto& e : errors) e = err(rng);
    CHECK(std::abs(rmse_deg(errors) - 0.1) <= 0.005);
}

TEST_CASE("presets") {
    const auto names = preset_names();
    CHECK(names == std::vector<std::string>{"r1-3", "r1-5", "r1-8", "r2-3", "r2-5", "r2-8"});
    CHECK(preset("r1-3").geometry == std::vector<double>{0, 5, 10.5});
    CHECK(preset("r2-5").geometry == std::vector<double>{0, 0.4, 2.4, 4, 9.2});
    CHECK(preset("r1-8").geometry.size() == 8);
    CHECK(preset("r2-8").snr_db == std::vector<double>{0, 5, 10, 15, 20, 25, 30});
    CHECK_THROWS_AS(preset("r3-3"), ValidationError);
    for (const auto& n : names) CHECK_NOTHROW(preset(n).validate());
}

TEST_CASE("scenario config file round trip") {
    auto c = small_config();
    c.pair_mode = PairMode::explicit_list;
    c.explicit_pairs = {{0, 1}, {1, 2}};
    c.estimators = {EstimatorKind::pdp, EstimatorKind::music};
    std::stringstream buf;
    save_scenario(c, buf);
    const auto loaded = load_scenario(buf);
    CHECK(loaded.name == c.name);
    CHECK(loaded.geometry == c.geometry);
    CHECK(loaded.pair_mode == PairMode::explicit_list);
    CHECK(loaded.explicit_pairs == c.explicit_pairs);
    CHECK(loaded.snr_db == c.snr_db);
    CHECK(loaded.trials == c.trials);
    CHECK(loaded.estimators == c.estimators);
    CHECK(loaded.grid == c.grid);
    CHECK(loaded.trace_lo_deg == -70.0);
}

TEST_CASE("scenario config validation") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return load_scenario(in);
    };
    const std::string base =
        R"({"format":"pdp-scenario","version":1,"name":"t","geometry":[0,5,10.5],"snr_db":[10])";
    CHECK_NOTHROW(parse(base + "}"));
    CHECK_THROWS_AS(parse(base + R"(,"estimators":["mle"],"grid":null})"), ValidationError);
    CHECK_THROWS_AS(parse(base + R"(,"estimators":["esprit"]})"), ValidationError);
    CHECK_THROWS_AS(parse(base + R"(,"trials":0})"), ValidationError);
    CHECK_THROWS_AS(parse(R"({"format":"pdp-scenario","version":2,"name":"t","geometry":[0,5],"snr_db":[1]})"), ValidationError);
    CHECK_THROWS_AS(parse(R"({"format":"pdp-scenario","version":1,"name":"t","geometry":[0,5],"snr_db":[]})"), ValidationError);
    // PDP needs at least two pairs.
    CHECK_THROWS_AS(parse(R"({"format":"pdp-scenario","version":1,"name":"t","geometry":[0,5],"snr_db":[1]})"), ValidationError);
    CHECK_NOTHROW(parse(R"({"format":"pdp-scenario","version":1,"name":"t","geometry":[0,0.8],"snr_db":[1],"estimators":["mle"]})"));
}

TEST_CASE("run_scenario bookkeeping") {
    const auto c = small_config();
    const auto r = run_scenario(c);
    CHECK(r.lines == 21);
    CHECK(r.records.size() == c.trials * c.snr_db.size());
    CHECK(r.summary.size() == c.estimators.size() * c.snr_db.size());
    for (const auto& s : r.summary) {
        CHECK(s.rmse_deg >= 0.0);
        CHECK(s.trials == c.trials);
        CHECK(s.mean_runtime_ns == 0);
    }
    CHECK(row(r, EstimatorKind::pdp, 10).op_count == 81);
    CHECK(row(r, EstimatorKind::mle, 20).op_count == 8670);
    // Source angles stay inside the configured interval and are shared across SNR points.
    for (std::size_t t = 0; t < c.trials; ++t) {
        CHECK(rad_to_deg(r.records[t].theta) >= 39.5);
        CHECK(rad_to_deg(r.records[t].theta) <= 40.5);
        CHECK(r.records[t].theta == r.records[c.trials + t].theta);
    }
    const double crlb20 = row(r, EstimatorKind::pdp, 20).crlb_rmse_deg;
    const double crlb10 = row(r, EstimatorKind::pdp, 10).crlb_rmse_deg;
    CHECK(crlb10 / crlb20 == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("noise-free scenario") {
    auto c = small_config();
    c.noise_free = true;
    const auto r = run_scenario(c);
    for (double snr : c.snr_db) {
        CHECK(row(r, EstimatorKind::pdp, snr).rmse_deg < 1e-7);
        CHECK(row(r, EstimatorKind::mle, snr).rmse_deg <= 0.005);
        CHECK(row(r, EstimatorKind::music, snr).rmse_deg <= 0.005);
        CHECK(row(r, EstimatorKind::pdp, snr).crlb_rmse_deg == 0.0);
    }
}

TEST_CASE("results do not depend on the worker count") {
    const auto c = small_config();
    const auto one = run_scenario(c, {1, false});
    const auto eight = run_scenario(c, {8, false});
    CHECK(summary_csv(one) == summary_csv(eight));
    CHECK(records_csv(one) == records_csv(eight));

    auto other_seed = c;
    other_seed.seed = 2;
    CHECK(summary_csv(run_scenario(other_seed)) != summary_csv(one));
}

TEST_CASE("timing is recorded only on request") {
    const auto r = run_scenario(small_config(), {2, true});
    bool any = false;
    for (const auto& s : r.summary) any = any || s.mean_runtime_ns > 0;
    CHECK(any);
}

TEST_CASE("PDP RMSE respects the bound and scales with SNR") {
    // The three-element arrays are still in the threshold region at 15 dB,
    // so only the five-element ones are held to the scaling band here.
    for (const char* name : {"r1-5", "r2-5"}) {
        auto c = preset(name);
        c.estimators = {EstimatorKind::pdp};
        c.trials = 500;
        c.snr_db = {15, 20, 25, 30};
        const auto r = run_scenario(c);
        for (const auto& s : r.summary) {
            CHECK(s.rmse_deg >= s.crlb_rmse_deg * (1.0 - 3.0 / std::sqrt(500.0)));
        }
        const double ratio = row(r, EstimatorKind::pdp, 15).rmse_deg / row(r, EstimatorKind::pdp, 25).rmse_deg;
        CHECK(ratio >= 2.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("summary CSV layout") {
    const auto csv = summary_csv(run_scenario(small_config()));
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "scenario,estimator,snr_db,trials,rmse_deg,gross_error_rate,crlb_rmse_deg,mean_runtime_ns,op_count");
    std::string first;
    std::getline(lines, first);
    CHECK(first.rfind("r1-3,pdp,10,40,", 0) == 0);
}
