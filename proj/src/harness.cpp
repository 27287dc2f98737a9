#include "pdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "pdp/estimator.hpp"
#include "pdp/signal.hpp"
#include "pdp/wpdp.hpp"

namespace pdp {

namespace {

const std::vector<double> kArray1{0, 5, 10.5, 16.5, 23, 30, 37.5, 45.5};
const std::vector<double> kArray2{0, 0.4, 2.4, 4, 9.2, 10.4, 13.6, 16.4};

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct Prepared {
    ArrayGeometry geometry;
    PairSet pairs;
    std::optional<WpdpModel> model;
};

Prepared prepare(const ScenarioConfig& config) {
    ArrayGeometry geometry(config.geometry);
    PairSet pairs = make_pairs(geometry, config.pair_mode, config.explicit_pairs);
    std::optional<WpdpModel> model;
    if (std::find(config.estimators.begin(), config.estimators.end(), EstimatorKind::pdp) !=
        config.estimators.end()) {
        model.emplace(trace_wpdp(geometry, pairs,
                                 ThetaRange::degrees(config.trace_lo_deg, config.trace_hi_deg)));
    }
    return {std::move(geometry), std::move(pairs), std::move(model)};
}

template <typename F>
double timed(bool enabled, std::int64_t& ns, F&& body) {
    if (!enabled) return body();
    const auto t0 = std::chrono::steady_clock::now();
    const double out = body();
    ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
             .count();
    return out;
}

// All SNR points of one trial share the source angle and the unit-variance noise
// draw, so the curves use common random numbers.
void run_trial(const ScenarioConfig& config, const Prepared& prep, std::size_t trial,
               bool timing, std::vector<TrialRecord>& records) {
    std::mt19937_64 rng(stream_seed(config.seed, scenario_id(config.name), trial));
    std::uniform_real_distribution<double> angle(config.theta_lo_deg, config.theta_hi_deg);
    const double theta = deg_to_rad(angle(rng));
    const std::uint64_t noise_seed = rng();

    for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
        SourceParams source{theta, 1.0, config.noise_free ? kNoiseFree : config.snr_db[s]};
        const auto snapshots = synthesize_snapshots(prep.geometry, source, noise_seed, config.snapshots);

        TrialRecord rec;
        rec.trial = trial;
        rec.snr_db = config.snr_db[s];
        rec.theta = theta;
        rec.theta_hat.resize(config.estimators.size());
        rec.runtime_ns.assign(config.estimators.size(), 0);
        for (std::size_t e = 0; e < config.estimators.size(); ++e) {
            auto& ns = rec.runtime_ns[e];
            switch (config.estimators[e]) {
                case EstimatorKind::pdp:
                    rec.theta_hat[e] = timed(timing, ns, [&] {
                        const auto psi = measure_wpd(std::span<const Snapshot>(snapshots), prep.pairs);
                        const auto est = estimate_pdp(psi, *prep.model);
                        rec.line = est.line;
                        rec.residual = est.residual;
                        return est.theta;
                    });
                    break;
                case EstimatorKind::mle:
                    rec.theta_hat[e] = timed(timing, ns, [&] {
                        return estimate_mle(snapshots.front(), prep.geometry, *config.grid).theta;
                    });
                    break;
                case EstimatorKind::music:
                    rec.theta_hat[e] = timed(timing, ns, [&] {
                        return estimate_music(snapshots.front(), prep.geometry, *config.grid).theta;
                    });
                    break;
            }
        }
        records[s * config.trials + trial] = std::move(rec);
    }
}

std::int64_t cost_of(EstimatorKind kind, const ScenarioConfig& config, std::size_t lines) {
    OpCountParams p;
    p.antennas = static_cast<std::int64_t>(config.geometry.size());
    if (config.grid) {
        p.coarse_points = static_cast<std::int64_t>(config.grid->coarse_count());
        p.fine_points = static_cast<std::int64_t>(config.grid->fine_count());
    }
    switch (kind) {
        case EstimatorKind::pdp:
            p.lines = static_cast<std::int64_t>(lines);
            return op_count(CostMethod::pdp, p);
        case EstimatorKind::mle: return op_count(CostMethod::mle, p);
        case EstimatorKind::music: return op_count(CostMethod::music, p);
    }
    return 0;
}

double crlb_rmse_deg(const ScenarioConfig& config, const ArrayGeometry& geometry, double snr_db) {
    if (config.noise_free) return 0.0;
    const double center = deg_to_rad(0.5 * (config.theta_lo_deg + config.theta_hi_deg));
    try {
        return rad_to_deg(std::sqrt(crlb(geometry, std::pow(10.0, snr_db / 10.0), center)));
    } catch (const ValidationError&) {
        return std::nan("");
    }
}

}  // namespace

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "pdp") return EstimatorKind::pdp;
    if (name == "mle") return EstimatorKind::mle;
    if (name == "music") return EstimatorKind::music;
    throw ValidationError("unknown estimator '" + name + "' (expected pdp|mle|music)");
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::pdp: return "pdp";
        case EstimatorKind::mle: return "mle";
        case EstimatorKind::music: return "music";
    }
    return "pdp";
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ValidationError("scenario name is empty");
    if (trials < 1) throw ValidationError("trials must be at least 1");
    if (snr_db.empty()) throw ValidationError("SNR list is empty");
    for (double s : snr_db) {
        if (!std::isfinite(s)) throw ValidationError("SNR values must be finite (use noise_free)");
    }
    if (estimators.empty()) throw ValidationError("no estimators configured");
    if (!(theta_lo_deg <= theta_hi_deg) || theta_lo_deg < -90.0 || theta_hi_deg > 90.0) {
        throw ValidationError("source angle interval must lie within [-90, 90] degrees");
    }
    if (snapshots < 1) throw ValidationError("snapshots must be at least 1");
    if (!(gross_error_deg > 0.0)) throw ValidationError("gross error threshold must be positive");
    const ArrayGeometry g(geometry);
    const PairSet pairs = make_pairs(g, pair_mode, explicit_pairs);
    for (auto e : estimators) {
        if ((e == EstimatorKind::mle || e == EstimatorKind::music) && !grid) {
            throw ValidationError("estimator " + to_string(e) + " needs a grid specification");
        }
        if (e == EstimatorKind::pdp) {
            if (pairs.size() < 2) throw ValidationError("estimator pdp needs at least 2 antenna pairs");
            ThetaRange::degrees(trace_lo_deg, trace_hi_deg).validate();
        }
        if (e == EstimatorKind::music && g.size() < 2) {
            throw ValidationError("estimator music needs at least 2 antennas");
        }
    }
    if (grid) grid->validate();
}

ScenarioConfig load_scenario(std::istream& in) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario file is not valid JSON: ") + e.what());
    }
    ScenarioConfig c;
    try {
        if (doc.at("format") != "pdp-scenario") throw ValidationError("not a pdp-scenario file");
        const int version = doc.at("version").get<int>();
        if (version != kScenarioFormatVersion) {
            throw ValidationError("unsupported scenario version " + std::to_string(version));
        }
        c.name = doc.at("name").get<std::string>();
        c.geometry = doc.at("geometry").get<std::vector<double>>();
        const auto& pairs = doc.value("pairs", json("all"));
        if (pairs.is_string()) {
            c.pair_mode = parse_pair_mode(pairs.get<std::string>());
        } else {
            c.pair_mode = PairMode::explicit_list;
            for (const auto& p : pairs) {
                c.explicit_pairs.push_back({p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>()});
            }
        }
        if (doc.contains("theta_deg")) {
            const auto t = doc.at("theta_deg").get<std::vector<double>>();
            if (t.size() != 2) throw ValidationError("theta_deg must have 2 entries");
            c.theta_lo_deg = t[0];
            c.theta_hi_deg = t[1];
        }
        c.snr_db = doc.at("snr_db").get<std::vector<double>>();
        c.trials = doc.value("trials", c.trials);
        c.seed = doc.value("seed", c.seed);
        if (doc.contains("estimators")) {
            c.estimators.clear();
            for (const auto& e : doc.at("estimators")) c.estimators.push_back(parse_estimator(e.get<std::string>()));
        }
        if (!doc.contains("grid")) {
            c.grid = GridSpec{};
        } else if (!doc.at("grid").is_null()) {
            const auto& g = doc.at("grid");
            GridSpec spec;
            spec.coarse_lo = g.value("coarse_lo", spec.coarse_lo);
            spec.coarse_hi = g.value("coarse_hi", spec.coarse_hi);
            spec.coarse_step = g.value("coarse_step", spec.coarse_step);
            spec.fine_halfwidth = g.value("fine_halfwidth", spec.fine_halfwidth);
            spec.fine_step = g.value("fine_step", spec.fine_step);
            c.grid = spec;
        } else {
            c.grid.reset();
        }
        if (doc.contains("trace_range_deg")) {
            const auto t = doc.at("trace_range_deg").get<std::vector<double>>();
            if (t.size() != 2) throw ValidationError("trace_range_deg must have 2 entries");
            c.trace_lo_deg = t[0];
            c.trace_hi_deg = t[1];
        }
        c.noise_free = doc.value("noise_free", false);
        c.snapshots = doc.value("snapshots", std::size_t{1});
        c.gross_error_deg = doc.value("gross_error_deg", c.gross_error_deg);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed scenario file: ") + e.what());
    }
    c.validate();
    return c;
}

void save_scenario(const ScenarioConfig& c, std::ostream& out) {
    using nlohmann::json;
    json pairs;
    if (c.pair_mode == PairMode::explicit_list) {
        pairs = json::array();
        for (const auto& [u, v] : c.explicit_pairs) pairs.push_back({u, v});
    } else {
        pairs = to_string(c.pair_mode);
    }
    json estimators = json::array();
    for (auto e : c.estimators) estimators.push_back(to_string(e));
    json grid = nullptr;
    if (c.grid) {
        grid = {{"coarse_lo", c.grid->coarse_lo},
                {"coarse_hi", c.grid->coarse_hi},
                {"coarse_step", c.grid->coarse_step},
                {"fine_halfwidth", c.grid->fine_halfwidth},
                {"fine_step", c.grid->fine_step}};
    }
    json doc = {
        {"format", "pdp-scenario"},
        {"version", kScenarioFormatVersion},
        {"name", c.name},
        {"geometry", c.geometry},
        {"pairs", pairs},
        {"theta_deg", {c.theta_lo_deg, c.theta_hi_deg}},
        {"snr_db", c.snr_db},
        {"trials", c.trials},
        {"seed", c.seed},
        {"estimators", estimators},
        {"grid", grid},
        {"trace_range_deg", {c.trace_lo_deg, c.trace_hi_deg}},
        {"noise_free", c.noise_free},
        {"snapshots", c.snapshots},
        {"gross_error_deg", c.gross_error_deg},
    };
    out << doc.dump(2) << '\n';
}

std::vector<std::string> preset_names() {
    return {"r1-3", "r1-5", "r1-8", "r2-3", "r2-5", "r2-8"};
}

ScenarioConfig preset(const std::string& name) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw ValidationError("unknown preset '" + name + "'");
    }
    const auto& base = name[1] == '1' ? kArray1 : kArray2;
    const auto n = static_cast<std::size_t>(name[3] - '0');
    ScenarioConfig c;
    c.name = name;
    c.geometry.assign(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(n));
    c.snr_db = {0, 5, 10, 15, 20, 25, 30};
    c.trace_lo_deg = -70.0;
    c.trace_hi_deg = 70.0;
    return c;
}

double rmse_deg(std::span<const double> errors_rad) {
    if (errors_rad.empty()) throw ValidationError("RMSE of an empty set");
    double ss = 0.0;
    for (double e : errors_rad) ss += e * e;
    return rad_to_deg(std::sqrt(ss / static_cast<double>(errors_rad.size())));
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    config.validate();
    const Prepared prep = prepare(config);

    ScenarioResult result;
    result.config = config;
    result.lines = prep.model ? prep.model->line_count() : 0;
    result.records.resize(config.trials * config.snr_db.size());

    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, config.trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < config.trials;) {
            try {
                run_trial(config, prep, t, options.timing, result.records);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = config.trials;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    const double gross = deg_to_rad(config.gross_error_deg);
    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        const auto kind = config.estimators[e];
        const auto cost = cost_of(kind, config, result.lines);
        for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
            std::vector<double> errors;
            errors.reserve(config.trials);
            std::size_t gross_count = 0;
            std::int64_t total_ns = 0;
            for (std::size_t t = 0; t < config.trials; ++t) {
                const auto& rec = result.records[s * config.trials + t];
                const double err = rec.theta_hat[e] - rec.theta;
                errors.push_back(err);
                if (std::abs(err) > gross) ++gross_count;
                total_ns += rec.runtime_ns[e];
            }
            SummaryRow row;
            row.scenario = config.name;
            row.estimator = kind;
            row.snr_db = config.snr_db[s];
            row.trials = config.trials;
            row.rmse_deg = rmse_deg(errors);
            row.gross_error_rate = static_cast<double>(gross_count) / static_cast<double>(config.trials);
            row.crlb_rmse_deg = crlb_rmse_deg(config, prep.geometry, config.snr_db[s]);
            row.mean_runtime_ns = total_ns / static_cast<std::int64_t>(config.trials);
            row.op_count = cost;
            result.summary.push_back(row);
        }
    }
    return result;
}

void write_summary_csv(const ScenarioResult& result, std::ostream& out) {
    out << "scenario,estimator,snr_db,trials,rmse_deg,gross_error_rate,crlb_rmse_deg,"
           "mean_runtime_ns,op_count\n";
    for (const auto& r : result.summary) {
        out << r.scenario << ',' << to_string(r.estimator) << ',' << format_number(r.snr_db) << ','
            << r.trials << ',' << format_number(r.rmse_deg) << ','
            << format_number(r.gross_error_rate) << ',' << format_number(r.crlb_rmse_deg) << ','
            << r.mean_runtime_ns << ',' << r.op_count << '\n';
    }
}

void write_records_csv(const ScenarioResult& result, std::ostream& out) {
    const auto& est = result.config.estimators;
    out << "scenario,snr_db,trial,theta_deg";
    for (auto e : est) out << ",theta_hat_deg_" << to_string(e);
    out << ",pdp_line,pdp_residual\n";
    for (const auto& r : result.records) {
        out << result.config.name << ',' << format_number(r.snr_db) << ',' << r.trial << ','
            << format_number(rad_to_deg(r.theta));
        for (double th : r.theta_hat) out << ',' << format_number(rad_to_deg(th));
        out << ',' << r.line << ',' << format_number(r.residual) << '\n';
    }
}

}  // namespace pdp
