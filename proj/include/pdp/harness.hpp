#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdp/baselines.hpp"
#include "pdp/geometry.hpp"

namespace pdp {

enum class EstimatorKind { pdp, mle, music };

EstimatorKind parse_estimator(const std::string& name);
std::string to_string(EstimatorKind kind);

/// One Monte Carlo experiment: RMSE versus SNR for a set of estimators.
/// Angles are in degrees, matching the config file.
struct ScenarioConfig {
    std::string name = "scenario";
    std::vector<double> geometry;
    PairMode pair_mode = PairMode::all;
    std::vector<AntennaPair> explicit_pairs;
    double theta_lo_deg = 39.5;  // source angle ~ U[theta_lo, theta_hi]
    double theta_hi_deg = 40.5;
    std::vector<double> snr_db;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::vector<EstimatorKind> estimators{EstimatorKind::pdp, EstimatorKind::mle,
                                          EstimatorKind::music};
    std::optional<GridSpec> grid = GridSpec{};
    double trace_lo_deg = -90.0;
    double trace_hi_deg = 90.0;
    bool noise_free = false;
    std::size_t snapshots = 1;
    double gross_error_deg = 5.0;

    void validate() const;
};

inline constexpr int kScenarioFormatVersion = 1;

ScenarioConfig load_scenario(std::istream& in);
void save_scenario(const ScenarioConfig& config, std::ostream& out);

/// Names of the shipped presets (r1-3, r1-5, r1-8, r2-3, r2-5, r2-8).
std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);

struct TrialRecord {
    std::size_t trial = 0;
    double snr_db = 0.0;
    double theta = 0.0;                 // radians
    std::vector<double> theta_hat;      // radians, one per configured estimator
    std::vector<std::int64_t> runtime_ns;  // per estimator; zero unless timing is enabled
    std::size_t line = 0;               // PDP line index (zero when PDP is not run)
    double residual = 0.0;              // PDP projection residual
};

struct SummaryRow {
    std::string scenario;
    EstimatorKind estimator = EstimatorKind::pdp;
    double snr_db = 0.0;
    std::size_t trials = 0;
    double rmse_deg = 0.0;
    double gross_error_rate = 0.0;
    double crlb_rmse_deg = 0.0;
    std::int64_t mean_runtime_ns = 0;
    std::int64_t op_count = 0;
};

struct ScenarioResult {
    ScenarioConfig config;
    std::size_t lines = 0;  // K of the traced model (0 when PDP is not run)
    std::vector<TrialRecord> records;  // SNR-major, then trial index
    std::vector<SummaryRow> summary;   // estimator-major, then SNR
};

struct RunOptions {
    std::size_t workers = 1;
    /// Wall-clock timing makes the output nondeterministic, so it is opt-in.
    bool timing = false;
};

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// sqrt(mean(error^2)) in degrees for errors given in radians.
double rmse_deg(std::span<const double> errors_rad);

void write_summary_csv(const ScenarioResult& result, std::ostream& out);
void write_records_csv(const ScenarioResult& result, std::ostream& out);

}  // namespace pdp
