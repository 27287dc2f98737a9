#include "pdp/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pdp/baselines.hpp"
#include "pdp/estimator.hpp"
#include "pdp/harness.hpp"
#include "pdp/signal.hpp"
#include "pdp/wpdp.hpp"

namespace pdp::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v, int digits = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::string cleaned = text;
    for (char& c : cleaned) {
        if (c == ',' || c == ';' || c == '\n' || c == '\t' || c == '[' || c == ']') c = ' ';
    }
    std::istringstream in(cleaned);
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ValidationError("cannot parse '" + token + "' in " + what);
        }
    }
    if (values.empty()) throw ValidationError(what + " is empty");
    return values;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Inline comma list or a path to a file holding the positions.
ArrayGeometry read_geometry(const std::string& spec) {
    std::error_code ec;
    if (fs::is_regular_file(spec, ec)) {
        std::istringstream lines(read_file(spec));
        std::string all, line;
        while (std::getline(lines, line)) {
            if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            all += line + ' ';
        }
        return ArrayGeometry(parse_number_list(all, "geometry file"));
    }
    return ArrayGeometry(parse_number_list(spec, "geometry"));
}

/// "all", "adjacent" or an explicit list such as "0-1,1-2" (zero-based).
PairSet read_pairs(const ArrayGeometry& g, const std::string& spec) {
    if (spec == "all" || spec == "adjacent") return make_pairs(g, parse_pair_mode(spec));
    std::vector<AntennaPair> pairs;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) throw ValidationError("pair '" + item + "' must look like u-v");
        try {
            pairs.push_back({std::stoul(item.substr(0, dash)), std::stoul(item.substr(dash + 1))});
        } catch (const std::exception&) {
            throw ValidationError("cannot parse pair '" + item + "'");
        }
    }
    return make_pairs(g, PairMode::explicit_list, std::move(pairs));
}

/// One complex sample per line: "re,im" or "re im"; '#' starts a comment.
Snapshot read_snapshot(const std::string& path) {
    std::istringstream lines(read_file(path));
    Snapshot x;
    std::string line;
    while (std::getline(lines, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto v = parse_number_list(line, "snapshot line");
        if (v.size() != 2) throw ValidationError("snapshot lines need exactly 2 numbers: " + line);
        x.emplace_back(v[0], v[1]);
    }
    if (x.empty()) throw ValidationError("snapshot file is empty");
    return x;
}

fs::path output_path(const std::string& name) {
    fs::path p(name);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("PDP_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
            fs::create_directories(dir);
            p = fs::path(dir) / p;
        }
    }
    return p;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path.string());
    return f;
}

WpdpModel read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model " + path);
    return load_model(in);
}

GridSpec parse_grid(const std::string& text) {
    const auto v = parse_number_list(text, "grid");
    if (v.size() != 5) {
        throw ValidationError("grid needs coarse_lo,coarse_hi,coarse_step,fine_halfwidth,fine_step");
    }
    GridSpec g{v[0], v[1], v[2], v[3], v[4]};
    g.validate();
    return g;
}

OpCountParams parse_op_params(const std::string& text) {
    OpCountParams p;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("parameter '" + item + "' must be NAME=value");
        const std::string key = item.substr(0, eq);
        std::int64_t value = 0;
        try {
            std::size_t used = 0;
            value = std::stoll(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("parameter '" + item + "' needs an integer value");
        }
        if (key == "N") p.antennas = value;
        else if (key == "K") p.lines = value;
        else if (key == "Kc" || key == "K_c") p.coarse_points = value;
        else if (key == "Kf" || key == "K_f") p.fine_points = value;
        else if (key == "Ki" || key == "K_i") p.iterations = value;
        else if (key == "Nv" || key == "N_v") p.virtual_antennas = value;
        else throw ValidationError("unknown op-count parameter '" + key + "'");
    }
    return p;
}

struct Options {
    // trace
    std::string geometry;
    std::string pairs = "all";
    std::string range_deg = "-90,90";
    std::string model_out = "model.wpdp";
    std::string export_csv;
    // estimate / baseline
    std::string model;
    std::string snapshot;
    std::string psi;
    std::string method;
    std::string grid;
    std::size_t sources = 1;
    // opcount
    std::string params;
    // simulate
    std::string preset;
    std::string config;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::string snr;
    std::size_t workers = 1;
    std::string sim_out = "results.csv";
    std::string records_out;
    bool timing = false;
    bool noise_free = false;
    // presets
    std::string preset_name;
};

int cmd_trace(const Options& o, std::ostream& out, std::ostream& err) {
    const auto g = read_geometry(o.geometry);
    const auto pairs = read_pairs(g, o.pairs);
    const auto r = parse_number_list(o.range_deg, "range");
    if (r.size() != 2) throw ValidationError("--range-deg needs two values");
    const auto model = trace_wpdp(g, pairs, ThetaRange::degrees(r[0], r[1]));

    const auto path = output_path(o.model_out);
    auto f = open_output(path);
    save_model(model, f);
    if (!o.export_csv.empty()) {
        auto csv = open_output(output_path(o.export_csv));
        write_segments_csv(model, csv);
    }
    const auto amb = detect_ambiguity(model, 1e-6);
    out << "K=" << model.line_count() << '\n';
    out << "M=" << model.dimension() << '\n';
    out << "min_projection_distance=" << fmt(amb.min_distance) << '\n';
    if (!amb.collisions.empty()) {
        err << "warning: " << amb.collisions.size()
            << " pairs of WPD lines share a projection point; the array is ambiguous\n";
    }
    err << "model written to " << path.string() << '\n';
    return kExitOk;
}

int cmd_estimate(const Options& o, std::ostream& out) {
    const auto model = read_model(o.model);
    PhaseDiffVector psi;
    if (!o.psi.empty()) {
        psi = parse_number_list(o.psi, "--psi");
    } else {
        const auto x = read_snapshot(o.snapshot);
        psi = measure_wpd(std::span<const Complex>(x), model.pairs());
    }
    const auto est = estimate_pdp(psi, model);
    out << "theta_deg=" << fmt(rad_to_deg(est.theta), 12) << '\n';
    out << "line=" << est.line << '\n';
    out << "residual=" << fmt(est.residual) << '\n';
    out << "clamped=" << (est.clamped ? "true" : "false") << '\n';
    return kExitOk;
}

int cmd_baseline(const Options& o, std::ostream& out) {
    if (o.model.empty() == o.geometry.empty()) {
        throw ValidationError("baseline needs exactly one of --model or --geometry");
    }
    const ArrayGeometry g = o.model.empty() ? read_geometry(o.geometry) : read_model(o.model).geometry();
    const GridSpec grid = o.grid.empty() ? GridSpec{} : parse_grid(o.grid);
    const auto x = read_snapshot(o.snapshot);
    GridEstimate est;
    if (o.method == "mle") {
        est = estimate_mle(x, g, grid);
    } else if (o.method == "music") {
        est = estimate_music(x, g, grid, o.sources);
    } else {
        throw ValidationError("unknown baseline method '" + o.method + "' (expected mle|music)");
    }
    out << "theta_deg=" << fmt(rad_to_deg(est.theta), 12) << '\n';
    out << "coarse_theta_deg=" << fmt(rad_to_deg(est.coarse_theta), 12) << '\n';
    out << "objective=" << fmt(est.objective) << '\n';
    return kExitOk;
}

int cmd_opcount(const Options& o, std::ostream& out) {
    const auto method = parse_cost_method(o.method);
    out << op_count(method, parse_op_params(o.params)) << '\n';
    return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.preset.empty() == o.config.empty()) {
        throw ValidationError("simulate needs exactly one of --preset or --config");
    }
    ScenarioConfig cfg;
    if (!o.preset.empty()) {
        cfg = preset(o.preset);
    } else {
        std::ifstream in(o.config);
        if (!in) throw ValidationError("cannot open config " + o.config);
        cfg = load_scenario(in);
    }
    if (o.trials > 0) cfg.trials = o.trials;
    if (o.seed > 0) cfg.seed = o.seed;
    if (!o.snr.empty()) cfg.snr_db = parse_number_list(o.snr, "--snr");
    if (o.noise_free) cfg.noise_free = true;

    const auto result = run_scenario(cfg, {o.workers, o.timing});
    const auto path = output_path(o.sim_out);
    auto f = open_output(path);
    write_summary_csv(result, f);
    if (!o.records_out.empty()) {
        auto rec = open_output(output_path(o.records_out));
        write_records_csv(result, rec);
    }
    if (result.lines > 0) err << "K=" << result.lines << '\n';
    err << "summary written to " << path.string() << '\n';
    write_summary_csv(result, out);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase-difference projection DOA estimation for non-uniform linear arrays", "pdp"};
    app.require_subcommand(1);
    Options o;

    auto* trace = app.add_subcommand("trace", "Build the wrapped phase-difference pattern model");
    trace->add_option("--geometry", o.geometry, "Positions in half-wavelengths, inline list or file")->required();
    trace->add_option("--pairs", o.pairs, "all | adjacent | explicit list like 0-1,1-2");
    trace->add_option("--range-deg", o.range_deg, "Traced angle range 'lo,hi' in degrees");
    trace->add_option("--out", o.model_out, "Model output file");
    trace->add_option("--export-csv", o.export_csv, "Write line segments and projection points");

    auto* estimate = app.add_subcommand("estimate", "Run the PDP estimator on one observation");
    estimate->add_option("--model", o.model, "Model file from 'trace'")->required();
    auto* snap = estimate->add_option("--snapshot", o.snapshot, "Snapshot file (re,im per line)");
    auto* psi = estimate->add_option("--psi", o.psi, "Wrapped phase differences in radians");
    snap->excludes(psi);
    estimate->callback([&] {
        if (o.snapshot.empty() && o.psi.empty()) {
            throw CLI::RequiredError("estimate needs --snapshot or --psi");
        }
    });

    auto* baseline = app.add_subcommand("baseline", "Run a grid-search baseline on one snapshot");
    baseline->add_option("--method", o.method, "mle | music")->required();
    baseline->add_option("--model", o.model, "Model file (geometry source)");
    baseline->add_option("--geometry", o.geometry, "Positions, inline list or file");
    baseline->add_option("--snapshot", o.snapshot, "Snapshot file (re,im per line)")->required();
    baseline->add_option("--grid", o.grid, "coarse_lo,coarse_hi,coarse_step,fine_halfwidth,fine_step (deg)");
    baseline->add_option("--sources", o.sources, "MUSIC signal subspace dimension");

    auto* opcount = app.add_subcommand("opcount", "Online multiplication count of an estimator");
    opcount->add_option("--method", o.method, "pdp | two-step | 2q-order | em-esprit | music | mle")->required();
    opcount->add_option("--params", o.params, "Comma list of N=,K=,Kc=,Kf=,Ki=,Nv=")->required();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo RMSE versus SNR experiment");
    simulate->add_option("--preset", o.preset, "Preset scenario name");
    simulate->add_option("--config", o.config, "Scenario config file");
    simulate->add_option("--trials", o.trials, "Trials per SNR point");
    simulate->add_option("--seed", o.seed, "Master seed");
    simulate->add_option("--snr", o.snr, "SNR list in dB");
    simulate->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("--out", o.sim_out, "Summary CSV file");
    simulate->add_option("--records", o.records_out, "Per-trial CSV file");
    simulate->add_flag("--timing", o.timing, "Record mean runtime per estimator (nondeterministic)");
    simulate->add_flag("--noise-free", o.noise_free, "Disable noise");

    auto* presets = app.add_subcommand("presets", "Inspect the shipped scenario presets");
    presets->require_subcommand(1);
    auto* list = presets->add_subcommand("list", "List preset names");
    auto* show = presets->add_subcommand("show", "Print a preset as a config file");
    show->add_option("name", o.preset_name, "Preset name")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (trace->parsed()) return cmd_trace(o, out, err);
        if (estimate->parsed()) return cmd_estimate(o, out);
        if (baseline->parsed()) return cmd_baseline(o, out);
        if (opcount->parsed()) return cmd_opcount(o, out);
        if (simulate->parsed()) return cmd_simulate(o, out, err);
        if (list->parsed()) {
            for (const auto& name : preset_names()) out << name << '\n';
            return kExitOk;
        }
        if (show->parsed()) {
            save_scenario(preset(o.preset_name), out);
            return kExitOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace pdp::cli
