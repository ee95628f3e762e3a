// arriva: forecasting and evaluation toolkit for daily call-center arrivals.
//
// Subcommands:
//   validate  check a config file and its data without running anything
//   run       full pipeline: fit, forecast, combine, evaluate, write outputs
//   report    render markdown tables from a completed run directory
//   simulate  emit a synthetic daily-arrival CSV for demos and tests

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "arriva/config.hpp"
#include "arriva/csv.hpp"
#include "arriva/engine.hpp"
#include "arriva/evaluate.hpp"
#include "arriva/report.hpp"
#include "arriva/simulate.hpp"

namespace fs = std::filesystem;
using arriva::json;

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

arriva::AppConfig load_and_check(const std::string& config_path) {
    arriva::AppConfig cfg = arriva::load_config(config_path);
    if (cfg.calls_path.empty()) throw CliError("config: data.calls is required");
    return cfg;
}

arriva::ArrivalSeries load_series(const arriva::AppConfig& cfg) {
    arriva::ArrivalSeries series = arriva::csv::read_calls(cfg.calls_path, cfg.closing_path);
    cfg.run.validate(series.size());
    return series;
}

int cmd_validate(const std::string& config_path) {
    const arriva::AppConfig cfg = load_and_check(config_path);
    const arriva::ArrivalSeries series = load_series(cfg);
    std::printf("ok: %zu days from %s to %s, %zu closing days, %zu producers\n", series.size(),
                series.date(0).to_string().c_str(),
                series.date(series.size() - 1).to_string().c_str(),
                series.closing_days().size(), cfg.run.effective_producers().size());
    return 0;
}

json run_manifest(const arriva::AppConfig& cfg, const arriva::RunResult& result) {
    json manifest;
    manifest["config"] = cfg.echo;
    manifest["inputs"]["calls"] = cfg.calls_path;
    manifest["inputs"]["calls_hash"] = arriva::content_hash(cfg.calls_path);
    if (cfg.closing_path) {
        manifest["inputs"]["closing_days"] = *cfg.closing_path;
        manifest["inputs"]["closing_days_hash"] = arriva::content_hash(*cfg.closing_path);
    }
    manifest["run"]["scheme"] = result.store.scheme();
    manifest["run"]["window"] = result.store.window();
    manifest["run"]["origins"] = result.store.n_origins();
    manifest["run"]["horizons"] = result.store.horizons();
    manifest["run"]["first_origin"] = result.store.origin_date(0).to_string();
    manifest["run"]["producers"] = result.store.producers();
    json specs = json::object();
    for (const auto& [id, spec] : result.specs) {
        json s;
        s["family"] = arriva::family_name(spec.family);
        s["ar"] = spec.ar_lags;
        s["ma"] = spec.ma_lags;
        s["sar"] = spec.sar_lags;
        s["sma"] = spec.sma_lags;
        s["garch"] = spec.garch;
        specs[id] = s;
    }
    manifest["specs"] = specs;
    json diag;
    diag["fit_failures"] = result.diagnostics.fit_failures;
    diag["flagged_fits"] = result.diagnostics.flagged_fits;
    diag["messages"] = result.diagnostics.messages;
    manifest["diagnostics"] = diag;
    return manifest;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_override,
            const std::optional<std::uint64_t>& seed_override,
            const std::optional<int>& jobs_override) {
    arriva::AppConfig cfg = load_and_check(config_path);
    if (out_override) cfg.output_dir = *out_override;
    if (seed_override) {
        cfg.run.seed = *seed_override;
        cfg.eval.seed = *seed_override;
        cfg.eval.bootstrap.seed = *seed_override;
    }
    if (jobs_override) cfg.run.jobs = *jobs_override;

    const arriva::ArrivalSeries series = load_series(cfg);
    const arriva::RunResult result = arriva::run(series, cfg.run);
    const arriva::EvalReport report = arriva::evaluate(series, result.store, cfg.eval);

    fs::create_directories(cfg.output_dir);
    const std::string dir = cfg.output_dir;
    arriva::csv::write_store(result.store, dir + "/forecasts.csv");
    arriva::csv::write_dispersions(result.store, dir + "/dispersions.csv");
    arriva::csv::write_rankings(report.rankings, dir + "/rankings.csv");
    arriva::csv::write_tests(report.tests, dir + "/tests.csv");
    arriva::csv::write_mcs(report.mcs, dir);
    arriva::csv::write_econ(report.econ, dir + "/econ.csv");
    arriva::csv::write_density(report.density, dir + "/density.csv");
    arriva::csv::write_optimal_naive(report.optimal_naive, dir + "/optimal_naive.csv");
    {
        std::ofstream mf(dir + "/manifest.json", std::ios::binary);
        mf << run_manifest(cfg, result).dump(2) << '\n';
    }
    {
        // Fitted parameters of each model's final-origin estimation.
        json params = json::object();
        for (const auto& [id, named] : result.final_params) {
            json p = json::object();
            for (const auto& [key, value] : named) p[key] = value;
            params[id] = p;
        }
        std::ofstream pf(dir + "/params.json", std::ios::binary);
        pf << params.dump(2) << '\n';
    }
    int failures = 0;
    for (const auto& [id, n] : result.diagnostics.fit_failures) {
        (void)id;
        failures += n;
    }
    std::printf("run complete: %zu producers, %zu origins, %d fit failures -> %s\n",
                result.store.producers().size(), result.store.n_origins(), failures,
                dir.c_str());
    return 0;
}

int cmd_report(const std::string& run_dir, const std::optional<std::string>& out_override) {
    if (!fs::exists(run_dir + "/rankings.csv"))
        throw CliError("report: " + run_dir + " has no rankings.csv (run the pipeline first)");
    const std::string text = arriva::report::render(run_dir);
    const std::string out_path = (out_override ? *out_override : run_dir) + "/report.md";
    fs::create_directories(fs::path(out_path).parent_path());
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw CliError("report: cannot write " + out_path);
    out << text;
    std::printf("report written: %s\n", out_path.c_str());
    return 0;
}

int cmd_simulate(const std::string& out_path, std::uint64_t seed, std::size_t length,
                 const std::string& scenario, const std::optional<std::string>& closing_out) {
    arriva::DgpSpec spec;
    spec.length = length;
    if (scenario == "sarmax-garch") {
        spec.ar = {{1, 0.35}, {7, 0.35}, {8, -0.1225}};
        spec.ma = {{1, 0.25}};
        spec.garch_omega = 0.0004;
        spec.garch_alpha = 0.10;
        spec.garch_beta = 0.80;
    } else if (scenario == "plain") {
        spec.ar = {{1, 0.4}};
        spec.sigma = 0.08;
    } else {
        throw CliError("simulate: unknown scenario '" + scenario +
                       "' (expected sarmax-garch or plain)");
    }
    if (closing_out) {
        // A handful of mid-sample holidays, spaced irregularly.
        for (std::size_t k = 1; k <= 4; ++k)
            spec.closing_days.push_back(spec.start +
                                        static_cast<std::int32_t>(k * length / 5 + 3 * k));
    }
    const arriva::ArrivalSeries s = arriva::simulate_dgp(spec, seed);
    fs::create_directories(fs::path(out_path).parent_path().empty()
                               ? "."
                               : fs::path(out_path).parent_path());
    arriva::csv::write_series(s, out_path);
    if (closing_out) {
        std::ofstream out(*closing_out, std::ios::binary);
        for (const arriva::Date d : s.closing_days()) out << d.to_string() << '\n';
    }
    std::printf("synthetic series written: %s (%zu days, seed %llu)\n", out_path.c_str(), length,
                static_cast<unsigned long long>(seed));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arriva: call-arrival forecasting and evaluation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;

    auto add_common = [&](CLI::App* cmd, bool need_config) {
        if (need_config)
            cmd->add_option("--config", config_path, "config file (JSON)")
                ->envname("ARRIVA_CONFIG")
                ->required();
        cmd->add_option("--out", out_dir, "output directory")->envname("ARRIVA_OUT");
        cmd->add_option("--seed", seed, "override the run seed")->envname("ARRIVA_SEED");
        cmd->add_option("--jobs", jobs, "parallel model fits")->envname("ARRIVA_JOBS");
    };

    CLI::App* validate = app.add_subcommand("validate", "check a config and its data");
    validate->add_option("--config", config_path, "config file (JSON)")
        ->envname("ARRIVA_CONFIG")
        ->required();

    CLI::App* run_cmd = app.add_subcommand("run", "execute the forecast-evaluation pipeline");
    add_common(run_cmd, true);

    std::string run_dir;
    CLI::App* report_cmd = app.add_subcommand("report", "render tables from a run directory");
    report_cmd->add_option("--run", run_dir, "completed run directory")->required();
    report_cmd->add_option("--out", out_dir, "directory for report.md")->envname("ARRIVA_OUT");

    std::string sim_out = "synthetic.csv";
    std::string scenario = "sarmax-garch";
    std::uint64_t sim_seed = 1;
    std::size_t sim_length = 749;
    std::optional<std::string> closing_out;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "write a synthetic arrival series");
    sim_cmd->add_option("--out", sim_out, "output CSV path");
    sim_cmd->add_option("--seed", sim_seed, "generator seed")->envname("ARRIVA_SEED");
    sim_cmd->add_option("--length", sim_length, "number of days");
    sim_cmd->add_option("--scenario", scenario, "sarmax-garch | plain");
    sim_cmd->add_option("--closing-days", closing_out, "also write a closing-days file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (run_cmd->parsed()) return cmd_run(config_path, out_dir, seed, jobs);
        if (report_cmd->parsed()) return cmd_report(run_dir, out_dir);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_out, sim_seed, sim_length, scenario, closing_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
