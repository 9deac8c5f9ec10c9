#include "kpzsim/asep.hpp"
#include "kpzsim/ic.hpp"
#include "kpzsim/io.hpp"
#include "kpzsim/noise.hpp"
#include "kpzsim/runner.hpp"
#include "kpzsim/s6v.hpp"
#include "kpzsim/scaling.hpp"
#include "kpzsim/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace kpzsim;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_test_failure = 1;
constexpr int exit_config_error = 2;
constexpr int exit_runtime_error = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> replicas;
    std::optional<int> jobs;
};

Config load_config(const CommonArgs& args)
{
    Config cfg = args.config_path.empty() ? Config{} : Config::parse_file(args.config_path);
    if (args.seed) cfg.set("seed", std::to_string(*args.seed));
    if (args.replicas) cfg.set("replicas", std::to_string(*args.replicas));
    if (args.jobs) cfg.set("jobs", std::to_string(*args.jobs));
    return cfg;
}

// One replica of the configured model run to macroscopic time t; returns the
// rescaled trace over |x| <= x_max.
struct ReplicaTrace {
    std::vector<std::int64_t> sites;
    std::vector<double> xs;
    std::vector<std::int64_t> raw;
    std::vector<double> rescaled;
};

Window simulate_window(const RunSetup& run)
{
    const ScalingCoeffs& c = run.coeffs;
    const double e23 = std::pow(run.eps, -2.0 / 3.0);
    const double drift = drift_sites(c, run.eps, run.t_macro);
    const std::int64_t span = static_cast<std::int64_t>(std::ceil(c.beta * run.x_max * e23)) + 2;
    const Window core{static_cast<std::int64_t>(std::floor(drift)) - span,
                      static_cast<std::int64_t>(std::ceil(drift)) + span};
    Window w;
    if (run.window_auto) {
        w = (run.model == Model::asep)
                ? asep_padded_window(core, c.q, asep_model_time(c, run.eps, run.t_macro))
                : s6v_padded_window(core, c.b_right, s6v_model_columns(run.eps, run.t_macro));
    } else {
        w = Window{-run.window_halfwidth, run.window_halfwidth};
        if (w.lo > core.lo || w.hi < core.hi)
            throw WindowError("window.halfwidth too small for the requested output range");
    }
    return w;
}

ReplicaTrace run_one_replica(const RunSetup& run, std::uint64_t replica_seed)
{
    const ScalingCoeffs& c = run.coeffs;
    const Window w = simulate_window(run);

    IcSpec spec = run.ic;
    if (!run.ic_seed_fixed) spec.seed = derive_seed(replica_seed, 0x1CULL);
    const IcResult ic = make_ic(spec, c, w);

    HeightFunction h;
    if (run.model == Model::asep) {
        const double T = asep_model_time(c, run.eps, run.t_macro);
        if (T > 0.0) {
            AsepEngine engine(replica_seed, c.q, w, T);
            const int id = engine.add_state(ic.config);
            engine.track_height(id, ic.height);
            engine.run_until(T);
            h = engine.height(id);
        } else {
            h = ic.height;
        }
    } else {
        const std::int64_t T = s6v_model_columns(run.eps, run.t_macro);
        if (T > 0) {
            S6vEngine engine(replica_seed, c.q, c.b_right, w);
            const int id = engine.add_state(ic.config);
            engine.track_height(id, ic.height);
            engine.run_until_column(T);
            h = engine.height(id);
        } else {
            h = ic.height;
        }
    }

    const RescaledFunction f = rescale_height(run.model, h, c, run.eps, run.t_macro, -run.x_max, run.x_max);
    ReplicaTrace tr;
    const double e23 = std::pow(run.eps, -2.0 / 3.0);
    const double drift = drift_sites(c, run.eps, run.t_macro);
    for (std::size_t i = 0; i < f.xs.size(); ++i) {
        const auto site = static_cast<std::int64_t>(std::llround(drift + c.beta * f.xs[i] * e23));
        tr.sites.push_back(site);
        tr.xs.push_back(f.xs[i]);
        tr.raw.push_back(h.at(site));
        tr.rescaled.push_back(f.vals[i]);
    }
    return tr;
}

int cmd_simulate(const CommonArgs& args)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Config cfg = load_config(args);
    const RunSetup run = resolve_run_setup(cfg);

    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < run.replicas; ++r) seeds.push_back(derive_seed(run.seed, static_cast<std::uint64_t>(r)));

    std::vector<ReplicaTrace> traces(static_cast<std::size_t>(run.replicas));
    run_replicas(run.replicas, run.jobs,
                 [&](int r) { traces[static_cast<std::size_t>(r)] = run_one_replica(run, seeds[static_cast<std::size_t>(r)]); });

    fs::create_directories(args.out_dir);
    const std::string heights_path = (fs::path(args.out_dir) / "heights.csv").string();
    {
        std::string out = "replica,x,raw_h,rescaled\n";
        for (int r = 0; r < run.replicas; ++r) {
            const auto& tr = traces[static_cast<std::size_t>(r)];
            for (std::size_t i = 0; i < tr.xs.size(); ++i) {
                out += std::to_string(r);
                out += ',';
                out += format_double(tr.xs[i]);
                out += ',';
                out += std::to_string(tr.raw[i]);
                out += ',';
                out += format_double(tr.rescaled[i]);
                out += '\n';
            }
        }
        write_file(heights_path, out);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<ManifestOutput> outs{{"heights.csv", fnv1a_digest_file(heights_path)}};
    write_file((fs::path(args.out_dir) / "manifest.json").string(),
               manifest_json(cfg, run.seed, seeds, wall, outs));
    std::cout << "wrote " << heights_path << " (" << run.replicas << " replicas)\n";
    return exit_ok;
}

int cmd_sheet(const CommonArgs& args)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Config cfg = load_config(args);
    const RunSetup run = resolve_run_setup(cfg);
    const double s = cfg.get_double_or("sheet.s", 0.0);
    const double t = cfg.get_double_or("sheet.t", run.t_macro);
    const double y_half = cfg.get_double_or("sheet.y_half", 1.0);
    const double x_half = cfg.get_double_or("sheet.x_half", 1.0);
    const std::int64_t step = cfg.get_int_or("sheet.site_step", 4);

    const SheetEnsemble sheet = build_sheet(run.model, run.coeffs, run.eps, s, t, y_half, x_half, step, run.seed);

    fs::create_directories(args.out_dir);
    const std::string sheet_path = (fs::path(args.out_dir) / "sheet.csv").string();
    {
        std::string out = "y,x,raw_h,rescaled\n";
        for (std::size_t iy = 0; iy < sheet.y.size(); ++iy)
            for (std::size_t ix = 0; ix < sheet.x.size(); ++ix) {
                out += format_double(sheet.y[iy]);
                out += ',';
                out += format_double(sheet.x[ix]);
                out += ',';
                out += std::to_string(sheet.raw[iy][ix]);
                out += ',';
                out += format_double(sheet.rescaled[iy][ix]);
                out += '\n';
            }
        write_file(sheet_path, out);
    }
    const std::string coeffs_path = (fs::path(args.out_dir) / "coeffs.json").string();
    write_file(coeffs_path, coeffs_to_json(run.coeffs));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<ManifestOutput> outs{{"sheet.csv", fnv1a_digest_file(sheet_path)},
                                     {"coeffs.json", fnv1a_digest_file(coeffs_path)}};
    write_file((fs::path(args.out_dir) / "manifest.json").string(),
               manifest_json(cfg, run.seed, {run.seed}, wall, outs));
    std::cout << "wrote " << sheet_path << "\n";
    return exit_ok;
}

int cmd_verify(const CommonArgs& args, const std::string& suite, bool negative_control)
{
    if (suite != "exact" && suite != "statistical" && suite != "all") {
        std::cerr << "unknown suite: " << suite << " (expected exact | statistical | all)\n";
        return exit_config_error;
    }
    const Config cfg = load_config(args);

    SuiteOptions opt;
    opt.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 1));
    opt.jobs = static_cast<int>(cfg.get_int_or("jobs", default_jobs()));
    opt.scale = cfg.get_double_or("suite.scale", 1.0);
    opt.negative_control = negative_control;

    std::vector<TestReport> reports;
    if (suite == "exact" || suite == "all") {
        auto r = run_exact_suite(opt);
        reports.insert(reports.end(), r.begin(), r.end());
    }
    if (suite == "statistical" || suite == "all") {
        auto r = run_statistical_suite(opt);
        reports.insert(reports.end(), r.begin(), r.end());
    }

    fs::create_directories(fs::path(args.out_dir) / "reports");
    std::string summary = "name,trials,failures,pass,seed\n";
    bool all_pass = true;
    for (const auto& rep : reports) {
        write_file((fs::path(args.out_dir) / "reports" / (rep.name + ".json")).string(),
                   report_to_json(rep));
        summary += rep.name + "," + std::to_string(rep.trials) + "," + std::to_string(rep.failures) +
                   "," + (rep.pass ? "1" : "0") + "," + std::to_string(rep.seed) + "\n";
        std::printf("%-40s %s\n", rep.name.c_str(), rep.pass ? "PASS" : "FAIL");
        all_pass = all_pass && rep.pass;
    }
    write_file((fs::path(args.out_dir) / "summary.csv").string(), summary);
    return all_pass ? exit_ok : exit_test_failure;
}

int cmd_coeffs(const CommonArgs& args)
{
    const Config cfg = load_config(args);
    const RunSetup run = resolve_run_setup(cfg);
    std::cout << coeffs_to_json(run.coeffs);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ASEP / stochastic six-vertex simulation and verification"};
    app.require_subcommand(1);

    CommonArgs args;
    bool negative_control = false;
    std::string suite;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "configuration file (key=value lines)");
        sub->add_option("--seed", args.seed, "master seed (overrides config)");
        sub->add_option("--replicas", args.replicas, "replica count (overrides config)");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--jobs", args.jobs, "worker threads");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run replicas and write heights.csv");
    add_common(simulate);
    CLI::App* sheet = app.add_subcommand("sheet", "build a coupled step-IC sheet and write sheet.csv");
    add_common(sheet);
    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "exact | statistical | all")->required();
    verify->add_flag("--negative-control", negative_control,
                     "sabotage the coupling to demonstrate test power (expected to fail)");
    add_common(verify);
    CLI::App* coeffs = app.add_subcommand("coeffs", "print scaling coefficients as JSON");
    add_common(coeffs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config_error;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (sheet->parsed()) return cmd_sheet(args);
        if (verify->parsed()) return cmd_verify(args, suite, negative_control);
        if (coeffs->parsed()) return cmd_coeffs(args);
    } catch (const WindowError& e) {
        std::cerr << "window error: " << e.what() << "\n";
        return exit_runtime_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::out_of_range& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return exit_runtime_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime_error;
    }
    return exit_config_error;
}
