// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion sizes and tolerances are fixed here, not configurable.

#include "kpzsim/asep.hpp"
#include "kpzsim/ic.hpp"
#include "kpzsim/io.hpp"
#include "kpzsim/noise.hpp"
#include "kpzsim/runner.hpp"
#include "kpzsim/s6v.hpp"
#include "kpzsim/scaling.hpp"
#include "kpzsim/stats.hpp"
#include "kpzsim/verify.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace kpzsim;

namespace {

int g_jobs = default_jobs();
std::string g_cli_path;

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

std::uint64_t group_seed(std::uint64_t master, std::uint64_t tag)
{
    std::uint64_t z = master * 4 + tag + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// ---- criterion 12 helpers: one-point samples from step initial conditions ----

double asep_step_one_point(const ScalingCoeffs& c, double eps, std::uint64_t seed)
{
    const double T = asep_model_time(c, eps, 1.0);
    const auto half = static_cast<std::int64_t>(std::ceil(T + 8.0 * std::sqrt(T))) + 64;
    const Window w{-half, half};
    AsepEngine engine(seed, c.q, w, T);
    const IcResult ic = make_ic(IcSpec{.kind = IcKind::step, .y = 0, .eps = eps}, c, w);
    const int id = engine.add_state(ic.config);
    engine.track_height(id, ic.height);
    engine.run_until(T);
    const HeightFunction h = engine.height(id);
    const double span = 2.0 * std::pow(eps, 2.0 / 3.0) / c.beta + 1e-9; // a few lattice sites
    return rescale_height(Model::asep, h, c, eps, 1.0, -span, span)(0.0);
}

double s6v_step_one_point(const ScalingCoeffs& c, double eps, std::uint64_t seed)
{
    const std::int64_t T = s6v_model_columns(eps, 1.0);
    // particles start strictly above 0 and only move up: the bottom is exact
    const auto drift = static_cast<std::int64_t>(std::llround(c.alpha * static_cast<double>(T)));
    const Window w{0, drift + 8};
    S6vEngine engine(seed, c.q, c.b_right, w);
    const IcResult ic = make_ic(IcSpec{.kind = IcKind::step, .y = 0, .eps = eps}, c, w);
    const int id = engine.add_state(ic.config);
    engine.track_height(id, ic.height);
    engine.run_until_column(T);
    const HeightFunction h = engine.height(id);
    const double span = 2.0 * std::pow(eps, 2.0 / 3.0) / c.beta + 1e-9;
    return rescale_height(Model::s6v, h, c, eps, 1.0, -span, span)(0.0);
}

std::vector<double> one_point_batch(Model model, const ScalingCoeffs& c, double eps, int n,
                                    std::uint64_t seed)
{
    std::vector<double> out(static_cast<std::size_t>(n));
    run_replicas(n, g_jobs, [&](int i) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = (model == Model::asep) ? asep_step_one_point(c, eps, s)
                                                                  : s6v_step_one_point(c, eps, s);
    });
    return out;
}

// ---- criteria ----

CriterionResult c01_vertex_stochasticity()
{
    const TestReport rep = check_vertex_stochasticity(50, 101);
    return {rep.pass, std::to_string(rep.trials) + " random rational (q,b) pairs"};
}

CriterionResult c02_arrow_conservation()
{
    const TestReport rep = check_arrow_conservation(1000000, 102);
    return {rep.pass, std::to_string(rep.trials) + " vertices, " + std::to_string(rep.failures) +
                          " violations"};
}

CriterionResult c03_asep_monotonicity()
{
    const TestReport rep = check_monotonicity_asep(0.5, 2000, 50.0, 1000, 103, g_jobs);
    return {rep.pass, "1000 ordered pairs, T=50, window 2000, violations = " +
                          std::to_string(static_cast<std::int64_t>(rep.stat_value("violations")))};
}

CriterionResult c04_asep_variational()
{
    const ScalingCoeffs c = derive_coeffs_asep(0.5, 0.0);
    const TestReport rb =
        check_variational(Model::asep, c, IcKind::bernoulli, 1.0 / 64.0, 1.0, 2.0, 100, 104, g_jobs);
    const TestReport rs =
        check_variational(Model::asep, c, IcKind::step, 1.0 / 64.0, 1.0, 2.0, 100, 105, g_jobs);
    return {rb.pass && rs.pass,
            "bernoulli violations = " + std::to_string(rb.failures) +
                ", step violations = " + std::to_string(rs.failures) + " (100 replicas each)"};
}

CriterionResult c05_s6v_approx_monotonicity()
{
    const int N = 500;
    const int M = static_cast<int>(std::ceil(std::pow(std::log(static_cast<double>(N)), 2.0)));
    const TestReport rep = check_monotonicity_s6v(0.5, 0.5, N, M, 200, 106, g_jobs, 0.05);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "N=500 M=%d t=%d failure freq = %.3f", M,
                  static_cast<int>(rep.stat_value("t")), rep.stat_value("failure_frequency"));
    return {rep.pass, buf};
}

CriterionResult c06_stationarity()
{
    const double significance = 0.01 / 4.0; // Bonferroni across the four runs
    bool pass = true;
    std::string detail;
    int tag = 0;
    for (Model model : {Model::asep, Model::s6v}) {
        for (double rho : {0.5, 0.525}) {
            const TestReport rep = check_stationarity(model, 0.5, 0.5, rho, 200.0, 3, 1000000,
                                                      derive_seed(107, ++tag), g_jobs, significance);
            pass = pass && rep.pass;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%s rho=%.3f p=%.4f; ", model_name(model), rho,
                          rep.stat_value("chi2_p"));
            detail += buf;
        }
    }
    return {pass, detail};
}

CriterionResult c07_overtaking()
{
    bool pass = true;
    std::string detail;
    int tag = 0;
    for (Model model : {Model::asep, Model::s6v}) {
        for (double q : {0.25, 0.5}) {
            const TestReport rep =
                check_overtaking(model, q, 0.5, 10, 1000.0, 10000, derive_seed(108, ++tag), g_jobs);
            pass = pass && rep.pass;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%s q=%.2f P(L>=1)=%.4f; ", model_name(model), q,
                          rep.stat_value("p_ge_1"));
            detail += buf;
        }
        const TestReport zero =
            check_overtaking(model, 0.0, 0.5, 3, 1000.0, 2000, derive_seed(108, ++tag), g_jobs);
        pass = pass && zero.pass && zero.stat_value("p_ge_1") == 0.0;
    }
    return {pass, detail + "q=0 exact zero both models"};
}

CriterionResult c08_flux_identity()
{
    const ScalingCoeffs ca = derive_coeffs_asep(0.5, 0.0);
    const TestReport ra = check_flux_identity(Model::asep, ca, 1.0 / 64.0, 2.0, 0.25, 1.0, 100, 109, g_jobs);
    const ScalingCoeffs cs = derive_coeffs_s6v(0.5, 0.25, 1.0);
    const TestReport rs = check_flux_identity(Model::s6v, cs, 1.0 / 64.0, 2.0, 0.25, 1.0, 100, 110, g_jobs);
    return {ra.pass && rs.pass, "asep failures = " + std::to_string(ra.failures) +
                                    ", s6v failures = " + std::to_string(rs.failures) +
                                    " (100 replicas, 4 recorded times each)"};
}

CriterionResult c09_merge_projection()
{
    const TestReport ra = check_merge_commute(Model::asep, 100, 111);
    const TestReport rs = check_merge_commute(Model::s6v, 100, 112);
    return {ra.pass && rs.pass, "asep failures = " + std::to_string(ra.failures) +
                                    ", s6v failures = " + std::to_string(rs.failures) +
                                    " (100 instances each)"};
}

CriterionResult c10_rw_above_line()
{
    const double hand = rw_above_line_dp(-0.5, -0.6, 0.0, 2);
    bool pass = hand == 0.5;
    std::string detail = "hand case = " + format_double(hand) + "; ";
    int tag = 0;
    for (double lambda : {-0.3, -0.5, -0.7}) {
        for (double gap : {0.05, 0.1, 0.2}) {
            for (double M : {0.0, 2.0, 5.0}) {
                const TestReport rep = check_rw_above_line(lambda, lambda - gap, M, 200, 100000,
                                                           derive_seed(113, ++tag));
                pass = pass && rep.pass;
            }
        }
    }
    return {pass, detail + "27 (lambda,rho,M) combos vs 1e5-walk Monte Carlo"};
}

CriterionResult c11_finite_speed()
{
    const TestReport ra = check_finite_speed(Model::asep, 0.5, 0.5, 0.1, 1000, 114, g_jobs);
    const TestReport rs = check_finite_speed(Model::s6v, 0.5, 0.5, 0.1, 1000, 115, g_jobs);
    return {ra.pass && rs.pass, "asep failures = " + std::to_string(ra.failures) +
                                    ", s6v failures = " + std::to_string(rs.failures) +
                                    " (1000 colored replicas each)"};
}

CriterionResult c12_universality_trend()
{
    const ScalingCoeffs ca = derive_coeffs_asep(0.5, 0.0);
    const ScalingCoeffs cs = derive_coeffs_s6v(0.5, 0.25, 1.0);
    const int n = 2000;

    bool pass = true;
    std::string detail;
    double last_jittered = 0.0, last_atom = 0.0;
    for (std::uint64_t batch = 1; batch <= 3; ++batch) {
        const auto a32 = one_point_batch(Model::asep, ca, 1.0 / 32.0, n, group_seed(batch, 1));
        const auto a128 = one_point_batch(Model::asep, ca, 1.0 / 128.0, n, group_seed(batch, 2));
        const auto s32 = one_point_batch(Model::s6v, cs, 1.0 / 32.0, n, group_seed(batch, 3));
        const auto s128 = one_point_batch(Model::s6v, cs, 1.0 / 128.0, n, group_seed(batch, 4));
        const double ks32 = ks_distance(a32, s32);
        const double ks128 = ks_distance(a128, s128);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "batch %llu: KS32=%.4f KS128=%.4f; ",
                      static_cast<unsigned long long>(batch), ks32, ks128);
        detail += buf;
        pass = pass && ks32 > ks128 && ks128 < 0.08;

        // Diagnostic: the one-point values are lattice-valued with spacing
        // sigma^-1 eps^(1/3) (0.40 vs 0.47 at eps = 1/128), so the raw
        // cross-model KS is floored near half the largest CDF atom however
        // close the laws are. Jittering each sample uniformly over its own
        // lattice cell removes that floor and compares the laws themselves.
        std::map<double, int> cnt;
        for (double v : s128) ++cnt[v];
        int mx = 0;
        for (const auto& [k, c] : cnt) mx = std::max(mx, c);
        last_atom = static_cast<double>(mx) / n;
        const EnvironmentNoise jn(group_seed(batch, 5));
        const double da = std::pow(1.0 / 128.0, 1.0 / 3.0) / ca.sigma;
        const double ds = std::pow(1.0 / 128.0, 1.0 / 3.0) / cs.sigma;
        std::vector<double> aj(a128), sj(s128);
        for (int i = 0; i < n; ++i) {
            aj[static_cast<std::size_t>(i)] += da * jn.uniform(i, Channel::rw_increment, 1);
            sj[static_cast<std::size_t>(i)] += ds * jn.uniform(i, Channel::rw_increment, 2);
        }
        last_jittered = ks_distance(aj, sj);
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "[diagnostic: largest CDF atom %.2f, lattice-free KS128 %.4f]",
                  last_atom, last_jittered);
    return {pass, detail + buf};
}

int run_cli(const std::string& cmdline)
{
    const int rc = std::system(cmdline.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

CriterionResult c13_reproducibility()
{
    if (g_cli_path.empty()) return {false, "no --cli path given"};
    const fs::path base = fs::temp_directory_path() / "kpzsim_accept13";
    fs::remove_all(base);
    fs::create_directories(base);

    const std::string cfg_path = (base / "run.cfg").string();
    write_file(cfg_path,
               "model = asep\nq = 0.5\nalpha = 0\nepsilon = 0.125\nt_macro = 1\n"
               "ic.kind = bernoulli\nic.rho = 0.5\nreplicas = 6\nseed = 42\nx_max = 1\n");

    auto simulate = [&](const std::string& dir, int jobs) {
        return run_cli(g_cli_path + " simulate --config " + cfg_path + " --out " + (base / dir).string() +
                       " --jobs " + std::to_string(jobs) + " >/dev/null");
    };
    if (simulate("a", 1) != 0) return {false, "cli simulate failed"};
    if (simulate("b", 1) != 0) return {false, "cli simulate rerun failed"};
    if (simulate("p", 4) != 0) return {false, "cli simulate parallel failed"};

    const std::string da = fnv1a_digest_file((base / "a" / "heights.csv").string());
    const std::string db = fnv1a_digest_file((base / "b" / "heights.csv").string());
    const std::string dp = fnv1a_digest_file((base / "p" / "heights.csv").string());
    if (da != db) return {false, "rerun digest mismatch"};
    if (da != dp) return {false, "parallel/serial digest mismatch"};

    // replay from the manifest alone: rebuild the config from its snapshot
    std::ifstream mf((base / "a" / "manifest.json").string());
    nlohmann::json manifest;
    mf >> manifest;
    std::string replay_cfg;
    for (const auto& [k, v] : manifest["config"].items())
        replay_cfg += k + " = " + v.get<std::string>() + "\n";
    write_file((base / "replay.cfg").string(), replay_cfg);
    if (run_cli(g_cli_path + " simulate --config " + (base / "replay.cfg").string() + " --out " +
                (base / "r").string() + " >/dev/null") != 0)
        return {false, "manifest replay failed"};
    const std::string dr = fnv1a_digest_file((base / "r" / "heights.csv").string());
    if (da != dr) return {false, "manifest replay digest mismatch"};
    return {true, "rerun, parallel, and manifest replay all byte-identical (" + da + ")"};
}

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) g_cli_path = argv[++i];
        if (arg == "--jobs" && i + 1 < argc) g_jobs = std::atoi(argv[++i]);
        if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    }

    struct Entry {
        int id;
        const char* name;
        std::function<CriterionResult()> fn;
    };
    const std::vector<Entry> entries = {
        {1, "vertex stochasticity (exact rational)", c01_vertex_stochasticity},
        {2, "arrow conservation over 1e6 vertices", c02_arrow_conservation},
        {3, "ASEP height monotonicity (exact)", c03_asep_monotonicity},
        {4, "ASEP prelimiting variational inequality", c04_asep_variational},
        {5, "S6V approximate monotonicity", c05_s6v_approx_monotonicity},
        {6, "stationarity pattern chi-square", c06_stationarity},
        {7, "overtaking bound", c07_overtaking},
        {8, "flux identity", c08_flux_identity},
        {9, "color-merge projection", c09_merge_projection},
        {10, "RW above line: DP vs Monte Carlo", c10_rw_above_line},
        {11, "finite speed of propagation", c11_finite_speed},
        {12, "universality trend (KS across eps)", c12_universality_trend},
        {13, "reproducibility (rerun, parallel, replay)", c13_reproducibility},
    };

    bool all_pass = true;
    for (const auto& e : entries) {
        if (only != 0 && e.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult res;
        try {
            res = e.fn();
        } catch (const std::exception& ex) {
            res = {false, std::string("exception: ") + ex.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%2d] %s  %-45s (%.1fs) %s\n", e.id, res.pass ? "PASS" : "FAIL", e.name, secs,
                    res.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && res.pass;
    }
    return all_pass ? 0 : 1;
}
