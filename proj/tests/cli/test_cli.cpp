// Exercises the CLI surface: subcommands, exit codes, output shapes.

#include "kpzsim/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_cli;
int g_failures = 0;

int run(const std::string& args)
{
    const int rc = std::system((g_cli + " " + args).c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

void expect(bool ok, const std::string& what)
{
    if (!ok) {
        ++g_failures;
        std::cerr << "FAIL: " << what << "\n";
    }
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s)
{
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-kpzsim>\n";
        return 2;
    }
    g_cli = argv[1];
    const fs::path base = fs::temp_directory_path() / "kpzsim_cli_tests";
    fs::remove_all(base);
    fs::create_directories(base);

    const fs::path cfg = base / "sim.cfg";
    kpzsim::write_file(cfg.string(),
                       "model = asep\nq = 0.5\nalpha = 0\nepsilon = 0.25\nt_macro = 0.5\n"
                       "ic.kind = step\nreplicas = 3\nseed = 7\nx_max = 1\n");

    // simulate: writes heights.csv and manifest.json, deterministic rerun
    expect(run("simulate --config " + cfg.string() + " --out " + (base / "s1").string() +
               " >/dev/null") == 0,
           "simulate exits 0");
    expect(fs::exists(base / "s1" / "heights.csv"), "heights.csv written");
    expect(fs::exists(base / "s1" / "manifest.json"), "manifest.json written");
    expect(run("simulate --config " + cfg.string() + " --out " + (base / "s2").string() +
               " >/dev/null") == 0,
           "simulate rerun exits 0");
    expect(kpzsim::fnv1a_digest_file((base / "s1" / "heights.csv").string()) ==
               kpzsim::fnv1a_digest_file((base / "s2" / "heights.csv").string()),
           "rerun produces identical heights.csv");
    {
        const std::string head = slurp(base / "s1" / "heights.csv").substr(0, 25);
        expect(head.rfind("replica,x,raw_h,rescaled", 0) == 0, "heights.csv header");
    }

    // replicas = 0 must be a config error (exit 2)
    const fs::path bad = base / "bad.cfg";
    kpzsim::write_file(bad.string(),
                       "model = asep\nq = 0.5\nepsilon = 0.25\nic.kind = step\nreplicas = 0\n");
    expect(run("simulate --config " + bad.string() + " --out " + (base / "b").string() +
               " 2>/dev/null") == 2,
           "replicas=0 exits 2");

    // a window too small for the request is a runtime error (exit 3)
    const fs::path tiny = base / "tiny.cfg";
    kpzsim::write_file(tiny.string(),
                       "model = asep\nq = 0.5\nepsilon = 0.015625\nt_macro = 1\nic.kind = step\n"
                       "replicas = 1\nwindow.halfwidth = 8\nx_max = 2\n");
    expect(run("simulate --config " + tiny.string() + " --out " + (base / "t").string() +
               " 2>/dev/null") == 3,
           "undersized window exits 3");

    // sheet: 3 x-grid x 3 y-grid rows plus a header
    const fs::path shcfg = base / "sheet.cfg";
    kpzsim::write_file(shcfg.string(),
                       "model = asep\nq = 0.5\nalpha = 0\nepsilon = 0.25\nseed = 5\n"
                       "sheet.t = 0.5\nsheet.y_half = 0.4\nsheet.x_half = 0.4\nsheet.site_step = 1\n");
    expect(run("sheet --config " + shcfg.string() + " --out " + (base / "sh").string() +
               " >/dev/null") == 0,
           "sheet exits 0");
    {
        const std::string csv = slurp(base / "sh" / "sheet.csv");
        // y span = floor(beta * 0.4 * eps^-2/3) = floor(2*0.4*2.52) = 2 -> 5 sites
        expect(count_lines(csv) == 1 + 5 * 5, "sheet.csv has |y-grid| * |x-grid| rows");
        expect(fs::exists(base / "sh" / "coeffs.json"), "coeffs.json written");
    }

    // coeffs prints JSON
    expect(run("coeffs --config " + cfg.string() + " > " + (base / "coeffs.out").string()) == 0,
           "coeffs exits 0");
    expect(slurp(base / "coeffs.out").find("\"beta\"") != std::string::npos, "coeffs prints beta");

    // verify: unknown suite is a config error
    expect(run("verify nonsense --out " + (base / "v0").string() + " 2>/dev/null") == 2,
           "unknown suite exits 2");

    // a tiny exact suite passes; the negative control must exit 1
    const fs::path vcfg = base / "verify.cfg";
    kpzsim::write_file(vcfg.string(), "seed = 3\nsuite.scale = 0.1\n");
    expect(run("verify exact --config " + vcfg.string() + " --out " + (base / "v1").string() +
               " >/dev/null") == 0,
           "exact suite exits 0");
    expect(fs::exists(base / "v1" / "summary.csv"), "summary.csv written");
    expect(fs::exists(base / "v1" / "reports" / "vertex_stochasticity.json"), "report json written");
    expect(run("verify exact --negative-control --config " + vcfg.string() + " --out " +
               (base / "v2").string() + " >/dev/null") == 1,
           "negative control exits 1");

    if (g_failures == 0) {
        std::puts("cli_tests: all checks passed");
        return 0;
    }
    std::fprintf(stderr, "cli_tests: %d failures\n", g_failures);
    return 1;
}
