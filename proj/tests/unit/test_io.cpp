#include "kpzsim/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace kpzsim;

TEST_CASE("config parsing")
{
    const Config cfg = Config::parse_string(
        "# a comment\n"
        "model = asep\n"
        "q = 0.5\n"
        "epsilon = 0.125\n"
        "[ic]\n"
        "kind = bernoulli\n"
        "rho = 0.5\n"
        "[window]\n"
        "auto = true\n");
    CHECK(cfg.get("model") == "asep");
    CHECK(cfg.get_double("q") == 0.5);
    CHECK(cfg.get("ic.kind") == "bernoulli");
    CHECK(cfg.get_bool_or("window.auto", false));
    CHECK(cfg.get_int_or("replicas", 4) == 4);
    CHECK_THROWS_AS(cfg.get("nope"), std::invalid_argument);
    CHECK_THROWS_AS(Config::parse_string("just a line\n"), std::invalid_argument);
    CHECK_THROWS_AS(cfg.get_int("q"), std::invalid_argument);
}

TEST_CASE("run setup resolution")
{
    Config cfg = Config::parse_string(
        "model = s6v\nq = 0.5\nz = 0.25\nalpha = 1\nepsilon = 0.0625\n"
        "ic.kind = step\nreplicas = 2\nseed = 9\n");
    const RunSetup run = resolve_run_setup(cfg);
    CHECK(run.model == Model::s6v);
    CHECK(run.coeffs.b_right == doctest::Approx(6.0 / 7.0));
    CHECK(run.replicas == 2);
    CHECK(run.seed == 9);
    CHECK(run.window_auto);

    cfg.set("replicas", "0");
    CHECK_THROWS_AS(resolve_run_setup(cfg), std::invalid_argument);
}

TEST_CASE("explicit ic.seed quenches the initial condition")
{
    Config cfg = Config::parse_string(
        "model = asep\nq = 0.5\nepsilon = 0.25\nic.kind = bernoulli\nseed = 4\n");
    const RunSetup a = resolve_run_setup(cfg);
    CHECK_FALSE(a.ic_seed_fixed);
    CHECK(a.ic.seed == 4);

    cfg.set("ic.seed", "99");
    const RunSetup b = resolve_run_setup(cfg);
    CHECK(b.ic_seed_fixed);
    CHECK(b.ic.seed == 99);
    CHECK(b.seed == 4);
}

TEST_CASE("format_double round trips")
{
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-17, 123456789.123456789}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
        CHECK(s.find(',') == std::string::npos);
    }
}

TEST_CASE("digest is content-determined")
{
    const char* path_a = "digest_test_a.tmp";
    const char* path_b = "digest_test_b.tmp";
    write_file(path_a, "hello\n");
    write_file(path_b, "hello\n");
    CHECK(fnv1a_digest_file(path_a) == fnv1a_digest_file(path_b));
    write_file(path_b, "hello!\n");
    CHECK(fnv1a_digest_file(path_a) != fnv1a_digest_file(path_b));
    std::remove(path_a);
    std::remove(path_b);
}

TEST_CASE("report and coeffs serialize to json")
{
    TestReport r;
    r.name = "demo";
    r.trials = 3;
    r.pass = true;
    r.stat("value", 1.25);
    const std::string j = report_to_json(r);
    CHECK(j.find("\"demo\"") != std::string::npos);
    CHECK(j.find("\"value\"") != std::string::npos);

    const std::string c = coeffs_to_json(derive_coeffs_asep(0.5, 0.0));
    CHECK(c.find("\"asep\"") != std::string::npos);
    CHECK(c.find("\"beta\"") != std::string::npos);
}
