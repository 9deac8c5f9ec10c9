#include "kpzsim/lattice.hpp"
#include "kpzsim/noise.hpp"

#include <doctest.h>

using namespace kpzsim;

TEST_CASE("height/config correspondence")
{
    SUBCASE("constant height gives the empty configuration")
    {
        const HeightFunction h(Window{-3, 3}, {5, 5, 5, 5, 5, 5, 5});
        const ParticleConfig c = config_from_height(h);
        for (std::int64_t x = c.window.lo; x <= c.window.hi; ++x) CHECK(c.at(x) == 0);
    }
    SUBCASE("unit drop across a site marks a particle there")
    {
        // h = (..., 2, 1, 0, 0, ...) dropping by one across x
        const HeightFunction h(Window{-2, 2}, {2, 1, 0, 0, 0});
        const ParticleConfig c = config_from_height(h);
        CHECK(c.at(-1) == 1);
        CHECK(c.at(0) == 1);
        CHECK(c.at(1) == 0);
        CHECK(c.at(2) == 0);
    }
    SUBCASE("config -> height -> config round trip is the identity")
    {
        const EnvironmentNoise n(3);
        ParticleConfig c(Window{-10, 10});
        for (std::int64_t x = -10; x <= 10; ++x)
            c.set(x, n.bernoulli(x, Channel::ic_bernoulli, 0, 0.5));
        const HeightFunction h = height_from_config(c, 0, 7);
        CHECK(h.at(0) == 7);
        CHECK(config_from_height(h) == c);
    }
    SUBCASE("invalid increments are rejected")
    {
        CHECK_THROWS_AS(HeightFunction(Window{0, 2}, {0, 1, 0}), std::invalid_argument);
        CHECK_THROWS_AS(HeightFunction(Window{0, 2}, {0, -2, -2}), std::invalid_argument);
    }
}

TEST_CASE("merge_colors")
{
    ColoredConfig c(Window{0, 5});
    c.set(0, 1);
    c.set(2, 2);
    c.set(3, 5);
    c.set(5, 1);

    SUBCASE("identity partition changes nothing")
    {
        const auto out = merge_colors(c, {{1, 1}, {2, 2}, {5, 5}});
        CHECK(out == c);
    }
    SUBCASE("merging {1,2} to one class keeps holes and maps to the low endpoint")
    {
        const auto out = merge_colors(c, {{1, 2}, {5, 5}});
        CHECK(out.at(0) == 1);
        CHECK(out.at(1) == no_particle);
        CHECK(out.at(2) == 1);
        CHECK(out.at(3) == 5);
        CHECK(out.at(5) == 1);
    }
    SUBCASE("overlapping or non-covering partitions are rejected")
    {
        CHECK_THROWS_AS(merge_colors(c, {{1, 2}, {2, 5}}), std::invalid_argument);
        CHECK_THROWS_AS(merge_colors(c, {{1, 2}}), std::invalid_argument);
        CHECK_THROWS_AS(merge_colors(c, {{2, 1}}), std::invalid_argument);
    }
}

TEST_CASE("threshold extracts the {color >= cut} occupancy")
{
    ColoredConfig c(Window{0, 3});
    c.set(0, -1);
    c.set(1, 2);
    c.set(3, 0);
    const ParticleConfig p = threshold(c, 0);
    CHECK(p.at(0) == 0);
    CHECK(p.at(1) == 1);
    CHECK(p.at(2) == 0);
    CHECK(p.at(3) == 1);
}
