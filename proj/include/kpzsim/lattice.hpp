#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kpzsim {

using Color = std::int32_t;

// Simulation window cannot accommodate the request (mapped to exit code 3 by
// the CLI, as opposed to configuration errors which are invalid_argument).
struct WindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sentinel for "no particle" in colored configurations.
inline constexpr Color no_particle = std::numeric_limits<Color>::min();

// Closed integer interval [lo, hi] of lattice sites.
struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = -1;

    std::int64_t size() const { return hi - lo + 1; }
    bool empty() const { return hi < lo; }
    bool contains(std::int64_t x) const { return x >= lo && x <= hi; }
    std::size_t index(std::int64_t x) const { return static_cast<std::size_t>(x - lo); }

    void require_nonempty(const char* what) const
    {
        if (empty()) throw std::invalid_argument(std::string(what) + ": empty window");
    }
    bool operator==(const Window&) const = default;
};

// 0/1 occupancy on a window. Sites outside the window are governed by the
// boundary policy of the consumer (frozen holes during evolution).
struct ParticleConfig {
    Window window;
    std::vector<std::uint8_t> occ; // size == window.size()

    ParticleConfig() = default;
    explicit ParticleConfig(Window w) : window(w), occ(static_cast<std::size_t>(w.size()), 0)
    {
        w.require_nonempty("ParticleConfig");
    }

    std::uint8_t at(std::int64_t x) const { return occ[window.index(x)]; }
    void set(std::int64_t x, std::uint8_t v) { occ[window.index(x)] = v; }

    std::int64_t particle_count() const
    {
        std::int64_t n = 0;
        for (auto v : occ) n += v;
        return n;
    }
    bool operator==(const ParticleConfig&) const = default;
};

// Color per site, no_particle for holes.
struct ColoredConfig {
    Window window;
    std::vector<Color> color;

    ColoredConfig() = default;
    explicit ColoredConfig(Window w) : window(w), color(static_cast<std::size_t>(w.size()), no_particle)
    {
        w.require_nonempty("ColoredConfig");
    }

    Color at(std::int64_t x) const { return color[window.index(x)]; }
    void set(std::int64_t x, Color c) { color[window.index(x)] = c; }
    bool operator==(const ColoredConfig&) const = default;
};

// Integer height function on a window: h(x+1) - h(x) in {0,-1}. Values are
// stored directly; the anchor is (window.lo, values.front()).
struct HeightFunction {
    Window window;
    std::vector<std::int64_t> value;

    HeightFunction() = default;
    HeightFunction(Window w, std::vector<std::int64_t> v) : window(w), value(std::move(v))
    {
        w.require_nonempty("HeightFunction");
        if (value.size() != static_cast<std::size_t>(w.size()))
            throw std::invalid_argument("HeightFunction: size mismatch");
        validate();
    }

    std::int64_t at(std::int64_t x) const { return value[window.index(x)]; }

    void validate() const
    {
        for (std::size_t i = 1; i < value.size(); ++i) {
            const std::int64_t d = value[i] - value[i - 1];
            if (d != 0 && d != -1)
                throw std::invalid_argument("HeightFunction: increment outside {0,-1}");
        }
    }
    bool operator==(const HeightFunction&) const = default;
};

// One height function per tracked color cut; h(cut, .) counts particles of
// color >= cut to the right, up to the anchor.
struct ColoredHeightFunction {
    std::vector<Color> cuts;              // strictly increasing
    std::vector<HeightFunction> heights;  // parallel to cuts

    const HeightFunction& at_cut(Color c) const
    {
        for (std::size_t i = 0; i < cuts.size(); ++i)
            if (cuts[i] == c) return heights[i];
        throw std::invalid_argument("ColoredHeightFunction: cut not tracked");
    }
};

// eta(x) = h(x-1) - h(x); the first window site of h has no left neighbor, so
// the config lives on [window.lo+1, window.hi].
ParticleConfig config_from_height(const HeightFunction& h);

// Height from occupancy, anchored at (anchor_site, anchor_value). h decreases
// by eta(x) on the step x-1 -> x.
HeightFunction height_from_config(const ParticleConfig& c, std::int64_t anchor_site,
                                  std::int64_t anchor_value);

// Same, for the thresholded occupancy {color >= cut}.
HeightFunction height_from_colored(const ColoredConfig& c, Color cut, std::int64_t anchor_site,
                                   std::int64_t anchor_value);

ParticleConfig threshold(const ColoredConfig& c, Color cut);

// An ordered partition of the colors present in a configuration into
// intervals [lo, hi]; merge_colors maps every color in an interval to the
// interval's lower endpoint. Holes are untouched.
struct ColorInterval {
    Color lo;
    Color hi;
};

ColoredConfig merge_colors(const ColoredConfig& c, const std::vector<ColorInterval>& partition);

// Uncolored <-> colored embeddings used by the merge/projection tests.
ColoredConfig colorize(const ParticleConfig& c, Color color_of_particle);

} // namespace kpzsim
