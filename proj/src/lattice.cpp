#include "kpzsim/lattice.hpp"

#include <algorithm>

namespace kpzsim {

ParticleConfig config_from_height(const HeightFunction& h)
{
    if (h.window.size() < 2)
        throw std::invalid_argument("config_from_height: need at least two sites");
    ParticleConfig c(Window{h.window.lo + 1, h.window.hi});
    for (std::int64_t x = c.window.lo; x <= c.window.hi; ++x)
        c.set(x, static_cast<std::uint8_t>(h.at(x - 1) - h.at(x)));
    return c;
}

HeightFunction height_from_config(const ParticleConfig& c, std::int64_t anchor_site,
                                  std::int64_t anchor_value)
{
    // h lives on [window.lo - 1, window.hi] so the round trip is exact.
    const Window hw{c.window.lo - 1, c.window.hi};
    if (anchor_site < hw.lo || anchor_site > hw.hi)
        throw std::invalid_argument("height_from_config: anchor outside window");
    std::vector<std::int64_t> v(static_cast<std::size_t>(hw.size()), 0);
    for (std::int64_t x = hw.lo + 1; x <= hw.hi; ++x)
        v[hw.index(x)] = v[hw.index(x - 1)] - c.at(x);
    const std::int64_t shift = anchor_value - v[hw.index(anchor_site)];
    for (auto& e : v) e += shift;
    return HeightFunction(hw, std::move(v));
}

HeightFunction height_from_colored(const ColoredConfig& c, Color cut, std::int64_t anchor_site,
                                   std::int64_t anchor_value)
{
    return height_from_config(threshold(c, cut), anchor_site, anchor_value);
}

ParticleConfig threshold(const ColoredConfig& c, Color cut)
{
    ParticleConfig p(c.window);
    for (std::size_t i = 0; i < c.color.size(); ++i)
        p.occ[i] = (c.color[i] != no_particle && c.color[i] >= cut) ? 1 : 0;
    return p;
}

ColoredConfig merge_colors(const ColoredConfig& c, const std::vector<ColorInterval>& partition)
{
    for (const auto& iv : partition)
        if (iv.lo > iv.hi) throw std::invalid_argument("merge_colors: interval with lo > hi");
    std::vector<ColorInterval> sorted = partition;
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].lo <= sorted[i - 1].hi)
            throw std::invalid_argument("merge_colors: overlapping intervals");

    auto representative = [&](Color col) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), col,
                                   [](Color v, const ColorInterval& iv) { return v < iv.lo; });
        if (it == sorted.begin() || col > std::prev(it)->hi)
            throw std::invalid_argument("merge_colors: color not covered by partition");
        return std::prev(it)->lo;
    };

    ColoredConfig out(c.window);
    for (std::size_t i = 0; i < c.color.size(); ++i)
        out.color[i] = (c.color[i] == no_particle) ? no_particle : representative(c.color[i]);
    return out;
}

ColoredConfig colorize(const ParticleConfig& c, Color color_of_particle)
{
    ColoredConfig out(c.window);
    for (std::size_t i = 0; i < c.occ.size(); ++i)
        out.color[i] = c.occ[i] ? color_of_particle : no_particle;
    return out;
}

} // namespace kpzsim
