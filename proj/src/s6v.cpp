#include "kpzsim/s6v.hpp"

#include <algorithm>
#include <stdexcept>

namespace kpzsim {

VertexNoiseField::VertexNoiseField(std::uint64_t seed, double q, double b_right)
    : noise_(seed), q_(q), b_right_(b_right), p_up_(q * b_right), p_right_(b_right)
{
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("VertexNoiseField: q must be in [0,1)");
    if (b_right <= 0.0 || b_right >= 1.0)
        throw std::invalid_argument("VertexNoiseField: b_right must be in (0,1)");
}

std::vector<std::uint8_t> step_column(S6vState& state, const VertexNoiseField& noise)
{
    const Window& w = state.config.window;
    const std::int64_t col = state.t + 1;
    std::vector<std::uint8_t> b_records(static_cast<std::size_t>(w.size()), 0);

    int a = 0; // no arrow enters vertically at the bottom
    for (std::int64_t y = w.lo; y <= w.hi; ++y) {
        const std::size_t yi = w.index(y);
        const int i = state.config.occ[yi];
        int j, b;
        if (i == a) {
            j = i;
            b = a;
        } else if (a == 1) {
            const bool up = noise.x_up(col, y);
            j = up ? 0 : 1;
            b = up ? 1 : 0;
        } else {
            const bool right = noise.x_right(col, y);
            j = right ? 1 : 0;
            b = right ? 0 : 1;
        }
        state.config.occ[yi] = static_cast<std::uint8_t>(j);
        b_records[yi] = static_cast<std::uint8_t>(b);
        state.cumulative_b[yi] += b;
        a = b;
    }
    state.t = col;
    return b_records;
}

void height_step(HeightFunction& h, const std::vector<std::uint8_t>& b_records, Window b_window)
{
    if (b_records.size() != static_cast<std::size_t>(b_window.size()))
        throw std::invalid_argument("height_step: record size mismatch");
    for (std::int64_t y = std::max(h.window.lo, b_window.lo); y <= std::min(h.window.hi, b_window.hi); ++y)
        h.value[h.window.index(y)] += b_records[b_window.index(y)];
}

S6vEngine::S6vEngine(std::uint64_t seed, double q, double b_right, Window window)
    : noise_(seed, q, b_right), window_(window)
{
    window.require_nonempty("S6vEngine");
}

int S6vEngine::add_state(const ParticleConfig& config, std::int64_t start_column)
{
    if (config.window != window_) throw std::invalid_argument("add_state: window mismatch");
    UncoloredState s;
    s.occ = config.occ;
    s.start = start_column;
    states_.push_back(std::move(s));
    return static_cast<int>(states_.size()) - 1;
}

void S6vEngine::track_height(int state_id, const HeightFunction& h0)
{
    auto& s = states_.at(static_cast<std::size_t>(state_id));
    if (h0.window.lo > window_.lo || h0.window.hi < window_.hi)
        throw std::invalid_argument("track_height: height window does not cover engine window");
    s.track_h = true;
    s.h.resize(static_cast<std::size_t>(window_.size()));
    for (std::int64_t y = window_.lo; y <= window_.hi; ++y)
        s.h[window_.index(y)] = h0.at(y);
}

int S6vEngine::add_colored_state(const ColoredConfig& config, std::int64_t start_column)
{
    if (config.window != window_) throw std::invalid_argument("add_colored_state: window mismatch");
    ColoredState s;
    s.color = config.color;
    s.start = start_column;
    colored_.push_back(std::move(s));
    return static_cast<int>(colored_.size()) - 1;
}

void S6vEngine::track_cuts(int colored_id, std::vector<Color> cuts,
                           const std::vector<HeightFunction>& h0s)
{
    auto& s = colored_.at(static_cast<std::size_t>(colored_id));
    if (cuts.size() != h0s.size()) throw std::invalid_argument("track_cuts: size mismatch");
    if (!std::is_sorted(cuts.begin(), cuts.end()))
        throw std::invalid_argument("track_cuts: cuts must be ascending");
    s.cuts = std::move(cuts);
    const std::size_t k = s.cuts.size();
    s.cut_h.assign(static_cast<std::size_t>(window_.size()) * k, 0);
    for (std::size_t ci = 0; ci < k; ++ci) {
        const auto& h0 = h0s[ci];
        if (h0.window.lo > window_.lo || h0.window.hi < window_.hi)
            throw std::invalid_argument("track_cuts: height window does not cover engine window");
        for (std::int64_t y = window_.lo; y <= window_.hi; ++y)
            s.cut_h[window_.index(y) * k + ci] = static_cast<std::int32_t>(h0.at(y));
    }
}

void S6vEngine::run_until_column(std::int64_t t, const VertexObserver& observer)
{
    while (column_ < t) {
        const std::int64_t col = column_ + 1;

        for (auto& s : states_) {
            if (col <= s.start) continue;
            int a = 0;
            for (std::int64_t y = window_.lo; y <= window_.hi; ++y) {
                const std::size_t yi = window_.index(y);
                const int i = s.occ[yi];
                int j, b;
                if (i == a) {
                    j = i;
                    b = a;
                } else if (a == 1) {
                    const bool up = noise_.x_up(col, y);
                    j = up ? 0 : 1;
                    b = up ? 1 : 0;
                } else {
                    const bool right = noise_.x_right(col, y);
                    j = right ? 1 : 0;
                    b = right ? 0 : 1;
                }
                if (observer)
                    observer(col, y, i ? 1 : no_particle, a ? 1 : no_particle,
                             j ? 1 : no_particle, b ? 1 : no_particle);
                s.occ[yi] = static_cast<std::uint8_t>(j);
                if (s.track_h) s.h[yi] += b;
                a = b;
            }
        }

        for (auto& s : colored_) {
            if (col <= s.start) continue;
            const std::size_t k = s.cuts.size();
            Color a = no_particle;
            for (std::int64_t y = window_.lo; y <= window_.hi; ++y) {
                const std::size_t yi = window_.index(y);
                const Color i = s.color[yi];
                Color j, b;
                if (i == a) {
                    j = i;
                    b = a;
                } else if (a > i) {
                    const bool up = noise_.x_up(col, y);
                    j = up ? i : a;
                    b = up ? a : i;
                } else {
                    const bool right = noise_.x_right(col, y);
                    j = right ? i : a;
                    b = right ? a : i;
                }
                if (observer) observer(col, y, i, a, j, b);
                s.color[yi] = j;
                if (k != 0 && b != no_particle) {
                    const auto ub = std::upper_bound(s.cuts.begin(), s.cuts.end(), b);
                    std::int32_t* row = &s.cut_h[yi * k];
                    const std::size_t nb = static_cast<std::size_t>(ub - s.cuts.begin());
                    for (std::size_t c = 0; c < nb; ++c) ++row[c];
                }
                a = b;
            }
        }

        column_ = col;
    }
}

ParticleConfig S6vEngine::config(int state_id) const
{
    const auto& s = states_.at(static_cast<std::size_t>(state_id));
    ParticleConfig c(window_);
    c.occ = s.occ;
    return c;
}

HeightFunction S6vEngine::height(int state_id) const
{
    const auto& s = states_.at(static_cast<std::size_t>(state_id));
    if (!s.track_h) throw std::logic_error("height: state does not track heights");
    return HeightFunction(window_, std::vector<std::int64_t>(s.h.begin(), s.h.end()));
}

std::int64_t S6vEngine::height_at(int state_id, std::int64_t site) const
{
    const auto& s = states_.at(static_cast<std::size_t>(state_id));
    if (!s.track_h) throw std::logic_error("height_at: state does not track heights");
    return s.h[window_.index(site)];
}

ColoredConfig S6vEngine::colored_config(int colored_id) const
{
    const auto& s = colored_.at(static_cast<std::size_t>(colored_id));
    ColoredConfig c(window_);
    c.color = s.color;
    return c;
}

ColoredHeightFunction S6vEngine::cut_heights(int colored_id) const
{
    const auto& s = colored_.at(static_cast<std::size_t>(colored_id));
    ColoredHeightFunction out;
    out.cuts = s.cuts;
    const std::size_t k = s.cuts.size();
    for (std::size_t ci = 0; ci < k; ++ci) {
        std::vector<std::int64_t> v(static_cast<std::size_t>(window_.size()));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.cut_h[i * k + ci];
        out.heights.emplace_back(window_, std::move(v));
    }
    return out;
}

std::int64_t S6vEngine::cut_height_at(int colored_id, std::size_t cut_index, std::int64_t site) const
{
    const auto& s = colored_.at(static_cast<std::size_t>(colored_id));
    return s.cut_h[window_.index(site) * s.cuts.size() + cut_index];
}

SparseS6v::SparseS6v(std::uint64_t seed, double q, double b_right) : noise_(seed, q, b_right) {}

void SparseS6v::place(std::int64_t site, Color color)
{
    if (color == no_particle || particles_.count(site))
        throw std::invalid_argument("SparseS6v::place: bad placement");
    particles_[site] = color;
}

void SparseS6v::run_until_column(std::int64_t t)
{
    while (column_ < t) {
        const std::int64_t col = column_ + 1;
        std::map<std::int64_t, Color> next;

        Color a = no_particle;
        std::int64_t a_y = std::numeric_limits<std::int64_t>::min();
        for (const auto& [y, i] : particles_) {
            // Climb the carried arrow through the empty rows strictly below y.
            if (a != no_particle) {
                for (std::int64_t yy = a_y + 1; yy < y; ++yy) {
                    if (!noise_.x_up(col, yy)) {
                        next[yy] = a;
                        a = no_particle;
                        break;
                    }
                }
            }
            if (a == no_particle) {
                // Only a horizontal arrow here; it turns up with prob 1-b_right.
                if (noise_.x_right(col, y)) {
                    next[y] = i;
                } else {
                    a = i;
                    a_y = y;
                }
            } else if (a == i) {
                next[y] = i; // equal colors pass straight through
                a_y = y;
            } else if (a > i) {
                const bool up = noise_.x_up(col, y);
                next[y] = up ? i : a;
                a = up ? a : i;
                a_y = y;
            } else {
                const bool right = noise_.x_right(col, y);
                next[y] = right ? i : a;
                a = right ? a : i;
                a_y = y;
            }
        }
        // Let a still-climbing arrow land above the last particle.
        if (a != no_particle) {
            std::int64_t yy = a_y + 1;
            while (noise_.x_up(col, yy)) ++yy;
            next[yy] = a;
        }

        particles_ = std::move(next);
        column_ = col;
    }
}

bool SparseS6v::rightmost_of_color(Color c, std::int64_t& out) const
{
    for (auto it = particles_.rbegin(); it != particles_.rend(); ++it) {
        if (it->second == c) {
            out = it->first;
            return true;
        }
    }
    return false;
}

} // namespace kpzsim
