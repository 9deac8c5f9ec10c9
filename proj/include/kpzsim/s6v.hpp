#pragma once

#include "kpzsim/lattice.hpp"
#include "kpzsim/noise.hpp"

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace kpzsim {

// Shared Bernoulli field driving every S6V evolution in a run: X_up with
// P(1) = q*b_right decides vertices entered vertically, X_right with
// P(1) = b_right decides vertices entered horizontally. Pure in
// (seed, vertex, channel).
class VertexNoiseField {
public:
    VertexNoiseField(std::uint64_t seed, double q, double b_right);

    bool x_up(std::int64_t column, std::int64_t y) const
    {
        return noise_.bernoulli(y, Channel::vertex_up, static_cast<std::uint64_t>(column), p_up_);
    }
    bool x_right(std::int64_t column, std::int64_t y) const
    {
        return noise_.bernoulli(y, Channel::vertex_right, static_cast<std::uint64_t>(column), p_right_);
    }

    double p_up() const { return p_up_; }
    double p_right() const { return p_right_; }
    double q() const { return q_; }
    double b_right() const { return b_right_; }
    std::uint64_t seed() const { return noise_.seed(); }

private:
    EnvironmentNoise noise_;
    double q_;
    double b_right_;
    double p_up_;
    double p_right_;
};

// One vertex of the uncolored model. Inputs: i horizontal, a vertical.
// Returns (j horizontal out, b vertical out). Arrow conservation i+a == j+b
// holds by construction.
inline std::pair<int, int> vertex_update(int i_in, int a_in, bool x_up, bool x_right)
{
    if (i_in == a_in) return {i_in, a_in};
    if (a_in == 1) return x_up ? std::pair{0, 1} : std::pair{1, 0};
    return x_right ? std::pair{1, 0} : std::pair{0, 1};
}

// Colored vertex: the higher color ignores the lower one, so it follows the
// uncolored rule on its own channel; the lower color takes the other exit.
// Conservation as multisets {i,a} == {j,b}.
inline std::pair<Color, Color> colored_vertex_update(Color i_in, Color a_in, bool x_up, bool x_right)
{
    if (i_in == a_in) return {i_in, a_in};
    if (a_in > i_in) return x_up ? std::pair{i_in, a_in} : std::pair{a_in, i_in};
    return x_right ? std::pair{i_in, a_in} : std::pair{a_in, i_in};
}

// Uncolored S6V state: column counter, current arrow configuration, and
// cumulative vertical-exit counts (h(y,t) - h(y,0)).
struct S6vState {
    std::int64_t t = 0;
    ParticleConfig config;
    std::vector<std::int64_t> cumulative_b;

    explicit S6vState(ParticleConfig c)
        : config(std::move(c)), cumulative_b(static_cast<std::size_t>(config.window.size()), 0)
    {
    }
};

// Advances one column (bottom-to-top sweep, no vertical inflow at the window
// bottom). Returns the b-records of the sampled column.
std::vector<std::uint8_t> step_column(S6vState& state, const VertexNoiseField& noise);

// h(y,t) = h(y,t-1) + b_(t,y) applied over the height window.
void height_step(HeightFunction& h, const std::vector<std::uint8_t>& b_records, Window b_window);

// Observer invoked per sampled vertex: (column, y, i_in, a_in, j_out, b_out)
// with colors (no_particle for absent arrows).
using VertexObserver =
    std::function<void(std::int64_t, std::int64_t, Color, Color, Color, Color)>;

// Dense multi-state S6V under the shared noise field.
class S6vEngine {
public:
    S6vEngine(std::uint64_t seed, double q, double b_right, Window window);

    int add_state(const ParticleConfig& config, std::int64_t start_column = 0);
    void track_height(int state_id, const HeightFunction& h0);

    int add_colored_state(const ColoredConfig& config, std::int64_t start_column = 0);
    void track_cuts(int colored_id, std::vector<Color> cuts, const std::vector<HeightFunction>& h0s);

    // Samples columns now+1 .. t.
    void run_until_column(std::int64_t t, const VertexObserver& observer = {});

    std::int64_t column() const { return column_; }
    const Window& window() const { return window_; }
    const VertexNoiseField& noise() const { return noise_; }

    ParticleConfig config(int state_id) const;
    HeightFunction height(int state_id) const;
    std::int64_t height_at(int state_id, std::int64_t site) const;

    ColoredConfig colored_config(int colored_id) const;
    ColoredHeightFunction cut_heights(int colored_id) const;
    std::int64_t cut_height_at(int colored_id, std::size_t cut_index, std::int64_t site) const;

private:
    struct UncoloredState {
        std::vector<std::uint8_t> occ;
        std::int64_t start = 0;
        bool track_h = false;
        std::vector<std::int64_t> h;
    };
    struct ColoredState {
        std::vector<Color> color;
        std::int64_t start = 0;
        std::vector<Color> cuts;
        std::vector<std::int32_t> cut_h; // [site * cuts.size() + k]
    };

    VertexNoiseField noise_;
    Window window_;
    std::int64_t column_ = 0;

    std::vector<UncoloredState> states_;
    std::vector<ColoredState> colored_;
};

// Lazy colored S6V for systems with few arrows: cost per column is the number
// of particles plus climb lengths, independent of the window. Agrees exactly
// with S6vEngine for matching (seed, q, b_right).
class SparseS6v {
public:
    SparseS6v(std::uint64_t seed, double q, double b_right);

    void place(std::int64_t site, Color color);
    void run_until_column(std::int64_t t);

    const std::map<std::int64_t, Color>& particles() const { return particles_; }
    bool rightmost_of_color(Color c, std::int64_t& out) const;
    std::int64_t column() const { return column_; }

private:
    VertexNoiseField noise_;
    std::int64_t column_ = 0;
    std::map<std::int64_t, Color> particles_;
};

} // namespace kpzsim
