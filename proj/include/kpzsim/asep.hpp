#pragma once

#include "kpzsim/lattice.hpp"
#include "kpzsim/noise.hpp"

#include <functional>
#include <map>
#include <queue>
#include <unordered_map>
#include <vector>

namespace kpzsim {

// One ring of a site clock. dir = +1 for a right-jump attempt, -1 for left.
struct ClockTick {
    double time;
    std::int8_t dir;
};

// A jump-attempt event in the global time order.
struct AsepEvent {
    double time;
    std::int64_t site;
    std::int8_t dir;
};

// Poisson clocks for every site of a window: left rate q, right rate 1,
// realized as a pure function of (seed, site, channel, index). Regenerating
// with the same key yields bit-identical lists.
struct ClockStream {
    std::uint64_t seed = 0;
    double q = 0.0;
    Window window;
    double horizon = 0.0;
    std::vector<std::vector<ClockTick>> events; // per site, sorted by time

    const std::vector<ClockTick>& site_events(std::int64_t site) const
    {
        return events[window.index(site)];
    }
};

ClockStream build_clock_stream(std::uint64_t seed, double q, Window window, double horizon);

// The tick sequence of one site, sorted, times in (0, horizon].
std::vector<ClockTick> clock_site_ticks(const EnvironmentNoise& noise, std::int64_t site, double q,
                                        double horizon);

// Dense multi-state ASEP under the graphical construction. All states share
// one clock stream (basic coupling); sites outside the window are frozen
// holes. Events are streamed in time slices, so the window can be large
// without materializing every tick.
class AsepEngine {
public:
    AsepEngine(std::uint64_t seed, double q, Window window, double horizon);
    AsepEngine(const ClockStream& clocks); // same key, regenerated internally

    // Uncolored state. Height tracking is optional (it costs one array).
    int add_state(const ParticleConfig& config, double start_time = 0.0);
    void track_height(int state_id, const HeightFunction& h0);

    // Colored state with tracked color cuts. h0s[i] is the initial height of
    // the thresholded system {color >= cuts[i]}.
    int add_colored_state(const ColoredConfig& config, double start_time = 0.0);
    void track_cuts(int colored_id, std::vector<Color> cuts, const std::vector<HeightFunction>& h0s);

    // Processes all events in (now, t]; the observer runs after each applied
    // event. t may not exceed the horizon.
    void run_until(double t, const std::function<void(const AsepEvent&)>& observer = {});

    double now() const { return now_; }
    const Window& window() const { return window_; }
    double q() const { return q_; }
    std::uint64_t seed() const { return seed_; }

    ParticleConfig config(int state_id) const;
    HeightFunction height(int state_id) const;
    std::int64_t height_at(int state_id, std::int64_t site) const;

    ColoredConfig colored_config(int colored_id) const;
    ColoredHeightFunction cut_heights(int colored_id) const;
    std::int64_t cut_height_at(int colored_id, std::size_t cut_index, std::int64_t site) const;

    std::int64_t events_processed() const { return events_processed_; }

private:
    struct UncoloredState {
        std::vector<std::uint8_t> occ;
        double start = 0.0;
        bool track_h = false;
        std::vector<std::int64_t> h;
    };
    struct ColoredState {
        std::vector<Color> color;
        double start = 0.0;
        std::vector<Color> cuts; // ascending
        std::vector<std::int32_t> cut_h; // [site * cuts.size() + k]
    };

    // 16-byte slice event: the site index is relative to the window, so the
    // hot loops stay cache-resident on large windows.
    struct PackedEvent {
        double time;
        std::int32_t site_idx;
        std::int8_t dir;
    };

    void generate_slice(double t0, double t1);
    void apply(const PackedEvent& ev);

    std::uint64_t seed_;
    EnvironmentNoise noise_;
    double q_;
    Window window_;
    double horizon_;
    double now_ = 0.0;
    std::int64_t events_processed_ = 0;

    // per-site tick cursors for slice generation
    std::vector<double> next_left_, next_right_;
    std::vector<std::uint64_t> idx_left_, idx_right_;
    std::vector<PackedEvent> slice_;

    std::vector<UncoloredState> states_;
    std::vector<ColoredState> colored_;
};

// Result of the one-shot evolve entry point. `trace[k][i]` is state i's
// height at the k-th recorded time; final configs and heights always present.
struct AsepEvolveResult {
    std::vector<ParticleConfig> configs;
    std::vector<HeightFunction> heights;
    std::vector<std::vector<HeightFunction>> trace;
};

// Evolves the given configurations under the shared clock stream from their
// start times to `until`. Heights are anchored from the supplied initial
// height functions (one per config, windows must cover the clock window).
AsepEvolveResult evolve(const std::vector<ParticleConfig>& initial, const ClockStream& clocks,
                        const std::vector<double>& start_times, double until,
                        const std::vector<HeightFunction>& initial_heights,
                        const std::vector<double>& record_times = {});

// Colored analog; per-state cut sets.
struct ColoredEvolveResult {
    std::vector<ColoredConfig> configs;
    std::vector<ColoredHeightFunction> heights;
};

ColoredEvolveResult evolve_colored(const std::vector<ColoredConfig>& initial,
                                   const ClockStream& clocks,
                                   const std::vector<double>& start_times, double until,
                                   const std::vector<std::vector<Color>>& cuts,
                                   const std::vector<std::vector<HeightFunction>>& cut_heights);

// Event-lazy colored ASEP for systems with few particles: only clocks of
// visited sites are generated. Bit-compatible with AsepEngine given the same
// (seed, q, window, horizon).
class SparseAsep {
public:
    SparseAsep(std::uint64_t seed, double q, Window window, double horizon);

    void place(std::int64_t site, Color color);
    void run_until(double t);

    const std::map<std::int64_t, Color>& particles() const { return particles_; }
    // Rightmost site holding exactly this color, or nullopt-like sentinel.
    bool rightmost_of_color(Color c, std::int64_t& out) const;
    ColoredConfig snapshot(Window w) const;

private:
    struct SiteCursor {
        double next_left, next_right;
        std::uint64_t idx_left = 0, idx_right = 0;
    };
    struct Pending {
        double time;
        std::int64_t site;
        std::int8_t dir;
        std::uint32_t gen;
    };
    struct PendingOrder {
        bool operator()(const Pending& a, const Pending& b) const
        {
            if (a.time != b.time) return a.time > b.time;
            if (a.site != b.site) return a.site > b.site;
            return a.dir > b.dir;
        }
    };

    SiteCursor& cursor(std::int64_t site);
    void arm_channel(std::int64_t site, std::int8_t dir, double after);
    void arm_both(std::int64_t site, double after);

    EnvironmentNoise noise_;
    double q_;
    Window window_;
    double horizon_;
    double now_ = 0.0;

    std::map<std::int64_t, Color> particles_;
    std::unordered_map<std::int64_t, SiteCursor> cursors_;
    std::unordered_map<std::int64_t, std::uint32_t> gen_;
    std::priority_queue<Pending, std::vector<Pending>, PendingOrder> queue_;
};

} // namespace kpzsim
