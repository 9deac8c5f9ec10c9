#include "kpzsim/asep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpzsim {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

bool tick_order(const ClockTick& a, const ClockTick& b)
{
    if (a.time != b.time) return a.time < b.time;
    return a.dir < b.dir;
}

} // namespace

std::vector<ClockTick> clock_site_ticks(const EnvironmentNoise& noise, std::int64_t site, double q,
                                        double horizon)
{
    std::vector<ClockTick> out;
    double t = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        t += noise.exponential(site, Channel::clock_right, k, 1.0);
        if (t > horizon) break;
        out.push_back({t, +1});
    }
    if (q > 0.0) {
        t = 0.0;
        for (std::uint64_t k = 0;; ++k) {
            t += noise.exponential(site, Channel::clock_left, k, q);
            if (t > horizon) break;
            out.push_back({t, -1});
        }
    }
    std::sort(out.begin(), out.end(), tick_order);
    return out;
}

ClockStream build_clock_stream(std::uint64_t seed, double q, Window window, double horizon)
{
    if (horizon <= 0.0) throw std::invalid_argument("build_clock_stream: horizon must be positive");
    window.require_nonempty("build_clock_stream");
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("build_clock_stream: q must be in [0,1)");

    ClockStream cs;
    cs.seed = seed;
    cs.q = q;
    cs.window = window;
    cs.horizon = horizon;
    cs.events.resize(static_cast<std::size_t>(window.size()));
    const EnvironmentNoise noise(seed);
    for (std::int64_t x = window.lo; x <= window.hi; ++x)
        cs.events[window.index(x)] = clock_site_ticks(noise, x, q, horizon);
    return cs;
}

AsepEngine::AsepEngine(std::uint64_t seed, double q, Window window, double horizon)
    : seed_(seed), noise_(seed), q_(q), window_(window), horizon_(horizon)
{
    if (horizon <= 0.0) throw std::invalid_argument("AsepEngine: horizon must be positive");
    window.require_nonempty("AsepEngine");
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("AsepEngine: q must be in [0,1)");
    if (window.size() > std::numeric_limits<std::int32_t>::max())
        throw WindowError("AsepEngine: window too large for the packed event index");

    const auto n = static_cast<std::size_t>(window.size());
    next_left_.assign(n, inf);
    next_right_.assign(n, 0.0);
    idx_left_.assign(n, 0);
    idx_right_.assign(n, 0);
    for (std::int64_t x = window.lo; x <= window.hi; ++x) {
        const std::size_t i = window.index(x);
        next_right_[i] = noise_.exponential(x, Channel::clock_right, 0, 1.0);
        idx_right_[i] = 1;
        if (q_ > 0.0) {
            next_left_[i] = noise_.exponential(x, Channel::clock_left, 0, q_);
            idx_left_[i] = 1;
        }
    }
}

AsepEngine::AsepEngine(const ClockStream& clocks)
    : AsepEngine(clocks.seed, clocks.q, clocks.window, clocks.horizon)
{
}

int AsepEngine::add_state(const ParticleConfig& config, double start_time)
{
    if (config.window != window_) throw std::invalid_argument("add_state: window mismatch");
    UncoloredState s;
    s.occ = config.occ;
    s.start = start_time;
    states_.push_back(std::move(s));
    return static_cast<int>(states_.size()) - 1;
}

void AsepEngine::track_height(int state_id, const HeightFunction& h0)
{
    auto& s = states_.at(static_cast<std::size_t>(state_id));
    if (h0.window.lo > window_.lo || h0.window.hi < window_.hi)
        throw std::invalid_argument("track_height: height window does not cover engine window");
    s.track_h = true;
    s.h.resize(static_cast<std::size_t>(window_.size()));
    for (std::int64_t x = window_.lo; x <= window_.hi; ++x)
        s.h[window_.index(x)] = h0.at(x);
}

int AsepEngine::add_colored_state(const ColoredConfig& config, double start_time)
{
    if (config.window != window_) throw std::invalid_argument("add_colored_state: window mismatch");
    ColoredState s;
    s.color = config.color;
    s.start = start_time;
    colored_.push_back(std::move(s));
    return static_cast<int>(colored_.size()) - 1;
}

void AsepEngine::track_cuts(int colored_id, std::vector<Color> cuts,
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
        for (std::int64_t x = window_.lo; x <= window_.hi; ++x)
            s.cut_h[window_.index(x) * k + ci] = static_cast<std::int32_t>(h0.at(x));
    }
}

void AsepEngine::generate_slice(double t0, double t1)
{
    slice_.clear();
    for (std::int64_t x = window_.lo; x <= window_.hi; ++x) {
        const std::size_t i = window_.index(x);
        while (next_right_[i] <= t1) {
            if (next_right_[i] > t0)
                slice_.push_back({next_right_[i], static_cast<std::int32_t>(i), +1});
            next_right_[i] += noise_.exponential(x, Channel::clock_right, idx_right_[i]++, 1.0);
        }
        while (next_left_[i] <= t1) {
            if (next_left_[i] > t0)
                slice_.push_back({next_left_[i], static_cast<std::int32_t>(i), -1});
            next_left_[i] += noise_.exponential(x, Channel::clock_left, idx_left_[i]++, q_);
        }
    }
    std::sort(slice_.begin(), slice_.end(), [](const PackedEvent& a, const PackedEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.site_idx != b.site_idx) return a.site_idx < b.site_idx;
        return a.dir < b.dir;
    });
}

void AsepEngine::apply(const PackedEvent& ev)
{
    const std::size_t xi = static_cast<std::size_t>(ev.site_idx);
    const bool right = ev.dir > 0;
    const std::int64_t site = window_.lo + ev.site_idx;
    const std::int64_t target = site + (right ? 1 : -1);
    const bool target_inside = window_.contains(target);
    const std::size_t ti = target_inside ? window_.index(target) : 0;

    for (auto& s : states_) {
        if (ev.time <= s.start || !s.occ[xi]) continue;
        if (target_inside && s.occ[ti]) continue; // blocked
        s.occ[xi] = 0;
        if (target_inside) s.occ[ti] = 1;
        if (s.track_h) {
            if (right)
                ++s.h[xi]; // particle crossed ev.site rightward
            else if (site > window_.lo)
                --s.h[xi - 1];
        }
    }

    for (auto& s : colored_) {
        if (ev.time <= s.start) continue;
        const Color i = s.color[xi];
        if (i == no_particle) continue;
        const Color j = target_inside ? s.color[ti] : no_particle;
        if (i <= j) continue; // blocked by equal or higher color
        s.color[xi] = j;
        if (target_inside) s.color[ti] = i;
        if (!s.cuts.empty()) {
            // Cuts c with j < c <= i see one particle cross ev.site.
            const auto lb = std::upper_bound(s.cuts.begin(), s.cuts.end(), j);
            const auto ub = std::upper_bound(s.cuts.begin(), s.cuts.end(), i);
            if (lb != ub) {
                const std::size_t k = s.cuts.size();
                const std::size_t a = static_cast<std::size_t>(lb - s.cuts.begin());
                const std::size_t b = static_cast<std::size_t>(ub - s.cuts.begin());
                if (right) {
                    std::int32_t* row = &s.cut_h[xi * k];
                    for (std::size_t c = a; c < b; ++c) ++row[c];
                } else if (site > window_.lo) {
                    std::int32_t* row = &s.cut_h[(xi - 1) * k];
                    for (std::size_t c = a; c < b; ++c) --row[c];
                }
            }
        }
    }
    ++events_processed_;
}

void AsepEngine::run_until(double t, const std::function<void(const AsepEvent&)>& observer)
{
    if (t < now_) throw std::invalid_argument("run_until: time going backwards");
    if (t > horizon_ + 1e-12) throw std::invalid_argument("run_until: beyond clock horizon");

    // Slice width targeting a cache-resident event batch.
    const double rate = (1.0 + q_) * static_cast<double>(window_.size());
    const double dt = std::max(1e-9, 1.0e5 / std::max(rate, 1.0));
    slice_.reserve(static_cast<std::size_t>(1.3e5));
    while (now_ < t) {
        const double t1 = std::min(t, now_ + dt);
        generate_slice(now_, t1);
        if (observer) {
            for (const auto& ev : slice_) {
                apply(ev);
                observer(AsepEvent{ev.time, window_.lo + ev.site_idx, ev.dir});
            }
        } else {
            for (const auto& ev : slice_) apply(ev);
        }
        now_ = t1;
    }
}

ParticleConfig AsepEngine::config(int state_id) const
{
    const auto& s = states_.at(static_cast<std::size_t>(state_id));
    ParticleConfig c(window_);
    c.occ = s.occ;
    return c;
}

HeightFunction AsepEngine::height(int state_id) const
{
    const auto& s = states_.at(static_cast<std::size_t>(state_id));
    if (!s.track_h) throw std::logic_error("height: state does not track heights");
    return HeightFunction(window_, std::vector<std::int64_t>(s.h.begin(), s.h.end()));
}

std::int64_t AsepEngine::height_at(int state_id, std::int64_t site) const
{
    const auto& s = states_.at(static_cast<std::size_t>(state_id));
    if (!s.track_h) throw std::logic_error("height_at: state does not track heights");
    return s.h[window_.index(site)];
}

ColoredConfig AsepEngine::colored_config(int colored_id) const
{
    const auto& s = colored_.at(static_cast<std::size_t>(colored_id));
    ColoredConfig c(window_);
    c.color = s.color;
    return c;
}

ColoredHeightFunction AsepEngine::cut_heights(int colored_id) const
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

std::int64_t AsepEngine::cut_height_at(int colored_id, std::size_t cut_index, std::int64_t site) const
{
    const auto& s = colored_.at(static_cast<std::size_t>(colored_id));
    return s.cut_h[window_.index(site) * s.cuts.size() + cut_index];
}

AsepEvolveResult evolve(const std::vector<ParticleConfig>& initial, const ClockStream& clocks,
                        const std::vector<double>& start_times, double until,
                        const std::vector<HeightFunction>& initial_heights,
                        const std::vector<double>& record_times)
{
    if (initial.size() != start_times.size() || initial.size() != initial_heights.size())
        throw std::invalid_argument("evolve: size mismatch");
    if (until > clocks.horizon) throw std::invalid_argument("evolve: until beyond clock horizon");
    for (double s : start_times)
        if (s >= until) throw std::invalid_argument("evolve: start_time must precede until");
    if (!std::is_sorted(record_times.begin(), record_times.end()))
        throw std::invalid_argument("evolve: record_times must be sorted");

    AsepEngine engine(clocks);
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const int id = engine.add_state(initial[i], start_times[i]);
        engine.track_height(id, initial_heights[i]);
    }

    AsepEvolveResult res;
    for (double rt : record_times) {
        if (rt > until) throw std::invalid_argument("evolve: record time beyond until");
        engine.run_until(rt);
        std::vector<HeightFunction> snap;
        for (std::size_t i = 0; i < initial.size(); ++i)
            snap.push_back(engine.height(static_cast<int>(i)));
        res.trace.push_back(std::move(snap));
    }
    engine.run_until(until);

    for (std::size_t i = 0; i < initial.size(); ++i) {
        res.configs.push_back(engine.config(static_cast<int>(i)));
        res.heights.push_back(engine.height(static_cast<int>(i)));
    }
    return res;
}

ColoredEvolveResult evolve_colored(const std::vector<ColoredConfig>& initial,
                                   const ClockStream& clocks,
                                   const std::vector<double>& start_times, double until,
                                   const std::vector<std::vector<Color>>& cuts,
                                   const std::vector<std::vector<HeightFunction>>& cut_heights)
{
    if (initial.size() != start_times.size()) throw std::invalid_argument("evolve_colored: size mismatch");
    if (until > clocks.horizon) throw std::invalid_argument("evolve_colored: until beyond clock horizon");

    AsepEngine engine(clocks);
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const int id = engine.add_colored_state(initial[i], start_times[i]);
        if (i < cuts.size() && !cuts[i].empty()) engine.track_cuts(id, cuts[i], cut_heights[i]);
    }
    engine.run_until(until);

    ColoredEvolveResult res;
    for (std::size_t i = 0; i < initial.size(); ++i) {
        res.configs.push_back(engine.colored_config(static_cast<int>(i)));
        res.heights.push_back(engine.cut_heights(static_cast<int>(i)));
    }
    return res;
}

SparseAsep::SparseAsep(std::uint64_t seed, double q, Window window, double horizon)
    : noise_(seed), q_(q), window_(window), horizon_(horizon)
{
    window.require_nonempty("SparseAsep");
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("SparseAsep: q must be in [0,1)");
}

SparseAsep::SiteCursor& SparseAsep::cursor(std::int64_t site)
{
    auto it = cursors_.find(site);
    if (it != cursors_.end()) return it->second;
    SiteCursor c;
    c.next_right = noise_.exponential(site, Channel::clock_right, 0, 1.0);
    c.idx_right = 1;
    if (q_ > 0.0) {
        c.next_left = noise_.exponential(site, Channel::clock_left, 0, q_);
        c.idx_left = 1;
    } else {
        c.next_left = inf;
    }
    return cursors_.emplace(site, c).first->second;
}

void SparseAsep::arm_channel(std::int64_t site, std::int8_t dir, double after)
{
    SiteCursor& c = cursor(site);
    if (dir > 0) {
        while (c.next_right <= after)
            c.next_right += noise_.exponential(site, Channel::clock_right, c.idx_right++, 1.0);
        if (c.next_right <= horizon_) queue_.push({c.next_right, site, +1, gen_[site]});
    } else {
        if (q_ <= 0.0) return;
        while (c.next_left <= after)
            c.next_left += noise_.exponential(site, Channel::clock_left, c.idx_left++, q_);
        if (c.next_left <= horizon_) queue_.push({c.next_left, site, -1, gen_[site]});
    }
}

void SparseAsep::arm_both(std::int64_t site, double after)
{
    arm_channel(site, +1, after);
    arm_channel(site, -1, after);
}

void SparseAsep::place(std::int64_t site, Color color)
{
    if (!window_.contains(site)) throw std::invalid_argument("SparseAsep::place: site outside window");
    if (color == no_particle || particles_.count(site))
        throw std::invalid_argument("SparseAsep::place: bad placement");
    particles_[site] = color;
    ++gen_[site];
    arm_both(site, now_);
}

void SparseAsep::run_until(double t)
{
    if (t > horizon_ + 1e-12) throw std::invalid_argument("SparseAsep: beyond horizon");
    while (!queue_.empty() && queue_.top().time <= t) {
        const Pending ev = queue_.top();
        queue_.pop();
        auto pit = particles_.find(ev.site);
        if (pit == particles_.end() || ev.gen != gen_[ev.site]) continue; // stale

        // Consume this tick of the channel.
        SiteCursor& c = cursor(ev.site);
        if (ev.dir > 0)
            c.next_right += noise_.exponential(ev.site, Channel::clock_right, c.idx_right++, 1.0);
        else
            c.next_left += noise_.exponential(ev.site, Channel::clock_left, c.idx_left++, q_);

        const Color i = pit->second;
        const std::int64_t target = ev.site + (ev.dir > 0 ? 1 : -1);
        const bool inside = window_.contains(target);
        auto tit = inside ? particles_.find(target) : particles_.end();
        const Color j = (inside && tit != particles_.end()) ? tit->second : no_particle;

        if (i > j) {
            if (j == no_particle) {
                // move (possibly off the window edge, where it vanishes)
                particles_.erase(pit);
                ++gen_[ev.site];
                if (inside) {
                    particles_[target] = i;
                    ++gen_[target];
                    arm_both(target, ev.time);
                }
            } else {
                // swap: occupancy pattern unchanged, only colors move
                pit->second = j;
                tit->second = i;
                arm_channel(ev.site, ev.dir, ev.time);
            }
        } else {
            arm_channel(ev.site, ev.dir, ev.time);
        }
    }
    now_ = t;
}

bool SparseAsep::rightmost_of_color(Color c, std::int64_t& out) const
{
    for (auto it = particles_.rbegin(); it != particles_.rend(); ++it) {
        if (it->second == c) {
            out = it->first;
            return true;
        }
    }
    return false;
}

ColoredConfig SparseAsep::snapshot(Window w) const
{
    ColoredConfig cfg(w);
    for (const auto& [site, color] : particles_)
        if (w.contains(site)) cfg.set(site, color);
    return cfg;
}

} // namespace kpzsim
