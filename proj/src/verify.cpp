#include "kpzsim/verify.hpp"

#include "kpzsim/asep.hpp"
#include "kpzsim/noise.hpp"
#include "kpzsim/runner.hpp"
#include "kpzsim/s6v.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>

namespace kpzsim {

double TestReport::stat_value(const std::string& key) const
{
    for (const auto& [k, v] : stats)
        if (k == key) return v;
    throw std::invalid_argument("TestReport: no stat named " + key);
}

namespace {

// Local deterministic generator for test-harness randomness (instance shapes,
// partitions); simulation randomness always flows through EnvironmentNoise.
struct SplitMix {
    std::uint64_t s;
    explicit SplitMix(std::uint64_t seed) : s(seed) {}
    std::uint64_t next()
    {
        s += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53; }
    std::int64_t below(std::int64_t n) { return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n)); }
};

// Random height function with Bernoulli(1/2) increments, anchored at 0.
std::vector<std::int64_t> random_height_values(SplitMix& rng, std::size_t n)
{
    std::vector<std::int64_t> v(n, 0);
    for (std::size_t i = 1; i < n; ++i) v[i] = v[i - 1] - (rng.next() & 1u);
    return v;
}

struct OrderedPair {
    HeightFunction upper; // h0 with h0 + H >= h0'
    HeightFunction lower; // h0'
    std::int64_t H;
};

OrderedPair random_ordered_pair(SplitMix& rng, Window hw)
{
    auto a = random_height_values(rng, static_cast<std::size_t>(hw.size()));
    auto b = random_height_values(rng, static_cast<std::size_t>(hw.size()));
    std::int64_t H = std::numeric_limits<std::int64_t>::min();
    for (std::size_t i = 0; i < a.size(); ++i) H = std::max(H, b[i] - a[i]);
    return {HeightFunction(hw, std::move(a)), HeightFunction(hw, std::move(b)), H};
}

ParticleConfig bernoulli_config(std::uint64_t seed, Window w, double rho, std::uint64_t idx = 0)
{
    ParticleConfig cfg(w);
    const EnvironmentNoise noise(seed);
    for (std::int64_t x = w.lo; x <= w.hi; ++x)
        cfg.set(x, noise.bernoulli(x, Channel::ic_bernoulli, idx, rho));
    return cfg;
}

ColoredConfig random_colored(SplitMix& rng, Window w, Color max_color)
{
    ColoredConfig cfg(w);
    for (std::int64_t x = w.lo; x <= w.hi; ++x) {
        if (rng.uniform() < 0.35) continue; // hole
        cfg.set(x, static_cast<Color>(rng.below(max_color + 1)));
    }
    return cfg;
}

std::vector<Color> present_colors(const ColoredConfig& c)
{
    std::set<Color> s;
    for (Color col : c.color)
        if (col != no_particle) s.insert(col);
    return {s.begin(), s.end()};
}

std::vector<ColorInterval> random_partition(SplitMix& rng, const std::vector<Color>& colors)
{
    std::vector<ColorInterval> out;
    std::size_t i = 0;
    while (i < colors.size()) {
        const std::size_t len = 1 + static_cast<std::size_t>(rng.below(3));
        const std::size_t j = std::min(colors.size() - 1, i + len - 1);
        out.push_back({colors[i], colors[j]});
        i = j + 1;
    }
    return out;
}

} // namespace

TestReport check_vertex_stochasticity(int pairs, std::uint64_t seed)
{
    TestReport rep;
    rep.name = "vertex_stochasticity";
    rep.seed = seed;
    rep.bound = "outgoing weights sum to 1 exactly (rational arithmetic)";
    SplitMix rng(seed);
    for (int i = 0; i < pairs; ++i) {
        const std::int64_t qd = 2 + rng.below(40);
        const Fraction q(rng.below(qd), qd); // q in [0,1)
        const std::int64_t bd = 2 + rng.below(40);
        const Fraction b(1 + rng.below(bd - 1), bd); // b_right in (0,1)
        ++rep.trials;

        const Fraction one = Fraction::one();
        const Fraction qb = q * b;
        bool ok = true;
        // incoming (0,0) and (1,1): single outgoing configuration of weight 1
        ok = ok && (one == Fraction::one());
        // incoming (0,1): weights q b and 1 - q b
        ok = ok && (qb + (one - qb) == one);
        // incoming (1,0): weights b and 1 - b
        ok = ok && (b + (one - b) == one);
        // all weights within [0,1]
        for (const Fraction& f : {qb, one - qb, b, one - b})
            ok = ok && f.num >= 0 && f.num <= f.den;
        if (!ok) ++rep.failures;
    }
    rep.pass = rep.failures == 0;
    return rep;
}

TestReport check_arrow_conservation(std::int64_t min_vertices, std::uint64_t seed)
{
    TestReport rep;
    rep.name = "arrow_conservation";
    rep.seed = seed;
    rep.bound = "i+a == j+b (uncolored), {i,a} == {j,b} (colored), zero violations";

    const Window w{-300, 299};
    S6vEngine engine(seed, 0.5, 0.5, w);
    SplitMix rng(seed ^ 0x5eedULL);
    engine.add_state(bernoulli_config(seed, w, 0.5));
    engine.add_colored_state(random_colored(rng, w, 3));

    std::int64_t seen = 0;
    std::int64_t bad = 0;
    const auto obs = [&](std::int64_t, std::int64_t, Color i, Color a, Color j, Color b) {
        ++seen;
        const bool in0 = i == no_particle, in1 = a == no_particle;
        const bool ou0 = j == no_particle, ou1 = b == no_particle;
        const int nin = (in0 ? 0 : 1) + (in1 ? 0 : 1);
        const int nout = (ou0 ? 0 : 1) + (ou1 ? 0 : 1);
        if (nin != nout) ++bad;
        // multiset equality of colors
        const Color lo_in = std::min(i, a), hi_in = std::max(i, a);
        const Color lo_out = std::min(j, b), hi_out = std::max(j, b);
        if (lo_in != lo_out || hi_in != hi_out) ++bad;
    };
    const std::int64_t per_column = 2 * w.size();
    const std::int64_t columns = (min_vertices + per_column - 1) / per_column;
    engine.run_until_column(columns, obs);

    rep.trials = seen;
    rep.failures = bad;
    rep.stat("vertices", static_cast<double>(seen));
    rep.pass = bad == 0 && seen >= min_vertices;
    return rep;
}

TestReport check_monotonicity_asep(double q, std::int64_t window_size, double horizon, int trials,
                                   std::uint64_t seed, int jobs, bool decouple)
{
    TestReport rep;
    rep.name = decouple ? "monotonicity_asep_decoupled" : "monotonicity_asep";
    rep.seed = seed;
    rep.bound = "h(h0,0;x,t) + H >= h(h0',0;x,t) at every event time, zero violations";

    const Window w{-window_size / 2, window_size - window_size / 2 - 1};
    const Window hw{w.lo - 1, w.hi};
    std::vector<std::int64_t> viol(static_cast<std::size_t>(trials), 0);

    run_replicas(trials, jobs, [&](int i) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
        SplitMix rng(s ^ 0xA11CEULL);
        const OrderedPair pair = random_ordered_pair(rng, hw);
        const std::int64_t H = pair.H;

        if (!decouple) {
            AsepEngine engine(s, q, w, horizon);
            const int ia = engine.add_state(config_from_height(pair.upper));
            engine.track_height(ia, pair.upper);
            const int ib = engine.add_state(config_from_height(pair.lower));
            engine.track_height(ib, pair.lower);
            std::int64_t v = 0;
            engine.run_until(horizon, [&](const AsepEvent& ev) {
                const std::int64_t coord = ev.dir > 0 ? ev.site : ev.site - 1;
                if (coord < w.lo || coord > w.hi) return;
                if (engine.height_at(ia, coord) + H < engine.height_at(ib, coord)) ++v;
            });
            viol[static_cast<std::size_t>(i)] = v;
        } else {
            AsepEngine ea(s, q, w, horizon);
            AsepEngine eb(derive_seed(s, 0xDEC0DEULL), q, w, horizon);
            const int ia = ea.add_state(config_from_height(pair.upper));
            ea.track_height(ia, pair.upper);
            const int ib = eb.add_state(config_from_height(pair.lower));
            eb.track_height(ib, pair.lower);
            std::int64_t v = 0;
            for (int step = 1; step <= 10; ++step) {
                const double t = horizon * step / 10.0;
                ea.run_until(t);
                eb.run_until(t);
                for (std::int64_t x = w.lo; x <= w.hi; ++x)
                    if (ea.height_at(ia, x) + H < eb.height_at(ib, x)) ++v;
            }
            viol[static_cast<std::size_t>(i)] = v;
        }
    });

    rep.trials = trials;
    std::int64_t total = 0;
    for (int i = 0; i < trials; ++i) {
        total += viol[static_cast<std::size_t>(i)];
        if (viol[static_cast<std::size_t>(i)] > 0) ++rep.failures;
    }
    rep.stat("violations", static_cast<double>(total));
    rep.pass = rep.failures == 0;
    return rep;
}

TestReport check_monotonicity_s6v(double q, double b_right, int N, int M, int trials,
                                  std::uint64_t seed, int jobs, double ceiling)
{
    if (M < static_cast<int>(std::log(static_cast<double>(N)) * std::log(static_cast<double>(N))) ||
        M > N)
        throw std::invalid_argument("check_monotonicity_s6v: need (log N)^2 <= M <= N");
    const auto t = static_cast<std::int64_t>(std::floor(0.5 * (1.0 - b_right) * N));
    if (t < 1) throw std::invalid_argument("check_monotonicity_s6v: horizon too small");

    TestReport rep;
    rep.name = "monotonicity_s6v";
    rep.seed = seed;
    rep.bound = "discrepancy <= M on [-N,N] at t in >= " + std::to_string(100.0 * (1.0 - ceiling)) + "% of trials";

    const Window w{-2 * N, 2 * N};
    const Window hw{w.lo - 1, w.hi};
    std::vector<std::uint8_t> fail(static_cast<std::size_t>(trials), 0);

    run_replicas(trials, jobs, [&](int i) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
        SplitMix rng(s ^ 0xA11CEULL);
        const OrderedPair pair = random_ordered_pair(rng, hw);
        S6vEngine engine(s, q, b_right, w);
        const int ia = engine.add_state(config_from_height(pair.upper));
        engine.track_height(ia, pair.upper);
        const int ib = engine.add_state(config_from_height(pair.lower));
        engine.track_height(ib, pair.lower);
        engine.run_until_column(t);
        std::int64_t worst = 0;
        for (std::int64_t x = -N; x <= N; ++x)
            worst = std::min(worst, engine.height_at(ia, x) + pair.H - engine.height_at(ib, x));
        if (worst < -M) fail[static_cast<std::size_t>(i)] = 1;
    });

    rep.trials = trials;
    for (auto f : fail) rep.failures += f;
    const double freq = static_cast<double>(rep.failures) / trials;
    rep.stat("failure_frequency", freq);
    rep.stat("t", static_cast<double>(t));
    rep.stat("M", M);
    rep.pass = freq <= ceiling;
    return rep;
}

TestReport check_variational(Model model, const ScalingCoeffs& c, IcKind ic_kind, double eps,
                             double t_macro, double I, int replicas, std::uint64_t seed, int jobs,
                             double ceiling)
{
    TestReport rep;
    rep.name = std::string("variational_") + model_name(model) + "_" + ic_kind_name(ic_kind);
    rep.seed = seed;
    rep.bound = (model == Model::asep)
                    ? "h_evolved(x) <= h0(z) + h_sheet(z,0;x,t) for all grid (z,x), zero violations"
                    : "inequality with raw slack ceil(eps^-1/6); replica failure freq <= " +
                          std::to_string(ceiling);

    const std::int64_t site_step = 4;
    std::vector<std::uint8_t> bad(static_cast<std::size_t>(replicas), 0);
    std::atomic<std::int64_t> total_viol{0};

    run_replicas(replicas, jobs, [&](int r) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(r));
        SheetPlan plan = plan_sheet(model, c, eps, 0.0, t_macro, I, I, site_step);
        const Window core{plan.need_lo - 2, plan.need_hi + 2};

        IcSpec spec;
        spec.kind = ic_kind;
        spec.eps = eps;
        spec.seed = derive_seed(s, 0x1CULL);
        spec.y = 0;
        spec.rho = c.abs_mu_prime();

        std::int64_t viol = 0;
        if (model == Model::asep) {
            const double T = asep_model_time(c, eps, t_macro);
            AsepEngine engine(s, c.q, asep_padded_window(core, c.q, T), T);
            attach_sheet(engine, plan);
            const IcResult ic = make_ic(spec, c, engine.window());
            const int id = engine.add_state(ic.config);
            engine.track_height(id, ic.height);
            engine.run_until(T);
            const std::size_t ny = plan.y_sites.size();
            for (std::size_t ix = 0; ix < plan.x_sites.size(); ++ix) {
                const std::int64_t xa = plan.drift + plan.x_sites[ix];
                const std::int64_t lhs = engine.height_at(id, xa);
                for (std::size_t iy = 0; iy < ny; ++iy) {
                    const std::int64_t z = plan.y_sites[iy];
                    const std::int64_t sheet_h = engine.cut_height_at(plan.colored_id, ny - 1 - iy, xa);
                    if (lhs > ic.height.at(z) + sheet_h) ++viol;
                }
            }
        } else {
            const std::int64_t T = s6v_model_columns(eps, t_macro);
            const std::int64_t slack =
                static_cast<std::int64_t>(std::ceil(std::pow(eps, -1.0 / 6.0)));
            S6vEngine engine(s, c.q, c.b_right, s6v_padded_window(core, c.b_right, T));
            attach_sheet(engine, plan);
            const IcResult ic = make_ic(spec, c, engine.window());
            const int id = engine.add_state(ic.config);
            engine.track_height(id, ic.height);
            engine.run_until_column(T);
            for (std::size_t ix = 0; ix < plan.x_sites.size(); ++ix) {
                const std::int64_t xa = plan.drift + plan.x_sites[ix];
                const std::int64_t lhs = engine.height_at(id, xa);
                for (std::size_t iy = 0; iy < plan.y_sites.size(); ++iy) {
                    const std::int64_t z = plan.y_sites[iy];
                    const std::int64_t sheet_h = engine.cut_height_at(plan.colored_id, iy, xa);
                    if (lhs < ic.height.at(z) + sheet_h - slack) ++viol;
                }
            }
        }
        if (viol > 0) bad[static_cast<std::size_t>(r)] = 1;
        total_viol += viol;
    });

    rep.trials = replicas;
    for (auto b : bad) rep.failures += b;
    rep.stat("point_violations", static_cast<double>(total_viol.load()));
    rep.stat("failure_frequency", static_cast<double>(rep.failures) / replicas);
    rep.pass = (model == Model::asep) ? rep.failures == 0
                                      : (static_cast<double>(rep.failures) / replicas <= ceiling);
    return rep;
}

TestReport check_flux_identity(Model model, const ScalingCoeffs& c, double eps, double M, double K,
                               double lambda, int replicas, std::uint64_t seed, int jobs)
{
    const std::int64_t m = static_cast<std::int64_t>(std::llround(M * eps_m23_floor(eps)));
    const std::int64_t k0 = static_cast<std::int64_t>(std::llround(K * eps_m23_floor(eps)));
    if (!(k0 < m / 2))
        throw std::invalid_argument("check_flux_identity: need K eps^-2/3 < M eps^-2/3 / 2");

    TestReport rep;
    rep.name = std::string("flux_identity_") + model_name(model);
    rep.seed = seed;
    rep.bound = "#{x >= -K eps^-2/3 : color == 2} equals the height difference, exactly";

    const double rho = rho_eps_lambda(c, lambda, eps, 2);
    const double removal = 2.0 * lambda * c.sigma / c.beta * std::pow(eps, 1.0 / 3.0) / rho;
    std::vector<std::int64_t> viol(static_cast<std::size_t>(replicas), 0);

    run_replicas(replicas, jobs, [&](int r) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(r));
        const std::int64_t T = (model == Model::asep)
                                   ? static_cast<std::int64_t>(std::llround(1.0 / eps))
                                   : s6v_model_columns(eps, 1.0);
        // the top must be out of reach of the marked particles: the counting
        // identity needs the two thresholded heights to agree at the far end
        const Window core{-2 * m - 8, k0 + 4 * T + 64};
        const Window w = (model == Model::asep)
                             ? asep_padded_window(core, c.q, static_cast<double>(T))
                             : s6v_padded_window(core, c.b_right, T);

        ParticleConfig eta = bernoulli_config(derive_seed(s, 0x1CULL), w, rho);
        ParticleConfig xi = thin_couple(eta, removal, derive_seed(s, 0x71ULL));
        for (std::int64_t x = -m; x <= w.hi; ++x) xi.set(x, eta.at(x)); // agree right of -M eps^-2/3
        const RefinedColoring col = refined_coloring(eta, xi, M, eps, derive_seed(s, 0x2EULL));

        const ParticleConfig ge2 = threshold(col.refined, 2);
        const ParticleConfig ge3 = threshold(col.refined, 3);
        const HeightFunction h2 = height_from_config(ge2, w.hi, 0);
        const HeightFunction h3 = height_from_config(ge3, w.hi, 0);

        std::int64_t v = 0;
        auto check_now = [&](const ColoredConfig& colored, std::int64_t h2_at, std::int64_t h3_at) {
            std::int64_t count2 = 0;
            for (std::int64_t x = std::max(-k0, colored.window.lo); x <= colored.window.hi; ++x)
                if (colored.at(x) == 2) ++count2;
            if (count2 != h2_at - h3_at) ++v;
        };

        if (model == Model::asep) {
            AsepEngine engine(s, c.q, w, static_cast<double>(T));
            const int ic = engine.add_colored_state(col.refined);
            const int i2 = engine.add_state(ge2);
            engine.track_height(i2, h2);
            const int i3 = engine.add_state(ge3);
            engine.track_height(i3, h3);
            for (int stage = 1; stage <= 4; ++stage) {
                engine.run_until(static_cast<double>(T) * stage / 4.0);
                check_now(engine.colored_config(ic), engine.height_at(i2, -k0 - 1),
                          engine.height_at(i3, -k0 - 1));
            }
            // projection consistency at the end
            if (!(threshold(engine.colored_config(ic), 2) == engine.config(i2))) ++v;
            if (!(threshold(engine.colored_config(ic), 3) == engine.config(i3))) ++v;
        } else {
            S6vEngine engine(s, c.q, c.b_right, w);
            const int ic = engine.add_colored_state(col.refined);
            const int i2 = engine.add_state(ge2);
            engine.track_height(i2, h2);
            const int i3 = engine.add_state(ge3);
            engine.track_height(i3, h3);
            for (int stage = 1; stage <= 4; ++stage) {
                engine.run_until_column(T * stage / 4);
                check_now(engine.colored_config(ic), engine.height_at(i2, -k0 - 1),
                          engine.height_at(i3, -k0 - 1));
            }
            if (!(threshold(engine.colored_config(ic), 2) == engine.config(i2))) ++v;
            if (!(threshold(engine.colored_config(ic), 3) == engine.config(i3))) ++v;
        }
        viol[static_cast<std::size_t>(r)] = v;
    });

    rep.trials = replicas;
    std::int64_t total = 0;
    for (auto v : viol) {
        total += v;
        if (v > 0) ++rep.failures;
    }
    rep.stat("violations", static_cast<double>(total));
    rep.pass = rep.failures == 0;
    return rep;
}

namespace {

ColoredConfig evolve_colored_once(Model model, const ColoredConfig& cfg, std::uint64_t seed,
                                  double horizon, std::int64_t columns)
{
    if (model == Model::asep) {
        AsepEngine engine(seed, 0.4, cfg.window, horizon);
        const int id = engine.add_colored_state(cfg);
        engine.run_until(horizon);
        return engine.colored_config(id);
    }
    S6vEngine engine(seed, 0.4, 0.55, cfg.window);
    const int id = engine.add_colored_state(cfg);
    engine.run_until_column(columns);
    return engine.colored_config(id);
}

} // namespace

TestReport check_merge_commute(Model model, int instances, std::uint64_t seed)
{
    TestReport rep;
    rep.name = std::string("merge_commute_") + model_name(model);
    rep.seed = seed;
    rep.bound = "evolve-then-merge == merge-then-evolve, exact equality";

    const Window w{-20, 19};
    const double horizon = 8.0;
    const std::int64_t columns = 10;
    SplitMix rng(seed);
    for (int i = 0; i < instances; ++i) {
        ++rep.trials;
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i) + 1);
        const ColoredConfig cfg = random_colored(rng, w, 5);
        const auto colors = present_colors(cfg);
        if (colors.empty()) continue;
        const auto partition = random_partition(rng, colors);

        const ColoredConfig a = merge_colors(evolve_colored_once(model, cfg, s, horizon, columns), partition);
        const ColoredConfig b =
            evolve_colored_once(model, merge_colors(cfg, partition), s, horizon, columns);
        if (!(a == b)) ++rep.failures;
    }
    rep.pass = rep.failures == 0;
    return rep;
}

TestReport check_colored_projection(Model model, int instances, std::uint64_t seed)
{
    TestReport rep;
    rep.name = std::string("colored_projection_") + model_name(model);
    rep.seed = seed;
    rep.bound = "threshold(colored evolution) == uncolored evolution of threshold, exact";

    const Window w{-20, 19};
    const Window hw{w.lo - 1, w.hi};
    const double horizon = 8.0;
    const std::int64_t columns = 10;
    SplitMix rng(seed);
    for (int i = 0; i < instances; ++i) {
        ++rep.trials;
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i) + 1);
        const ColoredConfig cfg = random_colored(rng, w, 4);
        const auto colors = present_colors(cfg);
        if (colors.empty()) continue;
        const Color cut = colors[static_cast<std::size_t>(rng.below(static_cast<std::int64_t>(colors.size())))];
        const ParticleConfig thr = threshold(cfg, cut);
        const HeightFunction h0 = height_from_config(thr, hw.lo, 0);

        bool ok = true;
        if (model == Model::asep) {
            AsepEngine engine(s, 0.4, w, horizon);
            const int ic = engine.add_colored_state(cfg);
            engine.track_cuts(ic, {cut}, {h0});
            const int iu = engine.add_state(thr);
            engine.track_height(iu, h0);
            engine.run_until(horizon);
            ok = threshold(engine.colored_config(ic), cut) == engine.config(iu) &&
                 engine.cut_heights(ic).heights[0] == engine.height(iu);
        } else {
            S6vEngine engine(s, 0.4, 0.55, w);
            const int ic = engine.add_colored_state(cfg);
            engine.track_cuts(ic, {cut}, {h0});
            const int iu = engine.add_state(thr);
            engine.track_height(iu, h0);
            engine.run_until_column(columns);
            ok = threshold(engine.colored_config(ic), cut) == engine.config(iu) &&
                 engine.cut_heights(ic).heights[0] == engine.height(iu);
        }
        if (!ok) ++rep.failures;
    }
    rep.pass = rep.failures == 0;
    return rep;
}

TestReport check_window_sentinel(Model model, std::uint64_t seed)
{
    TestReport rep;
    rep.name = std::string("window_sentinel_") + model_name(model);
    rep.seed = seed;
    rep.bound = "core trajectory unchanged when the buffer is widened, exact";

    const Window core{-50, 50};
    rep.trials = 1;
    bool ok = true;
    if (model == Model::asep) {
        const double T = 10.0;
        const Window w1 = asep_padded_window(core, 0.5, T);
        const Window w2{w1.lo - 512, w1.hi + 512};
        AsepEngine e1(seed, 0.5, w1, T), e2(seed, 0.5, w2, T);
        const int a = e1.add_state(bernoulli_config(seed, w1, 0.5));
        e1.track_height(a, height_from_config(bernoulli_config(seed, w1, 0.5), 0, 0));
        const int b = e2.add_state(bernoulli_config(seed, w2, 0.5));
        e2.track_height(b, height_from_config(bernoulli_config(seed, w2, 0.5), 0, 0));
        e1.run_until(T);
        e2.run_until(T);
        for (std::int64_t x = core.lo; x <= core.hi; ++x) {
            ok = ok && e1.config(a).at(x) == e2.config(b).at(x);
            ok = ok && e1.height_at(a, x) == e2.height_at(b, x);
        }
    } else {
        const std::int64_t T = 16;
        const Window w1 = s6v_padded_window(core, 0.5, T);
        const Window w2{w1.lo - 512, w1.hi + 8};
        S6vEngine e1(seed, 0.5, 0.5, w1), e2(seed, 0.5, 0.5, w2);
        const int a = e1.add_state(bernoulli_config(seed, w1, 0.5));
        e1.track_height(a, height_from_config(bernoulli_config(seed, w1, 0.5), 0, 0));
        const int b = e2.add_state(bernoulli_config(seed, w2, 0.5));
        e2.track_height(b, height_from_config(bernoulli_config(seed, w2, 0.5), 0, 0));
        e1.run_until_column(T);
        e2.run_until_column(T);
        for (std::int64_t x = core.lo; x <= core.hi; ++x) {
            ok = ok && e1.config(a).at(x) == e2.config(b).at(x);
            ok = ok && e1.height_at(a, x) == e2.height_at(b, x);
        }
    }
    if (!ok) rep.failures = 1;
    rep.pass = ok;
    return rep;
}

TestReport check_determinism(Model model, std::uint64_t seed)
{
    TestReport rep;
    rep.name = std::string("determinism_") + model_name(model);
    rep.seed = seed;
    rep.bound = "identical (seed, inputs) => identical trajectories; sparse == dense";

    SplitMix rng(seed);
    const Window w{-40, 39};
    rep.trials = 1;
    bool ok = true;

    // a small colored configuration with few particles, so the sparse engines apply
    ColoredConfig cfg(w);
    for (int i = 0; i < 12; ++i) {
        const std::int64_t x = -30 + 5 * i;
        cfg.set(x, static_cast<Color>(rng.below(4)));
    }

    if (model == Model::asep) {
        const double T = 12.0;
        auto run_dense = [&] {
            AsepEngine e(seed, 0.3, w, T);
            const int id = e.add_colored_state(cfg);
            e.run_until(T);
            return e.colored_config(id);
        };
        const ColoredConfig d1 = run_dense(), d2 = run_dense();
        ok = ok && d1 == d2;
        SparseAsep sp(seed, 0.3, w, T);
        for (std::int64_t x = w.lo; x <= w.hi; ++x)
            if (cfg.at(x) != no_particle) sp.place(x, cfg.at(x));
        sp.run_until(T);
        ok = ok && sp.snapshot(w) == d1;
    } else {
        const std::int64_t T = 16;
        auto run_dense = [&] {
            S6vEngine e(seed, 0.3, 0.5, w);
            const int id = e.add_colored_state(cfg);
            e.run_until_column(T);
            return e.colored_config(id);
        };
        const ColoredConfig d1 = run_dense(), d2 = run_dense();
        ok = ok && d1 == d2;
        SparseS6v sp(seed, 0.3, 0.5);
        for (std::int64_t x = w.lo; x <= w.hi; ++x)
            if (cfg.at(x) != no_particle) sp.place(x, cfg.at(x));
        sp.run_until_column(T);
        ColoredConfig snap(w);
        for (const auto& [site, color] : sp.particles())
            if (w.contains(site)) snap.set(site, color);
        ok = ok && snap == d1;
    }
    if (!ok) rep.failures = 1;
    rep.pass = ok;
    return rep;
}

TestReport check_stationarity(Model model, double q, double b_right, double rho, double t_model,
                              int pattern_len, std::int64_t min_sites, std::uint64_t seed, int jobs,
                              double significance)
{
    if (pattern_len < 1 || pattern_len > 8)
        throw std::invalid_argument("check_stationarity: pattern_len in [1,8]");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("check_stationarity: rho in (0,1)");

    TestReport rep;
    rep.name = std::string("stationarity_") + model_name(model) + "_rho" + std::to_string(rho);
    rep.seed = seed;
    rep.bound = "pattern chi-square and per-pattern z at significance " + std::to_string(significance) +
                " (Bonferroni across patterns)";

    const std::int64_t core_sites = 20000;
    const int replicas = static_cast<int>((min_sites + core_sites - 1) / core_sites);
    const int npat = 1 << pattern_len;
    std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(replicas),
                                                  std::vector<std::int64_t>(npat, 0));

    run_replicas(replicas, jobs, [&](int r) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(r));
        const Window core{0, core_sites - 1};
        ParticleConfig final_cfg;
        if (t_model <= 0.0) {
            final_cfg = bernoulli_config(derive_seed(s, 0x1CULL), core, rho);
        } else if (model == Model::asep) {
            const Window w = asep_padded_window(core, q, t_model);
            AsepEngine engine(s, q, w, t_model);
            const int id = engine.add_state(bernoulli_config(derive_seed(s, 0x1CULL), w, rho));
            engine.run_until(t_model);
            final_cfg = engine.config(id);
        } else {
            const std::int64_t cols = static_cast<std::int64_t>(std::llround(t_model));
            const Window w = s6v_padded_window(core, b_right, cols);
            S6vEngine engine(s, q, b_right, w);
            const int id = engine.add_state(bernoulli_config(derive_seed(s, 0x1CULL), w, rho));
            engine.run_until_column(cols);
            final_cfg = engine.config(id);
        }
        auto& cnt = counts[static_cast<std::size_t>(r)];
        for (std::int64_t x = core.lo; x + pattern_len - 1 <= core.hi; x += pattern_len) {
            int pat = 0;
            for (int b = 0; b < pattern_len; ++b) pat = (pat << 1) | final_cfg.at(x + b);
            ++cnt[pat];
        }
    });

    std::vector<std::int64_t> pooled(npat, 0);
    for (const auto& cnt : counts)
        for (int p = 0; p < npat; ++p) pooled[p] += cnt[p];

    std::vector<double> expected(npat);
    for (int p = 0; p < npat; ++p) {
        double pr = 1.0;
        for (int b = 0; b < pattern_len; ++b)
            pr *= ((p >> (pattern_len - 1 - b)) & 1) ? rho : 1.0 - rho;
        expected[p] = pr;
    }

    const ChiSquareResult chi = chi_square_test(pooled, expected);
    std::int64_t nblocks = 0;
    for (auto v : pooled) nblocks += v;
    const double z_crit = normal_upper_quantile(significance / (2.0 * npat));
    double worst_z = 0.0;
    for (int p = 0; p < npat; ++p) {
        const double phat = static_cast<double>(pooled[p]) / static_cast<double>(nblocks);
        const double se = proportion_stderr(expected[p], nblocks);
        worst_z = std::max(worst_z, std::abs(phat - expected[p]) / se);
    }

    rep.trials = nblocks;
    rep.stat("chi2", chi.statistic);
    rep.stat("chi2_p", chi.p_value);
    rep.stat("worst_pattern_z", worst_z);
    rep.stat("z_crit", z_crit);
    rep.stat("core_sites", static_cast<double>(core_sites) * replicas);
    rep.pass = chi.p_value >= significance && worst_z <= z_crit;
    if (!rep.pass) rep.failures = 1;
    return rep;
}

TestReport check_overtaking(Model model, double q, double b_right, int k_max, double t, int trials,
                            std::uint64_t seed, int jobs)
{
    TestReport rep;
    rep.name = std::string("overtaking_") + model_name(model);
    rep.seed = seed;
    rep.bound = "empirical P(L_t >= k) <= q^k + 3 stderr for k = 1.." + std::to_string(k_max);

    const int n2 = 15;             // marked color-2 particles
    const std::int64_t spacing = 2;
    std::vector<int> L(static_cast<std::size_t>(trials), 0);

    run_replicas(trials, jobs, [&](int i) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
        if (model == Model::asep) {
            // Tagged low-priority particle left of the marked block; L counts
            // marked particles it ends up to the right of.
            const double T = t;
            const std::int64_t span = static_cast<std::int64_t>(2.0 * T) + 64 * spacing * n2;
            SparseAsep engine(s, q, Window{-span, span}, T);
            engine.place(0, 1);
            for (int k = 0; k < n2; ++k) engine.place(spacing * (k + 1), 2);
            engine.run_until(T);
            std::int64_t pos1 = 0;
            if (!engine.rightmost_of_color(1, pos1)) return; // vanished off-window: skip
            int l = 0;
            for (const auto& [site, color] : engine.particles())
                if (color == 2 && site < pos1) ++l;
            L[static_cast<std::size_t>(i)] = l;
        } else {
            // S6V orientation: every arrow drifts upward, so the geometric
            // bound controls marked particles climbing past a tagged particle
            // placed above the marked block; L counts marked particles that
            // end up above it.
            const auto T = static_cast<std::int64_t>(t);
            SparseS6v engine(s, q, b_right);
            for (int k = 0; k < n2; ++k) engine.place(spacing * k, 2);
            engine.place(spacing * n2 + 2, 1);
            engine.run_until_column(T);
            std::int64_t pos1 = 0;
            if (!engine.rightmost_of_color(1, pos1)) return;
            int l = 0;
            for (const auto& [site, color] : engine.particles())
                if (color == 2 && site > pos1) ++l;
            L[static_cast<std::size_t>(i)] = l;
        }
    });

    rep.trials = trials;
    bool ok = true;
    for (int k = 1; k <= k_max; ++k) {
        std::int64_t n_ge = 0;
        for (int v : L)
            if (v >= k) ++n_ge;
        const double phat = static_cast<double>(n_ge) / trials;
        const double bound = std::pow(q, k);
        const double se = std::sqrt(std::max(bound * (1.0 - bound), 1.0 / trials) / trials);
        rep.stat("p_ge_" + std::to_string(k), phat);
        if (q == 0.0) {
            if (n_ge != 0) ok = false;
        } else if (phat > bound + 3.0 * se) {
            ok = false;
        }
    }
    if (!ok) rep.failures = 1;
    rep.pass = ok;
    return rep;
}

TestReport check_finite_speed(Model model, double q, double b_right, double eps, int trials,
                              std::uint64_t seed, int jobs)
{
    TestReport rep;
    rep.name = std::string("finite_speed_") + model_name(model);
    rep.seed = seed;
    rep.bound = "rightmost tracked-color displacement <= eps^-2 within floor(1/eps) time, zero failures";

    const double bound = std::pow(eps, -2.0);
    const auto t_int = static_cast<std::int64_t>(std::floor(1.0 / eps));
    const std::int64_t range = static_cast<std::int64_t>(bound) + 64;
    std::vector<std::uint8_t> fail(static_cast<std::size_t>(trials), 0);

    run_replicas(trials, jobs, [&](int i) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
        const EnvironmentNoise bg(derive_seed(s, 0xB6ULL));
        double worst = 0.0;
        if (model == Model::asep) {
            SparseAsep engine(s, q, Window{-3 * range, 3 * range}, static_cast<double>(t_int));
            for (std::int64_t x = -range; x <= range; ++x) {
                if (x == 0) continue;
                const double u = bg.uniform(x, Channel::ic_bernoulli, 0);
                if (u < 0.2)
                    engine.place(x, 1);
                else if (u < 0.4)
                    engine.place(x, 3);
            }
            engine.place(0, 2);
            for (int step = 1; step <= 5; ++step) {
                engine.run_until(static_cast<double>(t_int) * step / 5.0);
                std::int64_t pos = 0;
                if (engine.rightmost_of_color(2, pos))
                    worst = std::max(worst, std::abs(static_cast<double>(pos)));
                else
                    worst = bound + 1.0;
            }
        } else {
            SparseS6v engine(s, q, b_right);
            for (std::int64_t x = -range; x <= range; ++x) {
                if (x == 0) continue;
                const double u = bg.uniform(x, Channel::ic_bernoulli, 0);
                if (u < 0.2)
                    engine.place(x, 1);
                else if (u < 0.4)
                    engine.place(x, 3);
            }
            engine.place(0, 2);
            engine.run_until_column(t_int);
            std::int64_t pos = 0;
            if (engine.rightmost_of_color(2, pos))
                worst = std::abs(static_cast<double>(pos));
            else
                worst = bound + 1.0;
        }
        if (worst > bound) fail[static_cast<std::size_t>(i)] = 1;
    });

    rep.trials = trials;
    for (auto f : fail) rep.failures += f;
    rep.pass = rep.failures == 0;
    return rep;
}

double rw_above_line_dp(double lambda_drift, double rho_line, double M, int T)
{
    if (!(lambda_drift > -1.0 && lambda_drift < 0.0))
        throw std::invalid_argument("rw_above_line: lambda in (-1,0)");
    if (!(rho_line > -1.0 && rho_line < lambda_drift))
        throw std::invalid_argument("rw_above_line: need -1 < rho < lambda");
    if (M < 0.0 || T < 0) throw std::invalid_argument("rw_above_line: M >= 0, T >= 0");

    const double p = -lambda_drift;
    std::vector<double> prob(static_cast<std::size_t>(T) + 1, 0.0);
    prob[0] = 1.0;
    for (int t = 1; t <= T; ++t) {
        for (int s = t; s >= 1; --s) prob[s] = prob[s] * (1.0 - p) + prob[s - 1] * p;
        prob[0] *= 1.0 - p;
        for (int s = 0; s <= t; ++s)
            if (-static_cast<double>(s) < rho_line * t - M - 1e-12) prob[s] = 0.0;
    }
    double total = 0.0;
    for (double v : prob) total += v;
    return total;
}

TestReport check_rw_above_line(double lambda_drift, double rho_line, double M, int T,
                               std::int64_t mc_walks, std::uint64_t seed)
{
    TestReport rep;
    rep.name = "rw_above_line";
    rep.seed = seed;
    rep.bound = "DP vs Monte Carlo within 3 stderr; survival nondecreasing in M";

    const double dp = rw_above_line_dp(lambda_drift, rho_line, M, T);
    const double p = -lambda_drift;
    const EnvironmentNoise noise(seed);
    std::int64_t survived = 0;
    for (std::int64_t w = 0; w < mc_walks; ++w) {
        double s = 0.0;
        bool ok = true;
        for (int t = 1; t <= T; ++t) {
            if (noise.uniform(t, Channel::rw_increment, static_cast<std::uint64_t>(w)) < p) s -= 1.0;
            if (s < rho_line * t - M - 1e-12) {
                ok = false;
                break;
            }
        }
        if (ok) ++survived;
    }
    const double mc = static_cast<double>(survived) / static_cast<double>(mc_walks);
    const double se = std::sqrt(std::max(dp * (1.0 - dp), 1e-12) / static_cast<double>(mc_walks));

    bool shape = true;
    double prev = -1.0;
    for (double m : {M, M + 1.0, M + 2.0, M + 4.0, M + 8.0}) {
        const double v = rw_above_line_dp(lambda_drift, rho_line, m, T);
        if (v < prev - 1e-15) shape = false;
        prev = v;
    }

    rep.trials = mc_walks;
    rep.stat("dp", dp);
    rep.stat("mc", mc);
    rep.stat("stderr", se);
    rep.pass = std::abs(dp - mc) <= 3.0 * se && shape;
    if (!rep.pass) rep.failures = 1;
    return rep;
}

TestReport check_argmax_localization(Model model, const ScalingCoeffs& c, double eps, double t,
                                     double J, const std::vector<double>& M_grid, double R,
                                     double delta, double rho_ceiling, int replicas,
                                     std::uint64_t seed, int jobs)
{
    if (M_grid.empty() || !std::is_sorted(M_grid.begin(), M_grid.end()) || M_grid.back() > R)
        throw std::invalid_argument("check_argmax_localization: M_grid must be sorted and <= R");

    TestReport rep;
    rep.name = std::string("argmax_localization_") + model_name(model);
    rep.seed = seed;
    rep.bound = "saturation frequency nondecreasing in M, >= " + std::to_string(1.0 - rho_ceiling) +
                " at M = " + std::to_string(M_grid.back());

    const std::size_t nm = M_grid.size();
    std::vector<std::vector<std::uint8_t>> sat(static_cast<std::size_t>(replicas),
                                               std::vector<std::uint8_t>(nm, 0));

    run_replicas(replicas, jobs, [&](int r) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(r));
        SheetPlan plan = plan_sheet(model, c, eps, 0.0, t, R, J, 4);
        const Window core{plan.need_lo - 2, plan.need_hi + 2};

        IcSpec spec;
        spec.kind = IcKind::v_paste;
        spec.eps = eps;
        spec.seed = derive_seed(s, 0x1CULL);
        spec.lambda = 1.0;
        spec.M = 0.0;
        spec.drift_factor = 1;

        RescaledFunction f;
        SheetEnsemble sheet;
        HeightFunction ic_height;
        if (model == Model::asep) {
            const double T = asep_model_time(c, eps, t);
            AsepEngine engine(s, c.q, asep_padded_window(core, c.q, T), T);
            attach_sheet(engine, plan);
            const IcResult ic = make_ic(spec, c, engine.window());
            engine.run_until(T);
            sheet = extract_sheet(engine, plan);
            ic_height = ic.height;
        } else {
            const std::int64_t T = s6v_model_columns(eps, t);
            S6vEngine engine(s, c.q, c.b_right, s6v_padded_window(core, c.b_right, T));
            attach_sheet(engine, plan);
            const IcResult ic = make_ic(spec, c, engine.window());
            engine.run_until_column(T);
            sheet = extract_sheet(engine, plan);
            ic_height = ic.height;
        }
        f = rescale_height(model, ic_height, c, eps, 0.0, sheet.y.front() - 1e-9,
                           sheet.y.back() + 1e-9);

        // radii snap down to the realized grid coverage
        const double r_eff = std::min(R, sheet.y.back());
        for (std::size_t im = 0; im < nm; ++im) {
            const double m_eff = std::min(M_grid[im], r_eff);
            bool all_ok = true;
            for (std::size_t iy = 0; iy < sheet.x.size(); ++iy) {
                const double y = sheet.x[iy];
                if (y < -J || y > J) continue;
                const double qm = restricted_sup(f, sheet, m_eff, y);
                const double qr = restricted_sup(f, sheet, r_eff, y);
                if (qm < qr - delta) {
                    all_ok = false;
                    break;
                }
            }
            sat[static_cast<std::size_t>(r)][im] = all_ok ? 1 : 0;
        }
    });

    rep.trials = replicas;
    bool ok = true;
    double prev = -1.0;
    double last = 0.0;
    for (std::size_t im = 0; im < nm; ++im) {
        std::int64_t n = 0;
        for (int r = 0; r < replicas; ++r) n += sat[static_cast<std::size_t>(r)][im];
        const double freq = static_cast<double>(n) / replicas;
        rep.stat("saturation_M_" + std::to_string(M_grid[im]), freq);
        if (freq < prev - 1e-12) ok = false;
        prev = freq;
        last = freq;
    }
    if (last < 1.0 - rho_ceiling) ok = false;
    if (!ok) rep.failures = 1;
    rep.pass = ok;
    return rep;
}

TestReport check_clock_stream(double q, std::int64_t sites, double horizon, std::uint64_t seed)
{
    TestReport rep;
    rep.name = "clock_stream";
    rep.seed = seed;
    rep.bound = "Poisson count means within 3 sigma; inter-arrival KS below the 1% critical value; purity";

    const Window w{0, sites - 1};
    const ClockStream cs = build_clock_stream(seed, q, w, horizon);

    std::int64_t right = 0, left = 0;
    for (std::int64_t x = w.lo; x <= w.hi; ++x)
        for (const auto& tick : cs.site_events(x)) (tick.dir > 0 ? right : left) += 1;

    const double n = static_cast<double>(sites);
    const double zr = (static_cast<double>(right) / n - horizon) / std::sqrt(horizon / n);
    const double zl = (static_cast<double>(left) / n - q * horizon) /
                      std::sqrt(std::max(q * horizon, 1e-9) / n);
    // Gaps of ticks conditioned to land before the horizon are biased against
    // large values, so the KS sample is the per-site inter-arrival stream
    // itself (the stream's gaps are these draws by construction).
    const EnvironmentNoise noise(seed);
    std::vector<double> inter;
    const int gaps_per_site = static_cast<int>(std::max(1.0, horizon / 2.0));
    inter.reserve(static_cast<std::size_t>(sites) * gaps_per_site);
    for (std::int64_t x = w.lo; x <= w.hi; ++x)
        for (int k = 0; k < gaps_per_site; ++k)
            inter.push_back(noise.exponential(x, Channel::clock_right, static_cast<std::uint64_t>(k), 1.0));
    const double ks = ks_distance_to_cdf(inter, [](double x) { return 1.0 - std::exp(-x); });
    const double ks_crit =
        std::sqrt(-0.5 * std::log(0.005)) / std::sqrt(static_cast<double>(inter.size()));

    bool pure = q > 0.0 || left == 0;
    {
        const auto regen = clock_site_ticks(EnvironmentNoise(seed), w.lo, q, horizon);
        const auto& orig = cs.site_events(w.lo);
        pure = pure && regen.size() == orig.size();
        for (std::size_t i = 0; pure && i < regen.size(); ++i)
            pure = regen[i].time == orig[i].time && regen[i].dir == orig[i].dir;
    }

    rep.trials = right + left;
    rep.stat("z_right", zr);
    rep.stat("z_left", zl);
    rep.stat("ks_exponential", ks);
    rep.stat("ks_threshold", ks_crit);
    rep.pass = std::abs(zr) <= 3.0 && (q == 0.0 ? left == 0 : std::abs(zl) <= 3.0) && ks <= ks_crit && pure;
    if (!rep.pass) rep.failures = 1;
    return rep;
}

TestReport check_noise_marginals(double q, double b_right, std::int64_t n, std::uint64_t seed)
{
    TestReport rep;
    rep.name = "noise_marginals";
    rep.seed = seed;
    rep.bound = "P(X_up)=q b, P(X_right)=b within 3 sigma; channel independence chi-square at 1%";

    const VertexNoiseField field(seed, q, b_right);
    std::int64_t up = 0, rightc = 0;
    std::vector<std::int64_t> cells(4, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const bool xu = field.x_up(1, i);
        const bool xr = field.x_right(1, i);
        up += xu;
        rightc += xr;
        ++cells[(xu ? 2 : 0) + (xr ? 1 : 0)];
    }
    const double pu = field.p_up(), pr = field.p_right();
    const double zu = (static_cast<double>(up) / n - pu) / proportion_stderr(pu, n);
    const double zr = (static_cast<double>(rightc) / n - pr) / proportion_stderr(pr, n);
    const std::vector<double> expect = {(1 - pu) * (1 - pr), (1 - pu) * pr, pu * (1 - pr), pu * pr};
    const ChiSquareResult chi = chi_square_test(cells, expect);

    rep.trials = n;
    rep.stat("z_up", zu);
    rep.stat("z_right", zr);
    rep.stat("chi2_p", chi.p_value);
    rep.pass = std::abs(zu) <= 3.0 && std::abs(zr) <= 3.0 && chi.p_value >= 0.01;
    if (!rep.pass) rep.failures = 1;
    return rep;
}

TestReport check_thinning(double p, double removal, std::int64_t sites, std::uint64_t seed)
{
    TestReport rep;
    rep.name = "thinning";
    rep.seed = seed;
    rep.bound = "thinned Bern(p) is Bern(p(1-r)): pair-pattern chi-square at 1%; domination exact";

    const Window w{0, sites - 1};
    const ParticleConfig eta = bernoulli_config(seed, w, p);
    const ParticleConfig xi = thin_couple(eta, removal, derive_seed(seed, 0x71ULL));

    bool dominated = true;
    for (std::int64_t x = w.lo; x <= w.hi; ++x)
        if (xi.at(x) > eta.at(x)) dominated = false;

    const double target = p * (1.0 - removal);
    std::vector<std::int64_t> cells(4, 0);
    for (std::int64_t x = w.lo; x + 1 <= w.hi; x += 2) ++cells[(xi.at(x) << 1) | xi.at(x + 1)];
    const std::vector<double> expect = {(1 - target) * (1 - target), (1 - target) * target,
                                        target * (1 - target), target * target};
    const ChiSquareResult chi = chi_square_test(cells, expect);

    rep.trials = sites;
    rep.stat("chi2_p", chi.p_value);
    rep.pass = dominated && chi.p_value >= 0.01;
    if (!rep.pass) rep.failures = 1;
    return rep;
}

TestReport check_uparrow_domination(Model model, const ScalingCoeffs& c, double eps, double M,
                                    double lambda, double lambda_prime, int replicas,
                                    std::uint64_t seed, int jobs)
{
    TestReport rep;
    rep.name = std::string("uparrow_domination_") + model_name(model);
    rep.seed = seed;
    rep.bound = "uparrow height dominates the base on the core exactly; global failures rare";

    const std::int64_t m = static_cast<std::int64_t>(std::llround(M * eps_m23_floor(eps)));
    std::vector<std::uint8_t> core_bad(static_cast<std::size_t>(replicas), 0);
    std::vector<std::uint8_t> global_bad(static_cast<std::size_t>(replicas), 0);
    std::mutex mu;
    double delta_max = 0.0, delta_min = 0.0;

    run_replicas(replicas, jobs, [&](int r) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(r));
        const Window w{-40 * m, 40 * m};
        IcSpec spec;
        spec.kind = IcKind::uparrow;
        spec.eps = eps;
        spec.seed = s;
        spec.M = M;
        spec.lambda = lambda;
        spec.lambda_prime = lambda_prime;
        spec.core_kind = IcKind::bernoulli;
        spec.core_rho = c.abs_mu_prime();
        const IcResult up = make_ic(spec, c, w);

        IcSpec base_spec = spec;
        base_spec.kind = IcKind::bernoulli;
        base_spec.rho = c.abs_mu_prime();
        const IcResult base = make_ic(base_spec, c, w);

        // domination in raw units: S6V wants h_up >= h_base, ASEP flips; the
        // band may undercut by at most the audited rounding deficit
        const int sgn = (model == Model::s6v) ? 1 : -1;
        const auto band_tol = static_cast<std::int64_t>(std::floor(up.delta_min)) - 1;
        bool core_ok = true, global_ok = true;
        for (std::int64_t x = -m; x <= m; ++x)
            if (sgn * (up.height.at(x) - base.height.at(x)) < 0) core_ok = false;
        for (std::int64_t x = w.lo; x <= w.hi; ++x)
            if (sgn * (up.height.at(x) - base.height.at(x)) < band_tol) global_ok = false;
        if (!core_ok) core_bad[static_cast<std::size_t>(r)] = 1;
        if (!global_ok) global_bad[static_cast<std::size_t>(r)] = 1;
        std::lock_guard<std::mutex> lock(mu);
        delta_max = std::max(delta_max, up.delta_max);
        delta_min = std::min(delta_min, up.delta_min);
    });

    rep.trials = replicas;
    std::int64_t core_fails = 0, global_fails = 0;
    for (int r = 0; r < replicas; ++r) {
        core_fails += core_bad[static_cast<std::size_t>(r)];
        global_fails += global_bad[static_cast<std::size_t>(r)];
    }
    rep.failures = core_fails;
    rep.stat("core_failures", static_cast<double>(core_fails));
    rep.stat("global_failure_frequency", static_cast<double>(global_fails) / replicas);
    rep.stat("delta_max", delta_max);
    rep.stat("delta_min", delta_min);
    rep.pass = core_fails == 0 && static_cast<double>(global_fails) / replicas <= 0.10;
    return rep;
}

std::vector<TestReport> run_exact_suite(const SuiteOptions& opt)
{
    std::vector<TestReport> out;
    const auto n = [&](double base) { return std::max(1, static_cast<int>(base * opt.scale)); };

    out.push_back(check_vertex_stochasticity(50, opt.seed));
    out.push_back(check_arrow_conservation(n(1000000), derive_seed(opt.seed, 2)));
    out.push_back(check_monotonicity_asep(0.5, 600, 20.0, n(100), derive_seed(opt.seed, 3), opt.jobs,
                                          opt.negative_control));
    {
        const ScalingCoeffs c = derive_coeffs_asep(0.5, 0.0);
        out.push_back(check_variational(Model::asep, c, IcKind::bernoulli, 1.0 / 16.0, 1.0, 1.0,
                                        n(20), derive_seed(opt.seed, 4), opt.jobs));
        out.push_back(check_variational(Model::asep, c, IcKind::step, 1.0 / 16.0, 1.0, 1.0, n(20),
                                        derive_seed(opt.seed, 5), opt.jobs));
        out.push_back(check_flux_identity(Model::asep, c, 1.0 / 16.0, 2.0, 0.5, 1.0, n(20),
                                          derive_seed(opt.seed, 6), opt.jobs));
    }
    {
        const ScalingCoeffs c = derive_coeffs_s6v(0.5, 0.25, 1.0);
        out.push_back(check_flux_identity(Model::s6v, c, 1.0 / 16.0, 2.0, 0.5, 1.0, n(20),
                                          derive_seed(opt.seed, 7), opt.jobs));
    }
    out.push_back(check_merge_commute(Model::asep, n(50), derive_seed(opt.seed, 8)));
    out.push_back(check_merge_commute(Model::s6v, n(50), derive_seed(opt.seed, 9)));
    out.push_back(check_colored_projection(Model::asep, n(50), derive_seed(opt.seed, 10)));
    out.push_back(check_colored_projection(Model::s6v, n(50), derive_seed(opt.seed, 11)));
    out.push_back(check_window_sentinel(Model::asep, derive_seed(opt.seed, 12)));
    out.push_back(check_window_sentinel(Model::s6v, derive_seed(opt.seed, 13)));
    out.push_back(check_determinism(Model::asep, derive_seed(opt.seed, 14)));
    out.push_back(check_determinism(Model::s6v, derive_seed(opt.seed, 15)));
    return out;
}

std::vector<TestReport> run_statistical_suite(const SuiteOptions& opt)
{
    std::vector<TestReport> out;
    const auto n = [&](double base) { return std::max(2, static_cast<int>(base * opt.scale)); };
    const auto n64 = [&](double base) { return static_cast<std::int64_t>(base * opt.scale); };

    out.push_back(check_clock_stream(0.5, 400, 50.0, derive_seed(opt.seed, 21)));
    out.push_back(check_noise_marginals(0.5, 0.5, n64(400000), derive_seed(opt.seed, 22)));
    out.push_back(check_thinning(0.5, 0.3, n64(400000), derive_seed(opt.seed, 23)));
    out.push_back(check_monotonicity_s6v(0.5, 0.5, 200, 29, n(100), derive_seed(opt.seed, 24), opt.jobs));
    {
        const ScalingCoeffs c6 = derive_coeffs_s6v(0.5, 0.25, 1.0);
        out.push_back(check_variational(Model::s6v, c6, IcKind::bernoulli, 1.0 / 16.0, 1.0, 1.0,
                                        n(30), derive_seed(opt.seed, 25), opt.jobs));
        out.push_back(check_stationarity(Model::s6v, 0.5, 0.5, 0.5, 100.0, 3, n64(200000),
                                         derive_seed(opt.seed, 26), opt.jobs));
        out.push_back(check_stationarity(Model::s6v, 0.5, 0.5, 0.525, 100.0, 3, n64(200000),
                                         derive_seed(opt.seed, 27), opt.jobs));
        out.push_back(check_argmax_localization(Model::s6v, c6, 1.0 / 16.0, 1.0, 1.0, {1.0, 2.0, 4.0},
                                                6.0, 0.1, 0.2, n(30), derive_seed(opt.seed, 28),
                                                opt.jobs));
    }
    out.push_back(check_stationarity(Model::asep, 0.5, 0.5, 0.5, 100.0, 3, n64(200000),
                                     derive_seed(opt.seed, 29), opt.jobs));
    out.push_back(check_stationarity(Model::asep, 0.5, 0.5, 0.525, 100.0, 3, n64(200000),
                                     derive_seed(opt.seed, 30), opt.jobs));
    out.push_back(check_overtaking(Model::asep, 0.5, 0.5, 8, 200.0, n(2000), derive_seed(opt.seed, 31),
                                   opt.jobs));
    out.push_back(check_overtaking(Model::s6v, 0.5, 0.5, 8, 200.0, n(2000), derive_seed(opt.seed, 32),
                                   opt.jobs));
    out.push_back(check_finite_speed(Model::asep, 0.5, 0.5, 0.1, n(200), derive_seed(opt.seed, 33), opt.jobs));
    out.push_back(check_finite_speed(Model::s6v, 0.5, 0.5, 0.1, n(200), derive_seed(opt.seed, 34), opt.jobs));
    out.push_back(check_rw_above_line(-0.5, -0.6, 2.0, 200, n64(50000), derive_seed(opt.seed, 35)));
    {
        const ScalingCoeffs c = derive_coeffs_asep(0.5, 0.0);
        out.push_back(check_uparrow_domination(Model::asep, c, 1.0 / 16.0, 1.0, 0.5, 2.0, n(20),
                                               derive_seed(opt.seed, 36), opt.jobs));
    }
    // Sensitivity control: decoupled clocks must produce violations.
    {
        TestReport neg = check_monotonicity_asep(0.5, 400, 20.0, n(20), derive_seed(opt.seed, 37),
                                                 opt.jobs, true);
        neg.name = "monotonicity_sensitivity_control";
        neg.bound = "decoupled clocks must violate monotonicity (test power)";
        neg.pass = neg.failures > 0;
        out.push_back(neg);
    }
    return out;
}

} // namespace kpzsim
