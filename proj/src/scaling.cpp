#include "kpzsim/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kpzsim {

const char* model_name(Model m) { return m == Model::asep ? "asep" : "s6v"; }

Model model_from_string(const std::string& s)
{
    if (s == "asep") return Model::asep;
    if (s == "s6v") return Model::s6v;
    throw std::invalid_argument("unknown model: " + s);
}

double mu_asep(double alpha) { return 0.25 * (1.0 - alpha) * (1.0 - alpha); }

double sigma_asep(double alpha) { return 0.5 * std::pow(1.0 - alpha * alpha, 2.0 / 3.0); }

double mu_s6v(double z, double alpha)
{
    const double d = std::sqrt(alpha) - std::sqrt(z);
    return -d * d / (1.0 - z);
}

double sigma_s6v(double z, double alpha)
{
    return std::pow(alpha, -1.0 / 6.0) * std::pow(z, 1.0 / 6.0) *
           std::pow(1.0 - std::sqrt(z * alpha), 2.0 / 3.0) *
           std::pow(std::sqrt(alpha) - std::sqrt(z), 2.0 / 3.0) / (1.0 - z);
}

double z_from_b_right(double q, double b_right) { return (1.0 - b_right) / (1.0 - q * b_right); }

double b_right_from_z(double q, double z) { return (1.0 - z) / (1.0 - q * z); }

namespace {

void check_mu_prime(double mu_prime, double fd, const char* model)
{
    const double denom = std::max(std::abs(mu_prime), 1e-12);
    if (std::abs(mu_prime - fd) / denom > 1e-8)
        throw std::logic_error(std::string("derive_coeffs(") + model +
                               "): analytic mu' disagrees with finite difference");
}

void finish(ScalingCoeffs& c)
{
    const double m = c.abs_mu_prime();
    if (!(m > 0.0 && m < 1.0))
        throw std::invalid_argument("derive_coeffs: |mu'| must lie in (0,1)");
    c.beta = 2.0 * c.sigma * c.sigma / (m * (1.0 - m));
    if (!(c.sigma > 0.0) || !(c.beta > 0.0))
        throw std::invalid_argument("derive_coeffs: sigma and beta must be positive");
}

} // namespace

ScalingCoeffs derive_coeffs_asep(double q, double alpha)
{
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("derive_coeffs(asep): q must be in [0,1)");
    if (!(alpha > -1.0 && alpha < 1.0))
        throw std::invalid_argument("derive_coeffs(asep): alpha must lie in (-1,1), the rarefaction fan");

    ScalingCoeffs c;
    c.model = Model::asep;
    c.q = q;
    c.alpha = alpha;
    c.gamma = 1.0 - q;
    c.mu = mu_asep(alpha);
    c.mu_prime = -0.5 * (1.0 - alpha);
    c.sigma = sigma_asep(alpha);

    const double h = 1e-6;
    check_mu_prime(c.mu_prime, (mu_asep(alpha + h) - mu_asep(alpha - h)) / (2.0 * h), "asep");
    finish(c);
    return c;
}

ScalingCoeffs derive_coeffs_s6v(double q, double z, double alpha)
{
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("derive_coeffs(s6v): q must be in [0,1)");
    if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("derive_coeffs(s6v): z must lie in (0,1)");
    if (!(alpha > z && alpha < 1.0 / z))
        throw std::invalid_argument("derive_coeffs(s6v): alpha must lie in (z, 1/z), the rarefaction fan");

    ScalingCoeffs c;
    c.model = Model::s6v;
    c.q = q;
    c.z = z;
    c.b_right = b_right_from_z(q, z);
    c.alpha = alpha;
    c.mu = mu_s6v(z, alpha);
    c.mu_prime = -(1.0 - std::sqrt(z / alpha)) / (1.0 - z);
    c.sigma = sigma_s6v(z, alpha);

    const double h = 1e-6 * std::min(alpha - z, 1.0);
    check_mu_prime(c.mu_prime, (mu_s6v(z, alpha + h) - mu_s6v(z, alpha - h)) / (2.0 * h), "s6v");
    finish(c);
    return c;
}

ScalingCoeffs derive_coeffs_s6v_from_b(double q, double b_right, double alpha)
{
    if (b_right <= 0.0 || b_right >= 1.0)
        throw std::invalid_argument("derive_coeffs(s6v): b_right must lie in (0,1)");
    return derive_coeffs_s6v(q, z_from_b_right(q, b_right), alpha);
}

double asep_model_time(const ScalingCoeffs& c, double eps, double t_macro)
{
    return 2.0 * t_macro / (c.gamma * eps);
}

std::int64_t s6v_model_columns(double eps, double t_macro)
{
    return static_cast<std::int64_t>(std::floor(t_macro / eps));
}

double drift_sites(const ScalingCoeffs& c, double eps, double t_macro)
{
    return c.model == Model::asep ? 2.0 * c.alpha * t_macro / eps : c.alpha * t_macro / eps;
}

double RescaledFunction::operator()(double x) const
{
    if (xs.empty()) throw std::logic_error("RescaledFunction: empty");
    if (x < xs.front() - 1e-12 || x > xs.back() + 1e-12)
        throw std::out_of_range("RescaledFunction: x outside domain");
    const auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return vals.front();
    if (it == xs.end()) return vals.back();
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return (1.0 - w) * vals[i - 1] + w * vals[i];
}

RescaledFunction rescale_height(Model model, const HeightFunction& h, const ScalingCoeffs& c,
                                double eps, double t_macro, double x_min, double x_max)
{
    if (eps <= 0.0) throw std::invalid_argument("rescale_height: eps must be positive");
    if (x_min >= x_max) throw std::invalid_argument("rescale_height: empty x range");

    const double e23 = std::pow(eps, -2.0 / 3.0);
    const double e13 = std::pow(eps, 1.0 / 3.0);
    const double drift = drift_sites(c, eps, t_macro);
    const double time_term = (model == Model::asep) ? 2.0 * c.mu * t_macro / eps
                                                    : c.mu * t_macro / eps;

    const auto site_lo = static_cast<std::int64_t>(std::ceil(drift + c.beta * x_min * e23 - 1e-9));
    const auto site_hi = static_cast<std::int64_t>(std::floor(drift + c.beta * x_max * e23 + 1e-9));
    if (site_lo < h.window.lo || site_hi > h.window.hi)
        throw std::out_of_range("rescale_height: requested x range exceeds simulated window");

    RescaledFunction f;
    for (std::int64_t s = site_lo; s <= site_hi; ++s) {
        const double rel = static_cast<double>(s) - drift; // = beta * x * eps^(-2/3)
        f.xs.push_back(rel / (c.beta * e23));
        const double hv = static_cast<double>(h.at(s));
        const double v = (model == Model::asep)
                             ? (time_term + c.mu_prime * rel - hv) * e13 / c.sigma
                             : (hv - time_term - c.mu_prime * rel) * e13 / c.sigma;
        f.vals.push_back(v);
    }
    if (f.xs.size() < 2) throw std::out_of_range("rescale_height: x range contains fewer than two sites");
    return f;
}

std::int64_t asep_buffer_sites(double q, double horizon)
{
    return static_cast<std::int64_t>(std::ceil(8.0 * (1.0 + q) * horizon)) + 64;
}

std::int64_t s6v_bottom_pad(double b_right, std::int64_t columns)
{
    return static_cast<std::int64_t>(std::ceil(8.0 * static_cast<double>(columns) / (1.0 - b_right)));
}

Window asep_padded_window(Window core, double q, double horizon)
{
    const std::int64_t b = asep_buffer_sites(q, horizon);
    return Window{core.lo - b, core.hi + b};
}

Window s6v_padded_window(Window core, double b_right, std::int64_t columns)
{
    return Window{core.lo - s6v_bottom_pad(b_right, columns), core.hi + 2};
}

double SheetEnsemble::landscape(std::size_t iy, double x_at) const
{
    const auto& row = rescaled[iy];
    if (x_at < x.front() - 1e-12 || x_at > x.back() + 1e-12)
        throw std::out_of_range("SheetEnsemble::landscape: x outside grid");
    const auto it = std::lower_bound(x.begin(), x.end(), x_at);
    if (it == x.begin()) return row.front();
    if (it == x.end()) return row.back();
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (x_at - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - w) * row[i - 1] + w * row[i];
}

SheetPlan plan_sheet(Model model, const ScalingCoeffs& c, double eps, double s, double t,
                     double y_half, double x_half, std::int64_t site_step)
{
    if (s >= t) throw std::invalid_argument("plan_sheet: need s < t");
    if (site_step < 1) throw std::invalid_argument("plan_sheet: site_step must be >= 1");

    SheetPlan p;
    p.model = model;
    p.coeffs = c;
    p.eps = eps;
    p.s = s;
    p.t = t;

    const double e23 = std::pow(eps, -2.0 / 3.0);
    const auto y_steps = static_cast<std::int64_t>(std::floor(c.beta * y_half * e23)) / site_step;
    const auto x_steps = static_cast<std::int64_t>(std::floor(c.beta * x_half * e23)) / site_step;
    for (std::int64_t k = -y_steps; k <= y_steps; ++k) p.y_sites.push_back(k * site_step);
    for (std::int64_t k = -x_steps; k <= x_steps; ++k) p.x_sites.push_back(k * site_step);

    p.drift = static_cast<std::int64_t>(std::llround(drift_sites(c, eps, t - s)));
    p.need_lo = std::min(p.y_sites.front(), p.drift + p.x_sites.front());
    p.need_hi = std::max(p.y_sites.back(), p.drift + p.x_sites.back());
    return p;
}

HeightFunction step_ic_height(Model model, std::int64_t y, Window w)
{
    std::vector<std::int64_t> v(static_cast<std::size_t>(w.size()));
    for (std::int64_t x = w.lo; x <= w.hi; ++x)
        v[w.index(x)] = (model == Model::asep) ? (x <= y ? y - x : 0) : (x >= y ? y - x : 0);
    return HeightFunction(w, std::move(v));
}

std::int64_t eps_m23_floor(double eps)
{
    return static_cast<std::int64_t>(std::floor(std::pow(eps, -2.0 / 3.0) + 1e-9));
}

void attach_sheet(AsepEngine& engine, SheetPlan& plan)
{
    const Window w = engine.window();
    // The full family of step initial conditions is one colored configuration
    // with strictly decreasing colors; cut -y reproduces the system started
    // from the step at y.
    ColoredConfig cfg(w);
    for (std::int64_t x = w.lo; x <= w.hi; ++x)
        cfg.set(x, static_cast<Color>(-x));

    std::vector<Color> cuts;
    std::vector<HeightFunction> h0s;
    for (auto it = plan.y_sites.rbegin(); it != plan.y_sites.rend(); ++it) {
        cuts.push_back(static_cast<Color>(-*it));
        h0s.push_back(step_ic_height(Model::asep, *it, w));
    }
    const double start = asep_model_time(plan.coeffs, plan.eps, plan.s);
    plan.colored_id = engine.add_colored_state(cfg, start);
    engine.track_cuts(plan.colored_id, std::move(cuts), h0s);
}

void attach_sheet(S6vEngine& engine, SheetPlan& plan)
{
    const Window w = engine.window();
    ColoredConfig cfg(w);
    for (std::int64_t x = w.lo; x <= w.hi; ++x)
        cfg.set(x, static_cast<Color>(x));

    std::vector<Color> cuts;
    std::vector<HeightFunction> h0s;
    for (std::int64_t y : plan.y_sites) {
        cuts.push_back(static_cast<Color>(y + 1));
        h0s.push_back(step_ic_height(Model::s6v, y, w));
    }
    plan.colored_id = engine.add_colored_state(cfg, s6v_model_columns(plan.eps, plan.s));
    engine.track_cuts(plan.colored_id, std::move(cuts), h0s);
}

namespace {

template <class Engine>
SheetEnsemble extract_impl(const Engine& engine, const SheetPlan& plan)
{
    const ScalingCoeffs& c = plan.coeffs;
    const double eps = plan.eps;
    const double e23 = std::pow(eps, -2.0 / 3.0);
    const double e13 = std::pow(eps, 1.0 / 3.0);
    const double dt = plan.t - plan.s;
    const double time_term = (plan.model == Model::asep) ? 2.0 * c.mu * dt / eps : c.mu * dt / eps;

    SheetEnsemble sheet;
    sheet.model = plan.model;
    sheet.eps = eps;
    sheet.s = plan.s;
    sheet.t = plan.t;
    sheet.y_sites = plan.y_sites;
    for (std::int64_t ys : plan.y_sites) sheet.y.push_back(static_cast<double>(ys) / (c.beta * e23));
    for (std::int64_t xs : plan.x_sites) {
        sheet.x_sites_abs.push_back(plan.drift + xs);
        sheet.x.push_back(static_cast<double>(xs) / (c.beta * e23));
    }

    const std::size_t ny = plan.y_sites.size();
    const std::size_t nx = plan.x_sites.size();
    sheet.raw.assign(ny, std::vector<std::int64_t>(nx));
    sheet.rescaled.assign(ny, std::vector<double>(nx));
    for (std::size_t iy = 0; iy < ny; ++iy) {
        // ASEP cuts were registered in reverse y order.
        const std::size_t k = (plan.model == Model::asep) ? ny - 1 - iy : iy;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::int64_t raw = engine.cut_height_at(plan.colored_id, k, sheet.x_sites_abs[ix]);
            sheet.raw[iy][ix] = raw;
            const double rel = static_cast<double>(plan.x_sites[ix] - plan.y_sites[iy]);
            sheet.rescaled[iy][ix] =
                (plan.model == Model::asep)
                    ? (time_term + c.mu_prime * rel - static_cast<double>(raw)) * e13 / c.sigma
                    : (static_cast<double>(raw) - time_term - c.mu_prime * rel) * e13 / c.sigma;
        }
    }
    return sheet;
}

} // namespace

SheetEnsemble extract_sheet(const AsepEngine& engine, const SheetPlan& plan)
{
    return extract_impl(engine, plan);
}

SheetEnsemble extract_sheet(const S6vEngine& engine, const SheetPlan& plan)
{
    return extract_impl(engine, plan);
}

SheetEnsemble build_sheet(Model model, const ScalingCoeffs& c, double eps, double s, double t,
                          double y_half, double x_half, std::int64_t site_step, std::uint64_t seed)
{
    SheetPlan plan = plan_sheet(model, c, eps, s, t, y_half, x_half, site_step);
    const Window core{plan.need_lo, plan.need_hi};
    if (model == Model::asep) {
        const double t_model = asep_model_time(c, eps, t);
        AsepEngine engine(seed, c.q, asep_padded_window(core, c.q, t_model), t_model);
        attach_sheet(engine, plan);
        engine.run_until(t_model);
        return extract_sheet(engine, plan);
    }
    const std::int64_t cols = s6v_model_columns(eps, t);
    S6vEngine engine(seed, c.q, c.b_right, s6v_padded_window(core, c.b_right, cols));
    attach_sheet(engine, plan);
    engine.run_until_column(cols);
    return extract_sheet(engine, plan);
}

double restricted_sup(const RescaledFunction& f, const SheetEnsemble& sheet, double I, double y)
{
    if (I <= 0.0) throw std::invalid_argument("restricted_sup: I must be positive");
    if (f.x_min() > -I || f.x_max() < I)
        throw std::invalid_argument("restricted_sup: [-I,I] not inside f's grid");

    bool any = false;
    double best = 0.0;
    for (std::size_t iy = 0; iy < sheet.y.size(); ++iy) {
        const double z = sheet.y[iy];
        if (z < -I || z > I) continue;
        const double v = f(z) + sheet.landscape(iy, y);
        if (!any || v > best) best = v;
        any = true;
    }
    if (!any) throw std::invalid_argument("restricted_sup: no sheet grid point in [-I,I]");
    return best;
}

namespace {

// Samples of the exponentially compressed curve on [-ell, ell]:
// grid nodes inside the interval plus interpolated endpoint values.
void curve_samples(const RescaledFunction& f, double ell, std::vector<double>& xs,
                   std::vector<double>& vs)
{
    xs.clear();
    vs.clear();
    auto push = [&](double x, double v) {
        xs.push_back(x);
        vs.push_back(std::exp(std::min(v, 700.0)));
    };
    push(-ell, f(-ell));
    for (std::size_t i = 0; i < f.xs.size(); ++i)
        if (f.xs[i] > -ell && f.xs[i] < ell) push(f.xs[i], f.vals[i]);
    push(ell, f(ell));
}

// One-sided Hausdorff from the curve (ax, av) to the hypograph of (bx, bv),
// Chebyshev product metric, clamped at `clamp`.
double one_sided(const std::vector<double>& ax, const std::vector<double>& av,
                 const std::vector<double>& bx, const std::vector<double>& bv, double clamp)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        double best = clamp;
        for (std::size_t j = 0; j < bx.size(); ++j) {
            const double dx = std::abs(ax[i] - bx[j]);
            if (dx >= best) continue;
            const double dv = av[i] > bv[j] ? av[i] - bv[j] : 0.0;
            const double d = dx > dv ? dx : dv;
            if (d < best) best = d;
            if (best == 0.0) break;
        }
        if (best > worst) worst = best;
        if (worst >= clamp) return clamp;
    }
    return worst;
}

} // namespace

double uc_distance(const RescaledFunction& f, const RescaledFunction& g, int L_max)
{
    if (L_max < 1) throw std::invalid_argument("uc_distance: L_max must be >= 1");
    if (f.x_min() > -static_cast<double>(L_max) || f.x_max() < static_cast<double>(L_max) ||
        g.x_min() > -static_cast<double>(L_max) || g.x_max() < static_cast<double>(L_max))
        throw std::invalid_argument("uc_distance: functions not defined on [-L_max, L_max]");

    double total = 0.0;
    std::vector<double> fx, fv, gx, gv;
    for (int ell = 1; ell <= L_max; ++ell) {
        curve_samples(f, ell, fx, fv);
        curve_samples(g, ell, gx, gv);
        const double d = std::max(one_sided(fx, fv, gx, gv, 1.0), one_sided(gx, gv, fx, fv, 1.0));
        total += std::ldexp(std::min(1.0, d), -ell);
    }
    return total;
}

} // namespace kpzsim
