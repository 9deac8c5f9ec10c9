#include "kpzsim/ic.hpp"

#include "kpzsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kpzsim {

const char* ic_kind_name(IcKind k)
{
    switch (k) {
    case IcKind::step: return "step";
    case IcKind::bernoulli: return "bernoulli";
    case IcKind::v_paste: return "v_paste";
    case IcKind::same_side_paste: return "same_side_paste";
    case IcKind::uparrow: return "uparrow";
    }
    return "?";
}

IcKind ic_kind_from_string(const std::string& s)
{
    if (s == "step") return IcKind::step;
    if (s == "bernoulli") return IcKind::bernoulli;
    if (s == "v_paste") return IcKind::v_paste;
    if (s == "same_side_paste") return IcKind::same_side_paste;
    if (s == "uparrow") return IcKind::uparrow;
    throw std::invalid_argument("unknown ic.kind: " + s);
}

double rho_eps_lambda(const ScalingCoeffs& c, double lambda, double eps, int drift_factor)
{
    if (drift_factor != 1 && drift_factor != 2)
        throw std::invalid_argument("rho_eps_lambda: drift_factor must be 1 or 2");
    if (eps <= 0.0) throw std::invalid_argument("rho_eps_lambda: eps must be positive");
    const double rho = c.abs_mu_prime() +
                       drift_factor * lambda * c.sigma / c.beta * std::pow(eps, 1.0 / 3.0);
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("rho_eps_lambda: resulting density not in (0,1)");
    return rho;
}

namespace {

// Distinct sub-streams of the Bernoulli IC channel.
enum : std::uint64_t { idx_core = 0, idx_xi_plus = 1, idx_xi_minus = 2 };

ParticleConfig base_config(const IcSpec& spec, Model model, Window w)
{
    ParticleConfig cfg(w);
    if (spec.core_kind == IcKind::step) {
        for (std::int64_t x = w.lo; x <= w.hi; ++x)
            cfg.set(x, model == Model::asep ? (x <= spec.core_y) : (x > spec.core_y));
    } else if (spec.core_kind == IcKind::bernoulli) {
        if (!(spec.core_rho > 0.0 && spec.core_rho < 1.0))
            throw std::invalid_argument("make_ic: core_rho must be in (0,1)");
        const EnvironmentNoise noise(spec.seed);
        for (std::int64_t x = w.lo; x <= w.hi; ++x)
            cfg.set(x, noise.bernoulli(x, Channel::ic_bernoulli, idx_core, spec.core_rho));
    } else {
        throw std::invalid_argument("make_ic: core_kind must be step or bernoulli");
    }
    return cfg;
}

std::int64_t anchor_site(Window w) { return w.contains(0) ? 0 : w.lo; }

struct UparrowBand {
    std::vector<std::int64_t> rel_height; // relative to the inner edge
    std::int64_t end_site = 0;            // outermost band site (absolute)
    double delta_max = 0.0;
    double delta_min = 0.0;
};

// Raw-height target of the uparrow band profile, relative to the inner edge
// w_inner, including the model's sign convention. "dir" is +1 (right band) or
// -1 (left band).
class UparrowTarget {
public:
    UparrowTarget(Model model, const ScalingCoeffs& c, double eps, const HeightFunction& base,
                  std::int64_t w_inner)
        : c_(c), base_(base), w_inner_(w_inner)
    {
        e13_ = std::pow(eps, 1.0 / 3.0);
        sgn_ = (model == Model::asep) ? -1.0 : 1.0;
    }

    // Rescaled-profile target: max(frak_h0(x) - frak_h0(x_inner), 0) + lambda' (|x| - |x_inner|),
    // expressed as a raw height increment relative to h(w_inner).
    double operator()(std::int64_t w, double lambda_prime) const
    {
        const double dh = static_cast<double>(base_.at(w) - base_.at(w_inner_));
        const double dw = static_cast<double>(w - w_inner_);
        const double frak = sgn_ * (dh - c_.mu_prime * dw) / c_.sigma * e13_; // frak_h0(x)-frak_h0(x_in), scaled
        const double lam = lambda_prime * (std::abs(static_cast<double>(w)) -
                                           std::abs(static_cast<double>(w_inner_))) *
                           e13_ / c_.beta; // lambda'(|x|-|x_in|) in the same scaled units
        const double target_frak = std::max(frak, 0.0) + lam;
        // back to raw units: h_rel = sgn * sigma eps^(-1/3) * target + mu' dw
        return sgn_ * target_frak * c_.sigma / e13_ + c_.mu_prime * dw;
    }

private:
    const ScalingCoeffs& c_;
    const HeightFunction& base_;
    std::int64_t w_inner_;
    double e13_;
    double sgn_;
};

// Greedy lattice rounding of the band target. For S6V larger raw height means
// larger rescaled height, so we chase the target from above with ceil; for
// ASEP the orientation flips.
UparrowBand build_band(Model model, const ScalingCoeffs& c, double eps, const HeightFunction& base,
                       std::int64_t w_inner, int dir, std::int64_t w_cap, double lambda_prime,
                       std::int64_t explicit_end)
{
    const UparrowTarget target(model, c, eps, base, w_inner);
    const double e13 = std::pow(eps, 1.0 / 3.0);
    const double sgn = (model == Model::asep) ? -1.0 : 1.0;
    const double frak_inner = sgn *
                              (static_cast<double>(base.at(w_inner)) -
                               c.mu_prime * static_cast<double>(w_inner)) /
                              c.sigma * e13;

    UparrowBand band;
    band.rel_height.push_back(0);
    std::int64_t h_prev = 0;
    std::int64_t w = w_inner;
    while (true) {
        w += dir;
        if ((w - w_cap) * dir > 0)
            throw WindowError("make_ic(uparrow): window too small for the band scan");
        const double t = target(w, lambda_prime);
        // increments: rightward in {0,-1}, leftward in {0,+1}
        const std::int64_t lo = (dir > 0) ? h_prev - 1 : h_prev;
        const std::int64_t hi = (dir > 0) ? h_prev : h_prev + 1;
        const std::int64_t h =
            (model == Model::s6v)
                ? std::clamp(static_cast<std::int64_t>(std::ceil(t - 1e-9)), lo, hi)
                : std::clamp(static_cast<std::int64_t>(std::floor(t + 1e-9)), lo, hi);
        const double delta_frak = sgn * (static_cast<double>(h) - t); // >= 0 when rounding "up"
        band.delta_max = std::max(band.delta_max, delta_frak);
        band.delta_min = std::min(band.delta_min, delta_frak);
        band.rel_height.push_back(h);
        h_prev = h;

        if (explicit_end != 0) {
            if (w == explicit_end) {
                band.end_site = w;
                return band;
            }
            continue;
        }
        // Stop once the assembled rescaled height clears lambda'(1+|x|)/2.
        const double dw = static_cast<double>(w - w_inner);
        const double frak_rel = sgn * (static_cast<double>(h) - c.mu_prime * dw) / c.sigma * e13;
        const double x_abs = std::abs(static_cast<double>(w)) * e13 * e13 / c.beta;
        if (frak_inner + frak_rel > 0.5 * lambda_prime * (1.0 + x_abs)) {
            band.end_site = w;
            return band;
        }
    }
}

} // namespace

IcResult make_ic(const IcSpec& spec, const ScalingCoeffs& c, Window window)
{
    window.require_nonempty("make_ic");
    const Model model = c.model;

    switch (spec.kind) {
    case IcKind::step: {
        ParticleConfig cfg(window);
        for (std::int64_t x = window.lo; x <= window.hi; ++x)
            cfg.set(x, model == Model::asep ? (x <= spec.y) : (x > spec.y));
        IcResult res;
        res.height = step_ic_height(model, spec.y, Window{window.lo - 1, window.hi});
        res.config = std::move(cfg);
        return res;
    }
    case IcKind::bernoulli: {
        if (!(spec.rho > 0.0 && spec.rho < 1.0))
            throw std::invalid_argument("make_ic: rho must be in (0,1)");
        ParticleConfig cfg(window);
        const EnvironmentNoise noise(spec.seed);
        for (std::int64_t x = window.lo; x <= window.hi; ++x)
            cfg.set(x, noise.bernoulli(x, Channel::ic_bernoulli, idx_core, spec.rho));
        IcResult res;
        res.config = cfg;
        res.height = height_from_config(cfg, anchor_site(window), 0);
        return res;
    }
    case IcKind::same_side_paste:
    case IcKind::v_paste: {
        const std::int64_t m = static_cast<std::int64_t>(std::llround(spec.M * eps_m23_floor(spec.eps)));
        if (window.lo > -m || window.hi < m)
            throw WindowError("make_ic: window too small for the paste core");
        const double rho_plus = rho_eps_lambda(c, spec.lambda, spec.eps, spec.drift_factor);
        const double rho_minus = (spec.kind == IcKind::same_side_paste)
                                     ? rho_plus
                                     : rho_eps_lambda(c, -spec.lambda, spec.eps, spec.drift_factor);
        // S6V pastes xi_- right and xi_+ left; ASEP switches the sides.
        const double rho_right = (spec.kind == IcKind::same_side_paste)
                                     ? rho_plus
                                     : (model == Model::s6v ? rho_minus : rho_plus);
        const double rho_left = (spec.kind == IcKind::same_side_paste)
                                    ? rho_plus
                                    : (model == Model::s6v ? rho_plus : rho_minus);

        ParticleConfig cfg = base_config(spec, model, window);
        const EnvironmentNoise noise(spec.seed);
        for (std::int64_t x = window.lo; x <= window.hi; ++x) {
            if (x > m)
                cfg.set(x, noise.bernoulli(x, Channel::ic_bernoulli, idx_xi_minus, rho_right));
            else if (x < -m)
                cfg.set(x, noise.bernoulli(x, Channel::ic_bernoulli, idx_xi_plus, rho_left));
        }
        IcResult res;
        res.config = cfg;
        res.height = height_from_config(cfg, anchor_site(window), 0);
        return res;
    }
    case IcKind::uparrow: {
        if (!(spec.lambda_prime > 2.0 * spec.lambda))
            throw std::invalid_argument("make_ic(uparrow): requires lambda_prime > 2*lambda");
        const std::int64_t m = static_cast<std::int64_t>(std::llround(spec.M * eps_m23_floor(spec.eps)));
        if (window.lo > -m || window.hi < m)
            throw WindowError("make_ic: window too small for the uparrow core");

        const ParticleConfig base = base_config(spec, model, window);
        const HeightFunction base_h = height_from_config(base, anchor_site(window), 0);

        UparrowBand right, left;
        if (spec.R > 0.0) {
            // explicit band end: scan exactly until that site
            const std::int64_t r = static_cast<std::int64_t>(std::llround(spec.R * eps_m23_floor(spec.eps)));
            if (window.hi < r || window.lo > -r || r <= m)
                throw WindowError("make_ic: window too small for the requested R");
            right = build_band(model, c, spec.eps, base_h, m, +1, r, spec.lambda_prime, r);
            left = build_band(model, c, spec.eps, base_h, -m, -1, -r, spec.lambda_prime, -r);
        } else {
            right = build_band(model, c, spec.eps, base_h, m, +1, window.hi, spec.lambda_prime, 0);
            left = build_band(model, c, spec.eps, base_h, -m, -1, window.lo, spec.lambda_prime, 0);
        }

        // Assemble heights: base in the core, band profiles, Bernoulli tails.
        const Window hw{window.lo - 1, window.hi};
        std::vector<std::int64_t> h(static_cast<std::size_t>(hw.size()));
        for (std::int64_t x = -m; x <= m; ++x) h[hw.index(x)] = base_h.at(x);
        for (std::size_t i = 1; i < right.rel_height.size(); ++i)
            h[hw.index(m + static_cast<std::int64_t>(i))] = base_h.at(m) + right.rel_height[i];
        for (std::size_t i = 1; i < left.rel_height.size(); ++i)
            h[hw.index(-m - static_cast<std::int64_t>(i))] = base_h.at(-m) + left.rel_height[i];

        // Tails must keep rising outward at slope lambda' after rescaling.
        // Density rho_{eps,lambda} tilts frak_h by +lambda for ASEP and by
        // -lambda for S6V, so the models pick opposite signs per side.
        const double rho_right_tail = rho_eps_lambda(
            c, (model == Model::s6v) ? -spec.lambda_prime : spec.lambda_prime, spec.eps,
            spec.drift_factor);
        const double rho_left_tail = rho_eps_lambda(
            c, (model == Model::s6v) ? spec.lambda_prime : -spec.lambda_prime, spec.eps,
            spec.drift_factor);
        const EnvironmentNoise noise(spec.seed);
        for (std::int64_t x = right.end_site + 1; x <= window.hi; ++x) {
            const bool p = noise.bernoulli(x, Channel::ic_bernoulli, idx_xi_plus, rho_right_tail);
            h[hw.index(x)] = h[hw.index(x - 1)] - (p ? 1 : 0);
        }
        for (std::int64_t x = left.end_site; x > hw.lo; --x) {
            const bool p = noise.bernoulli(x, Channel::ic_bernoulli, idx_xi_minus, rho_left_tail);
            h[hw.index(x - 1)] = h[hw.index(x)] + (p ? 1 : 0);
        }

        IcResult res;
        res.height = HeightFunction(hw, std::move(h));
        res.config = config_from_height(res.height);
        {
            ParticleConfig full(window);
            full.occ = res.config.occ;
            res.config = std::move(full);
        }
        res.R_used = static_cast<double>(std::max(right.end_site, -left.end_site)) /
                     static_cast<double>(eps_m23_floor(spec.eps));
        res.delta_max = std::max(right.delta_max, left.delta_max);
        res.delta_min = std::min(right.delta_min, left.delta_min);
        return res;
    }
    }
    throw std::invalid_argument("make_ic: unknown kind");
}

ParticleConfig thin_couple(const ParticleConfig& eta, double removal_prob, std::uint64_t seed)
{
    if (removal_prob < 0.0 || removal_prob > 1.0)
        throw std::invalid_argument("thin_couple: removal_prob must be in [0,1]");
    ParticleConfig xi(eta.window);
    const EnvironmentNoise noise(seed);
    for (std::int64_t x = eta.window.lo; x <= eta.window.hi; ++x) {
        if (!eta.at(x)) continue;
        const bool removed = noise.bernoulli(x, Channel::thinning, 0, removal_prob);
        xi.set(x, removed ? 0 : 1);
    }
    return xi;
}

RefinedColoring refined_coloring(const ParticleConfig& eta, const ParticleConfig& xi, double M,
                                 double eps, std::uint64_t seed)
{
    if (eta.window != xi.window) throw std::invalid_argument("refined_coloring: window mismatch");
    for (std::int64_t x = eta.window.lo; x <= eta.window.hi; ++x)
        if (xi.at(x) > eta.at(x))
            throw std::invalid_argument("refined_coloring: xi must be dominated by eta");

    const std::int64_t m = static_cast<std::int64_t>(std::llround(M * eps_m23_floor(eps)));
    const std::int64_t band_lo = -m;
    const std::int64_t band_hi = -(m / 2);
    const double p_zeta = 1.0 - std::pow(eps, 1.0 / 3.0);
    const EnvironmentNoise noise(seed);

    RefinedColoring out{ColoredConfig(eta.window), ColoredConfig(eta.window), 0};
    // Discrepancies colored 2-k, k-th counted from the right.
    std::int64_t k = 0;
    for (std::int64_t x = eta.window.hi; x >= eta.window.lo; --x) {
        if (eta.at(x) && !xi.at(x)) {
            ++k;
            out.refined.set(x, static_cast<Color>(2 - k));
            out.aux3.set(x, 1);
        }
    }
    out.discrepancy_count = k;
    for (std::int64_t x = eta.window.lo; x <= eta.window.hi; ++x) {
        if (!xi.at(x)) continue;
        out.aux3.set(x, 2);
        if (x >= band_lo && x <= band_hi) {
            const bool z = noise.bernoulli(x, Channel::refine_zeta, 0, p_zeta);
            out.refined.set(x, z ? 3 : 2);
        } else {
            out.refined.set(x, 3);
        }
    }
    return out;
}

} // namespace kpzsim
