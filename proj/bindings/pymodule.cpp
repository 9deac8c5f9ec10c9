#include "kpzsim/asep.hpp"
#include "kpzsim/ic.hpp"
#include "kpzsim/runner.hpp"
#include "kpzsim/s6v.hpp"
#include "kpzsim/scaling.hpp"
#include "kpzsim/stats.hpp"
#include "kpzsim/verify.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace kpzsim;

namespace {

py::dict coeffs_dict(const ScalingCoeffs& c)
{
    py::dict d;
    d["model"] = model_name(c.model);
    d["q"] = c.q;
    d["alpha"] = c.alpha;
    d["mu"] = c.mu;
    d["mu_prime"] = c.mu_prime;
    d["sigma"] = c.sigma;
    d["beta"] = c.beta;
    if (c.model == Model::s6v) {
        d["b_right"] = c.b_right;
        d["z"] = c.z;
    } else {
        d["gamma"] = c.gamma;
    }
    return d;
}

ScalingCoeffs coeffs_from_args(const std::string& model, double q, double second, double alpha)
{
    return model == "asep" ? derive_coeffs_asep(q, alpha) : derive_coeffs_s6v(q, second, alpha);
}

// One replica to macroscopic time t; returns (x, raw, rescaled) arrays.
py::dict simulate_once(const std::string& model_s, double q, double second, double alpha,
                       double eps, double t_macro, const std::string& ic_kind, double rho,
                       std::int64_t step_y, std::uint64_t seed, double x_max)
{
    const Model model = model_from_string(model_s);
    const ScalingCoeffs c = coeffs_from_args(model_s, q, second, alpha);

    const double e23 = std::pow(eps, -2.0 / 3.0);
    const double drift = drift_sites(c, eps, t_macro);
    const std::int64_t span = static_cast<std::int64_t>(std::ceil(c.beta * x_max * e23)) + 2;
    const Window core{static_cast<std::int64_t>(std::floor(drift)) - span,
                      static_cast<std::int64_t>(std::ceil(drift)) + span};

    IcSpec spec;
    spec.kind = ic_kind_from_string(ic_kind);
    spec.rho = rho;
    spec.y = step_y;
    spec.eps = eps;
    spec.seed = derive_seed(seed, 0x1CULL);

    HeightFunction h;
    if (model == Model::asep) {
        const double T = asep_model_time(c, eps, t_macro);
        const Window w = asep_padded_window(core, c.q, T);
        const IcResult ic = make_ic(spec, c, w);
        AsepEngine engine(seed, c.q, w, std::max(T, 1e-9));
        const int id = engine.add_state(ic.config);
        engine.track_height(id, ic.height);
        if (T > 0) engine.run_until(T);
        h = engine.height(id);
    } else {
        const std::int64_t T = s6v_model_columns(eps, t_macro);
        const Window w = s6v_padded_window(core, c.b_right, T);
        const IcResult ic = make_ic(spec, c, w);
        S6vEngine engine(seed, c.q, c.b_right, w);
        const int id = engine.add_state(ic.config);
        engine.track_height(id, ic.height);
        engine.run_until_column(T);
        h = engine.height(id);
    }
    const RescaledFunction f = rescale_height(model, h, c, eps, t_macro, -x_max, x_max);

    py::dict out;
    out["x"] = f.xs;
    out["rescaled"] = f.vals;
    std::vector<std::int64_t> raw;
    for (double x : f.xs) {
        const auto site = static_cast<std::int64_t>(std::llround(drift + c.beta * x * e23));
        raw.push_back(h.at(site));
    }
    out["raw"] = raw;
    return out;
}

py::dict sheet_dict(const SheetEnsemble& s)
{
    py::dict d;
    d["y"] = s.y;
    d["x"] = s.x;
    d["raw"] = s.raw;
    d["rescaled"] = s.rescaled;
    return d;
}

py::dict report_dict(const TestReport& r)
{
    py::dict d;
    d["name"] = r.name;
    d["trials"] = r.trials;
    d["failures"] = r.failures;
    d["pass"] = r.pass;
    d["bound"] = r.bound;
    py::dict stats;
    for (const auto& [k, v] : r.stats) stats[py::str(k)] = v;
    d["stats"] = stats;
    return d;
}

} // namespace

PYBIND11_MODULE(_kpzsim, m)
{
    m.doc() = "ASEP / stochastic six-vertex simulation under KPZ rescaling";

    m.def(
        "coeffs",
        [](const std::string& model, double q, double second, double alpha) {
            return coeffs_dict(coeffs_from_args(model, q, second, alpha));
        },
        py::arg("model"), py::arg("q"), py::arg("z_or_unused") = 0.25, py::arg("alpha") = 0.0,
        "Scaling coefficients (mu, mu', sigma, beta) for a model");

    m.def("rho_eps_lambda",
          [](const std::string& model, double q, double second, double alpha, double lambda,
             double eps, int factor) {
              return rho_eps_lambda(coeffs_from_args(model, q, second, alpha), lambda, eps, factor);
          },
          py::arg("model"), py::arg("q"), py::arg("z_or_unused"), py::arg("alpha"),
          py::arg("lambda_"), py::arg("eps"), py::arg("drift_factor") = 1);

    m.def("vertex_update", &vertex_update, py::arg("i_in"), py::arg("a_in"), py::arg("x_up"),
          py::arg("x_right"));
    m.def("colored_vertex_update", &colored_vertex_update, py::arg("i_in"), py::arg("a_in"),
          py::arg("x_up"), py::arg("x_right"));

    m.def("simulate", &simulate_once, py::arg("model"), py::arg("q"), py::arg("z_or_unused"),
          py::arg("alpha"), py::arg("eps"), py::arg("t_macro"), py::arg("ic_kind") = "step",
          py::arg("rho") = 0.5, py::arg("step_y") = 0, py::arg("seed") = 1, py::arg("x_max") = 1.0,
          "One replica; returns the raw and rescaled height trace over [-x_max, x_max]");

    m.def(
        "sheet",
        [](const std::string& model, double q, double second, double alpha, double eps, double s,
           double t, double y_half, double x_half, std::int64_t site_step, std::uint64_t seed) {
            return sheet_dict(build_sheet(model_from_string(model),
                                          coeffs_from_args(model, q, second, alpha), eps, s, t,
                                          y_half, x_half, site_step, seed));
        },
        py::arg("model"), py::arg("q"), py::arg("z_or_unused"), py::arg("alpha"), py::arg("eps"),
        py::arg("s"), py::arg("t"), py::arg("y_half") = 1.0, py::arg("x_half") = 1.0,
        py::arg("site_step") = 4, py::arg("seed") = 1);

    m.def(
        "uc_distance",
        [](const std::vector<double>& fx, const std::vector<double>& fv,
           const std::vector<double>& gx, const std::vector<double>& gv, int L_max) {
            RescaledFunction f{fx, fv}, g{gx, gv};
            return uc_distance(f, g, L_max);
        },
        py::arg("fx"), py::arg("fv"), py::arg("gx"), py::arg("gv"), py::arg("L_max") = 8);

    m.def("ks_distance",
          [](const std::vector<double>& a, const std::vector<double>& b) { return ks_distance(a, b); });

    m.def("rw_above_line_dp", &rw_above_line_dp, py::arg("lambda_drift"), py::arg("rho_line"),
          py::arg("M"), py::arg("T"));

    m.def(
        "check",
        [](const std::string& name, std::uint64_t seed, int jobs) {
            if (name == "vertex_stochasticity") return report_dict(check_vertex_stochasticity(50, seed));
            if (name == "arrow_conservation") return report_dict(check_arrow_conservation(100000, seed));
            if (name == "monotonicity_asep")
                return report_dict(check_monotonicity_asep(0.5, 400, 10.0, 20, seed, jobs));
            if (name == "merge_commute_asep") return report_dict(check_merge_commute(Model::asep, 30, seed));
            if (name == "merge_commute_s6v") return report_dict(check_merge_commute(Model::s6v, 30, seed));
            if (name == "determinism_asep") return report_dict(check_determinism(Model::asep, seed));
            if (name == "determinism_s6v") return report_dict(check_determinism(Model::s6v, seed));
            throw std::invalid_argument("unknown check: " + name);
        },
        py::arg("name"), py::arg("seed") = 1, py::arg("jobs") = 2,
        "Run a named verification check at smoke-test scale");
}
