#pragma once

#include "kpzsim/asep.hpp"
#include "kpzsim/lattice.hpp"
#include "kpzsim/s6v.hpp"

#include <cstdint>
#include <vector>

namespace kpzsim {

enum class Model { asep, s6v };

const char* model_name(Model m);
Model model_from_string(const std::string& s);

// KPZ scaling coefficients. For ASEP the fan is alpha in (-1,1); for S6V it
// is alpha in (z, 1/z) with z = (1-b_right)/(1-q*b_right).
struct ScalingCoeffs {
    Model model = Model::asep;
    double q = 0.0;
    double b_right = 0.0; // S6V only
    double z = 0.0;       // S6V only
    double alpha = 0.0;
    double gamma = 1.0;   // ASEP only: 1 - q
    double mu = 0.0;
    double mu_prime = 0.0;
    double sigma = 0.0;
    double beta = 0.0;

    double abs_mu_prime() const { return mu_prime < 0 ? -mu_prime : mu_prime; }
};

// Closed-form pieces, usable on the closed fan for desk checks.
double mu_asep(double alpha);
double sigma_asep(double alpha);
double mu_s6v(double z, double alpha);
double sigma_s6v(double z, double alpha);
double z_from_b_right(double q, double b_right);
double b_right_from_z(double q, double z);

ScalingCoeffs derive_coeffs_asep(double q, double alpha);
ScalingCoeffs derive_coeffs_s6v(double q, double z, double alpha);
ScalingCoeffs derive_coeffs_s6v_from_b(double q, double b_right, double alpha);

// Step initial condition anchored per the model convention: particles on
// {w <= y} for ASEP, on {w > y} for S6V.
HeightFunction step_ic_height(Model model, std::int64_t y, Window w);

// floor(eps^(-2/3)) guarded against floating-point underthrow.
std::int64_t eps_m23_floor(double eps);

// Model time corresponding to macroscopic time t: 2 gamma^-1 eps^-1 t for
// ASEP (continuous), floor(eps^-1 t) columns for S6V.
double asep_model_time(const ScalingCoeffs& c, double eps, double t_macro);
std::int64_t s6v_model_columns(double eps, double t_macro);

// Characteristic drift in lattice sites after macroscopic time t.
double drift_sites(const ScalingCoeffs& c, double eps, double t_macro);

// Piecewise-linear function of a real variable on an increasing grid.
struct RescaledFunction {
    std::vector<double> xs;
    std::vector<double> vals;

    double x_min() const { return xs.front(); }
    double x_max() const { return xs.back(); }
    double operator()(double x) const;
};

// Rescaled height function at macroscopic time t_macro (t_macro = 0 gives the
// initial-condition transform). h must hold the height at the matching model
// time; abscissae are the x with integer site argument inside [x_min, x_max].
RescaledFunction rescale_height(Model model, const HeightFunction& h, const ScalingCoeffs& c,
                                double eps, double t_macro, double x_min, double x_max);

// Window padding policies for the lattice truncation (see README).
std::int64_t asep_buffer_sites(double q, double horizon);
std::int64_t s6v_bottom_pad(double b_right, std::int64_t columns);
Window asep_padded_window(Window core, double q, double horizon);
Window s6v_padded_window(Window core, double b_right, std::int64_t columns);

// Grid of coupled step-initial-condition heights and its rescaled form.
struct SheetEnsemble {
    Model model = Model::asep;
    double eps = 0.0;
    double s = 0.0;
    double t = 0.0;
    std::vector<std::int64_t> y_sites;
    std::vector<std::int64_t> x_sites_abs; // absolute lattice sites read at time t
    std::vector<double> y; // rescaled y coordinates
    std::vector<double> x; // rescaled x coordinates
    std::vector<std::vector<std::int64_t>> raw;    // [iy][ix]
    std::vector<std::vector<double>> rescaled;     // landscape values

    // Landscape value L(y[iy], s; x, t), linear interp along the x grid.
    double landscape(std::size_t iy, double x_at) const;
};

// Geometry of a sheet simulation, so callers can couple it with other states
// in one engine (shared environment = basic coupling).
struct SheetPlan {
    Model model = Model::asep;
    ScalingCoeffs coeffs;
    double eps = 0.0;
    double s = 0.0;
    double t = 0.0;
    std::vector<std::int64_t> y_sites;
    std::vector<std::int64_t> x_sites; // relative to characteristic drift
    std::int64_t drift = 0;            // drift sites between s and t
    std::int64_t need_lo = 0;          // sites the sheet must cover
    std::int64_t need_hi = 0;
    int colored_id = -1;
};

SheetPlan plan_sheet(Model model, const ScalingCoeffs& c, double eps, double s, double t,
                     double y_half, double x_half, std::int64_t site_step);

void attach_sheet(AsepEngine& engine, SheetPlan& plan);
void attach_sheet(S6vEngine& engine, SheetPlan& plan);
SheetEnsemble extract_sheet(const AsepEngine& engine, const SheetPlan& plan);
SheetEnsemble extract_sheet(const S6vEngine& engine, const SheetPlan& plan);

// One-shot: evolves all step initial conditions jointly under one noise
// environment and returns raw and rescaled sheets.
SheetEnsemble build_sheet(Model model, const ScalingCoeffs& c, double eps, double s, double t,
                          double y_half, double x_half, std::int64_t site_step, std::uint64_t seed);

// sup over grid z in [-I, I] of f(z) + L(z, 0; y, t). Nondecreasing in I.
double restricted_sup(const RescaledFunction& f, const SheetEnsemble& sheet, double I, double y);

// Metric on upper semi-continuous functions: sum over ell <= L_max of
// 2^-ell min(1, Hausdorff distance of hypographs on [-ell, ell] under
// max(|x1-x2|, |e^y1 - e^y2|)), hypographs discretized on the function grids.
double uc_distance(const RescaledFunction& f, const RescaledFunction& g, int L_max);

} // namespace kpzsim
