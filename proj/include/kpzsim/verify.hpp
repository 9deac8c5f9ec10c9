#pragma once

#include "kpzsim/ic.hpp"
#include "kpzsim/scaling.hpp"
#include "kpzsim/stats.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace kpzsim {

// Outcome of one executable check. Statistical checks state their bound and
// sample size; exact checks admit zero tolerance. Verdicts are reproducible
// from the seed.
struct TestReport {
    std::string name;
    std::int64_t trials = 0;
    std::int64_t failures = 0;
    std::vector<std::pair<std::string, double>> stats;
    std::string bound;
    bool pass = false;
    std::uint64_t seed = 0;
    std::string notes;

    void stat(const std::string& key, double v) { stats.emplace_back(key, v); }
    double stat_value(const std::string& key) const;
};

// ---- exact checks (a single violation fails) ----

// Outgoing vertex weights sum to 1 in exact rational arithmetic for random
// rational (q, b_right) pairs.
TestReport check_vertex_stochasticity(int pairs, std::uint64_t seed);

// Arrow conservation at every sampled vertex, uncolored and colored.
TestReport check_arrow_conservation(std::int64_t min_vertices, std::uint64_t seed);

// Exact ASEP height monotonicity under the basic coupling, checked at every
// event time. decouple = true runs the negative control (independent clocks,
// violations expected, report passes iff violations were detected).
TestReport check_monotonicity_asep(double q, std::int64_t window_size, double horizon, int trials,
                                   std::uint64_t seed, int jobs, bool decouple = false);

// Prelimiting variational inequality, exact for ASEP; for S6V with slack
// eps^(-1/6) and a replica failure-frequency ceiling.
TestReport check_variational(Model model, const ScalingCoeffs& c, IcKind ic_kind, double eps,
                             double t_macro, double I, int replicas, std::uint64_t seed, int jobs,
                             double ceiling = 0.05);

// Color-2 count equals the height-difference of the two thresholded systems,
// every recorded time, every replica.
TestReport check_flux_identity(Model model, const ScalingCoeffs& c, double eps, double M, double K,
                               double lambda, int replicas, std::uint64_t seed, int jobs);

// evolve(merge(c)) == merge(evolve(c)) on random small instances.
TestReport check_merge_commute(Model model, int instances, std::uint64_t seed);

// Colored evolution projected at a cut equals uncolored evolution of the
// thresholded configuration, random small instances.
TestReport check_colored_projection(Model model, int instances, std::uint64_t seed);

// Core trajectory unchanged when the buffer is widened (sentinel for the
// window truncation policy).
TestReport check_window_sentinel(Model model, std::uint64_t seed);

// Identical (seed, inputs) give identical trajectories; sparse and dense
// engines agree event for event.
TestReport check_determinism(Model model, std::uint64_t seed);

// ---- statistical checks ----

// S6V approximate height monotonicity: discrepancy <= M in at least
// (1 - ceiling) of trials at t = floor((1-b)N/2).
TestReport check_monotonicity_s6v(double q, double b_right, int N, int M, int trials,
                                  std::uint64_t seed, int jobs, double ceiling = 0.05);

// Local-pattern chi-square against the Bernoulli(rho) product law at model
// time t, disjoint blocks over at least min_sites core sites.
TestReport check_stationarity(Model model, double q, double b_right, double rho, double t_model,
                              int pattern_len, std::int64_t min_sites, std::uint64_t seed, int jobs,
                              double significance = 0.01);

// Geometric overtaking bound: empirical P(L_t >= k) <= q^k + 3 stderr.
TestReport check_overtaking(Model model, double q, double b_right, int k_max, double t, int trials,
                            std::uint64_t seed, int jobs);

// Displacement of the rightmost tracked-color particle stays below eps^-2 in
// time floor(1/eps); zero failures expected at desk scale.
TestReport check_finite_speed(Model model, double q, double b_right, double eps, int trials,
                              std::uint64_t seed, int jobs);

// Exact DP for P(S(t) >= rho t - M for all t <= T) vs Monte Carlo, plus the
// monotone-in-M shape of the bound.
TestReport check_rw_above_line(double lambda_drift, double rho_line, double M, int T,
                               std::int64_t mc_walks, std::uint64_t seed);
double rw_above_line_dp(double lambda_drift, double rho_line, double M, int T);

// Saturation of the restricted variational sup by radius M, reported as a
// curve over M_grid; pass if nondecreasing and >= 1-rho_ceiling at the top.
TestReport check_argmax_localization(Model model, const ScalingCoeffs& c, double eps, double t,
                                     double J, const std::vector<double>& M_grid, double R,
                                     double delta, double rho_ceiling, int replicas,
                                     std::uint64_t seed, int jobs);

// Clock-stream statistics: Poisson counts, exponential inter-arrivals (KS),
// purity under regeneration.
TestReport check_clock_stream(double q, std::int64_t sites, double horizon, std::uint64_t seed);

// Vertex noise marginals and independence of the two channels.
TestReport check_noise_marginals(double q, double b_right, std::int64_t n, std::uint64_t seed);

// Thinning law: Bern(p) thinned by r is Bern(p(1-r)), pair-pattern chi-square.
TestReport check_thinning(double p, double removal, std::int64_t sites, std::uint64_t seed);

// Uparrow domination: exact on the core, audited on the bands, and the
// global random-walk tails compared against the e^{-c(lambda-rho)M} shape.
TestReport check_uparrow_domination(Model model, const ScalingCoeffs& c, double eps, double M,
                                    double lambda, double lambda_prime, int replicas,
                                    std::uint64_t seed, int jobs);

// ---- suites ----

struct SuiteOptions {
    std::uint64_t seed = 1;
    int jobs = 2;
    double scale = 1.0; // multiplies trial counts (suite options in the config)
    bool negative_control = false;
};

std::vector<TestReport> run_exact_suite(const SuiteOptions& opt);
std::vector<TestReport> run_statistical_suite(const SuiteOptions& opt);

} // namespace kpzsim
