#pragma once

#include "kpzsim/lattice.hpp"
#include "kpzsim/scaling.hpp"

#include <cstdint>
#include <string>

namespace kpzsim {

enum class IcKind { step, bernoulli, v_paste, same_side_paste, uparrow };

const char* ic_kind_name(IcKind k);
IcKind ic_kind_from_string(const std::string& s);

// Serializable description of an initial condition (config keys: kind, y,
// rho, lambda, lambda_prime, M, R, drift_factor, seed).
struct IcSpec {
    IcKind kind = IcKind::step;
    std::int64_t y = 0;        // step location
    double rho = 0.5;          // bernoulli density
    double lambda = 0.0;       // paste drift parameter
    double lambda_prime = 0.0; // uparrow outer drift (must exceed 2*lambda)
    double M = 0.0;            // core half-extent, macroscopic units
    double R = -1.0;           // uparrow band end; computed by scan when < 0
    int drift_factor = 1;      // 1 or 2: which rho_{eps,lambda} convention
    double eps = 1.0;
    std::uint64_t seed = 0;

    // Content of the core region for the paste constructions.
    IcKind core_kind = IcKind::step;
    std::int64_t core_y = 0;
    double core_rho = 0.5;
};

// rho = |mu'(alpha)| + drift_factor * lambda * sigma * beta^-1 * eps^(1/3).
double rho_eps_lambda(const ScalingCoeffs& c, double lambda, double eps, int drift_factor);

struct IcResult {
    ParticleConfig config;
    HeightFunction height;
    double R_used = 0.0;      // uparrow only: realized band end (macroscopic)
    double delta_max = 0.0;   // uparrow rounding audit, raw height units
    double delta_min = 0.0;
};

IcResult make_ic(const IcSpec& spec, const ScalingCoeffs& c, Window window);

// Independent removal of particles: xi <= eta sitewise by construction.
ParticleConfig thin_couple(const ParticleConfig& eta, double removal_prob, std::uint64_t seed);

struct RefinedColoring {
    ColoredConfig refined; // colors 3 / 2+zeta / 2-k / -inf
    ColoredConfig aux3;    // coarse variant: 2 = xi, 1 = discrepancies
    std::int64_t discrepancy_count = 0;
};

// The four-case coloring that singles out discrepancy particles one color at
// a time: xi-particles outside [-M eps^(-2/3), -M eps^(-2/3)/2] get color 3,
// those inside get 2 + zeta with zeta ~ Bern(1 - eps^(1/3)), and the k-th
// discrepancy (eta = 1, xi = 0) counted right-to-left gets color 2-k.
RefinedColoring refined_coloring(const ParticleConfig& eta, const ParticleConfig& xi, double M,
                                 double eps, std::uint64_t seed);

} // namespace kpzsim
