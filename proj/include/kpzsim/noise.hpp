#pragma once

#include <cmath>
#include <cstdint>

namespace kpzsim {

// Counter-based random bits: Philox2x64-10. The whole simulation reads its
// randomness through this function, keyed by (seed, coordinate, channel), so
// that every random primitive is a pure function of its address. Basic
// couplings (shared clocks, shared vertex fields) are then exact by
// construction: two systems asking for the same primitive get the same bits.
struct CounterRng {
    static constexpr std::uint64_t mult = 0xD2B74407B1CE6E93ULL;
    static constexpr std::uint64_t weyl = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t bits(std::uint64_t key, std::uint64_t c0, std::uint64_t c1)
    {
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod = static_cast<unsigned __int128>(mult) * c0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            c0 = hi ^ key ^ c1;
            c1 = lo;
            key += weyl;
        }
        return c0;
    }

    // Uniform on (0,1); never returns 0 or 1, so -log(u) is finite.
    static double uniform01(std::uint64_t key, std::uint64_t c0, std::uint64_t c1)
    {
        return (static_cast<double>(bits(key, c0, c1) >> 11) + 0.5) * 0x1p-53;
    }
};

// Channel tags keep distinct random primitives at the same coordinate from
// colliding. Values are stable; they are part of the reproducibility contract.
enum class Channel : std::uint64_t {
    clock_left = 1,
    clock_right = 2,
    vertex_up = 3,
    vertex_right = 4,
    ic_bernoulli = 5,
    thinning = 6,
    refine_zeta = 7,
    rw_increment = 8,
};

inline std::uint64_t channel_word(Channel ch, std::uint64_t index)
{
    // 8 bits of channel, 56 bits of per-site stream index.
    return (static_cast<std::uint64_t>(ch) << 56) | (index & 0x00FFFFFFFFFFFFFFULL);
}

// Deterministic per-replica seed derivation (master seed XOR replica index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return master ^ index;
}

// Environment noise: the (seed, coordinate, channel) -> primitive map shared
// by every process in a run.
class EnvironmentNoise {
public:
    explicit EnvironmentNoise(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    double uniform(std::int64_t site, Channel ch, std::uint64_t index) const
    {
        return CounterRng::uniform01(seed_, static_cast<std::uint64_t>(site), channel_word(ch, index));
    }

    bool bernoulli(std::int64_t site, Channel ch, std::uint64_t index, double p) const
    {
        return uniform(site, ch, index) < p;
    }

    // Exponential inter-arrival with the given rate; index enumerates the
    // arrivals of the per-site stream.
    double exponential(std::int64_t site, Channel ch, std::uint64_t index, double rate) const
    {
        return -std::log(uniform(site, ch, index)) / rate;
    }

private:
    std::uint64_t seed_;
};

} // namespace kpzsim
