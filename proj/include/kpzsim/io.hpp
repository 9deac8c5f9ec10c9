#pragma once

#include "kpzsim/ic.hpp"
#include "kpzsim/scaling.hpp"
#include "kpzsim/verify.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kpzsim {

// Line-oriented key=value configuration with optional [section] headers that
// prefix subsequent keys ("[ic]" + "kind = step" == "ic.kind = step").
// '#' starts a comment.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

// Resolved run parameters shared by the CLI commands.
struct RunSetup {
    Model model = Model::asep;
    ScalingCoeffs coeffs;
    double eps = 0.125;
    double t_macro = 1.0;
    IcSpec ic;
    int replicas = 4;
    std::uint64_t seed = 1;
    bool ic_seed_fixed = false; // explicit ic.seed: one quenched configuration for all replicas
    int jobs = 2;
    bool window_auto = true;
    std::int64_t window_halfwidth = 0;
    double x_max = 1.0;
};

RunSetup resolve_run_setup(const Config& cfg);

// FNV-1a 64-bit digest, hex-encoded; used for the output manifests.
std::string fnv1a_digest_file(const std::string& path);

std::string coeffs_to_json(const ScalingCoeffs& c);
std::string report_to_json(const TestReport& r);
void write_file(const std::string& path, const std::string& content);

// Deterministic decimal formatting: '.' decimal separator, shortest
// round-trip representation.
std::string format_double(double v);

struct ManifestOutput {
    std::string filename;
    std::string digest;
};

std::string manifest_json(const Config& cfg, std::uint64_t master_seed,
                          const std::vector<std::uint64_t>& replica_seeds, double wall_seconds,
                          const std::vector<ManifestOutput>& outputs);

} // namespace kpzsim
