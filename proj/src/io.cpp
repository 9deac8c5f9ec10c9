#include "kpzsim/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kpzsim {

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

Config Config::parse_string(const std::string& text)
{
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
        if (!section.empty()) key = section + "." + key;
        cfg.kv_[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

std::string Config::get(const std::string& key) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("missing config key: " + key);
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const
{
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const
{
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": not a number: " + v);
    }
}

double Config::get_double_or(const std::string& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const
{
    const std::string v = get(key);
    std::int64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("config key " + key + ": not an integer: " + v);
    return out;
}

std::int64_t Config::get_int_or(const std::string& key, std::int64_t fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool_or(const std::string& key, bool fallback) const
{
    if (!has(key)) return fallback;
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key " + key + ": not a boolean: " + v);
}

RunSetup resolve_run_setup(const Config& cfg)
{
    RunSetup run;
    run.model = model_from_string(cfg.get("model"));
    const double q = cfg.get_double("q");
    const double alpha = cfg.get_double_or("alpha", 0.0);
    if (run.model == Model::asep) {
        run.coeffs = derive_coeffs_asep(q, alpha);
    } else {
        if (cfg.has("z"))
            run.coeffs = derive_coeffs_s6v(q, cfg.get_double("z"), alpha);
        else
            run.coeffs = derive_coeffs_s6v_from_b(q, cfg.get_double("b_right"), alpha);
    }
    run.eps = cfg.get_double("epsilon");
    if (!(run.eps > 0.0 && run.eps <= 1.0))
        throw std::invalid_argument("config: epsilon must lie in (0,1]");
    run.t_macro = cfg.get_double_or("t_macro", 1.0);
    if (run.t_macro < 0.0) throw std::invalid_argument("config: t_macro must be nonnegative");

    run.ic.kind = ic_kind_from_string(cfg.get_or("ic.kind", "step"));
    run.ic.y = cfg.get_int_or("ic.y", 0);
    run.ic.rho = cfg.get_double_or("ic.rho", 0.5);
    run.ic.lambda = cfg.get_double_or("ic.lambda", 0.0);
    run.ic.lambda_prime = cfg.get_double_or("ic.lambda_prime", 0.0);
    run.ic.M = cfg.get_double_or("ic.M", 0.0);
    run.ic.R = cfg.get_double_or("ic.R", -1.0);
    run.ic.drift_factor = static_cast<int>(cfg.get_int_or("ic.drift_factor", 1));
    run.ic.eps = run.eps;
    run.ic.core_kind = ic_kind_from_string(cfg.get_or("ic.core_kind", "step"));
    run.ic.core_y = cfg.get_int_or("ic.core_y", 0);
    run.ic.core_rho = cfg.get_double_or("ic.core_rho", 0.5);

    run.replicas = static_cast<int>(cfg.get_int_or("replicas", 4));
    if (run.replicas <= 0) throw std::invalid_argument("config: replicas must be positive");
    run.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 1));
    run.ic_seed_fixed = cfg.has("ic.seed");
    run.ic.seed = static_cast<std::uint64_t>(cfg.get_int_or("ic.seed", static_cast<std::int64_t>(run.seed)));
    run.jobs = static_cast<int>(cfg.get_int_or("jobs", 2));
    run.window_auto = cfg.get_bool_or("window.auto", !cfg.has("window.halfwidth"));
    run.window_halfwidth = cfg.get_int_or("window.halfwidth", 0);
    if (!run.window_auto && run.window_halfwidth <= 0)
        throw std::invalid_argument("config: window.halfwidth must be positive when window.auto is off");
    run.x_max = cfg.get_double_or("x_max", 1.0);
    if (run.x_max <= 0.0) throw std::invalid_argument("config: x_max must be positive");
    return run;
}

std::string fnv1a_digest_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string format_double(double v)
{
    char buf[64];
    // shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

std::string coeffs_to_json(const ScalingCoeffs& c)
{
    nlohmann::json j;
    j["model"] = model_name(c.model);
    j["q"] = c.q;
    if (c.model == Model::s6v) {
        j["b_right"] = c.b_right;
        j["z"] = c.z;
    } else {
        j["gamma"] = c.gamma;
    }
    j["alpha"] = c.alpha;
    j["mu"] = c.mu;
    j["mu_prime"] = c.mu_prime;
    j["sigma"] = c.sigma;
    j["beta"] = c.beta;
    return j.dump(2) + "\n";
}

std::string report_to_json(const TestReport& r)
{
    nlohmann::json j;
    j["name"] = r.name;
    j["trials"] = r.trials;
    j["failures"] = r.failures;
    j["bound"] = r.bound;
    j["pass"] = r.pass;
    j["seed"] = r.seed;
    if (!r.notes.empty()) j["notes"] = r.notes;
    nlohmann::json stats = nlohmann::json::object();
    for (const auto& [k, v] : r.stats) stats[k] = v;
    j["stats"] = stats;
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << content;
}

std::string manifest_json(const Config& cfg, std::uint64_t master_seed,
                          const std::vector<std::uint64_t>& replica_seeds, double wall_seconds,
                          const std::vector<ManifestOutput>& outputs)
{
    nlohmann::json j;
    nlohmann::json jc = nlohmann::json::object();
    for (const auto& [k, v] : cfg.entries()) jc[k] = v;
    j["config"] = jc;
    j["master_seed"] = master_seed;
    j["replica_seeds"] = replica_seeds;
    j["coeff_formula_version"] = "1";
    j["wall_time_s"] = wall_seconds;
    nlohmann::json jo = nlohmann::json::object();
    for (const auto& o : outputs) jo[o.filename] = o.digest;
    j["outputs"] = jo;
    return j.dump(2) + "\n";
}

} // namespace kpzsim
