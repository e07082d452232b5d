// SPDX-License-Identifier: Apache-2.0
#include "airs/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace airs {

void SystemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
    if (n_t < 1 || k < 1 || m < 1) fail("counts must be >= 1");
    if (f_c <= 0) fail("f_c must be > 0");
    if (sigma_n_sq <= 0 || sigma_d_sq <= 0) fail("noise powers must be > 0");
    if (sigma_s_sq < 0) fail("sigma_s_sq must be >= 0");
    if (alpha_d <= 0 || alpha_r <= 0) fail("path-loss exponents must be > 0");
    if (radius <= 0) fail("radius must be > 0");
    if (rician_factor <= 0) fail("rician_factor must be > 0");
    if (gamma_req <= 0) fail("gamma_req must be > 0");
    if (p_a <= 0) fail("p_a must be > 0");
    if (!(epsilon > 0 && epsilon < 1)) fail("epsilon must be in (0,1)");
    if (max_iter < 1) fail("max_iter must be >= 1");
}

static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

KeyValueFile KeyValueFile::parse_string(const std::string& text) {
    KeyValueFile out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        if (out.kv_.count(key))
            throw std::runtime_error("config: duplicate key '" + key + "'");
        out.kv_[key] = val;
    }
    return out;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str());
}

bool KeyValueFile::has(const std::string& key) const { return kv_.count(key) != 0; }

double KeyValueFile::get_double(const std::string& key, double fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    consumed_.insert(key);
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config: key '" + key + "' is not a number: " + it->second);
    return v;
}

std::int64_t KeyValueFile::get_int(const std::string& key, std::int64_t fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    consumed_.insert(key);
    size_t pos = 0;
    const std::int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + it->second);
    return v;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    consumed_.insert(key);
    size_t pos = 0;
    const std::uint64_t v = std::stoull(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + it->second);
    return v;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    consumed_.insert(key);
    return it->second;
}

std::set<std::string> KeyValueFile::unconsumed() const {
    std::set<std::string> out;
    for (const auto& [k, v] : kv_)
        if (!consumed_.count(k)) out.insert(k);
    return out;
}

void KeyValueFile::require_all_consumed() const {
    const auto bad = unconsumed();
    if (bad.empty()) return;
    std::string msg = "config: unknown key(s):";
    for (const auto& k : bad) msg += " " + k;
    throw std::runtime_error(msg);
}

SystemConfig system_config_from(KeyValueFile& kv) {
    SystemConfig c;
    c.n_t = static_cast<int>(kv.get_int("n_t", c.n_t));
    c.k = static_cast<int>(kv.get_int("k", c.k));
    c.m = static_cast<int>(kv.get_int("m", c.m));
    c.f_c = kv.get_double("f_c", c.f_c);
    c.sigma_n_sq = kv.get_double("sigma_n_sq", c.sigma_n_sq);
    c.sigma_d_sq = kv.get_double("sigma_d_sq", c.sigma_d_sq);
    c.sigma_s_sq = kv.get_double("sigma_s_sq", c.sigma_s_sq);
    c.alpha_d = kv.get_double("alpha_d", c.alpha_d);
    c.alpha_r = kv.get_double("alpha_r", c.alpha_r);
    c.extra_loss_db = kv.get_double("extra_loss_db", c.extra_loss_db);
    c.radius = kv.get_double("radius", c.radius);
    c.rician_factor = kv.get_double("rician_factor", c.rician_factor);
    c.gamma_req = kv.get_double("gamma_req", c.gamma_req);
    c.p_a = kv.get_double("p_a", c.p_a);
    c.epsilon = kv.get_double("epsilon", c.epsilon);
    c.max_iter = static_cast<int>(kv.get_int("max_iter", c.max_iter));
    c.seed = kv.get_u64("seed", c.seed);
    c.validate();
    return c;
}

} // namespace airs
