// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace airs {

// Scenario constants. Defaults follow the simulation study this project
// reproduces: 4 BS antennas serving 3 users in a 120-degree sector of radius
// 100 m, a 10-element active IRS on the sector edge, Rician factor 3 dB.
struct SystemConfig {
    int n_t = 4;                  // BS antennas
    int k = 3;                    // users
    int m = 10;                   // IRS elements
    double f_c = 2.4e9;           // carrier frequency, Hz
    double sigma_n_sq = 3.9810717055349695e-15; // user noise power, W (-114 dBm)
    double sigma_d_sq = 1e-13;    // IRS dynamic-noise power, W (-100 dBm)
    double sigma_s_sq = 0.0;      // IRS static-noise power, W (unused in SINR)
    double alpha_d = 3.8;         // path-loss exponent, direct links
    double alpha_r = 2.3;         // path-loss exponent, reflected links
    double extra_loss_db = 0.0;   // deployment loss applied to every link, dB
    double radius = 100.0;        // sector radius, m
    double rician_factor = 1.9952623149688795; // linear kappa (3 dB)
    double gamma_req = 2.5118864315095797;     // per-user SINR target, linear (4 dB)
    double p_a = 0.01;            // IRS amplification power budget, W
    double epsilon = 1e-3;        // convergence tolerance of the outer loop
    int max_iter = 50;            // outer iteration cap
    std::uint64_t seed = 1;

    void validate() const; // throws std::invalid_argument on violated invariants
};

// Plain-text key=value store ('#' comments, blank lines ignored). Consumers
// mark the keys they read; unconsumed keys are reported as errors so typos
// in config files never pass silently.
class KeyValueFile {
  public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_string(const std::string& text);

    bool has(const std::string& key) const;
    double get_double(const std::string& key, double fallback);
    std::int64_t get_int(const std::string& key, std::int64_t fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    std::string get_string(const std::string& key, const std::string& fallback);

    // Keys present in the file but never consumed by any get_*().
    std::set<std::string> unconsumed() const;
    void require_all_consumed() const; // throws listing unknown keys

  private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> consumed_;
};

// Reads every SystemConfig field from its documented key:
//   n_t k m f_c sigma_n_sq sigma_d_sq sigma_s_sq alpha_d alpha_r
//   extra_loss_db radius rician_factor gamma_req p_a epsilon max_iter seed
// Missing keys keep their defaults; the result is validated.
SystemConfig system_config_from(KeyValueFile& kv);

} // namespace airs
