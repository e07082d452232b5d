// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "airs/config.hpp"
#include "airs/linalg.hpp"
#include "airs/rng.hpp"

namespace airs {

struct Geometry {
    Eigen::Vector2d bs_position;
    Eigen::Vector2d irs_position;
    std::vector<Eigen::Vector2d> user_positions; // K entries
};

// One channel realization. G is the BS->IRS matrix (M x N_T), h_d[k] the
// direct BS->user link (N_T), h_r[k] the IRS->user link (M).
struct ChannelSet {
    MatC g;
    std::vector<VecC> h_d;
    std::vector<VecC> h_r;

    std::uint64_t hash() const; // FNV-1a over raw entries, for paired-draw audits
};

// Number of times path_loss() clamped a sub-1m distance (diagnostic only).
extern std::atomic<std::uint64_t> pathloss_clamp_count;

// Free-space-referenced power-law gain: beta0 * d^-alpha with
// beta0 = (c / (4 pi f_c))^2 at the 1 m reference. Distances below 1 m are
// clamped to 1 m and counted in pathloss_clamp_count.
double path_loss(double d_m, double alpha, double f_c_hz);

// BS at the origin, IRS on the sector bisector at distance R, K users
// area-uniform in a 120-degree sector of radius R (radius drawn as R*sqrt(u)).
Geometry place_nodes(const SystemConfig& config, Rng& rng);

// Rician fading: channel = sqrt(beta(d)) * (sqrt(kappa/(1+kappa)) * LOS
// + sqrt(1/(1+kappa)) * NLOS), NLOS entries iid CN(0,1). LOS terms are
// half-wavelength ULA steering vectors at the geometric angles; G's LOS part
// is the steering outer product (rank one). alpha_d applies to h_d, alpha_r
// to G and h_r.
ChannelSet generate_channels(const SystemConfig& config, const Geometry& geom, Rng& rng);

} // namespace airs
