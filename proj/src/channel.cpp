// SPDX-License-Identifier: Apache-2.0
#include "airs/channel.hpp"

#include <cstring>

namespace airs {

std::atomic<std::uint64_t> pathloss_clamp_count{0};

namespace {
constexpr double kSpeedOfLight = 299792458.0;

void hash_bytes(std::uint64_t& h, const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

void hash_cplx(std::uint64_t& h, const cplx& z) {
    double re = z.real(), im = z.imag();
    hash_bytes(h, &re, sizeof re);
    hash_bytes(h, &im, sizeof im);
}

// Half-wavelength ULA steering vector, angle measured from broadside.
VecC steering(int n, double angle) {
    VecC a(n);
    const double s = std::sin(angle);
    for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, M_PI * i * s);
    return a;
}

double wrap_pi(double a) {
    while (a > M_PI) a -= 2 * M_PI;
    while (a < -M_PI) a += 2 * M_PI;
    return a;
}
} // namespace

std::uint64_t ChannelSet::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        for (Eigen::Index i = 0; i < g.rows(); ++i) hash_cplx(h, g(i, j));
    for (const auto& v : h_d)
        for (Eigen::Index i = 0; i < v.size(); ++i) hash_cplx(h, v(i));
    for (const auto& v : h_r)
        for (Eigen::Index i = 0; i < v.size(); ++i) hash_cplx(h, v(i));
    return h;
}

double path_loss(double d_m, double alpha, double f_c_hz) {
    if (d_m < 1.0) {
        pathloss_clamp_count.fetch_add(1, std::memory_order_relaxed);
        d_m = 1.0;
    }
    const double lambda = kSpeedOfLight / f_c_hz;
    const double beta0 = (lambda / (4.0 * M_PI)) * (lambda / (4.0 * M_PI));
    return beta0 * std::pow(d_m, -alpha);
}

Geometry place_nodes(const SystemConfig& config, Rng& rng) {
    Geometry g;
    g.bs_position = {0.0, 0.0};
    g.irs_position = {config.radius, 0.0}; // sector bisector, edge of the sector
    g.user_positions.resize(config.k);
    for (int k = 0; k < config.k; ++k) {
        const double theta = (rng.next_uniform() - 0.5) * (2.0 * M_PI / 3.0); // 120 deg sector
        const double r = config.radius * std::sqrt(rng.next_uniform());
        g.user_positions[k] = {r * std::cos(theta), r * std::sin(theta)};
    }
    return g;
}

ChannelSet generate_channels(const SystemConfig& config, const Geometry& geom, Rng& rng) {
    const int nt = config.n_t, m = config.m, ku = config.k;
    const double kappa = config.rician_factor;
    const double w_los = std::sqrt(kappa / (1.0 + kappa));
    const double w_nlos = std::sqrt(1.0 / (1.0 + kappa));

    ChannelSet ch;
    ch.g.resize(m, nt);
    ch.h_d.resize(ku);
    ch.h_r.resize(ku);

    // deployment loss on every link, as an amplitude factor
    const double extra_amp = std::pow(10.0, -config.extra_loss_db / 20.0);

    // BS array broadside points along the bisector (+x); the IRS array
    // broadside points back at the BS (-x). Angles are relative to broadside.
    auto bs_angle = [&](const Eigen::Vector2d& p) {
        const Eigen::Vector2d d = p - geom.bs_position;
        return std::atan2(d.y(), d.x());
    };
    auto irs_angle = [&](const Eigen::Vector2d& p) {
        const Eigen::Vector2d d = p - geom.irs_position;
        return wrap_pi(std::atan2(d.y(), d.x()) - M_PI);
    };

    // G: BS -> IRS, rank-one LOS (steering outer product), exponent alpha_r.
    {
        const double dist = (geom.irs_position - geom.bs_position).norm();
        const double amp = extra_amp * std::sqrt(path_loss(dist, config.alpha_r, config.f_c));
        const VecC a_irs = steering(m, irs_angle(geom.bs_position));
        const VecC a_bs = steering(nt, bs_angle(geom.irs_position));
        const MatC los = a_irs * a_bs.adjoint();
        for (int j = 0; j < nt; ++j)
            for (int i = 0; i < m; ++i)
                ch.g(i, j) = amp * (w_los * los(i, j) + w_nlos * rng.next_cgauss());
    }

    // Direct links, exponent alpha_d.
    for (int k = 0; k < ku; ++k) {
        const double dist = (geom.user_positions[k] - geom.bs_position).norm();
        const double amp = extra_amp * std::sqrt(path_loss(dist, config.alpha_d, config.f_c));
        const VecC los = steering(nt, bs_angle(geom.user_positions[k]));
        ch.h_d[k].resize(nt);
        for (int i = 0; i < nt; ++i)
            ch.h_d[k](i) = amp * (w_los * los(i) + w_nlos * rng.next_cgauss());
    }

    // Reflected links IRS -> user, exponent alpha_r.
    for (int k = 0; k < ku; ++k) {
        const double dist = (geom.user_positions[k] - geom.irs_position).norm();
        const double amp = extra_amp * std::sqrt(path_loss(dist, config.alpha_r, config.f_c));
        const VecC los = steering(m, irs_angle(geom.user_positions[k]));
        ch.h_r[k].resize(m);
        for (int i = 0; i < m; ++i)
            ch.h_r[k](i) = amp * (w_los * los(i) + w_nlos * rng.next_cgauss());
    }

    return ch;
}

} // namespace airs
