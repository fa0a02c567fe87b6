#include "tfw/nuclei.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfw {

namespace {

constexpr int bump_power = 8;

// int_0^1 s^2 (1-s^2)^p ds, by the recursion I_p = I_{p-1} * 2p/(2p+3).
double radial_moment(int p) {
    double v = 1.0 / 3.0;
    for (int j = 1; j <= p; ++j) v *= (2.0 * j) / (2.0 * j + 3.0);
    return v;
}

} // namespace

double bump_normalization(double R0) {
    return 1.0 / (4.0 * std::numbers::pi * R0 * R0 * R0 * radial_moment(bump_power));
}

double bump_value(double r2, double R0) {
    const double t = 1.0 - r2 / (R0 * R0);
    if (t <= 0.0) return 0.0;
    double tp = t;
    for (int i = 1; i < bump_power; ++i) tp *= t;
    return bump_normalization(R0) * tp;
}

void validate_config(const NuclearConfig& cfg, const Grid& grid) {
    const double L = grid.box_length;
    if (!(cfg.bump_radius > 0.0))
        throw std::invalid_argument("NuclearConfig: bump radius must be positive");
    if (cfg.bump_radius >= L / 4)
        throw std::invalid_argument("NuclearConfig: bump radius " +
                                    std::to_string(cfg.bump_radius) +
                                    " >= L/4 = " + std::to_string(L / 4));
    if (!cfg.weights.empty() && cfg.weights.size() != cfg.sites.size())
        throw std::invalid_argument("NuclearConfig: weights/sites size mismatch");
    for (std::size_t j = 0; j < cfg.sites.size(); ++j) {
        for (int d = 0; d < 3; ++d) {
            const double c = cfg.sites[j][d];
            if (!(c >= 0.0) || c >= L)
                throw std::invalid_argument("NuclearConfig: site " + std::to_string(j) +
                                            " outside [0,L)^3");
        }
        if (!cfg.weights.empty() && !(cfg.weights[j] > 0.0))
            throw std::invalid_argument("NuclearConfig: weights must be positive");
    }
    if (cfg.bump_radius < 2.0 * grid.spacing())
        throw std::invalid_argument("NuclearConfig: grid too coarse for bump radius");
}

NuclearConfig NuclearConfig::displaced(int k, const Point& delta) const {
    NuclearConfig out = *this;
    auto& s = out.sites.at(static_cast<std::size_t>(k));
    for (int d = 0; d < 3; ++d) s[d] += delta[d];
    return out;
}

namespace {

template <class PerPoint>
void for_each_near_site(const Grid& g, const Point& y, double R0, PerPoint&& fn) {
    const int n = g.points_per_axis;
    const double R2 = R0 * R0;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const double dx = g.min_image(g.coord(static_cast<int>(i)), y[0]);
        if (std::abs(dx) >= R0) continue;
        for (int j = 0; j < n; ++j) {
            const double dy = g.min_image(g.coord(j), y[1]);
            const double dxy = dx * dx + dy * dy;
            if (dxy >= R2) continue;
            for (int l = 0; l < n; ++l) {
                const double dz = g.min_image(g.coord(l), y[2]);
                const double r2 = dxy + dz * dz;
                if (r2 < R2) fn(g.index(static_cast<int>(i), j, l), dx, dy, dz, r2);
            }
        }
    }
}

} // namespace

Field assemble_density(const NuclearConfig& cfg, const Grid& grid) {
    validate_config(cfg, grid);
    Field m(grid);
    const double R0 = cfg.bump_radius;
    const double c0 = bump_normalization(R0);
    for (std::size_t j = 0; j < cfg.sites.size(); ++j) {
        const double w = cfg.weight(static_cast<int>(j));
        for_each_near_site(grid, cfg.sites[j], R0,
                           [&](std::size_t idx, double, double, double, double r2) {
                               const double t = 1.0 - r2 / (R0 * R0);
                               double tp = t;
                               for (int q = 1; q < bump_power; ++q) tp *= t;
                               m.v[idx] += w * c0 * tp;
                           });
    }
    return m;
}

Field site_density(const NuclearConfig& cfg, const Grid& grid, int k) {
    NuclearConfig one;
    one.sites = {cfg.sites.at(static_cast<std::size_t>(k))};
    one.bump_radius = cfg.bump_radius;
    one.weights = {cfg.weight(k)};
    return assemble_density(one, grid);
}

std::array<Field, 3> site_gradient(const NuclearConfig& cfg, const Grid& grid, int k) {
    validate_config(cfg, grid);
    const Point y = cfg.sites.at(static_cast<std::size_t>(k));
    const double R0 = cfg.bump_radius;
    const double c0 = bump_normalization(R0);
    const double w = cfg.weight(k);
    std::array<Field, 3> out{Field(grid), Field(grid), Field(grid)};
    // d/dx eta = -2 p c0 / R0^2 (1 - r^2/R0^2)^{p-1} x
    const double pref = -2.0 * bump_power * w * c0 / (R0 * R0);
    for_each_near_site(grid, y, R0,
                       [&](std::size_t idx, double dx, double dy, double dz, double r2) {
                           const double t = 1.0 - r2 / (R0 * R0);
                           double tp = 1.0;
                           for (int q = 1; q < bump_power; ++q) tp *= t;
                           out[0].v[idx] = pref * tp * dx;
                           out[1].v[idx] = pref * tp * dy;
                           out[2].v[idx] = pref * tp * dz;
                       });
    return out;
}

} // namespace tfw
