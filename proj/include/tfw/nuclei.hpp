#ifndef TFW_NUCLEI_HPP
#define TFW_NUCLEI_HPP

#include <array>
#include <vector>

#include "tfw/grid.hpp"

namespace tfw {

/** Smeared nuclei: unit-mass radial bumps eta(r) = c0 (1 - (r/R0)^2)^8
 *  centered at the sites, summed with periodic minimal-image distance.
 *  c0 is fixed so the whole-space integral of eta is exactly 1. */
struct NuclearConfig {
    std::vector<Point> sites;
    double bump_radius = 0.9;
    std::vector<double> weights;  // empty means all 1

    double weight(int k) const {
        return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(k)];
    }
    NuclearConfig displaced(int k, const Point& delta) const;
};

/** Normalization constant of the bump profile. */
double bump_normalization(double R0);
/** eta at squared radius r2 (0 outside the support). */
double bump_value(double r2, double R0);

/** m(x) = sum_j w_j eta(x - Y_j). Rejects sites outside [0,L)^3,
 *  R0 >= L/4, negative weights, and grids that cannot carry the bump. */
Field assemble_density(const NuclearConfig& cfg, const Grid& grid);

/** Density of site k alone (with its weight). */
Field site_density(const NuclearConfig& cfg, const Grid& grid, int k);

/** Closed-form gradient of site k's bump, sampled pointwise. This is the
 *  exact derivative of the assembled density with respect to -Y_k, so
 *  pairing it with the potential reproduces the energy derivative. */
std::array<Field, 3> site_gradient(const NuclearConfig& cfg, const Grid& grid, int k);

void validate_config(const NuclearConfig& cfg, const Grid& grid);

} // namespace tfw

#endif
