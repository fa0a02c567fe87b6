#ifndef TFW_INTERACTION_HPP
#define TFW_INTERACTION_HPP

#include <utility>

#include "tfw/grid.hpp"

namespace tfw {

/** Inverse screening length; a = 0 is the Coulomb limit. */
struct Screening {
    double a = 0.0;

    Screening() = default;
    explicit Screening(double a_);
    bool coulomb() const { return a == 0.0; }
};

/** Y_a(r) = e^{-a r} / r. */
double yukawa_real(Screening a, double r);

/** Fourier multiplier 4pi / (a^2 + k^2) of the Green operator mapping
 *  4pi rho to phi for -lap + a^2. Throws on the Coulomb zero mode. */
double kernel_multiplier(Screening a, double k_squared);

struct ZeroModeInfo {
    double rho_mean = 0.0;  // mean of the source
    bool projected = false; // true when the k=0 mode was dropped (a = 0)
};

/** Solve -lap phi + a^2 phi = 4pi rho on the torus. For a = 0 the zero
 *  mode of phi is set to 0 and the source mean is reported. */
std::pair<Field, ZeroModeInfo> green_apply(Screening a, const Field& rho);

/** D_a(f,g) = integral of (f * Y_a) g; on the torus h^3 sum phi_f g with
 *  phi_f from green_apply. For a = 0 both zero modes drop out. */
double d_pair(Screening a, const Field& f, const Field& g);

} // namespace tfw

#endif
