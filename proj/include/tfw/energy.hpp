#ifndef TFW_ENERGY_HPP
#define TFW_ENERGY_HPP

#include <span>

#include "tfw/grid.hpp"
#include "tfw/interaction.hpp"

namespace tfw {

/** E(v) = int |grad v|^2 + int |v|^{10/3} + 1/2 D_a(m - v^2, m - v^2),
 *  with C_W = C_TF = 1. Gradient term via spectral derivatives. The
 *  dealias flag applies a 2/3-rule filter to v before the fractional
 *  power (heuristic; off by default). */
double tfw_energy(const Field& v, const Field& m, Screening a, bool dealias = false);

/** 2/3-rule low-pass copy of f. */
Field dealias_23(const Field& f);

struct ElResidual {
    double r_u = 0.0;      // sup norm of -lap u + (5/3)u^{7/3} - (phi+mu)u
    double r_phi = 0.0;    // sup norm of -lap phi + a^2 phi - 4pi(m - u^2)
    double r_u_rel = 0.0;  // relative to the equation's own field scales
    double r_phi_rel = 0.0;
};

/** Euler-Lagrange residuals. For a = 0 the phi equation uses the
 *  zero-mean right-hand side. */
ElResidual el_residual(const Field& u, const Field& phi, double mu, Screening a,
                       const Field& m);

/** Pointwise energy density. which = 1 uses the interaction form
 *  1/2 (phi+mu)(m-u^2); which = 2 the field form
 *  (1/8pi)(|grad phi|^2 + a^2 (phi+mu)^2). */
Field energy_density(const Field& u, const Field& phi, double mu, Screening a,
                     const Field& m, int which);

struct SolovejCheck {
    double c_s = 0.0;       // (6561/2000) pi^2, from C(lambda) at lambda = 10/9
    Field margin;           // (phi+mu) + c_s + a^2 - (10/9) u^{4/3}
    double min_margin = 0.0;
};

/** Pointwise bound (10/9) u^{4/3} <= phi + mu + C_S + a^2. */
SolovejCheck solovej_check(const Field& u, const Field& phi, double mu, Screening a);

/** C(lambda) = (9/4) pi^2 lambda^{-2} (5/3 - lambda)^{-1}. */
double solovej_constant(double lambda);
double solovej_constant();  // at the minimizing lambda = 10/9

struct ClassParams {
    double M = 0.0;       // sup_x || m ||_{L^2(B_1(x))}, discrete proxy
    double omega0 = 0.0;  // least-squares floor: min_x int_{B_R} m >= omega0 R^3 - omega1
    double omega1 = 0.0;
};

ClassParams estimate_class_params(const Field& m, std::span<const double> R_list);

} // namespace tfw

#endif
