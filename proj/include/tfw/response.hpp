#ifndef TFW_RESPONSE_HPP
#define TFW_RESPONSE_HPP

#include <array>
#include <string>

#include "tfw/nuclei.hpp"
#include "tfw/solver.hpp"

namespace tfw {

/** Solution of the linearized TFW equations for one nuclear displacement:
 *  -lap u' + ((35/9) u^{4/3} - phi) u' - u phi' = 0,
 *  -lap phi' + a^2 phi' = 4pi (m' - 2 u u').
 *  For a = 0 the system carries the neutrality-tangent constraint
 *  h^3 sum 2 u u' = h^3 sum m' and a zero-mode rate mu'. */
struct LinearResponse {
    Field u_dot;
    Field phi_dot;   // zero-mean part for a = 0
    Field m_dot;
    double mu_dot = 0.0;
    int site = 0;
    Point direction{1.0, 0.0, 0.0};
    int cg_iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

struct Force {
    int site = 0;
    std::array<double, 3> f{0.0, 0.0, 0.0};
    std::string method;  // HF, FD, E1-route, E2-route
    double a = 0.0;
};

/** m' = -grad eta(x - Y_k) . V by the spectral gradient of the site bump;
 *  h^3 sum m' vanishes exactly. V must be a unit vector. */
Field displacement_density(const NuclearConfig& cfg, const Grid& grid, int k,
                           const Point& V);

LinearResponse solve_linearized(const GroundState& gs, const Field& m_dot,
                                const SolverOptions& opts = {});

/** Hellmann-Feynman force, F_i = -h^3 sum (phi + mu) d_i eta(x - Y_k),
 *  with the closed-form bump gradient (equals the derivative of the
 *  discrete total energy; no linear solve needed). */
Force force_hf(const GroundState& gs, const NuclearConfig& cfg, int k);

/** Central difference of the re-solved total energy at Y_k +- step e_i.
 *  opts.warm_start (if set) seeds the displaced solves. */
Force force_fd(const NuclearConfig& cfg, const Grid& grid, Screening a, int k,
               double step, const SolverOptions& opts = {});

double default_fd_step(const Grid& grid);

struct RouteForces {
    double e1 = 0.0;  // mixed interaction form
    double e2 = 0.0;  // field-energy form
};

/** Directional energy derivatives along the response's direction from the
 *  two energy-density routes; both equal force_hf . V at convergence. */
RouteForces force_density_routes(const GroundState& gs, const Field& m,
                                 const LinearResponse& response);

} // namespace tfw

#endif
