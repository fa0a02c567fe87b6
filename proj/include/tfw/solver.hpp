#ifndef TFW_SOLVER_HPP
#define TFW_SOLVER_HPP

#include <span>
#include <vector>

#include "tfw/energy.hpp"
#include "tfw/grid.hpp"
#include "tfw/interaction.hpp"

namespace tfw {

struct GroundState;

struct SolverOptions {
    double tol = 1e-10;     // relative Euler-Lagrange residual target
    int max_iter = 20000;
    double initial_step = 1.0;
    double backtrack_factor = 0.5;
    double step_growth = 1.1;
    const GroundState* warm_start = nullptr;
    bool dealias = false;
    // deterministic initial perturbation (uniqueness experiments)
    unsigned init_perturb_seed = 0;
    double init_perturb_amplitude = 0.0;
    // residual level at which the Newton-CG polish takes over
    double newton_threshold = 1e-5;
    int cg_max_iter = 400;
    bool record_log = true;
};

struct StepRecord {
    int iter;
    double energy;
    double r_u;
    double r_phi;
    char phase;  // 'e' energy descent, 'n' Newton polish
};

struct GroundState {
    Field u;     // >= 0 everywhere
    Field phi;   // full potential for a > 0; zero-mean part for a = 0
    double mu = 0.0;  // potential zero mode (Coulomb multiplier); 0 for a > 0
    Screening a{0.0};
    double energy = 0.0;
    double r_u = 0.0, r_phi = 0.0;  // final relative residuals
    int iterations = 0;
    bool converged = false;
    std::vector<StepRecord> log;
};

/** Preconditioned energy descent with modulus projection and a Newton-CG
 *  polish; a = 0 runs on the fixed-mass sphere h^3 sum v^2 = h^3 sum m
 *  with mu recovered from the converged state. */
GroundState solve_ground(const Field& m, Screening a, const SolverOptions& opts = {});

struct HomogeneousState {
    double u = 0.0, phi = 0.0, mu = 0.0;
};

/** Translation-invariant oracle: for a > 0 solves
 *  (5/3) t^{4/3} = (4pi/a^2)(mbar - t^2) by bisection; for a = 0 returns
 *  (sqrt(mbar), 0, (5/3) mbar^{2/3}). */
HomogeneousState solve_homogeneous(double mbar, Screening a);

/** Solve along a strictly decreasing a ladder (last entry may be 0),
 *  warm-starting each solve from the previous state. Throws on failure,
 *  naming the failing a. */
std::vector<GroundState> continuation_sweep(const Field& m, std::span<const double> a_list,
                                            SolverOptions opts = {});

// ---- linearized TFW operator, shared by the polish and the response ----

/** A x = -lap x + ((35/9) u^{4/3} - pot) x + 2 u G_a(u x), pot = phi + mu.
 *  Symmetric positive definite at a converged state with inf u > 0. */
Field apply_linearized(const Field& u, const Field& pot, Screening a, const Field& x);

struct CgResult {
    Field x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/** Preconditioned CG ((1+k^2)^{-1}) on apply_linearized. */
CgResult cg_linearized(const Field& u, const Field& pot, Screening a, const Field& b,
                       double rel_tol, int max_iter);

/** mu of a Coulomb iterate: mean of (-lap u + (5/3)u^{7/3} - phi u)/u over
 *  the points where u is positive. */
double recover_mu(const Field& u, const Field& phi);

/** True when the energy-phase accepted steps have strictly decreasing
 *  energies (backtracking guarantees this; Newton polish steps are not
 *  energy-accepted and are skipped). */
bool energy_log_monotone(const GroundState& gs);

} // namespace tfw

#endif
