#include "tfw/response.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfw/field_ops.hpp"
#include "tfw/kernels.hpp"

namespace tfw {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

Field displacement_density(const NuclearConfig& cfg, const Grid& grid, int k,
                           const Point& V) {
    if (k < 0 || static_cast<std::size_t>(k) >= cfg.sites.size())
        throw std::invalid_argument("displacement_density: bad site index");
    const double norm = std::sqrt(V[0] * V[0] + V[1] * V[1] + V[2] * V[2]);
    if (std::abs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("displacement_density: V must be a unit vector");
    const Field eta = site_density(cfg, grid, k);
    const auto g = gradient(eta);
    Field out(grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(out.size()); ++i)
        out.v[i] = -(V[0] * g[0].v[i] + V[1] * g[1].v[i] + V[2] * g[2].v[i]);
    return out;
}

LinearResponse solve_linearized(const GroundState& gs, const Field& m_dot,
                                const SolverOptions& opts) {
    require_same_grid(gs.u, m_dot, "solve_linearized");
    if (kernels::max_abs(gs.u.v) <= 0.0)
        throw std::invalid_argument("solve_linearized: u vanishes (inf u > 0 required)");

    LinearResponse lr;
    lr.m_dot = m_dot;
    const Field& u = gs.u;
    Field pot(u.grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(u.size()); ++i)
        pot.v[i] = gs.phi.v[i] + gs.mu;

    const double cg_tol = std::max(opts.tol, 1e-13);
    const int cg_iters = std::max(opts.cg_max_iter, 800);

    // b = u G(m');  A u' = b with A = -lap + (35/9)u^{4/3} - pot + 2 u G(u .)
    const Field g_mdot = green_apply(gs.a, m_dot).first;
    Field b(u.grid);
    kernels::mul(u.v, g_mdot.v, b.v);

    if (!gs.a.coulomb()) {
        CgResult cg = cg_linearized(u, pot, gs.a, b, cg_tol, cg_iters);
        lr.u_dot = std::move(cg.x);
        lr.cg_iterations = cg.iterations;
        lr.rel_residual = cg.rel_residual;
        lr.converged = cg.converged;
    } else {
        // constrained tangent space: A u' - mu' u = b, h^3 sum u u' = 0
        CgResult cg_b = cg_linearized(u, pot, gs.a, b, cg_tol, cg_iters);
        CgResult cg_u = cg_linearized(u, pot, gs.a, u, cg_tol, cg_iters);
        const double num = kernels::dot(u.v, cg_b.x.v);
        const double den = kernels::dot(u.v, cg_u.x.v);
        lr.mu_dot = den != 0.0 ? -num / den : 0.0;
        lr.u_dot = Field(u.grid);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(u.size()); ++i)
            lr.u_dot.v[i] = cg_b.x.v[i] + lr.mu_dot * cg_u.x.v[i];
        lr.cg_iterations = cg_b.iterations + cg_u.iterations;
        lr.rel_residual = std::max(cg_b.rel_residual, cg_u.rel_residual);
        lr.converged = cg_b.converged && cg_u.converged;
    }

    Field rho_dot(u.grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(u.size()); ++i)
        rho_dot.v[i] = m_dot.v[i] - 2.0 * u.v[i] * lr.u_dot.v[i];
    lr.phi_dot = green_apply(gs.a, rho_dot).first;
    return lr;
}

Force force_hf(const GroundState& gs, const NuclearConfig& cfg, int k) {
    if (k < 0 || static_cast<std::size_t>(k) >= cfg.sites.size())
        throw std::invalid_argument("force_hf: bad site index");
    const auto grad_eta = site_gradient(cfg, gs.u.grid, k);
    const double h3 = std::pow(gs.u.grid.spacing(), 3);
    Force F;
    F.site = k;
    F.method = "HF";
    F.a = gs.a.a;
    Field pot(gs.u.grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(pot.size()); ++i)
        pot.v[i] = gs.phi.v[i] + gs.mu;
    for (int d = 0; d < 3; ++d) F.f[d] = -h3 * kernels::dot(pot.v, grad_eta[d].v);
    return F;
}

double default_fd_step(const Grid& grid) { return 1e-3 * grid.spacing(); }

Force force_fd(const NuclearConfig& cfg, const Grid& grid, Screening a, int k,
               double step, const SolverOptions& opts) {
    if (!(step > 0.0)) throw std::invalid_argument("force_fd: step must be positive");
    Force F;
    F.site = k;
    F.method = "FD";
    F.a = a.a;
    for (int d = 0; d < 3; ++d) {
        double e[2];
        for (int s = 0; s < 2; ++s) {
            Point delta{0.0, 0.0, 0.0};
            delta[d] = (s == 0 ? step : -step);
            const Field m = assemble_density(cfg.displaced(k, delta), grid);
            const GroundState gs = solve_ground(m, a, opts);
            if (!gs.converged)
                throw std::runtime_error("force_fd: displaced solve did not converge");
            e[s] = gs.energy;
        }
        F.f[d] = (e[0] - e[1]) / (2.0 * step);
    }
    return F;
}

RouteForces force_density_routes(const GroundState& gs, const Field& m,
                                 const LinearResponse& response) {
    const Field& u = gs.u;
    require_same_grid(u, m, "force_density_routes");
    require_same_grid(u, response.u_dot, "force_density_routes");
    const double h3 = std::pow(u.grid.spacing(), 3);
    const double a2 = gs.a.a * gs.a.a;

    const auto gu = gradient(u);
    const auto gud = gradient(response.u_dot);
    const auto gp = gradient(gs.phi);
    const auto gpd = gradient(response.phi_dot);

    double kin = 0.0, elec2 = 0.0, elec1 = 0.0;
    const std::size_t n = u.size();
    std::vector<double> part_kin(n), part_e2(n), part_e1(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        part_kin[i] = 2.0 * (gu[0].v[i] * gud[0].v[i] + gu[1].v[i] * gud[1].v[i] +
                             gu[2].v[i] * gud[2].v[i]) +
                      (10.0 / 3.0) * std::pow(std::abs(u.v[i]), 7.0 / 3.0) *
                          response.u_dot.v[i];
        const double pot = gs.phi.v[i] + gs.mu;
        const double potd = response.phi_dot.v[i] + response.mu_dot;
        part_e2[i] = (gp[0].v[i] * gpd[0].v[i] + gp[1].v[i] * gpd[1].v[i] +
                      gp[2].v[i] * gpd[2].v[i] + a2 * pot * potd) /
                     four_pi;
        part_e1[i] = 0.5 * (pot * (response.m_dot.v[i] -
                                   2.0 * u.v[i] * response.u_dot.v[i]) +
                            potd * (m.v[i] - u.v[i] * u.v[i]));
    }
    kin = h3 * kernels::sum(part_kin);
    elec2 = h3 * kernels::sum(part_e2);
    elec1 = h3 * kernels::sum(part_e1);

    RouteForces out;
    out.e1 = kin + elec1;
    out.e2 = kin + elec2;
    return out;
}

} // namespace tfw
