#include "tfw/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tfw/fft.hpp"
#include "tfw/field_ops.hpp"
#include "tfw/kernels.hpp"

namespace tfw {

namespace {

Field precondition(const Field& f) {
    const auto& ws = workspace(f.grid);
    Spectrum s = ws.forward(f);
    apply_multiplier(s, [](double kx, double ky, double kz) {
        return 1.0 / (1.0 + kx * kx + ky * ky + kz * kz);
    });
    return ws.inverse(s);
}

struct IterateState {
    Field phi;
    double mu = 0.0;
    Field grad_half;  // -lap v + (5/3)|v|^{7/3} - phi v  (mu not subtracted)
    ElResidual res;
};

// potential, mu, the half-gradient of the energy and the residuals at v.
// With dealias on, the fractional power inside the gradient and the
// residual is the filtered one, so convergence is measured in the same
// discrete problem the energy descends on.
IterateState evaluate(const Field& v, const Field& m, Screening a, bool dealias) {
    IterateState st;
    const std::size_t n = v.size();
    Field rho(v.grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        rho.v[i] = m.v[i] - v.v[i] * v.v[i];
    st.phi = green_apply(a, rho).first;

    const Field lap_v = laplacian(v);
    Field power(v.grid);
    if (dealias) {
        Field vf = dealias_23(v);
        kernels::abs_pow(vf.v, 7.0 / 3.0, power.v);
    } else {
        kernels::abs_pow(v.v, 7.0 / 3.0, power.v);
    }
    st.grad_half = Field(v.grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        st.grad_half.v[i] =
            -lap_v.v[i] + (5.0 / 3.0) * power.v[i] - st.phi.v[i] * v.v[i];

    if (a.coulomb()) {
        // mu = mean of grad_half / v over the support of v
        const double cut = 1e-14 * std::max(1.0, kernels::max_abs(v.v));
        double acc = 0.0;
        long long cnt = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (v.v[i] > cut) {
                acc += st.grad_half.v[i] / v.v[i];
                ++cnt;
            }
        }
        st.mu = cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
    }

    // residuals from the pieces already in hand (same numbers as
    // el_residual in the unfiltered case)
    const Field lap_phi = laplacian(st.phi);
    const double a2 = a.a * a.a;
    Field ru(v.grid), rphi(v.grid), pot_term(v.grid);
    double mean_rhs = a.coulomb() ? 4.0 * std::numbers::pi * field_mean(rho) : 0.0;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        pot_term.v[i] = (st.phi.v[i] + st.mu) * v.v[i];
        ru.v[i] = st.grad_half.v[i] - st.mu * v.v[i];
        rphi.v[i] = -lap_phi.v[i] + a2 * st.phi.v[i] -
                    (4.0 * std::numbers::pi * rho.v[i] - mean_rhs);
    }
    st.res.r_u = kernels::max_abs(ru.v);
    st.res.r_phi = kernels::max_abs(rphi.v);
    Field tf(v.grid);
    kernels::axpby(5.0 / 3.0, power.v, 0.0, tf.v);
    const double scale_u =
        std::max(1.0, kernels::max_abs(tf.v) + kernels::max_abs(pot_term.v));
    const double scale_phi = std::max(
        1.0, 4.0 * std::numbers::pi * kernels::max_abs(rho.v) + a2 * kernels::max_abs(st.phi.v));
    st.res.r_u_rel = st.res.r_u / scale_u;
    st.res.r_phi_rel = st.res.r_phi / scale_phi;
    return st;
}

void project_mass(Field& v, double target_mass) {
    if (target_mass <= 0.0) return;
    const double h3 = std::pow(v.grid.spacing(), 3);
    const double cur = h3 * kernels::dot(v.v, v.v);
    if (cur <= 0.0) return;
    const double s = std::sqrt(target_mass / cur);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(v.size()); ++i) v.v[i] *= s;
}

} // namespace

double recover_mu(const Field& u, const Field& phi) {
    const Field lap_u = laplacian(u);
    const double cut = 1e-14 * std::max(1.0, kernels::max_abs(u.v));
    double acc = 0.0;
    long long cnt = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.v[i] > cut) {
            acc += (-lap_u.v[i] + (5.0 / 3.0) * std::pow(u.v[i], 7.0 / 3.0) -
                    phi.v[i] * u.v[i]) /
                   u.v[i];
            ++cnt;
        }
    }
    return cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
}

Field apply_linearized(const Field& u, const Field& pot, Screening a, const Field& x) {
    require_same_grid(u, x, "apply_linearized");
    const Field lap_x = laplacian(x);
    Field ux(u.grid);
    kernels::mul(u.v, x.v, ux.v);
    const Field g = green_apply(a, ux).first;
    Field out(u.grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(u.size()); ++i) {
        const double V = (35.0 / 9.0) * std::pow(std::abs(u.v[i]), 4.0 / 3.0) - pot.v[i];
        out.v[i] = -lap_x.v[i] + V * x.v[i] + 2.0 * u.v[i] * g.v[i];
    }
    return out;
}

CgResult cg_linearized(const Field& u, const Field& pot, Screening a, const Field& b,
                       double rel_tol, int max_iter) {
    CgResult out;
    out.x = Field(u.grid);
    Field r = b;
    Field z = precondition(r);
    Field p = z;
    double rz = kernels::dot(r.v, z.v);
    const double bnorm = std::sqrt(kernels::dot(b.v, b.v));
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    for (int it = 0; it < max_iter; ++it) {
        const Field Ap = apply_linearized(u, pot, a, p);
        const double pAp = kernels::dot(p.v, Ap.v);
        if (!(pAp > 0.0)) break;  // operator left the SPD regime
        const double alpha = rz / pAp;
        kernels::axpby(alpha, p.v, 1.0, out.x.v);
        kernels::axpby(-alpha, Ap.v, 1.0, r.v);
        out.iterations = it + 1;
        const double rn = std::sqrt(kernels::dot(r.v, r.v));
        out.rel_residual = rn / bnorm;
        if (out.rel_residual <= rel_tol) {
            out.converged = true;
            return out;
        }
        z = precondition(r);
        const double rz2 = kernels::dot(r.v, z.v);
        kernels::axpby(1.0, z.v, rz2 / rz, p.v);
        rz = rz2;
    }
    return out;
}

HomogeneousState solve_homogeneous(double mbar, Screening a) {
    if (mbar < 0.0) throw std::invalid_argument("solve_homogeneous: mbar < 0");
    HomogeneousState s;
    if (mbar == 0.0) return s;
    if (a.coulomb()) {
        s.u = std::sqrt(mbar);
        s.phi = 0.0;
        s.mu = (5.0 / 3.0) * std::pow(mbar, 2.0 / 3.0);
        return s;
    }
    const double c = 4.0 * std::numbers::pi / (a.a * a.a);
    auto f = [&](double t) { return (5.0 / 3.0) * std::pow(t, 4.0 / 3.0) - c * (mbar - t * t); };
    double lo = 0.0, hi = std::sqrt(mbar);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    s.u = 0.5 * (lo + hi);
    s.phi = c * (mbar - s.u * s.u);
    return s;
}

GroundState solve_ground(const Field& m, Screening a, const SolverOptions& opts) {
    if (kernels::min(m.v) < 0.0)
        throw std::invalid_argument("solve_ground: m must be nonnegative");

    GroundState gs;
    gs.a = a;

    Field v(m.grid);
    if (opts.warm_start != nullptr) {
        if (!(opts.warm_start->u.grid == m.grid))
            throw std::invalid_argument("solve_ground: warm start grid mismatch");
        v = opts.warm_start->u;
        for (auto& x : v.v) x = std::abs(x);
    } else {
        const double mbar = field_mean(m);
        std::fill(v.v.begin(), v.v.end(), std::sqrt(std::max(mbar, 0.0)));
    }
    if (opts.init_perturb_amplitude > 0.0) {
        std::mt19937 rng(opts.init_perturb_seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (auto& x : v.v) x = std::abs(x * (1.0 + opts.init_perturb_amplitude * dist(rng)));
    }

    const double mass_m = field_integral(m);
    const bool constrained = a.coulomb();
    if (constrained) project_mass(v, mass_m);

    double tau = opts.initial_step;
    double energy = tfw_energy(v, m, a, opts.dealias);
    bool energy_phase = true;

    IterateState cur = evaluate(v, m, a, opts.dealias);
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        gs.iterations = iter;
        if (cur.res.r_u_rel <= opts.tol && cur.res.r_phi_rel <= opts.tol) {
            gs.converged = true;
            break;
        }
        if (energy_phase && cur.res.r_u_rel <= opts.newton_threshold) energy_phase = false;

        if (energy_phase) {
            // full energy gradient is 2 * grad_half
            Field g = cur.grad_half;
            for (auto& x : g.v) x *= 2.0;
            const Field pg = precondition(g);
            bool accepted = false;
            Field vt(v.grid);
            double et = 0.0;
            for (int bt = 0; bt < 60; ++bt) {
#pragma omp parallel for schedule(static)
                for (long long i = 0; i < static_cast<long long>(v.size()); ++i)
                    vt.v[i] = std::abs(v.v[i] - tau * pg.v[i]);
                if (constrained) project_mass(vt, mass_m);
                et = tfw_energy(vt, m, a, opts.dealias);
                if (et < energy) {
                    accepted = true;
                    break;
                }
                tau *= opts.backtrack_factor;
            }
            if (!accepted) {
                // energy differences hit the FP floor; hand over to Newton
                energy_phase = false;
                tau = opts.initial_step;
                continue;
            }
            v = vt;
            energy = et;
            tau *= opts.step_growth;
            cur = evaluate(v, m, a, opts.dealias);
            if (opts.record_log)
                gs.log.push_back({iter, energy, cur.res.r_u_rel, cur.res.r_phi_rel, 'e'});
        } else {
            // Newton-CG polish, accepted on residual decrease
            Field r = cur.grad_half;
            if (constrained) {
#pragma omp parallel for schedule(static)
                for (long long i = 0; i < static_cast<long long>(v.size()); ++i)
                    r.v[i] -= cur.mu * v.v[i];
            }
            Field pot(v.grid);
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(v.size()); ++i)
                pot.v[i] = cur.phi.v[i] + cur.mu;
            const double cg_tol =
                std::clamp(1e-4 * cur.res.r_u_rel, 1e-10, 1e-4);
            const CgResult cg = cg_linearized(v, pot, a, r, cg_tol, opts.cg_max_iter);
            bool accepted = false;
            double step = 1.0;
            Field vt(v.grid);
            IterateState trial;
            for (int bt = 0; bt < 40; ++bt) {
#pragma omp parallel for schedule(static)
                for (long long i = 0; i < static_cast<long long>(v.size()); ++i)
                    vt.v[i] = std::abs(v.v[i] - step * cg.x.v[i]);
                if (constrained) project_mass(vt, mass_m);
                trial = evaluate(vt, m, a, opts.dealias);
                if (trial.res.r_u_rel < cur.res.r_u_rel) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;  // residual floor reached
            v = vt;
            cur = trial;
            energy = tfw_energy(v, m, a, opts.dealias);
            if (opts.record_log)
                gs.log.push_back({iter, energy, cur.res.r_u_rel, cur.res.r_phi_rel, 'n'});
        }
    }

    gs.u = v;
    gs.phi = cur.phi;
    gs.mu = cur.mu;
    gs.energy = energy;
    gs.r_u = cur.res.r_u_rel;
    gs.r_phi = cur.res.r_phi_rel;
    if (cur.res.r_u_rel <= opts.tol && cur.res.r_phi_rel <= opts.tol) gs.converged = true;
    return gs;
}

bool energy_log_monotone(const GroundState& gs) {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : gs.log) {
        if (r.phase != 'e') continue;
        if (!(r.energy < prev)) return false;
        prev = r.energy;
    }
    return true;
}

std::vector<GroundState> continuation_sweep(const Field& m, std::span<const double> a_list,
                                            SolverOptions opts) {
    if (a_list.empty()) throw std::invalid_argument("continuation_sweep: empty a list");
    for (std::size_t i = 0; i + 1 < a_list.size(); ++i)
        if (!(a_list[i] > a_list[i + 1]))
            throw std::invalid_argument("continuation_sweep: a list must be strictly decreasing");
    std::vector<GroundState> states;
    states.reserve(a_list.size());
    for (double a : a_list) {
        opts.warm_start = states.empty() ? opts.warm_start : &states.back();
        GroundState gs = solve_ground(m, Screening(a), opts);
        if (!gs.converged) {
            std::ostringstream msg;
            msg << "continuation_sweep: solve failed at a = " << a
                << " (residuals " << gs.r_u << ", " << gs.r_phi << ")";
            throw std::runtime_error(msg.str());
        }
        states.push_back(std::move(gs));
    }
    return states;
}

} // namespace tfw
