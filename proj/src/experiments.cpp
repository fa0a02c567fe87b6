#include "tfw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "tfw/fft.hpp"
#include "tfw/field_ops.hpp"
#include "tfw/kernels.hpp"

namespace tfw {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

double e1e2_total_gap(const GroundState& gs, const Field& m) {
    const Field e1 = energy_density(gs.u, gs.phi, gs.mu, gs.a, m, 1);
    const Field e2 = energy_density(gs.u, gs.phi, gs.mu, gs.a, m, 2);
    const double t1 = field_integral(e1);
    const double t2 = field_integral(e2);
    return std::abs(t1 - t2) / std::max({std::abs(t1), std::abs(t2), 1e-300});
}

SweepReport sweep_core(const Field& m, const NuclearConfig* cfg,
                       std::span<const double> a_list, const SolverOptions& opts,
                       int force_site, double force_fit_max_a) {
    if (a_list.size() < 2 || a_list.back() != 0.0)
        throw std::invalid_argument("run_convergence_sweep: a list must end at 0");

    SweepReport rep;
    rep.force_fit_max_a = force_fit_max_a;
    rep.fit_floor = 100.0 * opts.tol;

    {
        const double L = m.grid.box_length;
        const std::vector<double> Rs = {L / 4, 5 * L / 16, 3 * L / 8, L / 2};
        rep.class_params = estimate_class_params(m, Rs);
        if (!(rep.class_params.omega0 > 1e-12))
            throw std::invalid_argument(
                "run_convergence_sweep: configuration is not condensed (omega0 <= 0)");
    }

    const std::vector<GroundState> states = continuation_sweep(m, a_list, opts);
    for (const auto& st : states)
        if (!energy_log_monotone(st)) rep.energy_logs_monotone = false;
    const GroundState& s0 = states.back();
    rep.mu0 = s0.mu;
    rep.min_u0 = kernels::min(s0.u.v);
    rep.solovej_margin0 = solovej_check(s0.u, s0.phi, s0.mu, s0.a).min_margin;

    Force f0;
    if (cfg) f0 = force_hf(s0, *cfg, force_site);

    Field dphi(m.grid);
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        const GroundState& s = states[i];
        SweepEntry e;
        e.a = s.a.a;
        e.wkinf_u = wkinf_diff_norm(s.u, s0.u, 2);
#pragma omp parallel for schedule(static)
        for (long long j = 0; j < static_cast<long long>(dphi.size()); ++j)
            dphi.v[j] = s.phi.v[j] - s0.phi.v[j] - s0.mu;
        e.wkinf_phi = wkinf_diff_norm(dphi, Field(m.grid), 2);
        if (cfg) {
            const Force fa = force_hf(s, *cfg, force_site);
            double d2 = 0.0;
            for (int d = 0; d < 3; ++d) d2 += (fa.f[d] - f0.f[d]) * (fa.f[d] - f0.f[d]);
            e.force_diff = std::sqrt(d2);
        }
        {
            Field u2(m.grid);
            kernels::mul(s.u.v, s.u.v, u2.v);
            e.defect = field_mean(m) - field_mean(u2);
        }
        e.min_u = kernels::min(s.u.v);
        e.solovej_margin = solovej_check(s.u, s.phi, s.mu, s.a).min_margin;
        e.energy = s.energy;
        e.iterations = s.iterations;
        rep.entries.push_back(e);
    }

    // pairwise two-parameter ratios, consecutive positive a
    for (std::size_t i = 0; i + 2 < states.size(); ++i) {
        const double a2 = states[i].a.a, a1 = states[i + 1].a.a;
        Field du(m.grid);
        kernels::sub(states[i + 1].u.v, states[i].u.v, du.v);
        rep.pairwise_ratio.push_back(kernels::max_abs(du.v) / (a2 * a2 - a1 * a1));
    }

    // rate fits on log-log axes, metrics below the floor excluded
    std::vector<double> xs_u, ys_u, xs_p, ys_p, xs_f, ys_f;
    for (const auto& e : rep.entries) {
        if (e.wkinf_u > rep.fit_floor) {
            xs_u.push_back(e.a);
            ys_u.push_back(e.wkinf_u);
        } else {
            rep.excluded_a.push_back(e.a);
        }
        if (e.wkinf_phi > rep.fit_floor) {
            xs_p.push_back(e.a);
            ys_p.push_back(e.wkinf_phi);
        }
        if (e.force_diff > rep.fit_floor && e.a <= force_fit_max_a) {
            xs_f.push_back(e.a);
            ys_f.push_back(e.force_diff);
        }
    }
    if (xs_u.size() >= 3) rep.u_fit = fit_power_law(xs_u, ys_u);
    if (xs_p.size() >= 3) rep.phi_fit = fit_power_law(xs_p, ys_p);
    if (xs_f.size() >= 3) rep.force_fit = fit_power_law(xs_f, ys_f);

    if (states.size() >= 2)
        rep.e1e2_total_rel = e1e2_total_gap(states[states.size() - 2], m);
    return rep;
}

} // namespace

SweepReport run_convergence_sweep(const NuclearConfig& cfg, const Grid& grid,
                                  std::span<const double> a_list,
                                  const SolverOptions& opts, int force_site,
                                  double force_fit_max_a) {
    const Field m = assemble_density(cfg, grid);
    return sweep_core(m, &cfg, a_list, opts, force_site, force_fit_max_a);
}

SweepReport run_convergence_sweep(const Field& m, std::span<const double> a_list,
                                  const SolverOptions& opts) {
    return sweep_core(m, nullptr, a_list, opts, 0, 1e30);
}

namespace {

// shell maxima of `value` against `distance`, shells of width sw
void shell_maxima(const std::vector<double>& distance, const std::vector<double>& value,
                  double sw, double d_max, std::vector<double>& out_d,
                  std::vector<double>& out_v) {
    const int nshell = static_cast<int>(std::ceil(d_max / sw));
    std::vector<double> mx(nshell, -1.0);
    for (std::size_t i = 0; i < distance.size(); ++i) {
        const double d = distance[i];
        if (d < 0.0 || d >= d_max) continue;
        const int s = std::min(nshell - 1, static_cast<int>(d / sw));
        mx[s] = std::max(mx[s], value[i]);
    }
    out_d.clear();
    out_v.clear();
    for (int s = 0; s < nshell; ++s) {
        if (mx[s] >= 0.0) {
            out_d.push_back((s + 0.5) * sw);
            out_v.push_back(mx[s]);
        }
    }
}

Field derivative_envelope(const Field& diff) {
    const auto& ws = workspace(diff.grid);
    const Spectrum base = ws.forward(diff);
    Field env(diff.grid);
    for (std::size_t i = 0; i < env.size(); ++i) env.v[i] = std::abs(diff.v[i]);
    Field tmp;
    for (const auto& alpha : multi_indices_up_to(2)) {
        if (alpha.order() == 0) continue;
        Spectrum s = base;
        apply_derivative(s, alpha);
        ws.inverse(s, tmp);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(env.size()); ++i)
            env.v[i] += std::abs(tmp.v[i]);
    }
    return env;
}

DecayFit fit_profile(const std::vector<double>& ds, const std::vector<double>& vs,
                     double floor, double d_lo, double d_hi) {
    std::vector<double> fd, fv;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (vs[i] > floor && ds[i] >= d_lo && ds[i] <= d_hi) {
            fd.push_back(ds[i]);
            fv.push_back(vs[i]);
        }
    if (fd.size() < 3) {
        DecayFit f;
        f.valid = false;
        return f;
    }
    return fit_exponential(fd, fv);
}

} // namespace

TruncationStudy run_truncation_study(const NuclearConfig& cfg, const Grid& grid,
                                     std::span<const double> halfwidths, double a,
                                     const SolverOptions& opts, double shell_width) {
    if (!(a > 0.0))
        throw std::invalid_argument("run_truncation_study: needs a > 0 (Yukawa only)");
    const double L = grid.box_length;
    for (double W : halfwidths)
        if (!(W > 0.0) || W > L / 2)
            throw std::invalid_argument("run_truncation_study: halfwidth outside (0, L/2]");
    if (halfwidths.empty())
        throw std::invalid_argument("run_truncation_study: no halfwidths");

    TruncationStudy study;
    study.a = a;
    study.shell_width = shell_width > 0.0 ? shell_width : grid.spacing();
    study.fit_floor = 100.0 * opts.tol;

    const Field m = assemble_density(cfg, grid);
    const GroundState full = solve_ground(m, Screening(a), opts);
    if (!full.converged)
        throw std::runtime_error("run_truncation_study: full solve did not converge");
    study.full_iterations = full.iterations;
    study.full_solovej_margin = solovej_check(full.u, full.phi, full.mu, full.a).min_margin;
    study.energy_logs_monotone = energy_log_monotone(full);

    const int n = grid.points_per_axis;
    const double c = L / 2;
    SolverOptions wopts = opts;

    const GroundState* warm = &full;
    std::vector<GroundState> kept;
    kept.reserve(halfwidths.size());
    for (double W : halfwidths) {
        Field mW(grid);
        std::vector<double> dist(grid.point_count());
        for (int i = 0; i < n; ++i) {
            const double dx = std::abs(grid.min_image(grid.coord(i), c));
            for (int j = 0; j < n; ++j) {
                const double dy = std::abs(grid.min_image(grid.coord(j), c));
                for (int l = 0; l < n; ++l) {
                    const double dz = std::abs(grid.min_image(grid.coord(l), c));
                    const double dmax = std::max({dx, dy, dz});
                    const std::size_t idx = grid.index(i, j, l);
                    mW.v[idx] = dmax <= W ? m.v[idx] : 0.0;
                    dist[idx] = W - dmax;  // negative outside Omega
                }
            }
        }
        wopts.warm_start = warm;
        GroundState gsW = solve_ground(mW, Screening(a), wopts);
        if (!gsW.converged)
            throw std::runtime_error("run_truncation_study: truncated solve failed");

        Field diff(grid);
        kernels::sub(full.u.v, gsW.u.v, diff.v);
        const Field env = derivative_envelope(diff);

        OmegaProfile prof;
        prof.halfwidth = W;
        prof.iterations = gsW.iterations;
        prof.solovej_margin = solovej_check(gsW.u, gsW.phi, gsW.mu, gsW.a).min_margin;
        if (!energy_log_monotone(gsW)) study.energy_logs_monotone = false;
        shell_maxima(dist, env.v, study.shell_width, W, prof.shell_distance,
                     prof.shell_value);
        double vmax = 0.0;
        std::size_t imax = 0;
        for (std::size_t i = 0; i < prof.shell_value.size(); ++i)
            if (prof.shell_value[i] > vmax) {
                vmax = prof.shell_value[i];
                imax = i;
            }
        prof.below_floor = vmax <= study.fit_floor;
        const double d_lo = prof.shell_distance.empty() ? 0.0 : prof.shell_distance[imax];
        const double d_hi = W - 2.0 * study.shell_width;
        prof.fit = fit_profile(prof.shell_distance, prof.shell_value, study.fit_floor,
                               d_lo, d_hi);
        study.profiles.push_back(std::move(prof));
        kept.push_back(std::move(gsW));
        warm = &kept.back();
    }
    study.primary = study.profiles.front().fit;
    return study;
}

PerturbationReport run_perturbation_study(const NuclearConfig& cfg, const Grid& grid,
                                          int site, const Point& delta, double a,
                                          const SolverOptions& opts, double shell_width) {
    const NuclearConfig cfg2 = cfg.displaced(site, delta);
    const Field m1 = assemble_density(cfg, grid);
    const Field m2 = assemble_density(cfg2, grid);

    const GroundState s1 = solve_ground(m1, Screening(a), opts);
    if (!s1.converged)
        throw std::runtime_error("run_perturbation_study: base solve did not converge");
    SolverOptions o2 = opts;
    o2.warm_start = &s1;
    const GroundState s2 = solve_ground(m2, Screening(a), o2);
    if (!s2.converged)
        throw std::runtime_error("run_perturbation_study: perturbed solve did not converge");

    PerturbationReport rep;
    rep.iterations_1 = s1.iterations;
    rep.iterations_2 = s2.iterations;
    rep.solovej_margin_1 = solovej_check(s1.u, s1.phi, s1.mu, s1.a).min_margin;
    rep.solovej_margin_2 = solovej_check(s2.u, s2.phi, s2.mu, s2.a).min_margin;
    rep.min_u_1 = kernels::min(s1.u.v);
    rep.min_u_2 = kernels::min(s2.u.v);
    rep.energy_logs_monotone = energy_log_monotone(s1) && energy_log_monotone(s2);
    const double sw = shell_width > 0.0 ? shell_width : grid.spacing();
    rep.fit_floor = 100.0 * opts.tol;
    const double dnorm =
        std::sqrt(delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]);
    rep.support_radius = cfg.bump_radius + dnorm;

    rep.w = Field(grid);
    kernels::sub(s1.u.v, s2.u.v, rep.w.v);
    rep.psi = Field(grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(grid.point_count()); ++i)
        rep.psi.v[i] = (s1.phi.v[i] + s1.mu) - (s2.phi.v[i] + s2.mu);
    rep.r_m = Field(grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(grid.point_count()); ++i)
        rep.r_m.v[i] = four_pi * (m1.v[i] - m2.v[i]);

    Field env = derivative_envelope(rep.w);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(env.size()); ++i)
        env.v[i] += std::abs(rep.psi.v[i]);

    const Point y = cfg.sites.at(static_cast<std::size_t>(site));
    const int n = grid.points_per_axis;
    std::vector<double> dist(grid.point_count());
    for (int i = 0; i < n; ++i) {
        const double dx = grid.min_image(grid.coord(i), y[0]);
        for (int j = 0; j < n; ++j) {
            const double dy = grid.min_image(grid.coord(j), y[1]);
            for (int l = 0; l < n; ++l) {
                const double dz = grid.min_image(grid.coord(l), y[2]);
                dist[grid.index(i, j, l)] = std::sqrt(dx * dx + dy * dy + dz * dz);
            }
        }
    }
    const double d_cap = grid.box_length / 2 - cfg.bump_radius;  // wraparound guard
    shell_maxima(dist, env.v, sw, grid.box_length / 2, rep.shell_distance,
                 rep.shell_value);
    rep.decay = fit_profile(rep.shell_distance, rep.shell_value, rep.fit_floor,
                            rep.support_radius + sw, d_cap);

    // neutrality profile |int_{B_R} rho_12| on an R ladder past the support
    Field rho12(grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(grid.point_count()); ++i)
        rho12.v[i] = (m1.v[i] - s1.u.v[i] * s1.u.v[i]) -
                     (m2.v[i] - s2.u.v[i] * s2.u.v[i]);
    const double r_step = 0.25;
    for (double R = rep.support_radius + r_step; R <= grid.box_length / 2 + 1e-12;
         R += r_step) {
        rep.neutrality_R.push_back(R);
        rep.neutrality_value.push_back(ball_integral(rho12, y, R));
    }
    if (rep.neutrality_value.size() >= 2) {
        const double head = std::abs(rep.neutrality_value.front());
        if (head < rep.fit_floor) {
            rep.neutrality_below_floor = true;
            rep.neutrality_decreasing = true;  // identically small profile
        } else {
            bool ok = true;
            for (std::size_t i = 0; i + 1 < rep.neutrality_value.size(); ++i)
                if (std::abs(rep.neutrality_value[i + 1]) >
                    1.10 * std::abs(rep.neutrality_value[i]))
                    ok = false;
            if (std::abs(rep.neutrality_value.back()) > 0.5 * head) ok = false;
            rep.neutrality_decreasing = ok;
        }
    }
    return rep;
}

Field uniform_field(const Grid& grid, double value) {
    Field f(grid);
    std::fill(f.v.begin(), f.v.end(), value);
    return f;
}

Field random_smooth_field(const Grid& grid, unsigned seed, int max_mode,
                          double amplitude) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Spectrum s{grid};
    const int n = grid.points_per_axis;
    auto mode = [&](int i) { return i <= n / 2 ? i : i - n; };
    for (int i = 0; i < n; ++i) {
        if (std::abs(mode(i)) > max_mode) continue;
        for (int j = 0; j < n; ++j) {
            if (std::abs(mode(j)) > max_mode) continue;
            for (int l = 0; l <= max_mode && l <= n / 2; ++l) {
                s.c[s.index(i, j, l)] = {dist(rng), dist(rng)};
            }
        }
    }
    const auto& ws = workspace(grid);
    Field f = ws.inverse(s);  // c2r symmetrizes the redundant half
    const double scale = kernels::max_abs(f.v);
    if (scale > 0.0)
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(f.size()); ++i)
            f.v[i] *= amplitude / scale;
    return f;
}

CheckReport invariant_suite(const GroundState& gs, const Field& m,
                            const InvariantOptions& opts) {
    CheckReport rep;
    const Field& u = gs.u;
    const Grid& grid = u.grid;
    const double h3 = std::pow(grid.spacing(), 3);

    {  // Green identity on the state's own source
        Field rho(grid);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(rho.size()); ++i)
            rho.v[i] = m.v[i] - u.v[i] * u.v[i];
        const auto [phi, info] = green_apply(gs.a, rho);
        const Field lap_phi = laplacian(phi);
        const double a2 = gs.a.a * gs.a.a;
        const double mean_rhs = gs.a.coulomb() ? four_pi * field_mean(rho) : 0.0;
        Field res(grid);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(res.size()); ++i)
            res.v[i] = -lap_phi.v[i] + a2 * phi.v[i] - (four_pi * rho.v[i] - mean_rhs);
        const double scale = std::max(1e-300, four_pi * kernels::max_abs(rho.v));
        const double rel = kernels::max_abs(res.v) / scale;
        rep.entries.push_back({"green_identity", rel <= 1e-10, rel, 1e-10});
    }

    {  // D_a symmetry and positivity on seeded smooth pairs
        double worst_sym = 0.0, worst_pos = 0.0;
        for (int p = 0; p < opts.dpair_pairs; ++p) {
            const Field f = random_smooth_field(grid, opts.seed + 2 * p);
            const Field g = random_smooth_field(grid, opts.seed + 2 * p + 1);
            const double dfg = d_pair(gs.a, f, g);
            const double dgf = d_pair(gs.a, g, f);
            const double dff = d_pair(gs.a, f, f);
            worst_sym = std::max(worst_sym,
                                 std::abs(dfg - dgf) / std::max(1.0, std::abs(dfg)));
            worst_pos = std::min(worst_pos, dff);
        }
        rep.entries.push_back({"dpair_symmetry", worst_sym <= 1e-12, worst_sym, 1e-12});
        rep.entries.push_back({"dpair_positivity", worst_pos >= -1e-12, worst_pos, -1e-12});
    }

    {
        const bool mono = energy_log_monotone(gs);
        rep.entries.push_back({"energy_monotone", mono, mono ? 1.0 : 0.0, 1.0});
    }

    {
        const double gap = e1e2_total_gap(gs, m);
        rep.entries.push_back({"e1e2_totals", gap <= opts.e1e2_tol, gap, opts.e1e2_tol});
    }

    {
        const double margin = solovej_check(u, gs.phi, gs.mu, gs.a).min_margin;
        rep.entries.push_back(
            {"solovej", margin >= -opts.solovej_tol, margin, -opts.solovej_tol});
    }

    {
        const double mn = kernels::min(u.v);
        rep.entries.push_back({"positivity_u", mn >= 0.0, mn, 0.0});
    }

    {
        Field u2(grid);
        kernels::mul(u.v, u.v, u2.v);
        const double charge = h3 * (kernels::sum(m.v) - kernels::sum(u2.v));
        if (gs.a.coulomb()) {
            const double mass = h3 * kernels::sum(m.v);
            const double rel = std::abs(charge) / std::max(mass, 1e-300);
            const bool pass = mass > 0.0 ? rel <= opts.tol : std::abs(charge) <= opts.tol;
            rep.entries.push_back({"neutrality", pass, rel, opts.tol});
        } else {
            // zero mode of phi carries the defect: a^2 mean(phi) = 4pi mean(m-u^2)
            const double lhs = gs.a.a * gs.a.a * field_mean(gs.phi);
            const double rhs = four_pi * (field_mean(m) - field_mean(u2));
            const double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
            rep.entries.push_back({"zero_mode_identity", rel <= 1e-10, rel, 1e-10});
        }
    }

    rep.entries.push_back({"residual_u", gs.r_u <= opts.tol, gs.r_u, opts.tol});
    rep.entries.push_back({"residual_phi", gs.r_phi <= opts.tol, gs.r_phi, opts.tol});
    return rep;
}

CheckReport run_infra_checks() {
    CheckReport rep;

    {  // radial quadrature of Y_a over B_{1/(4a)} against the closed form
        const double a = 1.0;
        const double Rp = 1.0 / (4.0 * a);
        const int nseg = 4096;
        const double h = Rp / nseg;
        // integrand 4 pi r e^{-a r}; composite Simpson
        auto f = [&](double r) { return four_pi * r * std::exp(-a * r); };
        double s = f(0.0) + f(Rp);
        for (int i = 1; i < nseg; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
        const double quad = s * h / 3.0;
        const double closed = four_pi / (a * a) * (1.0 - 1.25 * std::exp(-0.25));
        const double err = std::abs(quad - closed);
        rep.entries.push_back({"yukawa_radial_quadrature", err <= 1e-6, err, 1e-6});
    }

    {  // monotone screening and the Coulomb limit bound
        bool mono = true, limit = true;
        for (double k2 : {0.04, 0.5, 3.0, 40.0}) {
            const double coulomb = kernel_multiplier(Screening(0.0), k2);
            double prev = coulomb;
            for (double a : {0.05, 0.2, 0.8, 2.0}) {
                const double cur = kernel_multiplier(Screening(a), k2);
                if (cur > prev + 1e-15) mono = false;
                if (std::abs(cur - coulomb) > (a * a / k2) * coulomb * (1.0 + 1e-12))
                    limit = false;
                prev = cur;
            }
        }
        rep.entries.push_back({"kernel_monotone_screening", mono, mono ? 1.0 : 0.0, 1.0});
        rep.entries.push_back({"kernel_coulomb_limit", limit, limit ? 1.0 : 0.0, 1.0});
    }

    {
        const double cs = solovej_constant();
        const double closed = 6561.0 / 2000.0 * std::numbers::pi * std::numbers::pi;
        const double rel = std::abs(cs - closed) / closed;
        rep.entries.push_back({"solovej_constant", rel <= 1e-14, rel, 1e-14});
    }
    return rep;
}

} // namespace tfw
