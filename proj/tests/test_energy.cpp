#include <doctest.h>

#include <cmath>

#include "tfw/energy.hpp"
#include "tfw/field_ops.hpp"
#include "tfw/kernels.hpp"
#include "tfw/nuclei.hpp"
#include "tfw/solver.hpp"
#include "test_util.hpp"

using namespace tfw;
using namespace tfw::test;

TEST_CASE("bump profile normalization") {
    // radial Simpson of 4 pi r^2 eta(r)
    for (double R0 : {0.9, 1.4}) {
        const int nseg = 8192;
        const double h = R0 / nseg;
        auto f = [&](double r) { return 4 * pi * r * r * bump_value(r * r, R0); };
        double s = f(0.0) + f(R0);
        for (int i = 1; i < nseg; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
        CHECK(s * h / 3.0 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("assemble_density mass, superposition, rejections") {
    const Grid g(8, 96);
    NuclearConfig cfg;
    cfg.bump_radius = 0.9;
    cfg.sites = {{2.3, 2.0, 2.1}};
    const Field m1 = assemble_density(cfg, g);
    CHECK(std::abs(field_integral(m1) - 1.0) < 1e-8);
    CHECK(kernels::min(m1.v) >= 0.0);

    cfg.sites.push_back({5.7, 4.4, 6.0});
    const Field m2 = assemble_density(cfg, g);
    CHECK(std::abs(field_integral(m2) - 2.0) < 2e-8);
    CHECK(kernels::min(m2.v) >= 0.0);

    NuclearConfig empty;
    empty.bump_radius = 0.9;
    CHECK(kernels::max_abs(assemble_density(empty, g).v) == 0.0);

    // a ball past the bump radius captures the whole unit charge
    const double R = cfg.bump_radius + 3 * g.spacing();
    CHECK(ball_integral(m1, cfg.sites[0], R) == doctest::Approx(1.0).epsilon(1e-7));

    NuclearConfig bad = cfg;
    bad.bump_radius = 2.5;  // >= L/4
    CHECK_THROWS_AS(assemble_density(bad, g), std::invalid_argument);
    NuclearConfig outside = cfg;
    outside.sites[0][1] = 9.0;
    CHECK_THROWS_AS(assemble_density(outside, g), std::invalid_argument);
}

TEST_CASE("assemble_density shifts exactly with grid-aligned translations") {
    const Grid g(8, 32);
    NuclearConfig cfg;
    cfg.bump_radius = 1.1;
    cfg.sites = {{2.37, 3.11, 4.96}, {6.1, 1.4, 0.7}};
    const Field m = assemble_density(cfg, g);

    const int shift = 5;  // grid cells, wraps around
    NuclearConfig moved = cfg;
    for (auto& s : moved.sites) s[0] = std::fmod(s[0] + shift * g.spacing(), 8.0);
    const Field ms = assemble_density(moved, g);

    double worst = 0.0;
    const int n = g.points_per_axis;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                worst = std::max(worst, std::abs(ms((i + shift) % n, j, l) - m(i, j, l)));
    CHECK(worst < 1e-12 * kernels::max_abs(m.v));
}

TEST_CASE("tfw_energy closed forms") {
    const Grid g(8, 16);
    const double V = 512.0;
    NuclearConfig cfg;
    cfg.bump_radius = 1.2;
    cfg.sites = {{4.0, 4.0, 4.0}};
    const Field m = assemble_density(cfg, g);
    const Field zero(g);

    // v = 0: half the self-interaction
    const Screening a(0.7);
    CHECK(tfw_energy(zero, m, a) ==
          doctest::Approx(0.5 * d_pair(a, m, m)).epsilon(1e-13));
    CHECK(tfw_energy(zero, zero, a) == 0.0);

    // uniform v = t, m = mbar: V t^{10/3} + (2 pi / a^2) (mbar - t^2)^2 V
    const double t = 0.8, mbar = 1.1;
    const Field vt = uniform_field(g, t);
    const Field mb = uniform_field(g, mbar);
    const double expect =
        V * std::pow(t, 10.0 / 3.0) +
        0.5 * (4 * pi / (a.a * a.a)) * (mbar - t * t) * (mbar - t * t) * V;
    CHECK(tfw_energy(vt, mb, a) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("energy is invariant under global sign flip") {
    const Grid g(4, 16);
    const Field v = random_smooth_field(g, 77);  // sign-changing
    const Field m = random_smooth_field(g, 78, 3, 0.5);
    Field mp = m;
    for (auto& x : mp.v) x = std::abs(x);
    Field mv = v;
    for (auto& x : mv.v) x = -x;
    const Screening a(0.9);
    CHECK(tfw_energy(v, mp, a) == doctest::Approx(tfw_energy(mv, mp, a)).epsilon(1e-15));

    // |v| invariance on a field bounded away from zero
    Field pos = random_smooth_field(g, 79, 3, 0.4);
    for (auto& x : pos.v) x += 1.0;
    Field neg = pos;
    for (auto& x : neg.v) x = -x;
    Field abs_neg = neg;
    for (auto& x : abs_neg.v) x = std::abs(x);
    CHECK(tfw_energy(abs_neg, mp, a) == tfw_energy(pos, mp, a));
}

TEST_CASE("energy directional derivative matches the Euler-Lagrange form") {
    const Grid g(4, 16);
    Field v = random_smooth_field(g, 41, 3, 0.3);
    for (auto& x : v.v) x += 1.2;  // positive
    Field m = random_smooth_field(g, 42, 3, 0.4);
    for (auto& x : m.v) x = std::abs(x) + 0.5;
    const Field delta = random_smooth_field(g, 43);
    const Screening a(0.6);
    const double h3 = std::pow(g.spacing(), 3);

    // g = -2 lap v + (10/3) v^{7/3} - 2 phi_v v
    const auto [phi, info] = green_apply(a, [&] {
        Field rho(g);
        for (std::size_t i = 0; i < rho.size(); ++i) rho.v[i] = m.v[i] - v.v[i] * v.v[i];
        return rho;
    }());
    const Field lap_v = laplacian(v);
    double directional = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        directional += (-2 * lap_v.v[i] +
                        (10.0 / 3.0) * std::pow(v.v[i], 7.0 / 3.0) -
                        2 * phi.v[i] * v.v[i]) *
                       delta.v[i];
    directional *= h3;

    auto energy_at = [&](double eps) {
        Field ve = v;
        for (std::size_t i = 0; i < ve.size(); ++i) ve.v[i] += eps * delta.v[i];
        return tfw_energy(ve, m, a);
    };
    // steps large enough that the O(eps^2) truncation dominates the FP
    // noise of the energy differences
    const double e1 = 1e-2, e2 = 5e-3;
    const double fd1 = (energy_at(e1) - energy_at(-e1)) / (2 * e1);
    const double fd2 = (energy_at(e2) - energy_at(-e2)) / (2 * e2);
    const double err1 = std::abs(fd1 - directional);
    const double err2 = std::abs(fd2 - directional);
    CHECK(err1 < 1e-3 * std::abs(directional));
    // central differences: halving the step quarters the error
    CHECK(err2 / err1 == doctest::Approx(0.25).epsilon(0.3));
}

TEST_CASE("el_residual closed forms") {
    const Grid g(8, 16);
    const Field zero(g);
    const auto r0 = el_residual(zero, zero, 0.0, Screening(0.5), zero);
    CHECK(r0.r_u == 0.0);
    CHECK(r0.r_phi == 0.0);

    NuclearConfig cfg;
    cfg.bump_radius = 1.2;
    cfg.sites = {{4.0, 4.0, 4.0}};
    const Field m = assemble_density(cfg, g);
    const auto rm = el_residual(zero, zero, 0.0, Screening(0.5), m);
    CHECK(rm.r_phi == doctest::Approx(4 * pi * kernels::max_abs(m.v)).epsilon(1e-12));

    // homogeneous exact solution
    const double mbar = 1.0;
    const Screening a(1.0);
    const auto hs = solve_homogeneous(mbar, a);
    const auto rh = el_residual(uniform_field(g, hs.u), uniform_field(g, hs.phi), hs.mu, a,
                                uniform_field(g, mbar));
    CHECK(rh.r_u_rel <= 1e-10);
    CHECK(rh.r_phi_rel <= 1e-10);
}

TEST_CASE("energy densities at homogeneous states") {
    const Grid g(8, 16);
    const double mbar = 1.0;
    const Screening a(1.0);
    const auto hs = solve_homogeneous(mbar, a);
    const Field u = uniform_field(g, hs.u);
    const Field phi = uniform_field(g, hs.phi);
    const Field m = uniform_field(g, mbar);

    const Field e1 = energy_density(u, phi, hs.mu, a, m, 1);
    const double expect =
        std::pow(hs.u, 10.0 / 3.0) + 0.5 * hs.phi * (mbar - hs.u * hs.u);
    CHECK(kernels::max_abs(e1.v) == doctest::Approx(expect).epsilon(1e-12));

    const Field e2 = energy_density(u, phi, hs.mu, a, m, 2);
    CHECK(field_integral(e1) == doctest::Approx(field_integral(e2)).epsilon(1e-12));

    const Field zero(g);
    CHECK(kernels::max_abs(energy_density(zero, zero, 0, a, zero, 1).v) == 0.0);
    CHECK(kernels::max_abs(energy_density(zero, zero, 0, a, zero, 2).v) == 0.0);
    CHECK_THROWS_AS(energy_density(u, phi, 0, a, m, 3), std::invalid_argument);
}

TEST_CASE("solovej margins") {
    CHECK(solovej_constant() ==
          doctest::Approx(6561.0 / 2000.0 * pi * pi).epsilon(1e-15));

    const Grid g(8, 16);
    const Field zero(g);
    const auto z = solovej_check(zero, zero, 0.0, Screening(1.0));
    CHECK(z.min_margin == doctest::Approx(solovej_constant() + 1.0).epsilon(1e-14));

    const auto hs = solve_homogeneous(1.0, Screening(1.0));
    const auto s = solovej_check(uniform_field(g, hs.u), uniform_field(g, hs.phi), hs.mu,
                                 Screening(1.0));
    const double analytic =
        (5.0 / 9.0) * std::pow(hs.u, 4.0 / 3.0) + solovej_constant() + 1.0;
    CHECK(s.min_margin == doctest::Approx(analytic).epsilon(1e-12));
    CHECK(s.min_margin > 30.0);
}

TEST_CASE("estimate_class_params") {
    const Grid g(8, 32);
    const double mbar = 0.7;
    const std::vector<double> Rs = {1.5, 2.0, 2.5, 3.0};

    const auto uni = estimate_class_params(uniform_field(g, mbar), Rs);
    CHECK(uni.omega0 == doctest::Approx(4.0 / 3.0 * pi * mbar).epsilon(0.05));
    // the intercept absorbs the shell quadrature wiggle of the smallest ball
    CHECK(std::abs(uni.omega1) < 0.05 * uni.omega0 * Rs[0] * Rs[0] * Rs[0]);
    CHECK(uni.M == doctest::Approx(mbar * std::sqrt(4.0 / 3.0 * pi)).epsilon(0.03));

    const auto zero = estimate_class_params(Field(g), Rs);
    CHECK(zero.omega0 == doctest::Approx(0.0));

    // single nucleus: every ball around the far corner is empty
    NuclearConfig cfg;
    cfg.bump_radius = 0.9;
    cfg.sites = {{4.0, 4.0, 4.0}};
    const auto single = estimate_class_params(assemble_density(cfg, g), Rs);
    CHECK(std::abs(single.omega0) < 1e-8);

    const std::vector<double> none;
    CHECK_THROWS_AS(estimate_class_params(Field(g), none), std::invalid_argument);
    const std::vector<double> too_big = {5.0};
    CHECK_THROWS_AS(estimate_class_params(Field(g), too_big), std::invalid_argument);
}

TEST_CASE("dealias filter is idempotent and mass preserving") {
    const Grid g(4, 16);
    const Field f = random_smooth_field(g, 50, 7);
    const Field f1 = dealias_23(f);
    const Field f2 = dealias_23(f1);
    CHECK(max_abs_diff(f1, f2) < 1e-13);
    CHECK(field_integral(f1) == doctest::Approx(field_integral(f)).epsilon(1e-13));
}

TEST_CASE("dealiased solve stays near the plain one") {
    const Grid g(8, 16);
    NuclearConfig cfg;
    cfg.bump_radius = 1.3;
    cfg.sites = {{4.0, 4.0, 4.0}};
    const Field m = assemble_density(cfg, g);
    SolverOptions opts;
    opts.dealias = true;
    const GroundState da = solve_ground(m, Screening(0.8), opts);
    const GroundState plain = solve_ground(m, Screening(0.8));
    CHECK(da.converged);
    // the 2/3 filter only moves the fractional-power aliasing tail
    CHECK(max_abs_diff(da.u, plain.u) < 1e-3 * kernels::max_abs(plain.u.v));
}

TEST_CASE("grids that cannot carry the bump are rejected") {
    NuclearConfig cfg;
    cfg.bump_radius = 0.3;
    cfg.sites = {{4.0, 4.0, 4.0}};
    CHECK_THROWS_AS(assemble_density(cfg, Grid(8, 16)), std::invalid_argument);
}
