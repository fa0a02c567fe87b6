#include <doctest.h>

#include <cmath>

#include "tfw/field_ops.hpp"
#include "tfw/kernels.hpp"
#include "tfw/nuclei.hpp"
#include "tfw/solver.hpp"
#include "test_util.hpp"

using namespace tfw;
using namespace tfw::test;

TEST_CASE("solve_homogeneous oracle") {
    const auto c0 = solve_homogeneous(1.0, Screening(0.0));
    CHECK(c0.u == 1.0);
    CHECK(c0.phi == 0.0);
    CHECK(c0.mu == doctest::Approx(5.0 / 3.0).epsilon(1e-15));

    const auto z = solve_homogeneous(0.0, Screening(1.3));
    CHECK(z.u == 0.0);
    CHECK(z.mu == 0.0);

    const auto y = solve_homogeneous(1.0, Screening(1.0));
    CHECK(y.u == doctest::Approx(0.9372071383853456).epsilon(1e-10));
    CHECK(y.phi == doctest::Approx((5.0 / 3.0) * std::pow(y.u, 4.0 / 3.0)).epsilon(1e-10));
    // scalar equation residual
    CHECK(std::abs((5.0 / 3.0) * std::pow(y.u, 4.0 / 3.0) -
                   4 * pi * (1.0 - y.u * y.u)) < 1e-12);
    CHECK_THROWS_AS(solve_homogeneous(-1.0, Screening(1.0)), std::invalid_argument);
}

TEST_CASE("uniform medium: grid solve matches the scalar oracle") {
    const Grid g(8, 16);
    const Field m = uniform_field(g, 1.0);

    SUBCASE("yukawa") {
        const GroundState gs = solve_ground(m, Screening(1.0));
        const auto hs = solve_homogeneous(1.0, Screening(1.0));
        CHECK(gs.converged);
        CHECK(gs.mu == 0.0);
        double worst = 0.0;
        for (double x : gs.u.v) worst = std::max(worst, std::abs(x - hs.u));
        CHECK(worst < 1e-8);
        CHECK(field_mean(gs.phi) == doctest::Approx(hs.phi).epsilon(1e-8));
        CHECK(energy_log_monotone(gs));
    }
    SUBCASE("coulomb") {
        const GroundState gs = solve_ground(m, Screening(0.0));
        CHECK(gs.converged);
        double worst = 0.0;
        for (double x : gs.u.v) worst = std::max(worst, std::abs(x - 1.0));
        CHECK(worst < 1e-10);
        CHECK(gs.mu == doctest::Approx(5.0 / 3.0).epsilon(1e-10));
        // neutrality is exact on the constraint sphere
        Field u2(g);
        kernels::mul(gs.u.v, gs.u.v, u2.v);
        CHECK(std::abs(field_integral(m) - field_integral(u2)) < 1e-10 * field_integral(m));
    }
}

TEST_CASE("trivial and rejected inputs") {
    const Grid g(8, 16);
    const Field zero(g);
    const GroundState gs = solve_ground(zero, Screening(0.7));
    CHECK(gs.converged);
    CHECK(kernels::max_abs(gs.u.v) == 0.0);
    CHECK(kernels::max_abs(gs.phi.v) == 0.0);
    CHECK(gs.mu == 0.0);
    CHECK(gs.energy == 0.0);

    Field neg(g);
    neg.v[5] = -0.1;
    CHECK_THROWS_AS(solve_ground(neg, Screening(1.0)), std::invalid_argument);
}

TEST_CASE("single nucleus solve: monotone descent and positivity") {
    const Grid g(8, 16);
    NuclearConfig cfg;
    cfg.bump_radius = 1.3;
    cfg.sites = {{4.0, 4.0, 4.0}};
    const Field m = assemble_density(cfg, g);
    const GroundState gs = solve_ground(m, Screening(0.8));
    CHECK(gs.converged);
    CHECK(gs.r_u <= 1e-10);
    CHECK(kernels::min(gs.u.v) >= 0.0);
    CHECK(energy_log_monotone(gs));
    // descent log has both phases for a nontrivial solve
    CHECK(!gs.log.empty());
}

TEST_CASE("uniqueness proxy: random initializations land on the same state") {
    const Grid g(8, 16);
    SolverOptions o1;
    o1.init_perturb_seed = 1;
    o1.init_perturb_amplitude = 0.3;
    SolverOptions o2 = o1;
    o2.init_perturb_seed = 2;

    SUBCASE("uniform medium") {
        const Field m = uniform_field(g, 1.0);
        const GroundState g1 = solve_ground(m, Screening(0.8), o1);
        const GroundState g2 = solve_ground(m, Screening(0.8), o2);
        CHECK(g1.converged);
        CHECK(g2.converged);
        CHECK(max_abs_diff(g1.u, g2.u) <= 10 * o1.tol);
    }
    SUBCASE("two nuclei") {
        NuclearConfig cfg;
        cfg.bump_radius = 1.3;
        cfg.sites = {{3.0, 4.0, 4.0}, {5.0, 4.0, 4.0}};
        const Field m = assemble_density(cfg, g);
        const GroundState g1 = solve_ground(m, Screening(0.8), o1);
        const GroundState g2 = solve_ground(m, Screening(0.8), o2);
        CHECK(g1.converged);
        CHECK(g2.converged);
        CHECK(max_abs_diff(g1.u, g2.u) <= 10 * o1.tol);
    }
}

TEST_CASE("solves are bitwise deterministic") {
    const Grid g(8, 16);
    NuclearConfig cfg;
    cfg.bump_radius = 1.3;
    cfg.sites = {{3.9, 4.2, 4.0}};
    const Field m = assemble_density(cfg, g);
    const GroundState g1 = solve_ground(m, Screening(0.6));
    const GroundState g2 = solve_ground(m, Screening(0.6));
    CHECK(g1.u.v == g2.u.v);
    CHECK(g1.phi.v == g2.phi.v);
    CHECK(g1.energy == g2.energy);
}

TEST_CASE("warm start and sweeps") {
    const Grid g(8, 16);
    NuclearConfig cfg;
    cfg.bump_radius = 1.3;
    cfg.sites = {{3.0, 4.0, 4.0}, {5.0, 4.0, 4.0}};
    const Field m = assemble_density(cfg, g);

    SUBCASE("degenerate sweep equals a single solve bitwise") {
        const std::vector<double> just_one = {1.0};
        const auto states = continuation_sweep(m, just_one);
        const GroundState direct = solve_ground(m, Screening(1.0));
        REQUIRE(states.size() == 1);
        CHECK(states[0].u.v == direct.u.v);
        CHECK(states[0].energy == direct.energy);
    }
    SUBCASE("descending ladder, warm started, each state consistent") {
        const std::vector<double> ladder = {0.8, 0.4, 0.0};
        const auto states = continuation_sweep(m, ladder);
        REQUIRE(states.size() == 3);
        for (const auto& s : states) {
            CHECK(s.converged);
            CHECK(kernels::min(s.u.v) >= 0.0);
        }
        // coulomb endpoint is neutral
        Field u2(g);
        kernels::mul(states[2].u.v, states[2].u.v, u2.v);
        CHECK(std::abs(field_integral(m) - field_integral(u2)) <=
              1e-9 * field_integral(m));
    }
    SUBCASE("ordering is validated") {
        const std::vector<double> bad = {0.4, 0.8};
        CHECK_THROWS_AS(continuation_sweep(m, bad), std::invalid_argument);
    }
    SUBCASE("failures name the screening parameter") {
        SolverOptions tight;
        tight.max_iter = 2;
        const std::vector<double> ladder = {0.9};
        CHECK_THROWS_WITH_AS(continuation_sweep(m, ladder, tight),
                             doctest::Contains("a = 0.9"), std::runtime_error);
    }
}

TEST_CASE("uniform sweep tracks the scalar oracle at every rung") {
    const Grid g(8, 16);
    const Field m = uniform_field(g, 1.0);
    const std::vector<double> ladder = {0.8, 0.4, 0.2};
    const auto states = continuation_sweep(m, ladder);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto hs = solve_homogeneous(1.0, Screening(ladder[i]));
        double worst = 0.0;
        for (double x : states[i].u.v) worst = std::max(worst, std::abs(x - hs.u));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("non-convergence reports the best residual without throwing") {
    const Grid g(8, 16);
    NuclearConfig cfg;
    cfg.bump_radius = 1.3;
    cfg.sites = {{4.0, 4.0, 4.0}};
    const Field m = assemble_density(cfg, g);
    SolverOptions opts;
    opts.max_iter = 2;
    const GroundState gs = solve_ground(m, Screening(0.8), opts);
    CHECK_FALSE(gs.converged);
    CHECK(gs.r_u > 0.0);
    CHECK(gs.iterations == 2);
}

TEST_CASE("linearized operator is symmetric positive definite at a state") {
    const Grid g(8, 16);
    const Field m = uniform_field(g, 1.0);
    const GroundState gs = solve_ground(m, Screening(1.0));
    Field pot(g);
    for (std::size_t i = 0; i < pot.size(); ++i) pot.v[i] = gs.phi.v[i] + gs.mu;

    const Field x = random_smooth_field(g, 61);
    const Field y = random_smooth_field(g, 62);
    const Field Ax = apply_linearized(gs.u, pot, gs.a, x);
    const Field Ay = apply_linearized(gs.u, pot, gs.a, y);
    const double xAy = kernels::dot(x.v, Ay.v);
    const double yAx = kernels::dot(y.v, Ax.v);
    CHECK(rel_diff(xAy, yAx) < 1e-11);
    CHECK(kernels::dot(x.v, Ax.v) > 0.0);

    // CG solves A d = b down to the requested residual
    const CgResult cg = cg_linearized(gs.u, pot, gs.a, x, 1e-11, 400);
    CHECK(cg.converged);
    const Field Ad = apply_linearized(gs.u, pot, gs.a, cg.x);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(Ad.v[i] - x.v[i]));
    CHECK(worst < 1e-9 * kernels::max_abs(x.v));
}
