#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tfw/config.hpp"
#include "tfw/experiments.hpp"
#include "tfw/field_ops.hpp"
#include "tfw/kernels.hpp"
#include "test_util.hpp"

using namespace tfw;
using namespace tfw::test;

TEST_CASE("fit_power_law") {
    SUBCASE("exact quadratic") {
        std::vector<double> xs = {0.1, 0.2, 0.4, 0.8};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(3 * x * x);
        const PowerFit f = fit_power_law(xs, ys);
        CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("constant data has zero slope") {
        std::vector<double> xs = {0.1, 0.2, 0.4};
        std::vector<double> ys = {0.7, 0.7, 0.7};
        const PowerFit f = fit_power_law(xs, ys);
        CHECK(std::abs(f.slope) < 1e-13);
    }
    SUBCASE("mild cubic contamination stays near 2") {
        std::vector<double> xs, ys;
        for (double x = 0.05; x <= 0.8; x *= 2) {
            xs.push_back(x);
            ys.push_back(x * x + 0.001 * x * x * x);
        }
        const PowerFit f = fit_power_law(xs, ys);
        CHECK(f.slope > 1.9);
        CHECK(f.slope < 2.1);
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2},
                                      std::vector<double>{1, 2}),
                        std::invalid_argument);
        CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3},
                                      std::vector<double>{1, -2, 3}),
                        std::invalid_argument);
    }
}

TEST_CASE("fit_exponential") {
    std::vector<double> ds = {0.5, 1.0, 1.5, 2.0, 2.5};
    SUBCASE("exact decay") {
        std::vector<double> vs;
        for (double d : ds) vs.push_back(std::exp(-2 * d));
        const DecayFit f = fit_exponential(ds, vs);
        CHECK(f.gamma == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("prefactor lands in the intercept") {
        std::vector<double> vs;
        for (double d : ds) vs.push_back(5 * std::exp(-d));
        const DecayFit f = fit_exponential(ds, vs);
        CHECK(f.gamma == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    }
    SUBCASE("synthetic noise moves gamma by less than 15 percent") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> noise(-0.1, 0.1);
        std::vector<double> dd, vv;
        for (double d = 0.2; d <= 3.0; d += 0.2) {
            dd.push_back(d);
            vv.push_back(std::exp(-1.7 * d) * (1.0 + noise(rng)));
        }
        const DecayFit f = fit_exponential(dd, vv);
        CHECK(std::abs(f.gamma - 1.7) < 0.15 * 1.7);
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(fit_exponential(std::vector<double>{1, 2},
                                        std::vector<double>{1, 1}),
                        std::invalid_argument);
        CHECK_THROWS_AS(fit_exponential(std::vector<double>{1, 2, 3},
                                        std::vector<double>{1, 0, 1}),
                        std::invalid_argument);
    }
}

TEST_CASE("uniform-medium sweep reproduces the scalar expansion") {
    const Grid g(8, 16);
    const Field m = uniform_field(g, 1.0);
    const std::vector<double> ladder = {0.4, 0.2, 0.1, 0.0};
    const SweepReport rep = run_convergence_sweep(m, ladder, SolverOptions{});

    REQUIRE(rep.entries.size() == 3);
    for (const auto& e : rep.entries) {
        const auto hs = solve_homogeneous(1.0, Screening(e.a));
        // uniform fields: the W^{2,inf} metric is the plain value gap
        CHECK(e.wkinf_u == doctest::Approx(std::abs(hs.u - 1.0)).epsilon(1e-6));
    }
    REQUIRE(rep.u_fit.has_value());
    CHECK(rep.u_fit->slope == doctest::Approx(2.0).epsilon(0.03));

    // prefactor of |u_a - u_0| approaches (5/24pi) mbar^{1/6}
    const double coeff = rep.entries.back().wkinf_u / (0.1 * 0.1);
    CHECK(coeff == doctest::Approx(5.0 / (24 * pi)).epsilon(0.05));
    // neutrality defect coefficient approaches (5/12pi) mbar^{2/3}
    const double dcoeff = rep.entries.back().defect / (0.1 * 0.1);
    CHECK(dcoeff == doctest::Approx(5.0 / (12 * pi)).epsilon(0.05));

    CHECK(rep.energy_logs_monotone);
    CHECK(rep.mu0 == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("sweep input validation") {
    const Grid g(8, 16);
    const Field m = uniform_field(g, 1.0);
    SUBCASE("must end at zero") {
        const std::vector<double> bad = {0.4, 0.2};
        CHECK_THROWS_AS(run_convergence_sweep(m, bad, SolverOptions{}),
                        std::invalid_argument);
    }
    SUBCASE("degenerate two-point ladder produces no fit") {
        const std::vector<double> two = {0.5, 0.0};
        const SweepReport rep = run_convergence_sweep(m, two, SolverOptions{});
        CHECK(rep.entries.size() == 1);
        CHECK_FALSE(rep.u_fit.has_value());
        CHECK(rep.pairwise_ratio.empty());
    }
    SUBCASE("non-condensed configurations are rejected") {
        NuclearConfig cfg;
        cfg.bump_radius = 0.9;
        cfg.sites = {{4.0, 4.0, 4.0}};
        const std::vector<double> ladder = {0.4, 0.2, 0.0};
        CHECK_THROWS_AS(
            run_convergence_sweep(cfg, g, ladder, SolverOptions{}),
            std::invalid_argument);
    }
}

TEST_CASE("truncation study plumbing") {
    const Grid g(8, 16);
    NuclearConfig cfg;
    cfg.bump_radius = 1.3;
    cfg.sites = {{4.0, 4.0, 4.0}};

    SUBCASE("whole-box window is the trivial case") {
        const std::vector<double> ws = {4.0};
        const TruncationStudy st = run_truncation_study(cfg, g, ws, 0.5, SolverOptions{});
        REQUIRE(st.profiles.size() == 1);
        CHECK(st.profiles[0].below_floor);
        CHECK_FALSE(st.primary.valid);
        CHECK(st.energy_logs_monotone);
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(run_truncation_study(cfg, g, std::vector<double>{5.0}, 0.5,
                                             SolverOptions{}),
                        std::invalid_argument);
        CHECK_THROWS_AS(run_truncation_study(cfg, g, std::vector<double>{2.0}, 0.0,
                                             SolverOptions{}),
                        std::invalid_argument);
    }
}

TEST_CASE("perturbation study with zero displacement is identically quiet") {
    const Grid g(8, 16);
    NuclearConfig cfg;
    cfg.bump_radius = 1.3;
    cfg.sites = {{4.0, 4.0, 4.0}};
    const PerturbationReport rep =
        run_perturbation_study(cfg, g, 0, {0.0, 0.0, 0.0}, 0.5, SolverOptions{});
    CHECK(kernels::max_abs(rep.w.v) < 1e-9);
    CHECK(kernels::max_abs(rep.psi.v) < 1e-9);
    CHECK(kernels::max_abs(rep.r_m.v) == 0.0);
    CHECK_FALSE(rep.decay.valid);
    CHECK(rep.neutrality_below_floor);
    CHECK(rep.neutrality_decreasing);
}

TEST_CASE("invariant suite on a homogeneous state, and fault injection") {
    const Grid g(8, 16);
    const Field m = uniform_field(g, 1.0);
    const GroundState gs = solve_ground(m, Screening(1.0));
    REQUIRE(gs.converged);

    InvariantOptions iopts;
    iopts.dpair_pairs = 10;
    const CheckReport rep = invariant_suite(gs, m, iopts);
    for (const auto& e : rep.entries) {
        INFO(e.name, " value=", e.value, " threshold=", e.threshold);
        CHECK(e.pass);
    }
    CHECK(rep.all_pass());

    GroundState broken = gs;
    broken.u.v[3] = -broken.u.v[3] - 0.5;
    const CheckReport bad = invariant_suite(broken, m, iopts);
    CHECK_FALSE(bad.all_pass());
    bool positivity_failed = false;
    for (const auto& e : bad.entries)
        if (e.name == "positivity_u" && !e.pass) positivity_failed = true;
    CHECK(positivity_failed);
}

TEST_CASE("infra identities") {
    const CheckReport rep = run_infra_checks();
    for (const auto& e : rep.entries) {
        INFO(e.name, " value=", e.value);
        CHECK(e.pass);
    }
}

TEST_CASE("random smooth fields are deterministic per seed") {
    const Grid g(4, 16);
    const Field a = random_smooth_field(g, 42);
    const Field b = random_smooth_field(g, 42);
    const Field c = random_smooth_field(g, 43);
    CHECK(a.v == b.v);
    CHECK(a.v != c.v);
}

TEST_CASE("config parsing") {
    std::istringstream in(
        "# reference-style config\n"
        "L = 8\n"
        "N 48\n"
        "R0 0.9\n"
        "nucleus 2.3 2 2\n"
        "nucleus 2 2 6 1.5\n"
        "a_list 0.8 0.4 0.2 0.1 0\n"
        "tol 1e-10\n"
        "max_iter 5000\n"
        "displacement 0.3 0 0\n"
        "halfwidths 2.2 2.6\n"
        "dump_fields true\n");
    const RunConfig cfg = parse_config(in);
    CHECK(cfg.L == 8.0);
    CHECK(cfg.N == 48);
    CHECK(cfg.sites.size() == 2);
    CHECK(cfg.weights.size() == 2);
    CHECK(cfg.weights[1] == 1.5);
    CHECK(cfg.a_list.size() == 5);
    CHECK(cfg.max_iter == 5000);
    CHECK(cfg.halfwidths == std::vector<double>{2.2, 2.6});
    CHECK(cfg.dump_fields);
    CHECK_FALSE(cfg.uniform());

    std::istringstream bad("unknown_key 3\n");
    CHECK_THROWS(parse_config(bad));
    std::istringstream badnuc("nucleus 1 2\n");
    CHECK_THROWS(parse_config(badnuc));
}
