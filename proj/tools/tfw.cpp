// Command-line driver: solve / sweep-a / forces / truncate / perturb / check.
// Each subcommand reads a key/value config, writes report.json plus CSV
// tables into --out, and optionally dumps fields in TFWFIELD v1.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "tfw/config.hpp"
#include "tfw/experiments.hpp"
#include "tfw/field_ops.hpp"
#include "tfw/kernels.hpp"

using nlohmann::json;
using namespace tfw;

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    bool dump_fields = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key/value config file")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_flag("--dump-fields", args.dump_fields, "write TFWFIELD v1 dumps");
}

Field density_of(const RunConfig& cfg, const Grid& g) {
    if (cfg.uniform()) return uniform_field(g, cfg.uniform_m);
    return assemble_density(cfg.nuclei(), g);
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream os(p);
    os << j.dump(2) << "\n";
}

void write_solver_log(const fs::path& p, const GroundState& gs) {
    std::ofstream os(p);
    os << "iter,energy,r_u,r_phi\n";
    os.precision(16);
    for (const auto& r : gs.log)
        os << r.iter << "," << r.energy << "," << r.r_u << "," << r.r_phi << "\n";
}

json state_summary(const GroundState& gs, const Field& m) {
    const SolovejCheck sc = solovej_check(gs.u, gs.phi, gs.mu, gs.a);
    Field u2(gs.u.grid);
    kernels::mul(gs.u.v, gs.u.v, u2.v);
    return {{"a", gs.a.a},
            {"converged", gs.converged},
            {"iterations", gs.iterations},
            {"energy", gs.energy},
            {"mu", gs.mu},
            {"r_u", gs.r_u},
            {"r_phi", gs.r_phi},
            {"min_u", kernels::min(gs.u.v)},
            {"solovej_margin", sc.min_margin},
            {"neutrality_defect", field_mean(m) - field_mean(u2)}};
}

json fit_json(const PowerFit& f) {
    return {{"slope", f.slope},
            {"prefactor", f.prefactor},
            {"r_squared", f.r_squared},
            {"points", f.n_used}};
}

json fit_json(const DecayFit& f) {
    return {{"gamma", f.gamma},
            {"intercept", f.intercept},
            {"r_squared", f.r_squared},
            {"points", f.n_used},
            {"valid", f.valid}};
}

void dump(const fs::path& dir, const std::string& name, const Field& f) {
    write_field((dir / name).string(), f);
}

int cmd_solve(const CommonArgs& args) {
    const RunConfig cfg = parse_config_file(args.config_path);
    const Grid g = cfg.grid();
    const Field m = density_of(cfg, g);
    const GroundState gs = solve_ground(m, Screening(cfg.a), cfg.solver_options());

    fs::create_directories(args.out_dir);
    write_solver_log(fs::path(args.out_dir) / "solver_log.csv", gs);
    json rep = {{"command", "solve"}, {"state", state_summary(gs, m)}};
    write_json(fs::path(args.out_dir) / "report.json", rep);
    if (args.dump_fields || cfg.dump_fields) {
        dump(args.out_dir, "m.field", m);
        dump(args.out_dir, "u.field", gs.u);
        dump(args.out_dir, "phi.field", gs.phi);
        dump(args.out_dir, "energy_density_1.field",
             energy_density(gs.u, gs.phi, gs.mu, gs.a, m, 1));
        dump(args.out_dir, "energy_density_2.field",
             energy_density(gs.u, gs.phi, gs.mu, gs.a, m, 2));
    }
    std::cout << (gs.converged ? "converged" : "NOT converged") << " in "
              << gs.iterations << " iterations, energy " << gs.energy << "\n";
    return gs.converged ? 0 : 1;
}

int cmd_sweep(const CommonArgs& args) {
    const RunConfig cfg = parse_config_file(args.config_path);
    const Grid g = cfg.grid();
    if (cfg.a_list.empty()) throw std::runtime_error("sweep-a: config needs a_list");

    SweepReport rep;
    if (cfg.uniform()) {
        rep = run_convergence_sweep(uniform_field(g, cfg.uniform_m), cfg.a_list,
                                    cfg.solver_options());
    } else {
        rep = run_convergence_sweep(cfg.nuclei(), g, cfg.a_list, cfg.solver_options(),
                                    cfg.force_site, cfg.force_fit_max_a);
    }

    fs::create_directories(args.out_dir);
    {
        std::ofstream os(fs::path(args.out_dir) / "sweep.csv");
        os << "a,wkinf_u,wkinf_phi,force_diff,defect,min_u,solovej_margin,energy,"
              "iterations\n";
        os.precision(16);
        for (const auto& e : rep.entries)
            os << e.a << "," << e.wkinf_u << "," << e.wkinf_phi << "," << e.force_diff
               << "," << e.defect << "," << e.min_u << "," << e.solovej_margin << ","
               << e.energy << "," << e.iterations << "\n";
    }
    json j = {{"command", "sweep-a"},
              {"mu0", rep.mu0},
              {"min_u0", rep.min_u0},
              {"pairwise_ratio", rep.pairwise_ratio},
              {"excluded_a", rep.excluded_a},
              {"fit_floor", rep.fit_floor},
              {"force_fit_max_a", rep.force_fit_max_a},
              {"e1e2_total_rel", rep.e1e2_total_rel},
              {"energy_logs_monotone", rep.energy_logs_monotone},
              {"class_params",
               {{"M", rep.class_params.M},
                {"omega0", rep.class_params.omega0},
                {"omega1", rep.class_params.omega1}}}};
    if (rep.u_fit) j["u_fit"] = fit_json(*rep.u_fit);
    if (rep.phi_fit) j["phi_fit"] = fit_json(*rep.phi_fit);
    if (rep.force_fit) j["force_fit"] = fit_json(*rep.force_fit);
    write_json(fs::path(args.out_dir) / "report.json", j);
    std::cout << "sweep done; slope_u "
              << (rep.u_fit ? std::to_string(rep.u_fit->slope) : "n/a") << "\n";
    return 0;
}

int cmd_forces(const CommonArgs& args) {
    const RunConfig cfg = parse_config_file(args.config_path);
    const Grid g = cfg.grid();
    if (cfg.uniform()) throw std::runtime_error("forces: needs nuclei");
    const NuclearConfig nuc = cfg.nuclei();
    const Field m = assemble_density(nuc, g);
    const SolverOptions opts = cfg.solver_options();
    const GroundState gs = solve_ground(m, Screening(cfg.a), opts);
    if (!gs.converged) throw std::runtime_error("forces: ground state did not converge");

    fs::create_directories(args.out_dir);
    std::ofstream os(fs::path(args.out_dir) / "forces.csv");
    os << "site,method,a,Fx,Fy,Fz\n";
    os.precision(16);
    auto emit = [&](const Force& F) {
        os << F.site << "," << F.method << "," << F.a << "," << F.f[0] << "," << F.f[1]
           << "," << F.f[2] << "\n";
    };

    json j = {{"command", "forces"}, {"state", state_summary(gs, m)}};
    for (std::size_t k = 0; k < nuc.sites.size(); ++k)
        emit(force_hf(gs, nuc, static_cast<int>(k)));

    // validation block on the configured site: routes + finite differences
    const int k = cfg.site;
    Force e1{k, {0, 0, 0}, "E1-route", cfg.a};
    Force e2{k, {0, 0, 0}, "E2-route", cfg.a};
    for (int d = 0; d < 3; ++d) {
        Point V{0, 0, 0};
        V[d] = 1.0;
        SolverOptions lopts = opts;
        lopts.tol = std::min(opts.tol, 1e-11);
        const LinearResponse lr =
            solve_linearized(gs, displacement_density(nuc, g, k, V), lopts);
        const RouteForces rf = force_density_routes(gs, m, lr);
        e1.f[d] = rf.e1;
        e2.f[d] = rf.e2;
    }
    emit(e1);
    emit(e2);

    SolverOptions warm = opts;
    warm.warm_start = &gs;
    const double step = cfg.fd_step > 0 ? cfg.fd_step : default_fd_step(g);
    const Force fd = force_fd(nuc, g, gs.a, k, step, warm);
    emit(fd);

    const Force fh = force_hf(gs, nuc, k);
    double scale = 0.0, gap_routes = 0.0, gap_fd = 0.0;
    for (int d = 0; d < 3; ++d) {
        scale = std::max(scale, std::abs(fh.f[d]));
        gap_routes = std::max(gap_routes, std::abs(e1.f[d] - fh.f[d]));
        gap_fd = std::max(gap_fd, std::abs(fd.f[d] - fh.f[d]));
    }
    j["validation"] = {{"site", k},
                       {"fd_step", step},
                       {"route_vs_hf", gap_routes},
                       {"fd_vs_hf", gap_fd},
                       {"force_scale", scale}};
    write_json(fs::path(args.out_dir) / "report.json", j);
    std::cout << "forces written; route gap " << gap_routes << ", fd gap " << gap_fd
              << "\n";
    return 0;
}

int cmd_truncate(const CommonArgs& args) {
    const RunConfig cfg = parse_config_file(args.config_path);
    const Grid g = cfg.grid();
    if (cfg.uniform()) throw std::runtime_error("truncate: needs nuclei");
    if (cfg.halfwidths.empty()) throw std::runtime_error("truncate: config needs halfwidths");
    const TruncationStudy st = run_truncation_study(
        cfg.nuclei(), g, cfg.halfwidths, cfg.a, cfg.solver_options(), cfg.shell_width);

    fs::create_directories(args.out_dir);
    {
        std::ofstream os(fs::path(args.out_dir) / "decay.csv");
        os << "halfwidth,distance,value\n";
        os.precision(16);
        for (const auto& p : st.profiles)
            for (std::size_t i = 0; i < p.shell_distance.size(); ++i)
                os << p.halfwidth << "," << p.shell_distance[i] << ","
                   << p.shell_value[i] << "\n";
    }
    json profiles = json::array();
    for (const auto& p : st.profiles)
        profiles.push_back({{"halfwidth", p.halfwidth},
                            {"fit", fit_json(p.fit)},
                            {"below_floor", p.below_floor},
                            {"iterations", p.iterations},
                            {"solovej_margin", p.solovej_margin}});
    write_json(fs::path(args.out_dir) / "report.json",
               {{"command", "truncate"},
                {"a", st.a},
                {"shell_width", st.shell_width},
                {"fit_floor", st.fit_floor},
                {"primary_fit", fit_json(st.primary)},
                {"profiles", profiles},
                {"energy_logs_monotone", st.energy_logs_monotone}});
    std::cout << "truncation study done; gamma " << st.primary.gamma << " (R2 "
              << st.primary.r_squared << ")\n";
    return 0;
}

int cmd_perturb(const CommonArgs& args) {
    const RunConfig cfg = parse_config_file(args.config_path);
    const Grid g = cfg.grid();
    if (cfg.uniform()) throw std::runtime_error("perturb: needs nuclei");
    const PerturbationReport rep = run_perturbation_study(
        cfg.nuclei(), g, cfg.site, cfg.displacement, cfg.a, cfg.solver_options(),
        cfg.shell_width);

    fs::create_directories(args.out_dir);
    {
        std::ofstream os(fs::path(args.out_dir) / "envelope.csv");
        os << "distance,value\n";
        os.precision(16);
        for (std::size_t i = 0; i < rep.shell_distance.size(); ++i)
            os << rep.shell_distance[i] << "," << rep.shell_value[i] << "\n";
    }
    {
        std::ofstream os(fs::path(args.out_dir) / "neutrality.csv");
        os << "R,integral\n";
        os.precision(16);
        for (std::size_t i = 0; i < rep.neutrality_R.size(); ++i)
            os << rep.neutrality_R[i] << "," << rep.neutrality_value[i] << "\n";
    }
    write_json(fs::path(args.out_dir) / "report.json",
               {{"command", "perturb"},
                {"site", cfg.site},
                {"displacement", cfg.displacement},
                {"a", cfg.a},
                {"support_radius", rep.support_radius},
                {"decay_fit", fit_json(rep.decay)},
                {"neutrality_decreasing", rep.neutrality_decreasing},
                {"neutrality_below_floor", rep.neutrality_below_floor},
                {"solovej_margins", {rep.solovej_margin_1, rep.solovej_margin_2}},
                {"min_u", {rep.min_u_1, rep.min_u_2}},
                {"energy_logs_monotone", rep.energy_logs_monotone}});
    if (args.dump_fields || cfg.dump_fields) {
        dump(args.out_dir, "w.field", rep.w);
        dump(args.out_dir, "psi.field", rep.psi);
        dump(args.out_dir, "r_m.field", rep.r_m);
    }
    std::cout << "perturbation study done; gamma " << rep.decay.gamma << " (R2 "
              << rep.decay.r_squared << ")\n";
    return 0;
}

int cmd_check(const CommonArgs& args) {
    const RunConfig cfg = parse_config_file(args.config_path);
    const Grid g = cfg.grid();
    const Field m = density_of(cfg, g);
    const GroundState gs = solve_ground(m, Screening(cfg.a), cfg.solver_options());

    const CheckReport infra = run_infra_checks();
    InvariantOptions iopts;
    iopts.tol = cfg.tol;
    const CheckReport inv = invariant_suite(gs, m, iopts);

    json checks = json::array();
    bool all = true;
    for (const auto* rep : {&infra, &inv}) {
        for (const auto& e : rep->entries) {
            std::cout << (e.pass ? "[PASS] " : "[FAIL] ") << e.name << " value "
                      << e.value << " threshold " << e.threshold << "\n";
            checks.push_back({{"name", e.name},
                              {"pass", e.pass},
                              {"value", e.value},
                              {"threshold", e.threshold}});
            all = all && e.pass;
        }
    }
    json j = {{"command", "check"},
              {"state", state_summary(gs, m)},
              {"all_pass", all},
              {"checks", checks}};
    {
        // condensation diagnostic on the requested (or a default) R ladder
        std::vector<double> Rs = cfg.r_list;
        if (Rs.empty()) Rs = {cfg.L / 4, 5 * cfg.L / 16, 3 * cfg.L / 8, cfg.L / 2};
        const ClassParams cp = estimate_class_params(m, Rs);
        j["class_params"] = {{"M", cp.M}, {"omega0", cp.omega0}, {"omega1", cp.omega1}};
    }
    fs::create_directories(args.out_dir);
    write_json(fs::path(args.out_dir) / "report.json", j);
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TFW Yukawa/Coulomb ground-state laboratory"};
    app.require_subcommand(1);

    CommonArgs solve_args, sweep_args, forces_args, trunc_args, perturb_args, check_args;
    add_common(app.add_subcommand("solve", "solve one ground state"), solve_args);
    add_common(app.add_subcommand("sweep-a", "a-ladder convergence sweep"), sweep_args);
    add_common(app.add_subcommand("forces", "Hellmann-Feynman / route / FD forces"),
               forces_args);
    add_common(app.add_subcommand("truncate", "thermodynamic-limit truncation study"),
               trunc_args);
    add_common(app.add_subcommand("perturb", "single-site perturbation study"),
               perturb_args);
    add_common(app.add_subcommand("check", "invariant suite on one solve"), check_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("solve")) return cmd_solve(solve_args);
        if (app.got_subcommand("sweep-a")) return cmd_sweep(sweep_args);
        if (app.got_subcommand("forces")) return cmd_forces(forces_args);
        if (app.got_subcommand("truncate")) return cmd_truncate(trunc_args);
        if (app.got_subcommand("perturb")) return cmd_perturb(perturb_args);
        if (app.got_subcommand("check")) return cmd_check(check_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
