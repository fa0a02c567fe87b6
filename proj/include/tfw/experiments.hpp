#ifndef TFW_EXPERIMENTS_HPP
#define TFW_EXPERIMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "tfw/fitting.hpp"
#include "tfw/nuclei.hpp"
#include "tfw/response.hpp"
#include "tfw/solver.hpp"

namespace tfw {

struct SweepEntry {
    double a = 0.0;
    double wkinf_u = 0.0;     // W^{2,inf} distance to the Coulomb state
    double wkinf_phi = 0.0;   // same for the potential (zero modes included)
    double force_diff = -1.0; // |F_HF(a) - F_HF(0)| on the tracked site, -1 if unset
    double defect = 0.0;      // mean(m - u_a^2)
    double min_u = 0.0;
    double solovej_margin = 0.0;
    double energy = 0.0;
    int iterations = 0;
};

struct SweepReport {
    std::vector<SweepEntry> entries;  // one per a > 0, sweep order
    double mu0 = 0.0;
    double min_u0 = 0.0;
    double solovej_margin0 = 0.0;
    std::optional<PowerFit> u_fit, phi_fit, force_fit;
    std::vector<double> excluded_a;      // metrics below the fit floor
    std::vector<double> pairwise_ratio;  // ||u_a1 - u_a2||_inf / (a2^2 - a1^2)
    double force_fit_max_a = 0.0;
    double fit_floor = 0.0;
    double e1e2_total_rel = 0.0;  // E1/E2 total identity at the smallest a > 0
    ClassParams class_params;
    bool energy_logs_monotone = true;  // across every solve in the sweep
};

/** Continuation sweep down the a ladder (trailing 0 required) with
 *  W^{2,inf} metrics against the Coulomb state, pairwise two-parameter
 *  ratios, and log-log rate fits. The config form also tracks the
 *  Hellmann-Feynman force on force_site; force entries with
 *  a > force_fit_max_a are kept in the report but left out of the rate
 *  fit. Requires a condensed configuration (omega0 > 0). */
SweepReport run_convergence_sweep(const NuclearConfig& cfg, const Grid& grid,
                                  std::span<const double> a_list,
                                  const SolverOptions& opts, int force_site = 0,
                                  double force_fit_max_a = 1e30);

/** Density-level variant (no force metrics); used for the uniform medium. */
SweepReport run_convergence_sweep(const Field& m, std::span<const double> a_list,
                                  const SolverOptions& opts);

struct OmegaProfile {
    double halfwidth = 0.0;
    std::vector<double> shell_distance;
    std::vector<double> shell_value;
    DecayFit fit;          // over [argmax shell, W - 2*shell_width], above floor
    int iterations = 0;
    bool below_floor = false;  // whole profile under the fit floor (m_Omega = m)
    double solovej_margin = 0.0;
};

struct TruncationStudy {
    double a = 0.0;
    double shell_width = 0.0;
    double fit_floor = 0.0;
    std::vector<OmegaProfile> profiles;
    DecayFit primary;  // fit of the first halfwidth
    int full_iterations = 0;
    double full_solovej_margin = 0.0;
    bool energy_logs_monotone = true;
};

/** Truncation / thermodynamic-limit study: solves the full crystal and,
 *  for each centered sub-box of the given halfwidth, the truncated
 *  density m.chi_Omega; records shell maxima of
 *  sum_{|alpha|<=2} |d^alpha (u - u_Omega)| against distance to the
 *  sub-box boundary and fits each profile exponentially. Yukawa only. */
TruncationStudy run_truncation_study(const NuclearConfig& cfg, const Grid& grid,
                                     std::span<const double> halfwidths, double a,
                                     const SolverOptions& opts,
                                     double shell_width = 0.0);

struct PerturbationReport {
    Field w;    // u_1 - u_2
    Field psi;  // (phi_1 + mu_1) - (phi_2 + mu_2)
    Field r_m;  // 4 pi (m_1 - m_2)
    std::vector<double> shell_distance;
    std::vector<double> shell_value;  // sum |d^alpha w| + |psi|, shell maxima
    DecayFit decay;                   // beyond the perturbation support
    std::vector<double> neutrality_R;
    std::vector<double> neutrality_value;  // int_{B_R} rho_12 (signed)
    bool neutrality_decreasing = false;
    bool neutrality_below_floor = false;
    double support_radius = 0.0;
    double fit_floor = 0.0;
    int iterations_1 = 0, iterations_2 = 0;
    double solovej_margin_1 = 0.0, solovej_margin_2 = 0.0;
    double min_u_1 = 0.0, min_u_2 = 0.0;
    bool energy_logs_monotone = true;
};

/** Response to displacing one site by delta: w, psi fields, exponential
 *  envelope fit versus distance from the original site, and the
 *  screened-charge neutrality profile. */
PerturbationReport run_perturbation_study(const NuclearConfig& cfg, const Grid& grid,
                                          int site, const Point& delta, double a,
                                          const SolverOptions& opts,
                                          double shell_width = 0.0);

struct CheckEntry {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
};

struct CheckReport {
    std::vector<CheckEntry> entries;
    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

struct InvariantOptions {
    double tol = 1e-10;              // residual/neutrality gate
    double e1e2_tol = 1e-9;
    double solovej_tol = 1e-6;
    int dpair_pairs = 100;
    unsigned seed = 12345;
};

/** Pass/fail margins for the runtime invariants of a converged state:
 *  Green identity, D_a symmetry/positivity on seeded smooth fields,
 *  monotone energy log, E1/E2 totals, Solovej bound, positivity,
 *  neutrality (a = 0) or the potential zero-mode identity (a > 0), and
 *  the final residuals. */
CheckReport invariant_suite(const GroundState& gs, const Field& m,
                            const InvariantOptions& opts = {});

/** Grid-free infrastructure identities (radial Yukawa quadrature against
 *  the closed form, kernel monotonicity and Coulomb limit, the Solovej
 *  constant). */
CheckReport run_infra_checks();

Field uniform_field(const Grid& grid, double value);

/** Deterministic smooth random field (low Fourier modes), used by
 *  property checks. */
Field random_smooth_field(const Grid& grid, unsigned seed, int max_mode = 4,
                          double amplitude = 1.0);

} // namespace tfw

#endif
