#include "tfw/energy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfw/fft.hpp"
#include "tfw/field_ops.hpp"
#include "tfw/kernels.hpp"

namespace tfw {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

Field dealias_23(const Field& f) {
    const auto& ws = workspace(f.grid);
    Spectrum s = ws.forward(f);
    const int n = f.grid.points_per_axis;
    const double kcut = 2.0 * std::numbers::pi / f.grid.box_length * (n / 3.0);
    apply_multiplier(s, [kcut](double kx, double ky, double kz) {
        return (std::abs(kx) > kcut || std::abs(ky) > kcut || std::abs(kz) > kcut) ? 0.0
                                                                                   : 1.0;
    });
    return ws.inverse(s);
}

double tfw_energy(const Field& v, const Field& m, Screening a, bool dealias) {
    require_same_grid(v, m, "tfw_energy");
    const double h = v.grid.spacing();
    const double h3 = h * h * h;

    const auto grad = gradient(v);
    double kinetic = 0.0;
    for (const auto& gax : grad) kinetic += kernels::dot(gax.v, gax.v);
    kinetic *= h3;

    const Field* vp = &v;
    Field vf;
    if (dealias) {
        vf = dealias_23(v);
        vp = &vf;
    }
    Field pw(v.grid);
    kernels::abs_pow(vp->v, 10.0 / 3.0, pw.v);
    const double tf = h3 * kernels::sum(pw.v);

    Field rho(v.grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(rho.size()); ++i)
        rho.v[i] = m.v[i] - v.v[i] * v.v[i];
    return kinetic + tf + 0.5 * d_pair(a, rho, rho);
}

ElResidual el_residual(const Field& u, const Field& phi, double mu, Screening a,
                       const Field& m) {
    require_same_grid(u, phi, "el_residual");
    require_same_grid(u, m, "el_residual");
    const Field lap_u = laplacian(u);
    const Field lap_phi = laplacian(phi);
    const std::size_t n = u.size();
    const double a2 = a.a * a.a;

    Field ru(u.grid), rphi(u.grid), rhs(u.grid);
    double mean_rhs = 0.0;
    {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            rhs.v[i] = four_pi * (m.v[i] - u.v[i] * u.v[i]);
        if (a.coulomb()) mean_rhs = field_mean(rhs);
    }
    Field tf_term(u.grid), pot_term(u.grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        tf_term.v[i] = (5.0 / 3.0) * std::pow(std::abs(u.v[i]), 7.0 / 3.0);
        pot_term.v[i] = (phi.v[i] + mu) * u.v[i];
        ru.v[i] = -lap_u.v[i] + tf_term.v[i] - pot_term.v[i];
        rphi.v[i] = -lap_phi.v[i] + a2 * phi.v[i] - (rhs.v[i] - mean_rhs);
    }

    ElResidual out;
    out.r_u = kernels::max_abs(ru.v);
    out.r_phi = kernels::max_abs(rphi.v);
    const double scale_u =
        std::max(1.0, kernels::max_abs(tf_term.v) + kernels::max_abs(pot_term.v));
    const double scale_phi =
        std::max(1.0, kernels::max_abs(rhs.v) + a2 * kernels::max_abs(phi.v));
    out.r_u_rel = out.r_u / scale_u;
    out.r_phi_rel = out.r_phi / scale_phi;
    return out;
}

Field energy_density(const Field& u, const Field& phi, double mu, Screening a,
                     const Field& m, int which) {
    require_same_grid(u, phi, "energy_density");
    require_same_grid(u, m, "energy_density");
    if (which != 1 && which != 2)
        throw std::invalid_argument("energy_density: which must be 1 or 2");
    const auto gu = gradient(u);
    Field out(u.grid);
    const std::size_t n = u.size();
    if (which == 1) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            const double g2 = gu[0].v[i] * gu[0].v[i] + gu[1].v[i] * gu[1].v[i] +
                              gu[2].v[i] * gu[2].v[i];
            out.v[i] = g2 + std::pow(std::abs(u.v[i]), 10.0 / 3.0) +
                       0.5 * (phi.v[i] + mu) * (m.v[i] - u.v[i] * u.v[i]);
        }
    } else {
        const auto gp = gradient(phi);
        const double a2 = a.a * a.a;
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            const double g2 = gu[0].v[i] * gu[0].v[i] + gu[1].v[i] * gu[1].v[i] +
                              gu[2].v[i] * gu[2].v[i];
            const double gp2 = gp[0].v[i] * gp[0].v[i] + gp[1].v[i] * gp[1].v[i] +
                               gp[2].v[i] * gp[2].v[i];
            const double pot = phi.v[i] + mu;
            out.v[i] = g2 + std::pow(std::abs(u.v[i]), 10.0 / 3.0) +
                       (gp2 + a2 * pot * pot) / (8.0 * std::numbers::pi);
        }
    }
    return out;
}

double solovej_constant(double lambda) {
    return 2.25 * std::numbers::pi * std::numbers::pi / (lambda * lambda) /
           (5.0 / 3.0 - lambda);
}

double solovej_constant() { return solovej_constant(10.0 / 9.0); }

SolovejCheck solovej_check(const Field& u, const Field& phi, double mu, Screening a) {
    require_same_grid(u, phi, "solovej_check");
    SolovejCheck out;
    out.c_s = solovej_constant();
    out.margin = Field(u.grid);
    const double shift = out.c_s + a.a * a.a + mu;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(u.size()); ++i)
        out.margin.v[i] =
            phi.v[i] + shift - (10.0 / 9.0) * std::pow(std::abs(u.v[i]), 4.0 / 3.0);
    out.min_margin = kernels::min(out.margin.v);
    return out;
}

namespace {

// h^3-weighted periodic convolution of f with the radius-R ball indicator.
Field ball_convolution(const Field& f, double R) {
    const Grid& g = f.grid;
    Field chi(g);
    const int n = g.points_per_axis;
    const double R2 = R * R;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const double dx = g.min_image(g.coord(static_cast<int>(i)), 0.0);
        for (int j = 0; j < n; ++j) {
            const double dy = g.min_image(g.coord(j), 0.0);
            for (int l = 0; l < n; ++l) {
                const double dz = g.min_image(g.coord(l), 0.0);
                chi.v[g.index(static_cast<int>(i), j, l)] =
                    (dx * dx + dy * dy + dz * dz <= R2) ? 1.0 : 0.0;
            }
        }
    }
    const auto& ws = workspace(g);
    Spectrum sf = ws.forward(f);
    const Spectrum sc = ws.forward(chi);
    const double L3 = g.box_length * g.box_length * g.box_length;
    for (std::size_t i = 0; i < sf.c.size(); ++i) sf.c[i] *= L3 * sc.c[i];
    return ws.inverse(sf);
}

} // namespace

ClassParams estimate_class_params(const Field& m, std::span<const double> R_list) {
    if (R_list.empty())
        throw std::invalid_argument("estimate_class_params: empty R list");
    const double L = m.grid.box_length;
    for (double R : R_list)
        if (!(R > 0.0) || R > L / 2 + 1e-12)
            throw std::invalid_argument("estimate_class_params: R outside (0, L/2]");
    ClassParams out;

    // M: unit-ball L^2 mass (ball radius capped by the box for small boxes)
    Field m2(m.grid);
    kernels::mul(m.v, m.v, m2.v);
    const double r_unit = std::min(1.0, L / 2);
    Field conv = ball_convolution(m2, r_unit);
    double peak = 0.0;
    for (double x : conv.v) peak = std::max(peak, x);
    out.M = std::sqrt(std::max(0.0, peak));

    // least-squares fit of min_x int_{B_R(x)} m against omega0 R^3 - omega1
    double s_xx = 0, s_x = 0, s_xy = 0, s_y = 0;
    const double n = static_cast<double>(R_list.size());
    for (double R : R_list) {
        Field c = ball_convolution(m, R);
        const double b = kernels::min(c.v);
        const double x = R * R * R;
        s_xx += x * x;
        s_x += x;
        s_xy += x * b;
        s_y += b;
    }
    const double det = n * s_xx - s_x * s_x;
    if (std::abs(det) < 1e-30) {
        out.omega0 = 0.0;
        out.omega1 = -s_y / n;
    } else {
        out.omega0 = (n * s_xy - s_x * s_y) / det;
        out.omega1 = -(s_y * s_xx - s_x * s_xy) / det;
    }
    return out;
}

} // namespace tfw
