#include "tfw/interaction.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfw/fft.hpp"
#include "tfw/kernels.hpp"

namespace tfw {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

Screening::Screening(double a_) : a(a_) {
    if (!(a >= 0.0) || !std::isfinite(a))
        throw std::invalid_argument("Screening: a must be finite and >= 0");
}

double yukawa_real(Screening a, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("yukawa_real: r must be positive");
    return std::exp(-a.a * r) / r;
}

double kernel_multiplier(Screening a, double k_squared) {
    if (k_squared < 0.0) throw std::invalid_argument("kernel_multiplier: k^2 < 0");
    if (a.coulomb() && k_squared == 0.0)
        throw std::domain_error(
            "kernel_multiplier: Coulomb zero mode must be handled by caller");
    return four_pi / (a.a * a.a + k_squared);
}

std::pair<Field, ZeroModeInfo> green_apply(Screening a, const Field& rho) {
    const auto& ws = workspace(rho.grid);
    Spectrum s = ws.forward(rho);
    ZeroModeInfo info;
    info.rho_mean = s.c[0].real();
    const double a2 = a.a * a.a;
    apply_multiplier(s, [a2](double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (a2 == 0.0 && k2 == 0.0) return 0.0;
        return four_pi / (a2 + k2);
    });
    if (a.coulomb()) {
        s.c[0] = 0.0;
        info.projected = true;
    }
    return {ws.inverse(s), info};
}

double d_pair(Screening a, const Field& f, const Field& g) {
    require_same_grid(f, g, "d_pair");
    const auto [phi, info] = green_apply(a, f);
    const double h = f.grid.spacing();
    return h * h * h * kernels::dot(phi.v, g.v);
}

} // namespace tfw
