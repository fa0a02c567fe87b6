#include "tfw/fitting.hpp"

#include <cmath>
#include <stdexcept>

namespace tfw {

namespace {

struct LineFit {
    double slope, intercept, r_squared;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300)
        throw std::invalid_argument("least_squares: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy * sxx - sx * sxy) / det;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = f.slope * x[i] + f.intercept;
        ss_res += (y[i] - p) * (y[i] - p);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace

PowerFit fit_power_law(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    if (xs.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_power_law: data must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    const LineFit f = least_squares(lx, ly);
    PowerFit out;
    out.slope = f.slope;
    out.prefactor = std::exp(f.intercept);
    out.r_squared = f.r_squared;
    out.n_used = static_cast<int>(xs.size());
    return out;
}

DecayFit fit_exponential(std::span<const double> ds, std::span<const double> vs) {
    if (ds.size() != vs.size()) throw std::invalid_argument("fit_exponential: size mismatch");
    if (ds.size() < 3) throw std::invalid_argument("fit_exponential: need at least 3 points");
    std::vector<double> lv(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (!(vs[i] > 0.0))
            throw std::invalid_argument("fit_exponential: values must be positive");
        lv[i] = std::log(vs[i]);
    }
    const LineFit f = least_squares(ds, lv);
    DecayFit out;
    out.distances.assign(ds.begin(), ds.end());
    out.values.assign(vs.begin(), vs.end());
    out.gamma = -f.slope;
    out.intercept = f.intercept;
    out.r_squared = f.r_squared;
    out.n_used = static_cast<int>(ds.size());
    out.valid = true;
    return out;
}

} // namespace tfw
