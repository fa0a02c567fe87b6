#ifndef TFW_FITTING_HPP
#define TFW_FITTING_HPP

#include <span>
#include <vector>

namespace tfw {

struct PowerFit {
    double slope = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    int n_used = 0;
};

/** Least squares on (log x, log y); requires >= 3 strictly positive points. */
PowerFit fit_power_law(std::span<const double> xs, std::span<const double> ys);

struct DecayFit {
    std::vector<double> distances;
    std::vector<double> values;
    double gamma = 0.0;      // fitted rate, v ~ e^{-gamma d}
    double intercept = 0.0;  // log prefactor
    double r_squared = 0.0;
    int n_used = 0;
    bool valid = false;
};

/** Least squares on (d, log v); gamma = -slope. Requires >= 3 positive values. */
DecayFit fit_exponential(std::span<const double> ds, std::span<const double> vs);

} // namespace tfw

#endif
