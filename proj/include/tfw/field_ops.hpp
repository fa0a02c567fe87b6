#ifndef TFW_FIELD_OPS_HPP
#define TFW_FIELD_OPS_HPP

#include <array>
#include <iosfwd>
#include <string>

#include "tfw/fft.hpp"
#include "tfw/grid.hpp"

namespace tfw {

/** d^alpha f by Fourier multipliers; exact on trigonometric polynomials
 *  resolved by the grid. Odd-order factors vanish on the Nyquist plane. */
Field spectral_derivative(const Field& f, const MultiIndex& alpha);

/** In-place derivative multiplier on a spectrum. */
void apply_derivative(Spectrum& s, const MultiIndex& alpha);

Field laplacian(const Field& f);
std::array<Field, 3> gradient(const Field& f);

/** max over grid points and |alpha| <= k of |d^alpha (f - g)|. */
double wkinf_diff_norm(const Field& f, const Field& g, int k);

/** h^3 sum of f over grid points within periodic distance R of center.
 *  Midpoint quadrature, no partial-cell weighting; requires R <= L/2. */
double ball_integral(const Field& f, const Point& center, double R);

double field_integral(const Field& f);  // h^3 sum
double field_mean(const Field& f);

// TFWFIELD v1: "TFWFIELD v1 <N> <L>\n" then N^3 little-endian doubles,
// row-major, third axis fastest.
void write_field(std::ostream& os, const Field& f);
void write_field(const std::string& path, const Field& f);
Field read_field(std::istream& is);
Field read_field(const std::string& path);

} // namespace tfw

#endif
