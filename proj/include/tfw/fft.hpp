#ifndef TFW_FFT_HPP
#define TFW_FFT_HPP

#include <complex>
#include <vector>

#include "tfw/grid.hpp"

namespace tfw {

/** Half-spectrum Fourier coefficients of a real field (r2c layout:
 *  N x N x (N/2+1), third axis truncated). Coefficients are normalized so
 *  that f(x) = sum_k c_k e^{i k.x}. */
struct Spectrum {
    Grid grid;
    std::vector<std::complex<double>> c;

    Spectrum() = default;
    explicit Spectrum(const Grid& g)
        : grid(g),
          c(static_cast<std::size_t>(g.points_per_axis) * g.points_per_axis *
            (g.points_per_axis / 2 + 1)) {}

    int half() const { return grid.points_per_axis / 2 + 1; }
    std::size_t index(int i, int j, int l) const {
        return (static_cast<std::size_t>(i) * grid.points_per_axis + j) *
                   half() + l;
    }
};

/** FFTW-backed transforms for one grid size. Thread-safe (serialized on an
 *  internal mutex); plans use FFTW_ESTIMATE so results are deterministic. */
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(const Grid& g);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    void forward(const Field& f, Spectrum& out) const;
    void inverse(const Spectrum& s, Field& out) const;

    Spectrum forward(const Field& f) const;
    Field inverse(const Spectrum& s) const;

private:
    struct Impl;
    Impl* impl_;
};

/** Shared per-size workspace registry. */
const SpectralWorkspace& workspace(const Grid& g);

/** Multiply each coefficient by f(kx, ky, kz); f returns a real factor. */
template <class F>
void apply_multiplier(Spectrum& s, F&& f) {
    const Grid& g = s.grid;
    const int n = g.points_per_axis;
    const int nh = s.half();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const double kx = g.wavenumber(static_cast<int>(i));
        for (int j = 0; j < n; ++j) {
            const double ky = g.wavenumber(j);
            std::complex<double>* row = s.c.data() + s.index(static_cast<int>(i), j, 0);
            for (int l = 0; l < nh; ++l) {
                row[l] *= f(kx, ky, g.wavenumber(l));
            }
        }
    }
}

} // namespace tfw

#endif
