#include "tfw/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace tfw {

struct SpectralWorkspace::Impl {
    Grid grid;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    mutable std::mutex mu;

    explicit Impl(const Grid& g) : grid(g) {
        const int n = g.points_per_axis;
        const std::size_t nc = static_cast<std::size_t>(n) * n * (n / 2 + 1);
        real = fftw_alloc_real(g.point_count());
        cplx = fftw_alloc_complex(nc);
        if (!real || !cplx) throw std::bad_alloc();
        fwd = fftw_plan_dft_r2c_3d(n, n, n, real, cplx, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_3d(n, n, n, cplx, real, FFTW_ESTIMATE);
        if (!fwd || !bwd) throw std::runtime_error("fftw plan creation failed");
    }
    ~Impl() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (real) fftw_free(real);
        if (cplx) fftw_free(cplx);
    }
};

SpectralWorkspace::SpectralWorkspace(const Grid& g) : impl_(new Impl(g)) {}

SpectralWorkspace::~SpectralWorkspace() { delete impl_; }

void SpectralWorkspace::forward(const Field& f, Spectrum& out) const {
    if (!(f.grid == impl_->grid))
        throw std::invalid_argument("SpectralWorkspace::forward: grid mismatch");
    out.grid = f.grid;
    const std::size_t nc = static_cast<std::size_t>(f.grid.points_per_axis) *
                           f.grid.points_per_axis * (f.grid.points_per_axis / 2 + 1);
    out.c.resize(nc);
    std::lock_guard<std::mutex> lock(impl_->mu);
    std::memcpy(impl_->real, f.v.data(), f.v.size() * sizeof(double));
    fftw_execute(impl_->fwd);
    const double scale = 1.0 / static_cast<double>(f.grid.point_count());
    const double* src = reinterpret_cast<const double*>(impl_->cplx);
    for (std::size_t i = 0; i < nc; ++i)
        out.c[i] = std::complex<double>(src[2 * i] * scale, src[2 * i + 1] * scale);
}

void SpectralWorkspace::inverse(const Spectrum& s, Field& out) const {
    if (!(s.grid == impl_->grid))
        throw std::invalid_argument("SpectralWorkspace::inverse: grid mismatch");
    out.grid = s.grid;
    out.v.resize(s.grid.point_count());
    std::lock_guard<std::mutex> lock(impl_->mu);
    double* dst = reinterpret_cast<double*>(impl_->cplx);
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        dst[2 * i] = s.c[i].real();
        dst[2 * i + 1] = s.c[i].imag();
    }
    fftw_execute(impl_->bwd);
    std::memcpy(out.v.data(), impl_->real, out.v.size() * sizeof(double));
}

Spectrum SpectralWorkspace::forward(const Field& f) const {
    Spectrum s;
    forward(f, s);
    return s;
}

Field SpectralWorkspace::inverse(const Spectrum& s) const {
    Field f;
    inverse(s, f);
    return f;
}

const SpectralWorkspace& workspace(const Grid& g) {
    static std::mutex reg_mu;
    static std::map<std::pair<int, double>, std::unique_ptr<SpectralWorkspace>> registry;
    std::lock_guard<std::mutex> lock(reg_mu);
    auto key = std::make_pair(g.points_per_axis, g.box_length);
    auto it = registry.find(key);
    if (it == registry.end())
        it = registry.emplace(key, std::make_unique<SpectralWorkspace>(g)).first;
    return *it->second;
}

} // namespace tfw
