#include "tfw/field_ops.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tfw/kernels.hpp"

namespace tfw {

namespace {

std::complex<double> axis_factor(double k, bool nyquist, int order) {
    switch (order) {
        case 0: return {1.0, 0.0};
        case 1: return nyquist ? std::complex<double>{0.0, 0.0}
                               : std::complex<double>{0.0, k};
        case 2: return {-k * k, 0.0};
        default: throw std::invalid_argument("derivative order > 2");
    }
}

} // namespace

void apply_derivative(Spectrum& s, const MultiIndex& alpha) {
    if (alpha.order() == 0) return;
    const Grid& g = s.grid;
    const int n = g.points_per_axis;
    const int nh = s.half();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const auto fx = axis_factor(g.wavenumber(static_cast<int>(i)),
                                    g.is_nyquist(static_cast<int>(i)), alpha[0]);
        for (int j = 0; j < n; ++j) {
            const auto fxy = fx * axis_factor(g.wavenumber(j), g.is_nyquist(j), alpha[1]);
            std::complex<double>* row = s.c.data() + s.index(static_cast<int>(i), j, 0);
            for (int l = 0; l < nh; ++l) {
                row[l] *= fxy * axis_factor(g.wavenumber(l), g.is_nyquist(l), alpha[2]);
            }
        }
    }
}

Field spectral_derivative(const Field& f, const MultiIndex& alpha) {
    const auto& ws = workspace(f.grid);
    Spectrum s = ws.forward(f);
    apply_derivative(s, alpha);
    return ws.inverse(s);
}

Field laplacian(const Field& f) {
    const auto& ws = workspace(f.grid);
    Spectrum s = ws.forward(f);
    apply_multiplier(s, [](double kx, double ky, double kz) {
        return -(kx * kx + ky * ky + kz * kz);
    });
    return ws.inverse(s);
}

std::array<Field, 3> gradient(const Field& f) {
    const auto& ws = workspace(f.grid);
    const Spectrum base = ws.forward(f);
    std::array<Field, 3> out;
    for (int ax = 0; ax < 3; ++ax) {
        Spectrum s = base;
        MultiIndex alpha(ax == 0, ax == 1, ax == 2);
        apply_derivative(s, alpha);
        out[ax] = ws.inverse(s);
    }
    return out;
}

double wkinf_diff_norm(const Field& f, const Field& g, int k) {
    require_same_grid(f, g, "wkinf_diff_norm");
    Field d(f.grid);
    kernels::sub(f.v, g.v, d.v);
    const auto& ws = workspace(f.grid);
    const Spectrum base = ws.forward(d);
    double out = kernels::max_abs(d.v);
    Field tmp;
    for (const auto& alpha : multi_indices_up_to(k)) {
        if (alpha.order() == 0) continue;
        Spectrum s = base;
        apply_derivative(s, alpha);
        ws.inverse(s, tmp);
        out = std::max(out, kernels::max_abs(tmp.v));
    }
    return out;
}

double ball_integral(const Field& f, const Point& center, double R) {
    const Grid& g = f.grid;
    if (!(R > 0.0) || R > g.box_length / 2 + 1e-12)
        throw std::invalid_argument("ball_integral: need 0 < R <= L/2");
    const int n = g.points_per_axis;
    const double R2 = R * R;
    const double h3 = g.spacing() * g.spacing() * g.spacing();
    std::vector<double> slice(n, 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const double dx = g.min_image(g.coord(static_cast<int>(i)), center[0]);
        double local = 0.0;
        for (int j = 0; j < n; ++j) {
            const double dy = g.min_image(g.coord(j), center[1]);
            const double dxy = dx * dx + dy * dy;
            if (dxy > R2) continue;
            const double* row = f.v.data() + g.index(static_cast<int>(i), j, 0);
            for (int l = 0; l < n; ++l) {
                const double dz = g.min_image(g.coord(l), center[2]);
                if (dxy + dz * dz <= R2) local += row[l];
            }
        }
        slice[i] = local;
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += slice[i];
    return h3 * total;
}

double field_integral(const Field& f) {
    const double h = f.grid.spacing();
    return h * h * h * kernels::sum(f.v);
}

double field_mean(const Field& f) {
    return kernels::sum(f.v) / static_cast<double>(f.size());
}

namespace {

static_assert(sizeof(double) == 8);

void put_le(std::ostream& os, const double* data, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data), n * 8);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            auto bits = std::bit_cast<std::uint64_t>(data[i]);
            char buf[8];
            for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>(bits >> (8 * b));
            os.write(buf, 8);
        }
    }
}

void get_le(std::istream& is, double* data, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(data), n * 8);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            char buf[8];
            is.read(buf, 8);
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[b])) << (8 * b);
            data[i] = std::bit_cast<double>(bits);
        }
    }
}

} // namespace

void write_field(std::ostream& os, const Field& f) {
    std::ostringstream header;
    header.precision(17);
    header << "TFWFIELD v1 " << f.grid.points_per_axis << " " << f.grid.box_length << "\n";
    os << header.str();
    put_le(os, f.v.data(), f.v.size());
}

void write_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_field(os, f);
}

Field read_field(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("TFWFIELD: missing header");
    std::istringstream hs(line);
    std::string magic, version;
    int n = 0;
    double L = 0.0;
    hs >> magic >> version >> n >> L;
    if (!hs || magic != "TFWFIELD" || version != "v1")
        throw std::runtime_error("TFWFIELD: bad header '" + line + "'");
    Field f(Grid(L, n));
    get_le(is, f.v.data(), f.v.size());
    if (!is) throw std::runtime_error("TFWFIELD: truncated payload");
    for (double x : f.v)
        if (!std::isfinite(x)) throw std::runtime_error("TFWFIELD: non-finite value");
    return f;
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_field(is);
}

} // namespace tfw
