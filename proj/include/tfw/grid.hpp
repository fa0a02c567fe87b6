#ifndef TFW_GRID_HPP
#define TFW_GRID_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace tfw {

using Point = std::array<double, 3>;

/** Periodic cubic grid: box [0,L)^3 sampled at N points per axis. */
struct Grid {
    double box_length = 0.0;
    int points_per_axis = 0;

    Grid() = default;
    Grid(double L, int N);

    double spacing() const { return box_length / points_per_axis; }
    std::size_t point_count() const {
        auto n = static_cast<std::size_t>(points_per_axis);
        return n * n * n;
    }
    std::size_t index(int i, int j, int l) const {
        auto n = static_cast<std::size_t>(points_per_axis);
        return (static_cast<std::size_t>(i) * n + j) * n + l;
    }
    /** Wavenumber of mode index i on a full axis, symmetric layout
     *  (i <= N/2 maps to i, otherwise i - N; i = N/2 is the Nyquist mode -N/2). */
    double wavenumber(int i) const;
    bool is_nyquist(int i) const { return i == points_per_axis / 2; }

    /** Coordinate of grid point i along one axis. */
    double coord(int i) const { return i * spacing(); }
    /** Minimal-image displacement a-b on the periodic axis. */
    double min_image(double a, double b) const;

    bool operator==(const Grid&) const = default;
};

Grid build_grid(double L, int N);

/** Scalar field sampled on a Grid, row-major with the third axis fastest. */
struct Field {
    Grid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0)
        : grid(g), v(g.point_count(), fill) {}

    double& operator()(int i, int j, int l) { return v[grid.index(i, j, l)]; }
    double operator()(int i, int j, int l) const { return v[grid.index(i, j, l)]; }
    std::size_t size() const { return v.size(); }
};

/** Derivative multi-index, total order at most 2. */
struct MultiIndex {
    std::array<int, 3> a{0, 0, 0};

    MultiIndex() = default;
    MultiIndex(int a1, int a2, int a3);
    int order() const { return a[0] + a[1] + a[2]; }
    int operator[](int i) const { return a[i]; }
};

/** All multi-indices with |alpha| <= k (k <= 2), in a fixed order. */
const std::vector<MultiIndex>& multi_indices_up_to(int k);

void require_same_grid(const Field& f, const Field& g, const char* where);

} // namespace tfw

#endif
