#include "tfw/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfw {

Grid::Grid(double L, int N) : box_length(L), points_per_axis(N) {
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("Grid: box length must be positive, got " + std::to_string(L));
    if (N < 8)
        throw std::invalid_argument("Grid: need at least 8 points per axis, got " + std::to_string(N));
    if (N % 2 != 0)
        throw std::invalid_argument("Grid: odd N not supported, got " + std::to_string(N));
}

double Grid::wavenumber(int i) const {
    const int n = points_per_axis;
    const int m = (i <= n / 2) ? i : i - n;
    return 2.0 * std::numbers::pi / box_length * m;
}

double Grid::min_image(double a, double b) const {
    const double L = box_length;
    double d = std::remainder(a - b, L);
    return d;
}

Grid build_grid(double L, int N) { return Grid(L, N); }

MultiIndex::MultiIndex(int a1, int a2, int a3) : a{a1, a2, a3} {
    if (a1 < 0 || a2 < 0 || a3 < 0 || a1 + a2 + a3 > 2)
        throw std::invalid_argument("MultiIndex: order must be in [0, 2]");
}

const std::vector<MultiIndex>& multi_indices_up_to(int k) {
    static const std::vector<MultiIndex> order0 = {{0, 0, 0}};
    static const std::vector<MultiIndex> order1 = {
        {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    static const std::vector<MultiIndex> order2 = {
        {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
        {2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
    switch (k) {
        case 0: return order0;
        case 1: return order1;
        case 2: return order2;
        default: throw std::invalid_argument("multi_indices_up_to: k must be in [0, 2]");
    }
}

void require_same_grid(const Field& f, const Field& g, const char* where) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

} // namespace tfw
