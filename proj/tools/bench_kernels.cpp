// Timing harness for the data-parallel kernels: omp variants against the
// serial references, plus one full Green-operator apply. Run manually:
//   ./bench_kernels [N]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "tfw/experiments.hpp"
#include "tfw/interaction.hpp"
#include "tfw/kernels.hpp"

using clk = std::chrono::steady_clock;

namespace {

double time_of(int reps, auto&& fn) {
    fn();  // warm up
    const auto t0 = clk::now();
    for (int r = 0; r < reps; ++r) fn();
    return std::chrono::duration<double>(clk::now() - t0).count() / reps;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-18s %10.3f ms %10.3f ms   x%.2f\n", name, serial * 1e3,
                parallel * 1e3, serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 64;
    const tfw::Grid grid(8.0, n);
    const std::size_t sz = grid.point_count();
    std::printf("grid %d^3 (%zu points)\n%-18s %13s %13s\n", n, sz, "kernel", "serial",
                "omp");

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> a(sz), b(sz), out(sz);
    for (auto& x : a) x = dist(rng);
    for (auto& x : b) x = dist(rng);

    const int reps = 20;
    row("axpby",
        time_of(reps, [&] { tfw::kernels::serial::axpby(0.3, a, 1.1, out); }),
        time_of(reps, [&] { tfw::kernels::axpby(0.3, a, 1.1, out); }));
    row("mul", time_of(reps, [&] { tfw::kernels::serial::mul(a, b, out); }),
        time_of(reps, [&] { tfw::kernels::mul(a, b, out); }));
    row("abs_pow 7/3",
        time_of(5, [&] { tfw::kernels::serial::abs_pow(a, 7.0 / 3.0, out); }),
        time_of(5, [&] { tfw::kernels::abs_pow(a, 7.0 / 3.0, out); }));
    row("dot", time_of(reps, [&] { (void)tfw::kernels::serial::dot(a, b); }),
        time_of(reps, [&] { (void)tfw::kernels::dot(a, b); }));
    row("max_abs", time_of(reps, [&] { (void)tfw::kernels::serial::max_abs(a); }),
        time_of(reps, [&] { (void)tfw::kernels::max_abs(a); }));

    const tfw::Field rho = tfw::random_smooth_field(grid, 7, 6);
    const double green =
        time_of(5, [&] { (void)tfw::green_apply(tfw::Screening(0.5), rho); });
    std::printf("%-18s %13s %10.3f ms   (FFT-bound)\n", "green_apply", "-", green * 1e3);
    return 0;
}
