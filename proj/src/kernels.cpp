#include "tfw/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace tfw::kernels {

namespace {

std::size_t block_count(std::size_t n) {
    return (n + reduction_block - 1) / reduction_block;
}

// Per-block partial, then a serial pass over blocks in index order. The
// block decomposition is independent of the thread count, so omp and
// serial variants agree bitwise.
template <class BlockOp>
double blocked_reduce(std::size_t n, double init, BlockOp&& op, bool parallel) {
    if (n == 0) return init;
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long long b = 0; b < static_cast<long long>(nb); ++b) {
            const std::size_t lo = b * reduction_block;
            const std::size_t hi = std::min(n, lo + reduction_block);
            partial[b] = op(lo, hi);
        }
    } else {
        for (std::size_t b = 0; b < nb; ++b) {
            const std::size_t lo = b * reduction_block;
            const std::size_t hi = std::min(n, lo + reduction_block);
            partial[b] = op(lo, hi);
        }
    }
    double acc = init;
    for (std::size_t b = 0; b < nb; ++b) acc += partial[b];
    return acc;
}

double sum_block(std::span<const double> v, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
}

double dot_block(std::span<const double> a, std::span<const double> b,
                 std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
}

template <class Red>
double blocked_minmax(std::span<const double> v, double init, Red&& red, bool parallel) {
    const std::size_t n = v.size();
    if (n == 0) return init;
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb);
    auto body = [&](long long b) {
        const std::size_t lo = b * reduction_block;
        const std::size_t hi = std::min(n, lo + reduction_block);
        double m = init;
        for (std::size_t i = lo; i < hi; ++i) m = red(m, v[i]);
        partial[b] = m;
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long long b = 0; b < static_cast<long long>(nb); ++b) body(b);
    } else {
        for (long long b = 0; b < static_cast<long long>(nb); ++b) body(b);
    }
    double m = init;
    for (std::size_t b = 0; b < nb; ++b) m = red(m, partial[b]);
    return m;
}

} // namespace

namespace serial {

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a * x[i] + b * y[i];
}

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

void sub(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
}

void abs_pow(std::span<const double> v, double p, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(std::abs(v[i]), p);
}

double sum(std::span<const double> v) {
    return blocked_reduce(v.size(), 0.0,
                          [&](std::size_t lo, std::size_t hi) { return sum_block(v, lo, hi); },
                          false);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return blocked_reduce(a.size(), 0.0,
                          [&](std::size_t lo, std::size_t hi) { return dot_block(a, b, lo, hi); },
                          false);
}

double max_abs(std::span<const double> v) {
    return blocked_minmax(v, 0.0,
                          [](double m, double x) { return std::max(m, std::abs(x)); }, false);
}

double min(std::span<const double> v) {
    return blocked_minmax(v, std::numeric_limits<double>::infinity(),
                          [](double m, double x) { return std::min(m, x); }, false);
}

} // namespace serial

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    const long long n = static_cast<long long>(y.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    const long long n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void sub(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    const long long n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void abs_pow(std::span<const double> v, double p, std::span<double> out) {
    const long long n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) out[i] = std::pow(std::abs(v[i]), p);
}

double sum(std::span<const double> v) {
    return blocked_reduce(v.size(), 0.0,
                          [&](std::size_t lo, std::size_t hi) { return sum_block(v, lo, hi); },
                          true);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return blocked_reduce(a.size(), 0.0,
                          [&](std::size_t lo, std::size_t hi) { return dot_block(a, b, lo, hi); },
                          true);
}

double max_abs(std::span<const double> v) {
    return blocked_minmax(v, 0.0,
                          [](double m, double x) { return std::max(m, std::abs(x)); }, true);
}

double min(std::span<const double> v) {
    return blocked_minmax(v, std::numeric_limits<double>::infinity(),
                          [](double m, double x) { return std::min(m, x); }, true);
}

} // namespace tfw::kernels
