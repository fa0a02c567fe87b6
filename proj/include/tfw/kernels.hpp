#ifndef TFW_KERNELS_HPP
#define TFW_KERNELS_HPP

#include <cstddef>
#include <span>

// Data-parallel grid kernels. The omp variants in tfw::kernels are the
// default; tfw::kernels::serial holds plain-loop references used by the
// tests and the benchmark. Reductions accumulate fixed-size blocks so the
// result is bitwise identical for any thread count (and to the serial
// variant).

namespace tfw::kernels {

inline constexpr std::size_t reduction_block = 4096;

namespace serial {

void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);
void sub(std::span<const double> a, std::span<const double> b, std::span<double> out);
// out[i] = |v[i]|^p
void abs_pow(std::span<const double> v, double p, std::span<double> out);
double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);
double min(std::span<const double> v);

} // namespace serial

void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);
void sub(std::span<const double> a, std::span<const double> b, std::span<double> out);
void abs_pow(std::span<const double> v, double p, std::span<double> out);
double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);
double min(std::span<const double> v);

} // namespace tfw::kernels

#endif
