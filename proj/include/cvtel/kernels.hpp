#ifndef CVTEL_KERNELS_HPP
#define CVTEL_KERNELS_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

// Low-level dense-tensor kernels shared by the grid engine. Every axis kernel
// exists twice: a plain serial loop under cvtel::serial used as the reference
// in tests and benchmarks, and an OpenMP version (the default) that splits the
// work across independent tensor lines. Per-line arithmetic is identical, so
// the two variants agree bit for bit.

namespace cvtel {

using cdouble = std::complex<double>;

// In-place unnormalized power-of-two FFT over a contiguous span.
// sign=-1: X_k = sum_j x_j e^{-2 pi i jk/n};  sign=+1: conjugate kernel.
void fft_pow2(std::span<cdouble> data, int sign);

// Row-major tensor geometry: extents[a] points along axis a.
std::size_t tensor_size(const std::vector<int>& extents);
std::size_t axis_stride(const std::vector<int>& extents, int axis);
std::size_t axis_line_count(const std::vector<int>& extents, int axis);
// Offset of the first element of line `line` along `axis`.
std::size_t axis_line_base(const std::vector<int>& extents, int axis, std::size_t line);

namespace serial {
void fft_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis, int sign);
void weight_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis,
                 std::span<const cdouble> w);
void roll_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis, int steps);
void scale(std::vector<cdouble>& t, cdouble s);
} // namespace serial

void fft_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis, int sign);
void weight_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis,
                 std::span<const cdouble> w);
void roll_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis, int steps);
void scale(std::vector<cdouble>& t, cdouble s);

// Block-pairwise reductions whose result does not depend on the thread count.
double deterministic_sum(std::span<const double> v);
cdouble deterministic_sum(std::span<const cdouble> v);
double squared_norm(std::span<const cdouble> v);

} // namespace cvtel

#endif
