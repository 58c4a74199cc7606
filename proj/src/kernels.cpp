#include "cvtel/kernels.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvtel {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddle table for one transform length, built once per call chain.
std::vector<cdouble> twiddles(std::size_t n, int sign) {
    std::vector<cdouble> w(n / 2);
    const double base = sign * 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k)
        w[k] = std::polar(1.0, base * static_cast<double>(k));
    return w;
}

void fft_pow2_with(std::span<cdouble> a, const std::vector<cdouble>& w) {
    const std::size_t n = a.size();
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdouble u = a[i + k];
                const cdouble v = a[i + k + len / 2] * w[k * step];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

} // namespace

void fft_pow2(std::span<cdouble> data, int sign) {
    if (!is_pow2(data.size()))
        throw std::invalid_argument("fft_pow2: length must be a power of two");
    const auto w = twiddles(data.size(), sign);
    fft_pow2_with(data, w);
}

std::size_t tensor_size(const std::vector<int>& extents) {
    std::size_t n = 1;
    for (int e : extents) n *= static_cast<std::size_t>(e);
    return n;
}

std::size_t axis_stride(const std::vector<int>& extents, int axis) {
    std::size_t s = 1;
    for (std::size_t a = static_cast<std::size_t>(axis) + 1; a < extents.size(); ++a)
        s *= static_cast<std::size_t>(extents[a]);
    return s;
}

std::size_t axis_line_count(const std::vector<int>& extents, int axis) {
    return tensor_size(extents) / static_cast<std::size_t>(extents[axis]);
}

std::size_t axis_line_base(const std::vector<int>& extents, int axis, std::size_t line) {
    const std::size_t stride = axis_stride(extents, axis);
    const std::size_t outer = line / stride;  // index over axes before `axis`
    const std::size_t inner = line % stride;  // index over axes after `axis`
    return outer * stride * static_cast<std::size_t>(extents[axis]) + inner;
}

namespace {

template <typename LineOp>
void for_each_line_serial(std::vector<cdouble>& t, const std::vector<int>& extents, int axis,
                          LineOp&& op) {
    const std::size_t lines = axis_line_count(extents, axis);
    for (std::size_t line = 0; line < lines; ++line) op(t, line);
}

template <typename LineOp>
void for_each_line_parallel(std::vector<cdouble>& t, const std::vector<int>& extents, int axis,
                            LineOp&& op) {
    const std::size_t lines = axis_line_count(extents, axis);
#pragma omp parallel for schedule(static)
    for (std::size_t line = 0; line < lines; ++line) op(t, line);
}

struct FftLine {
    const std::vector<int>& extents;
    int axis;
    const std::vector<cdouble>& w;
    void operator()(std::vector<cdouble>& t, std::size_t line) const {
        const std::size_t n = static_cast<std::size_t>(extents[axis]);
        const std::size_t stride = axis_stride(extents, axis);
        const std::size_t base = axis_line_base(extents, axis, line);
        std::vector<cdouble> buf(n);
        for (std::size_t j = 0; j < n; ++j) buf[j] = t[base + j * stride];
        fft_pow2_with(buf, w);
        for (std::size_t j = 0; j < n; ++j) t[base + j * stride] = buf[j];
    }
};

struct WeightLine {
    const std::vector<int>& extents;
    int axis;
    std::span<const cdouble> w;
    void operator()(std::vector<cdouble>& t, std::size_t line) const {
        const std::size_t n = static_cast<std::size_t>(extents[axis]);
        const std::size_t stride = axis_stride(extents, axis);
        const std::size_t base = axis_line_base(extents, axis, line);
        for (std::size_t j = 0; j < n; ++j) t[base + j * stride] *= w[j];
    }
};

struct RollLine {
    const std::vector<int>& extents;
    int axis;
    int steps;  // new[j] = old[j - steps], cyclic
    void operator()(std::vector<cdouble>& t, std::size_t line) const {
        const int n = extents[axis];
        const std::size_t stride = axis_stride(extents, axis);
        const std::size_t base = axis_line_base(extents, axis, line);
        std::vector<cdouble> buf(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) buf[static_cast<std::size_t>(j)] = t[base + static_cast<std::size_t>(j) * stride];
        for (int j = 0; j < n; ++j) {
            int src = (j - steps) % n;
            if (src < 0) src += n;
            t[base + static_cast<std::size_t>(j) * stride] = buf[static_cast<std::size_t>(src)];
        }
    }
};

} // namespace

namespace serial {

void fft_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis, int sign) {
    const auto w = twiddles(static_cast<std::size_t>(extents[axis]), sign);
    for_each_line_serial(t, extents, axis, FftLine{extents, axis, w});
}

void weight_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis,
                 std::span<const cdouble> w) {
    for_each_line_serial(t, extents, axis, WeightLine{extents, axis, w});
}

void roll_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis, int steps) {
    for_each_line_serial(t, extents, axis, RollLine{extents, axis, steps});
}

void scale(std::vector<cdouble>& t, cdouble s) {
    for (auto& v : t) v *= s;
}

} // namespace serial

void fft_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis, int sign) {
    const auto w = twiddles(static_cast<std::size_t>(extents[axis]), sign);
    for_each_line_parallel(t, extents, axis, FftLine{extents, axis, w});
}

void weight_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis,
                 std::span<const cdouble> w) {
    for_each_line_parallel(t, extents, axis, WeightLine{extents, axis, w});
}

void roll_axis(std::vector<cdouble>& t, const std::vector<int>& extents, int axis, int steps) {
    for_each_line_parallel(t, extents, axis, RollLine{extents, axis, steps});
}

void scale(std::vector<cdouble>& t, cdouble s) {
    const std::size_t n = t.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) t[i] *= s;
}

namespace {
constexpr std::size_t kBlock = 1024;

template <typename T>
T blocked_sum(std::span<const T> v, T (*leaf)(std::span<const T>)) {
    const std::size_t nblocks = (v.size() + kBlock - 1) / kBlock;
    if (nblocks <= 1) return leaf(v);
    std::vector<T> partial(nblocks);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(lo + kBlock, v.size());
        partial[b] = leaf(v.subspan(lo, hi - lo));
    }
    return blocked_sum<T>(std::span<const T>(partial), leaf);
}

double leaf_sum_d(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

cdouble leaf_sum_c(std::span<const cdouble> v) {
    cdouble s{0.0, 0.0};
    for (const cdouble& x : v) s += x;
    return s;
}

} // namespace

double deterministic_sum(std::span<const double> v) { return blocked_sum<double>(v, leaf_sum_d); }
cdouble deterministic_sum(std::span<const cdouble> v) { return blocked_sum<cdouble>(v, leaf_sum_c); }

double squared_norm(std::span<const cdouble> v) {
    const std::size_t nblocks = (v.size() + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks == 0 ? 1 : nblocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(lo + kBlock, v.size());
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::norm(v[i]);
        partial[b] = s;
    }
    return deterministic_sum(std::span<const double>(partial));
}

} // namespace cvtel
