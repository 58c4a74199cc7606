#include <doctest.h>

#include <complex>
#include <numbers>
#include <vector>

#include "cvtel/kernels.hpp"
#include "cvtel/rng.hpp"

using namespace cvtel;

namespace {

std::vector<cdouble> random_vec(std::size_t n, std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<cdouble> v(n);
    for (auto& x : v) x = cdouble{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
    return v;
}

// quadratic-cost reference transform
std::vector<cdouble> dft_reference(const std::vector<cdouble>& in, int sign) {
    const std::size_t n = in.size();
    std::vector<cdouble> out(n, cdouble{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            out[k] += in[j] * std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                                  static_cast<double>(j * k % n) / n);
    return out;
}

} // namespace

TEST_CASE("fft matches the direct transform") {
    for (std::size_t n : {8u, 64u, 256u}) {
        auto v = random_vec(n, 11 + n);
        const auto ref = dft_reference(v, -1);
        fft_pow2(v, -1);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(v[i] - ref[i]));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("fft round trip restores input") {
    auto v = random_vec(128, 3);
    const auto orig = v;
    fft_pow2(v, -1);
    fft_pow2(v, +1);
    for (auto& x : v) x /= 128.0;
    double err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(v[i] - orig[i]));
    CHECK(err < 1e-13);
}

TEST_CASE("fft rejects non power of two lengths") {
    std::vector<cdouble> v(12);
    CHECK_THROWS(fft_pow2(v, -1));
}

TEST_CASE("openmp kernels agree bitwise with the serial reference") {
    const std::vector<int> ext{8, 16, 4};
    auto a = random_vec(tensor_size(ext), 5);
    auto b = a;

    SUBCASE("fft_axis") {
        for (int axis : {0, 1, 2}) {
            serial::fft_axis(a, ext, axis, -1);
            fft_axis(b, ext, axis, -1);
            CHECK(a == b);
        }
    }
    SUBCASE("weight_axis") {
        std::vector<cdouble> w(16);
        for (int j = 0; j < 16; ++j) w[static_cast<std::size_t>(j)] = std::polar(1.0, 0.3 * j);
        serial::weight_axis(a, ext, 1, w);
        weight_axis(b, ext, 1, w);
        CHECK(a == b);
    }
    SUBCASE("roll_axis") {
        serial::roll_axis(a, ext, 0, 3);
        roll_axis(b, ext, 0, 3);
        CHECK(a == b);
        serial::roll_axis(a, ext, 2, -7);
        roll_axis(b, ext, 2, -7);
        CHECK(a == b);
    }
}

TEST_CASE("roll composes to identity") {
    const std::vector<int> ext{32};
    auto a = random_vec(32, 9);
    const auto orig = a;
    roll_axis(a, ext, 0, 5);
    roll_axis(a, ext, 0, -5);
    CHECK(a == orig);
}

TEST_CASE("deterministic sums match a long-double accumulation") {
    auto v = random_vec(100000, 17);
    std::vector<double> re(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) re[i] = v[i].real();
    long double acc = 0.0L;
    for (double x : re) acc += x;
    CHECK(deterministic_sum(std::span<const double>(re)) ==
          doctest::Approx(static_cast<double>(acc)).epsilon(1e-12));

    long double nrm = 0.0L;
    for (const auto& x : v) nrm += std::norm(x);
    CHECK(squared_norm(v) == doctest::Approx(static_cast<double>(nrm)).epsilon(1e-12));
}
