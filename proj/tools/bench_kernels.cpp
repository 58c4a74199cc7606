// Micro-benchmark comparing the serial reference kernels with the OpenMP
// variants on protocol-sized tensors.

#include <chrono>
#include <cstdio>
#include <omp.h>
#include <vector>

#include "cvtel/kernels.hpp"
#include "cvtel/rng.hpp"

using namespace cvtel;

namespace {

std::vector<cdouble> random_tensor(std::size_t total, std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<cdouble> t(total);
    for (auto& v : t) v = cdouble{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
    return t;
}

template <typename F>
double time_ms(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main() {
    const std::vector<int> ext{64, 64, 64};
    const std::size_t total = tensor_size(ext);
    const int reps = 5;
    std::printf("tensor 64^3 (%zu amplitudes), %d threads\n", total, omp_get_max_threads());
    std::printf("%-14s %12s %12s %9s\n", "kernel", "serial ms", "openmp ms", "speedup");

    std::vector<cdouble> weights(64);
    for (int j = 0; j < 64; ++j) weights[static_cast<std::size_t>(j)] = std::polar(1.0, 0.1 * j);

    {
        auto a = random_tensor(total, 1);
        auto b = a;
        const double ts = time_ms([&] { serial::fft_axis(a, ext, 1, -1); }, reps);
        const double tp = time_ms([&] { fft_axis(b, ext, 1, -1); }, reps);
        std::printf("%-14s %12.3f %12.3f %8.2fx\n", "fft_axis", ts, tp, ts / tp);
    }
    {
        auto a = random_tensor(total, 2);
        auto b = a;
        const double ts = time_ms([&] { serial::weight_axis(a, ext, 2, weights); }, reps);
        const double tp = time_ms([&] { weight_axis(b, ext, 2, weights); }, reps);
        std::printf("%-14s %12.3f %12.3f %8.2fx\n", "weight_axis", ts, tp, ts / tp);
    }
    {
        auto a = random_tensor(total, 3);
        auto b = a;
        const double ts = time_ms([&] { serial::roll_axis(a, ext, 0, 17); }, reps);
        const double tp = time_ms([&] { roll_axis(b, ext, 0, 17); }, reps);
        std::printf("%-14s %12.3f %12.3f %8.2fx\n", "roll_axis", ts, tp, ts / tp);
    }
    {
        auto a = random_tensor(total, 4);
        double sink = 0.0;
        const double ts = time_ms(
            [&] {
                double s = 0.0;
                for (const auto& v : a) s += std::norm(v);
                sink += s;
            },
            reps);
        const double tp = time_ms([&] { sink += squared_norm(a); }, reps);
        std::printf("%-14s %12.3f %12.3f %8.2fx   (checksum %.3e)\n", "squared_norm", ts, tp,
                    ts / tp, sink);
    }
    return 0;
}
