#include "cvtel/resources.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvtel/rng.hpp"

namespace cvtel {

namespace {

std::vector<cdouble> gaussian_packet_amplitudes(const GaussianPacket& p, const Grid& g) {
    if (p.width < 2.0 * g.spacing)
        throw std::invalid_argument("gaussian packet: width must be at least 2x grid spacing");
    if (std::abs(p.center) >= g.extent() / 2.0)
        throw std::invalid_argument("gaussian packet: center outside the grid");
    std::vector<cdouble> a(static_cast<std::size_t>(g.n_points));
    for (int j = 0; j < g.n_points; ++j) {
        const double dx = g.position(j) - p.center;
        a[static_cast<std::size_t>(j)] = std::exp(-dx * dx / (4.0 * p.width * p.width));
    }
    return a;
}

// Smooth random profile: a few seeded low-frequency Fourier modes under a
// Gaussian envelope. Band-limited, so modest grids resolve it exactly.
std::vector<cdouble> random_smooth_amplitudes(const RandomSmooth& rs, const Grid& g) {
    SeededRng rng(rs.seed ^ 0x9e3779b97f4a7c15ull);
    const double envelope_width = g.extent() / 8.0;
    std::vector<cdouble> a(static_cast<std::size_t>(g.n_points));
    constexpr int kModes = 4;
    double c[kModes], s[kModes];
    for (int m = 0; m < kModes; ++m) {
        c[m] = rng.normal(0.0, 1.0);
        s[m] = rng.normal(0.0, 1.0);
    }
    for (int j = 0; j < g.n_points; ++j) {
        const double x = g.position(j);
        double v = 1.5;  // offset keeps the profile from vanishing
        for (int m = 0; m < kModes; ++m) {
            const double w = 2.0 * std::numbers::pi * (m + 1) / g.extent();
            v += c[m] * std::cos(w * x) + s[m] * std::sin(w * x);
        }
        const double env = std::exp(-x * x / (4.0 * envelope_width * envelope_width));
        a[static_cast<std::size_t>(j)] = v * env;
    }
    return a;
}

std::vector<cdouble> profile_amplitudes(const AmplitudeProfile& profile, const Grid& g) {
    if (const auto* gp = std::get_if<GaussianPacket>(&profile))
        return gaussian_packet_amplitudes(*gp, g);
    return random_smooth_amplitudes(std::get<RandomSmooth>(profile), g);
}

} // namespace

WaveFunction profile_wavefunction(const AmplitudeProfile& profile, const Grid& grid, int label) {
    return WaveFunction(grid, {label}, profile_amplitudes(profile, grid));
}

WaveFunction make_input_state(const InputSpec& spec, const Grid& grid,
                              std::pair<int, int> labels) {
    if (std::abs(spec.q) >= grid.extent() / 2.0)
        throw std::invalid_argument("make_input_state: |q| must be below half the grid extent");
    const int mq = grid.wrap(static_cast<long long>(std::llround(spec.q / grid.spacing)) +
                             grid.origin_index) -
                   grid.origin_index;  // rounded shift in lattice steps
    auto a = profile_amplitudes(spec.profile, grid);
    const int n = grid.n_points;
    std::vector<cdouble> amp(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
                             cdouble{0.0, 0.0});
    for (int j = 0; j < n; ++j) {
        const int l = grid.wrap(j - mq);
        amp[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(l)] =
            a[static_cast<std::size_t>(j)];
    }
    return WaveFunction(grid, {labels.first, labels.second}, std::move(amp));
}

WaveFunction make_epr_wavefunction(const ResourceQuality& quality, const Grid& grid,
                                   std::pair<int, int> labels) {
    const int n = grid.n_points;
    if (quality.is_ideal()) {
        std::vector<cdouble> amp(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
                                 cdouble{0.0, 0.0});
        for (int j = 0; j < n; ++j)
            amp[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(j)] = 1.0;
        return WaveFunction(grid, {labels.first, labels.second}, std::move(amp));
    }
    return covariance_to_wavefunction(epr_pair(quality.r, quality.r), grid,
                                      {labels.first, labels.second});
}

WaveFunction make_ghz_wavefunction(const ResourceQuality& quality, const Grid& grid,
                                   std::array<int, 3> labels) {
    const int n = grid.n_points;
    if (quality.is_ideal()) {
        std::vector<cdouble> amp(static_cast<std::size_t>(n) * n * n, cdouble{0.0, 0.0});
        for (int j = 0; j < n; ++j) {
            const std::size_t f = (static_cast<std::size_t>(j) * n + static_cast<std::size_t>(j)) * n +
                                  static_cast<std::size_t>(j);
            amp[f] = 1.0;
        }
        return WaveFunction(grid, {labels[0], labels[1], labels[2]}, std::move(amp));
    }
    return covariance_to_wavefunction(ghz_resource(quality.r), grid,
                                      {labels[0], labels[1], labels[2]});
}

double max_position_sigma(const GaussianState& s) {
    double m = 0.0;
    for (int i = 0; i < s.n_modes; ++i) m = std::max(m, std::sqrt(s.cov(i, i)));
    return m;
}

WaveFunction covariance_to_wavefunction(const GaussianState& s, const Grid& grid,
                                        const std::vector<int>& labels) {
    const int n_modes = s.n_modes;
    if (n_modes < 1 || n_modes > 3)
        throw std::invalid_argument("covariance_to_wavefunction: supports 1..3 modes");
    if (static_cast<int>(labels.size()) != n_modes)
        throw std::invalid_argument("covariance_to_wavefunction: label count mismatch");
    if (!is_pure(s))
        throw std::invalid_argument("covariance_to_wavefunction: state is not pure");
    if (s.cov.topRightCorner(n_modes, n_modes).lpNorm<Eigen::Infinity>() > 1e-9)
        throw std::invalid_argument("covariance_to_wavefunction: x-p correlations unsupported");
    if (grid.extent() <= 8.0 * max_position_sigma(s))
        throw std::invalid_argument(
            "covariance_to_wavefunction: grid extent below 8x the largest position sigma");

    const Eigen::MatrixXd A = s.cov.topLeftCorner(n_modes, n_modes);
    const Eigen::MatrixXd Ainv = A.inverse();
    const Eigen::VectorXd xm = s.mean.head(n_modes);
    const Eigen::VectorXd pm = s.mean.tail(n_modes);

    const int n = grid.n_points;
    const std::size_t total = tensor_size(std::vector<int>(static_cast<std::size_t>(n_modes), n));
    std::vector<cdouble> amp(total);
#pragma omp parallel for schedule(static)
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t rem = f;
        double x[3];
        for (int a = n_modes - 1; a >= 0; --a) {
            x[a] = grid.position(static_cast<int>(rem % static_cast<std::size_t>(n)));
            rem /= static_cast<std::size_t>(n);
        }
        double quad = 0.0;
        double phase = 0.0;
        for (int a = 0; a < n_modes; ++a) {
            const double da = x[a] - xm(a);
            phase += 2.0 * pm(a) * x[a];
            for (int b = 0; b < n_modes; ++b) quad += da * Ainv(a, b) * (x[b] - xm(b));
        }
        amp[f] = std::polar(std::exp(-0.25 * quad), phase);
    }
    return WaveFunction(grid, labels, std::move(amp));
}

} // namespace cvtel
