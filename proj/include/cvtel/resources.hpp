#ifndef CVTEL_RESOURCES_HPP
#define CVTEL_RESOURCES_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <variant>

#include "cvtel/gaussian.hpp"
#include "cvtel/grid.hpp"

namespace cvtel {

struct GaussianPacket {
    double center = 0.0;
    double width = 1.0;  // position standard deviation of |A|^2
};

struct RandomSmooth {
    std::uint64_t seed = 0;
};

using AmplitudeProfile = std::variant<GaussianPacket, RandomSmooth>;

/// Two-particle input |A> = sum_x A(x)|x>|x-q>: an exact eigenstate of the
/// relative position with eigenvalue q on the lattice.
struct InputSpec {
    AmplitudeProfile profile{GaussianPacket{}};
    double q = 0.0;
};

struct ResourceQuality {
    enum class Mode : std::uint8_t { Ideal, Finite };
    Mode mode = Mode::Ideal;
    double r = 0.0;

    static ResourceQuality ideal() { return ResourceQuality{Mode::Ideal, 0.0}; }
    static ResourceQuality finite(double r) { return ResourceQuality{Mode::Finite, r}; }
    bool is_ideal() const { return mode == Mode::Ideal; }
};

/// Normalized single-particle amplitude profile on the grid.
WaveFunction profile_wavefunction(const AmplitudeProfile& profile, const Grid& grid, int label);

WaveFunction make_input_state(const InputSpec& spec, const Grid& grid,
                              std::pair<int, int> labels = {1, 2});

/// Ideal: uniform lattice diagonal. Finite{r}: two-mode Gaussian whose second
/// moments match epr_pair(r, r).
WaveFunction make_epr_wavefunction(const ResourceQuality& quality, const Grid& grid,
                                   std::pair<int, int> labels = {2, 3});

/// Ideal: uniform body diagonal x_a = x_b = x_c. Finite{r}: three-mode
/// Gaussian matching ghz_resource(r).
WaveFunction make_ghz_wavefunction(const ResourceQuality& quality, const Grid& grid,
                                   std::array<int, 3> labels = {3, 4, 5});

/// Bridge between the two engines: samples the closed-form position-space
/// wavefunction of a pure Gaussian state (zero x-p correlations) on the grid.
/// n_modes <= 3. The grid extent must exceed 8x the largest position standard
/// deviation; otherwise the constructor refuses.
WaveFunction covariance_to_wavefunction(const GaussianState& s, const Grid& grid,
                                        const std::vector<int>& labels);

/// Largest position standard deviation of a Gaussian state (truncation guard).
double max_position_sigma(const GaussianState& s);

} // namespace cvtel

#endif
