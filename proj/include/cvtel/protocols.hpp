#ifndef CVTEL_PROTOCOLS_HPP
#define CVTEL_PROTOCOLS_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cvtel/bases.hpp"
#include "cvtel/gaussian.hpp"
#include "cvtel/grid.hpp"
#include "cvtel/resources.hpp"

namespace cvtel {

// End-to-end teleportation protocols. Measurement outcomes are reported in
// the correction convention (see bases.hpp), so the receivers always apply
// the adjoint of their unitary at the reported labels. For the entangled
// protocol the recovered pair carries the input with the two particles
// exchanged: particle 4 ends up with the second input particle's state and
// particle 5 with the first, so the relative position comes back as -q.
// Fidelities are therefore taken against that exchanged reference, which for
// q = 0 coincides with the input itself.

/// Outcome-conditioned local correction applied by one receiver.
struct CorrectionOp {
    enum class Kind : std::uint8_t { ReceiverB, ReceiverC, Displacement };
    Kind kind = Kind::ReceiverB;
    bool adjoint = false;
    int target = 0;
    double p = 0.0, P = 0.0, Q = 0.0, q = 0.0;
    double dx = 0.0, dp = 0.0;  // displacement components
};

struct TeleportRecord {
    enum class Protocol : std::uint8_t { Single, Entangled };
    Protocol protocol = Protocol::Single;
    ResourceQuality quality;
    MeasurementOutcome outcome;
    std::array<double, 3> classical_message{0.0, 0.0, 0.0};  // p, P, Q
    std::vector<CorrectionOp> corrections;                   // applied in order
    double fidelity = 0.0;
    std::uint64_t seed = 0;
};

/// Receiver B unitary: shift by Q then momentum phase P
/// (psi(x) -> e^{2iPx} psi(x-Q)). Parameters must lie on their lattices.
WaveFunction bob_correction(const WaveFunction& w, double P, double Q, int label, bool adjoint);

/// Receiver C unitary: shift by Q, momentum phase p, constant phase e^{2ipq}
/// (psi(x) -> e^{2ip(x+q)} psi(x-Q)). P is carried along with the classical
/// message but does not enter the kernel.
WaveFunction claire_correction(const WaveFunction& w, double p, double P, double Q, double q,
                               int label, bool adjoint);

WaveFunction apply_correction(const WaveFunction& w, const CorrectionOp& op);

struct SingleRunResult {
    TeleportRecord record;
    WaveFunction output;  // corrected receiver state, relabeled to the input's label
};

SingleRunResult teleport_single(const WaveFunction& input1, const ResourceQuality& quality,
                                const Grid& grid, std::uint64_t seed);
/// Same protocol for many seeds, sharing one Born table.
std::vector<SingleRunResult> teleport_single_batch(const WaveFunction& input1,
                                                   const ResourceQuality& quality,
                                                   const Grid& grid,
                                                   std::span<const std::uint64_t> seeds);
/// Exact measurement-averaged fidelity (no sampling).
double teleport_single_expected_fidelity(const WaveFunction& input1,
                                         const ResourceQuality& quality, const Grid& grid);

struct EntangledRunResult {
    TeleportRecord record;
    WaveFunction input;        // labels 1,2
    WaveFunction conditional;  // labels 4,5 before corrections
    WaveFunction output;       // labels 4,5 after corrections
    WaveFunction reference;    // exchanged input on labels 4,5
};

EntangledRunResult teleport_entangled(const InputSpec& spec, const ResourceQuality& quality,
                                      const Grid& grid, std::uint64_t seed);
std::vector<EntangledRunResult> teleport_entangled_batch(const InputSpec& spec,
                                                         const ResourceQuality& quality,
                                                         const Grid& grid,
                                                         std::span<const std::uint64_t> seeds);
double teleport_entangled_expected_fidelity(const InputSpec& spec, const ResourceQuality& quality,
                                            const Grid& grid);

struct CorrelationReport {
    double var_x_diff = 0.0;    // Var(x_4 - x_5) of the output
    double mean_x_diff = 0.0;   // peaks at -q
    double var_p_sum_out = 0.0; // Var(p_4 + p_5)
    double mean_p_sum_out = 0.0;
    double var_p_sum_in = 0.0;  // Var(p_1 + p_2) of the input
    double mean_p_sum_in = 0.0;
};

CorrelationReport verify_output_correlations(const EntangledRunResult& run);

/// Covariance-engine version of the entangled protocol: squeezed input pair,
/// GHZ resource, homodyne of (p_1, total momentum, relative position),
/// displacement corrections. Returns the conditional pair state and its
/// fidelity against the exchanged input pair.
struct GaussianTeleportResult {
    std::array<double, 3> classical_message{0.0, 0.0, 0.0};
    GaussianState output;     // modes (4,5)
    GaussianState reference;  // exchanged input pair
    double var_x_diff = 0.0;
    double fidelity = 0.0;
};

GaussianTeleportResult teleport_entangled_gaussian(double input_r, double ghz_r, double q,
                                                   std::uint64_t seed);

/// Engine prediction for Var(x_4 - x_5) after the entangled protocol with a
/// finite-r GHZ resource (outcome-independent).
double gaussian_var_x_diff_prediction(double ghz_r);

} // namespace cvtel

#endif
