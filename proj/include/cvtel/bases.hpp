#ifndef CVTEL_BASES_HPP
#define CVTEL_BASES_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cvtel/grid.hpp"

namespace cvtel {

// Outcome labels follow the correction convention used by the protocols: the
// reported values are chosen so that the conditional state of the unmeasured
// particles equals the receiver unitaries evaluated at the reported labels,
// applied to the ideal teleported state. Numerically this is the measured
// eigenvalue tuple negated and folded into the principal lattice window.

struct BellLabel {
    double P = 0.0;  // total-momentum eigenvalue, on the momentum lattice
    double Q = 0.0;  // relative-position eigenvalue, an integer multiple of spacing
};

/// Joint-measurement label. The momentum/Bell family uses (p, P, Q); the
/// fully entangled three-particle family uses (P, Q, R).
struct TripleLabel {
    double p = 0.0;
    double P = 0.0;
    double Q = 0.0;
    double R = 0.0;
};

struct MeasurementOutcome {
    TripleLabel label;
    double density = 0.0;  // probability mass of this lattice cell
    std::uint64_t seed = 0;
};

/// Two-particle state with amplitude e^{2iPx} along the sub-diagonal
/// x_a - x_b = Q, unit lattice norm. Joint eigenstate of the relative
/// position (eigenvalue Q) and total momentum (eigenvalue P).
WaveFunction bell_state(const BellLabel& label, const Grid& grid,
                        std::pair<int, int> labels = {1, 2});

/// Three-particle family with amplitude e^{3iPx} on the line
/// x_a - x_b = Q, x_a - x_c = R. P lives on a lattice of spacing
/// 2/3 * momentum_spacing so the phase is periodic on the grid.
WaveFunction triple_basis_state(const TripleLabel& label, const Grid& grid,
                                std::array<int, 3> labels = {1, 2, 3});
double triple_momentum_spacing(const Grid& grid);

/// Product of a single-particle momentum eigenstate |p> on the first label
/// and a Bell state of the remaining two: only two particles entangled.
WaveFunction pi123_state(const TripleLabel& label, const Grid& grid,
                         std::array<int, 3> labels = {1, 2, 3});

enum class JointBasis : std::uint8_t { Pi123, Triple };

/// Projective joint measurement of three particles of a five-particle state.
/// The outcome is sampled from the exact lattice Born distribution; the
/// returned conditional state of the two remaining particles is normalized.
std::pair<MeasurementOutcome, WaveFunction> joint_measure(const WaveFunction& state5,
                                                          JointBasis basis,
                                                          const std::array<int, 3>& measured,
                                                          std::uint64_t seed);

// Basis-family transforms used for completeness checks. analysis returns the
// full coefficient table (unit L2 norm for a normalized state); synthesis
// inverts it exactly on the lattice.
std::vector<cdouble> bell_analysis(const WaveFunction& w2);
WaveFunction bell_synthesis(const std::vector<cdouble>& coeff, const Grid& grid,
                            std::pair<int, int> labels);
std::vector<cdouble> pi123_analysis(const WaveFunction& w3);
WaveFunction pi123_synthesis(const std::vector<cdouble>& coeff, const Grid& grid,
                             std::array<int, 3> labels);
std::vector<cdouble> triple_analysis(const WaveFunction& w3);
WaveFunction triple_synthesis(const std::vector<cdouble>& coeff, const Grid& grid,
                              std::array<int, 3> labels);

/// Norm study of the outcome-indexed receiver maps induced by measuring in
/// the fully entangled triple basis versus the momentum/Bell family. For
/// inputs of the diagonal form the triple basis concentrates all weight on
/// Q = q and the induced map fails to preserve norms; the momentum/Bell
/// family is an exact isometry on the same test set.
struct IsometryDefectReport {
    struct Row {
        TripleLabel label;      // eigenvalue labels of the probed outcome
        double min_norm = 0.0;  // over the test states
        double max_norm = 0.0;
        double max_defect = 0.0;  // max |norm - 1|
    };
    std::vector<Row> triple_rows;
    std::vector<Row> pi123_rows;
    double triple_max_defect = 0.0;
    double pi123_max_defect = 0.0;
    double offdiagonal_weight = 0.0;  // largest conditional norm seen at Q != q
    double input_q = 0.0;
};

IsometryDefectReport demonstrate_triple_basis_failure(const WaveFunction& input2,
                                                      const WaveFunction& ghz3,
                                                      std::uint64_t seed);

/// Convenience overload taking the combined five-particle state
/// (input x GHZ); factors it and delegates. Dense, so small grids only.
IsometryDefectReport demonstrate_triple_basis_failure(const WaveFunction& state5,
                                                      const Grid& grid);

/// Offset of the single populated sub-diagonal of a two-particle state of the
/// form sum_x A(x)|x>|x-q>; throws if the state is not of that form.
int diagonal_offset(const WaveFunction& input2, double tol = 1e-12);

/// Orthonormality and completeness diagnostics for one basis family:
/// gram_deviation over a deterministic label subset, completeness_deviation
/// from reconstructing a seeded random state through analysis + synthesis.
struct FamilyCheck {
    double gram_deviation = 0.0;
    double completeness_deviation = 0.0;
};
FamilyCheck check_bell_family(const Grid& grid, std::uint64_t seed);
FamilyCheck check_pi123_family(const Grid& grid, std::uint64_t seed);
FamilyCheck check_triple_family(const Grid& grid, std::uint64_t seed);

} // namespace cvtel

#endif
