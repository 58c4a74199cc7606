#ifndef CVTEL_GRID_HPP
#define CVTEL_GRID_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvtel/kernels.hpp"

namespace cvtel {

// One-dimensional periodic position lattice shared by all wavefunction
// tensors. Units follow the quadrature convention x=(a+a^dag)/2,
// p=(a-a^dag)/2i, [x,p]=i/2, vacuum variance 1/4; the momentum kernel is
// <x|p> = e^{2ipx}/sqrt(pi), which makes the conjugate lattice spacing
// pi/(n_points*spacing).
struct Grid {
    int n_points = 0;
    double spacing = 0.0;
    int origin_index = 0;

    double extent() const { return n_points * spacing; }
    double position(int j) const { return (j - origin_index) * spacing; }
    double momentum_spacing() const;
    double momentum(int k) const { return (k - origin_index) * momentum_spacing(); }

    int wrap(long long j) const {
        long long m = j % n_points;
        if (m < 0) m += n_points;
        return static_cast<int>(m);
    }
    // Nearest lattice index of a position value; throws if off-lattice beyond tol.
    int position_index(double x, double tol = 1e-9) const;
    int momentum_index(double p, double tol = 1e-9) const;
    // Map a periodic value into the principal window [-period/2, period/2).
    static double principal(double value, double period);

    bool operator==(const Grid&) const = default;
};

// n_points must be a power of two >= 8; extent > 0.
Grid make_grid(int n_points, double extent);

enum class AxisBasis : std::uint8_t { Position, Momentum };

// Dense complex amplitude tensor over the grid for 1..5 particles.
// Amplitudes are stored row-major in label order; the squared norm uses the
// lattice measure (spacing per position axis, momentum spacing per momentum
// axis) and equals 1 after construction or normalize().
class WaveFunction {
public:
    WaveFunction(Grid grid, std::vector<int> labels, std::vector<cdouble> amplitudes,
                 bool normalize_now = true);

    const Grid& grid() const { return grid_; }
    int arity() const { return static_cast<int>(labels_.size()); }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<AxisBasis>& axis_bases() const { return bases_; }
    AxisBasis axis_basis(int axis) const { return bases_[static_cast<std::size_t>(axis)]; }
    void set_axis_basis(int axis, AxisBasis b) { bases_[static_cast<std::size_t>(axis)] = b; }

    int axis_of(int label) const;  // throws on unknown label
    bool has_label(int label) const;

    std::vector<cdouble>& data() { return amp_; }
    const std::vector<cdouble>& data() const { return amp_; }
    const std::vector<int>& extents() const { return extents_; }

    // Cell measure: product of the per-axis lattice spacings.
    double cell_measure() const;
    double squared_norm() const;
    double norm() const;
    void normalize();

    std::size_t flat_index(std::span<const int> idx) const;

private:
    Grid grid_;
    std::vector<int> labels_;
    std::vector<int> extents_;
    std::vector<AxisBasis> bases_;
    std::vector<cdouble> amp_;
};

// Conjugate-linear in the first argument. Requires matching grid, labels and
// per-axis bases.
cdouble inner_product(const WaveFunction& a, const WaveFunction& b);

// Unitary change of basis on one particle slot, kernel e^{-2ipx}/sqrt(pi)
// forward. to_position inverts it.
WaveFunction to_momentum(const WaveFunction& w, int label);
WaveFunction to_position(const WaveFunction& w, int label);

// Local lattice operators. position_shift(q): amplitude at site j moves to
// j + round(q/spacing), periodic wrap; momentum_phase(p): multiply by
// e^{2 i p x_j}. Both are exactly unitary on the periodic lattice.
struct GridOperator {
    enum class Kind : std::uint8_t { PositionShift, MomentumPhase, Permutation, Composed };
    Kind kind = Kind::PositionShift;
    int target = 0;             // particle label for shift/phase
    double amount = 0.0;        // shift distance or phase momentum
    std::vector<int> label_order;        // permutation: new axis order by label
    std::vector<GridOperator> parts;     // composed: applied left to right
};

GridOperator position_shift(int label, double q);
GridOperator momentum_phase(int label, double p);
GridOperator particle_permutation(std::vector<int> label_order);
GridOperator composed(std::vector<GridOperator> parts);
GridOperator adjoint(const GridOperator& op);

WaveFunction apply_operator(const WaveFunction& w, const GridOperator& op);

// Rename particle labels without touching amplitudes (size must match arity).
WaveFunction relabeled(const WaveFunction& w, std::vector<int> new_labels);
// Reorder axes so labels appear in the given order.
WaveFunction transposed(const WaveFunction& w, const std::vector<int>& label_order);

WaveFunction tensor_product(const WaveFunction& a, const WaveFunction& b);

} // namespace cvtel

#endif
