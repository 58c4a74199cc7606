#include "cvtel/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvtel {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int nearest_index(double value, double step, int origin, int n, double period, double tol,
                  const char* what) {
    // fold into one period around the principal window first
    const double folded = Grid::principal(value, period);
    const double raw = folded / step + origin;
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > tol / step)
        throw std::invalid_argument(std::string(what) + ": value off the lattice");
    long long j = static_cast<long long>(rounded);
    long long m = j % n;
    if (m < 0) m += n;
    return static_cast<int>(m);
}

} // namespace

double Grid::momentum_spacing() const {
    return std::numbers::pi / (n_points * spacing);
}

double Grid::principal(double value, double period) {
    double v = std::fmod(value, period);
    if (v < -period / 2.0) v += period;
    if (v >= period / 2.0) v -= period;
    return v;
}

int Grid::position_index(double x, double tol) const {
    return nearest_index(x, spacing, origin_index, n_points, extent(), tol, "position");
}

int Grid::momentum_index(double p, double tol) const {
    return nearest_index(p, momentum_spacing(), origin_index, n_points,
                         n_points * momentum_spacing(), tol, "momentum");
}

Grid make_grid(int n_points, double extent) {
    if (n_points < 8 || !is_pow2(n_points))
        throw std::invalid_argument("make_grid: n_points must be a power of two >= 8");
    if (!(extent > 0.0)) throw std::invalid_argument("make_grid: extent must be positive");
    Grid g;
    g.n_points = n_points;
    g.spacing = extent / n_points;
    g.origin_index = n_points / 2;
    return g;
}

WaveFunction::WaveFunction(Grid grid, std::vector<int> labels, std::vector<cdouble> amplitudes,
                           bool normalize_now)
    : grid_(grid), labels_(std::move(labels)), amp_(std::move(amplitudes)) {
    const int k = static_cast<int>(labels_.size());
    if (k < 1 || k > 5) throw std::invalid_argument("WaveFunction: arity must be 1..5");
    for (std::size_t i = 0; i < labels_.size(); ++i)
        for (std::size_t j = i + 1; j < labels_.size(); ++j)
            if (labels_[i] == labels_[j])
                throw std::invalid_argument("WaveFunction: duplicate particle label");
    extents_.assign(static_cast<std::size_t>(k), grid_.n_points);
    bases_.assign(static_cast<std::size_t>(k), AxisBasis::Position);
    if (amp_.size() != tensor_size(extents_))
        throw std::invalid_argument("WaveFunction: amplitude count does not match grid^arity");
    if (normalize_now) normalize();
}

int WaveFunction::axis_of(int label) const {
    for (std::size_t a = 0; a < labels_.size(); ++a)
        if (labels_[a] == label) return static_cast<int>(a);
    throw std::invalid_argument("WaveFunction: unknown particle label " + std::to_string(label));
}

bool WaveFunction::has_label(int label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

double WaveFunction::cell_measure() const {
    double m = 1.0;
    for (std::size_t a = 0; a < bases_.size(); ++a)
        m *= (bases_[a] == AxisBasis::Position) ? grid_.spacing : grid_.momentum_spacing();
    return m;
}

double WaveFunction::squared_norm() const {
    return cvtel::squared_norm(std::span<const cdouble>(amp_)) * cell_measure();
}

double WaveFunction::norm() const { return std::sqrt(squared_norm()); }

void WaveFunction::normalize() {
    const double n = norm();
    if (!(n > 0.0)) throw std::runtime_error("WaveFunction: cannot normalize zero state");
    scale(amp_, cdouble{1.0 / n, 0.0});
}

std::size_t WaveFunction::flat_index(std::span<const int> idx) const {
    std::size_t f = 0;
    for (std::size_t a = 0; a < idx.size(); ++a)
        f = f * static_cast<std::size_t>(grid_.n_points) + static_cast<std::size_t>(idx[a]);
    return f;
}

cdouble inner_product(const WaveFunction& a, const WaveFunction& b) {
    if (a.grid() != b.grid() || a.labels() != b.labels() || a.axis_bases() != b.axis_bases())
        throw std::invalid_argument("inner_product: grid/labels/basis mismatch");
    const auto& va = a.data();
    const auto& vb = b.data();
    constexpr std::size_t kBlock = 1024;
    const std::size_t nblocks = (va.size() + kBlock - 1) / kBlock;
    std::vector<cdouble> partial(nblocks, cdouble{0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
        const std::size_t lo = blk * kBlock;
        const std::size_t hi = std::min(lo + kBlock, va.size());
        cdouble s{0.0, 0.0};
        for (std::size_t i = lo; i < hi; ++i) s += std::conj(va[i]) * vb[i];
        partial[blk] = s;
    }
    return deterministic_sum(std::span<const cdouble>(partial)) * a.cell_measure();
}

namespace {

// x<->p change of basis along one axis. Forward kernel e^{-2ipx}:
//   out_k = (dx/sqrt(pi)) (-1)^k FFT_-[(-1)^j in_j]
// which is exactly unitary in the lattice measure for n divisible by 4.
void transform_axis(WaveFunction& w, int axis, bool to_momentum_dir) {
    const Grid& g = w.grid();
    const int n = g.n_points;
    std::vector<cdouble> parity(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) parity[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
    const double scale_mag = (to_momentum_dir ? g.spacing : g.momentum_spacing()) /
                             std::sqrt(std::numbers::pi);
    weight_axis(w.data(), w.extents(), axis, parity);
    fft_axis(w.data(), w.extents(), axis, to_momentum_dir ? -1 : +1);
    weight_axis(w.data(), w.extents(), axis, parity);
    scale(w.data(), cdouble{scale_mag, 0.0});
}

} // namespace

WaveFunction to_momentum(const WaveFunction& w, int label) {
    const int axis = w.axis_of(label);
    if (w.axis_basis(axis) != AxisBasis::Position)
        throw std::invalid_argument("to_momentum: axis already in momentum basis");
    WaveFunction out = w;
    transform_axis(out, axis, true);
    out.set_axis_basis(axis, AxisBasis::Momentum);
    return out;
}

WaveFunction to_position(const WaveFunction& w, int label) {
    const int axis = w.axis_of(label);
    if (w.axis_basis(axis) != AxisBasis::Momentum)
        throw std::invalid_argument("to_position: axis already in position basis");
    WaveFunction out = w;
    transform_axis(out, axis, false);
    out.set_axis_basis(axis, AxisBasis::Position);
    return out;
}

GridOperator position_shift(int label, double q) {
    GridOperator op;
    op.kind = GridOperator::Kind::PositionShift;
    op.target = label;
    op.amount = q;
    return op;
}

GridOperator momentum_phase(int label, double p) {
    GridOperator op;
    op.kind = GridOperator::Kind::MomentumPhase;
    op.target = label;
    op.amount = p;
    return op;
}

GridOperator particle_permutation(std::vector<int> label_order) {
    GridOperator op;
    op.kind = GridOperator::Kind::Permutation;
    op.label_order = std::move(label_order);
    return op;
}

GridOperator composed(std::vector<GridOperator> parts) {
    GridOperator op;
    op.kind = GridOperator::Kind::Composed;
    op.parts = std::move(parts);
    return op;
}

GridOperator adjoint(const GridOperator& op) {
    switch (op.kind) {
        case GridOperator::Kind::PositionShift: return position_shift(op.target, -op.amount);
        case GridOperator::Kind::MomentumPhase: return momentum_phase(op.target, -op.amount);
        case GridOperator::Kind::Permutation: {
            // permutations used here are self-describing reorders; adjoint is
            // the inverse order mapping
            return particle_permutation(op.label_order);
        }
        case GridOperator::Kind::Composed: {
            std::vector<GridOperator> rev;
            rev.reserve(op.parts.size());
            for (auto it = op.parts.rbegin(); it != op.parts.rend(); ++it)
                rev.push_back(adjoint(*it));
            return composed(std::move(rev));
        }
    }
    throw std::logic_error("adjoint: bad operator kind");
}

WaveFunction apply_operator(const WaveFunction& w, const GridOperator& op) {
    switch (op.kind) {
        case GridOperator::Kind::PositionShift: {
            const int axis = w.axis_of(op.target);
            if (w.axis_basis(axis) != AxisBasis::Position)
                throw std::invalid_argument("position_shift: axis not in position basis");
            const int steps = static_cast<int>(std::llround(op.amount / w.grid().spacing));
            WaveFunction out = w;
            roll_axis(out.data(), out.extents(), axis, steps);
            return out;
        }
        case GridOperator::Kind::MomentumPhase: {
            const int axis = w.axis_of(op.target);
            if (w.axis_basis(axis) != AxisBasis::Position)
                throw std::invalid_argument("momentum_phase: axis not in position basis");
            const Grid& g = w.grid();
            std::vector<cdouble> phase(static_cast<std::size_t>(g.n_points));
            for (int j = 0; j < g.n_points; ++j)
                phase[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * op.amount * g.position(j));
            WaveFunction out = w;
            weight_axis(out.data(), out.extents(), axis, phase);
            return out;
        }
        case GridOperator::Kind::Permutation:
            return transposed(w, op.label_order);
        case GridOperator::Kind::Composed: {
            WaveFunction out = w;
            for (const auto& part : op.parts) out = apply_operator(out, part);
            return out;
        }
    }
    throw std::logic_error("apply_operator: bad operator kind");
}

WaveFunction relabeled(const WaveFunction& w, std::vector<int> new_labels) {
    if (new_labels.size() != w.labels().size())
        throw std::invalid_argument("relabeled: label count mismatch");
    WaveFunction out(w.grid(), std::move(new_labels), w.data(), false);
    for (int a = 0; a < w.arity(); ++a) out.set_axis_basis(a, w.axis_basis(a));
    return out;
}

WaveFunction transposed(const WaveFunction& w, const std::vector<int>& label_order) {
    if (label_order.size() != w.labels().size())
        throw std::invalid_argument("transposed: label count mismatch");
    const int k = w.arity();
    std::vector<int> src_axis(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) src_axis[static_cast<std::size_t>(a)] = w.axis_of(label_order[static_cast<std::size_t>(a)]);

    const int n = w.grid().n_points;
    std::vector<cdouble> out_amp(w.data().size());
    const auto& in = w.data();
    const std::size_t total = in.size();
#pragma omp parallel for schedule(static)
    for (std::size_t f = 0; f < total; ++f) {
        // decode multi-index of the output, gather from the source axis order
        std::size_t rem = f;
        int idx_out[5];
        for (int a = k - 1; a >= 0; --a) {
            idx_out[a] = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        std::size_t fs = 0;
        int idx_in[5];
        for (int a = 0; a < k; ++a) idx_in[src_axis[static_cast<std::size_t>(a)]] = idx_out[a];
        for (int a = 0; a < k; ++a) fs = fs * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx_in[a]);
        out_amp[f] = in[fs];
    }
    WaveFunction out(w.grid(), label_order, std::move(out_amp), false);
    for (int a = 0; a < k; ++a)
        out.set_axis_basis(a, w.axis_basis(src_axis[static_cast<std::size_t>(a)]));
    return out;
}

WaveFunction tensor_product(const WaveFunction& a, const WaveFunction& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("tensor_product: grid mismatch");
    std::vector<int> labels = a.labels();
    for (int lb : b.labels()) {
        if (a.has_label(lb)) throw std::invalid_argument("tensor_product: duplicate label");
        labels.push_back(lb);
    }
    const std::size_t na = a.data().size();
    const std::size_t nb = b.data().size();
    std::vector<cdouble> amp(na * nb);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < na; ++i) {
        const cdouble ai = a.data()[i];
        for (std::size_t j = 0; j < nb; ++j) amp[i * nb + j] = ai * b.data()[j];
    }
    WaveFunction out(a.grid(), std::move(labels), std::move(amp), false);
    for (int ax = 0; ax < a.arity(); ++ax) out.set_axis_basis(ax, a.axis_basis(ax));
    for (int ax = 0; ax < b.arity(); ++ax) out.set_axis_basis(a.arity() + ax, b.axis_basis(ax));
    return out;
}

} // namespace cvtel
