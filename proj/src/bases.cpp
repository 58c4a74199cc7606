#include "cvtel/bases.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvtel/resources.hpp"
#include "cvtel/rng.hpp"

namespace cvtel {

namespace {

// Centered lattice transform along one axis, kernel e^{-+2 i P_k x_j}
// (unnormalized). Valid for n divisible by 4, which make_grid guarantees.
void centered_fft_axis(std::vector<cdouble>& t, const std::vector<int>& ext, int axis, int sign) {
    const int n = ext[static_cast<std::size_t>(axis)];
    std::vector<cdouble> parity(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) parity[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
    weight_axis(t, ext, axis, parity);
    fft_axis(t, ext, axis, sign);
    weight_axis(t, ext, axis, parity);
}

int offset_steps(const Grid& g, double value, const char* what) {
    const double steps = value / g.spacing;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9)
        throw std::invalid_argument(std::string(what) + ": relative position off the lattice");
    return g.wrap(static_cast<long long>(rounded));
}

int triple_momentum_index(const Grid& g, double P) {
    const double step = triple_momentum_spacing(g);
    const double raw = Grid::principal(P, g.n_points * step) / step + g.origin_index;
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-9)
        throw std::invalid_argument("triple basis: momentum label off its lattice");
    long long k = static_cast<long long>(rounded) % g.n_points;
    if (k < 0) k += g.n_points;
    return static_cast<int>(k);
}

} // namespace

double triple_momentum_spacing(const Grid& grid) {
    return 2.0 * grid.momentum_spacing() / 3.0;
}

WaveFunction bell_state(const BellLabel& label, const Grid& grid, std::pair<int, int> labels) {
    const int kP = grid.momentum_index(label.P);
    const int m = offset_steps(grid, label.Q, "bell_state");
    const int n = grid.n_points;
    std::vector<cdouble> amp(static_cast<std::size_t>(n) * n, cdouble{0.0, 0.0});
    for (int j = 0; j < n; ++j) {
        const int l = grid.wrap(j - m);
        amp[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(l)] =
            std::polar(1.0, 2.0 * grid.momentum(kP) * grid.position(j));
    }
    return WaveFunction(grid, {labels.first, labels.second}, std::move(amp));
}

WaveFunction triple_basis_state(const TripleLabel& label, const Grid& grid,
                                std::array<int, 3> labels) {
    const int k = triple_momentum_index(grid, label.P);
    const int mQ = offset_steps(grid, label.Q, "triple_basis_state");
    const int mR = offset_steps(grid, label.R, "triple_basis_state");
    const int n = grid.n_points;
    const double pval = (k - grid.origin_index) * triple_momentum_spacing(grid);
    std::vector<cdouble> amp(static_cast<std::size_t>(n) * n * n, cdouble{0.0, 0.0});
    for (int j = 0; j < n; ++j) {
        const std::size_t f =
            (static_cast<std::size_t>(j) * n + static_cast<std::size_t>(grid.wrap(j - mQ))) * n +
            static_cast<std::size_t>(grid.wrap(j - mR));
        amp[f] = std::polar(1.0, 3.0 * pval * grid.position(j));
    }
    return WaveFunction(grid, {labels[0], labels[1], labels[2]}, std::move(amp));
}

WaveFunction pi123_state(const TripleLabel& label, const Grid& grid, std::array<int, 3> labels) {
    const int kp = grid.momentum_index(label.p);
    const int n = grid.n_points;
    std::vector<cdouble> head(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        head[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * grid.momentum(kp) * grid.position(j));
    WaveFunction first(grid, {labels[0]}, std::move(head));
    WaveFunction pair = bell_state(BellLabel{label.P, label.Q}, grid, {labels[1], labels[2]});
    return tensor_product(first, pair);
}

std::vector<cdouble> bell_analysis(const WaveFunction& w2) {
    if (w2.arity() != 2) throw std::invalid_argument("bell_analysis: arity-2 state required");
    const Grid& g = w2.grid();
    const int n = g.n_points;
    const auto& in = w2.data();
    std::vector<cdouble> coeff(static_cast<std::size_t>(n) * n);  // [m][k]
#pragma omp parallel for schedule(static)
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j)
            coeff[static_cast<std::size_t>(m) * n + static_cast<std::size_t>(j)] =
                in[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(g.wrap(j - m))];
    const std::vector<int> ext{n, n};
    centered_fft_axis(coeff, ext, 1, -1);
    scale(coeff, cdouble{g.spacing / std::sqrt(static_cast<double>(n)), 0.0});
    return coeff;
}

WaveFunction bell_synthesis(const std::vector<cdouble>& coeff, const Grid& grid,
                            std::pair<int, int> labels) {
    const int n = grid.n_points;
    std::vector<cdouble> diag = coeff;  // [m][k] -> [m][j]
    const std::vector<int> ext{n, n};
    centered_fft_axis(diag, ext, 1, +1);
    scale(diag, cdouble{1.0 / (std::sqrt(static_cast<double>(n)) * grid.spacing), 0.0});
    std::vector<cdouble> amp(static_cast<std::size_t>(n) * n, cdouble{0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j)
            amp[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(grid.wrap(j - m))] =
                diag[static_cast<std::size_t>(m) * n + static_cast<std::size_t>(j)];
    return WaveFunction(grid, {labels.first, labels.second}, std::move(amp), false);
}

std::vector<cdouble> pi123_analysis(const WaveFunction& w3) {
    if (w3.arity() != 3) throw std::invalid_argument("pi123_analysis: arity-3 state required");
    const Grid& g = w3.grid();
    const int n = g.n_points;
    const auto& in = w3.data();
    std::vector<cdouble> coeff(static_cast<std::size_t>(n) * n * n);  // [m][kp][kP]
    const std::vector<int> slice_ext{n, n};
    for (int m = 0; m < n; ++m) {
        std::vector<cdouble> s(static_cast<std::size_t>(n) * n);
#pragma omp parallel for schedule(static)
        for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2)
                s[static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j2)] =
                    in[(static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j2)) * n +
                       static_cast<std::size_t>(g.wrap(j2 - m))];
        centered_fft_axis(s, slice_ext, 0, -1);
        centered_fft_axis(s, slice_ext, 1, -1);
        std::copy(s.begin(), s.end(),
                  coeff.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(m) * n * n));
    }
    scale(coeff, cdouble{std::pow(g.spacing, 1.5) / static_cast<double>(n), 0.0});
    return coeff;
}

WaveFunction pi123_synthesis(const std::vector<cdouble>& coeff, const Grid& grid,
                             std::array<int, 3> labels) {
    const int n = grid.n_points;
    std::vector<cdouble> amp(static_cast<std::size_t>(n) * n * n, cdouble{0.0, 0.0});
    const std::vector<int> slice_ext{n, n};
    for (int m = 0; m < n; ++m) {
        std::vector<cdouble> s(coeff.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(m) * n * n),
                               coeff.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(m + 1) * n * n));
        centered_fft_axis(s, slice_ext, 0, +1);
        centered_fft_axis(s, slice_ext, 1, +1);
#pragma omp parallel for schedule(static)
        for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2)
                amp[(static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j2)) * n +
                    static_cast<std::size_t>(grid.wrap(j2 - m))] =
                    s[static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j2)];
    }
    scale(amp, cdouble{1.0 / (static_cast<double>(n) * std::pow(grid.spacing, 1.5)), 0.0});
    return WaveFunction(grid, {labels[0], labels[1], labels[2]}, std::move(amp), false);
}

std::vector<cdouble> triple_analysis(const WaveFunction& w3) {
    if (w3.arity() != 3) throw std::invalid_argument("triple_analysis: arity-3 state required");
    const Grid& g = w3.grid();
    const int n = g.n_points;
    const auto& in = w3.data();
    std::vector<cdouble> coeff(static_cast<std::size_t>(n) * n * n);  // [mQ][mR][k]
#pragma omp parallel for schedule(static)
    for (int mQ = 0; mQ < n; ++mQ) {
        for (int mR = 0; mR < n; ++mR) {
            for (int j = 0; j < n; ++j)
                coeff[(static_cast<std::size_t>(mQ) * n + static_cast<std::size_t>(mR)) * n +
                      static_cast<std::size_t>(j)] =
                    in[(static_cast<std::size_t>(j) * n + static_cast<std::size_t>(g.wrap(j - mQ))) * n +
                       static_cast<std::size_t>(g.wrap(j - mR))];
        }
    }
    centered_fft_axis(coeff, std::vector<int>{n, n, n}, 2, -1);
    scale(coeff, cdouble{std::pow(g.spacing, 1.5) / std::sqrt(static_cast<double>(n)), 0.0});
    return coeff;
}

WaveFunction triple_synthesis(const std::vector<cdouble>& coeff, const Grid& grid,
                              std::array<int, 3> labels) {
    const int n = grid.n_points;
    std::vector<cdouble> lines = coeff;
    centered_fft_axis(lines, std::vector<int>{n, n, n}, 2, +1);
    std::vector<cdouble> amp(static_cast<std::size_t>(n) * n * n, cdouble{0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (int mQ = 0; mQ < n; ++mQ)
        for (int mR = 0; mR < n; ++mR)
            for (int j = 0; j < n; ++j)
                amp[(static_cast<std::size_t>(j) * n + static_cast<std::size_t>(grid.wrap(j - mQ))) * n +
                    static_cast<std::size_t>(grid.wrap(j - mR))] =
                    lines[(static_cast<std::size_t>(mQ) * n + static_cast<std::size_t>(mR)) * n +
                          static_cast<std::size_t>(j)];
    scale(amp, cdouble{1.0 / (std::sqrt(static_cast<double>(n)) * std::pow(grid.spacing, 1.5)), 0.0});
    return WaveFunction(grid, {labels[0], labels[1], labels[2]}, std::move(amp), false);
}

namespace {

double principal_negated_position(const Grid& g, int m) {
    return Grid::principal(-Grid::principal(m * g.spacing, g.extent()), g.extent());
}

double principal_negated_momentum(const Grid& g, int k) {
    const double period = g.n_points * g.momentum_spacing();
    return Grid::principal(-g.momentum(k), period);
}

} // namespace

std::pair<MeasurementOutcome, WaveFunction> joint_measure(const WaveFunction& state5,
                                                          JointBasis basis,
                                                          const std::array<int, 3>& measured,
                                                          std::uint64_t seed) {
    if (state5.arity() != 5) throw std::invalid_argument("joint_measure: arity-5 state required");
    const Grid& g = state5.grid();
    const int n = g.n_points;
    if (n > 32)
        throw std::invalid_argument("joint_measure: dense five-particle path limited to 32 points");
    for (int lb : measured)
        if (!state5.has_label(lb)) throw std::invalid_argument("joint_measure: measured label missing");

    // Reorder axes: measured first (in the given order), then the two others.
    std::vector<int> order(measured.begin(), measured.end());
    for (int lb : state5.labels())
        if (std::find(order.begin(), order.end(), lb) == order.end()) order.push_back(lb);
    const WaveFunction t = transposed(state5, order);
    const std::array<int, 2> rest{order[3], order[4]};
    const auto& td = t.data();
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const std::size_t n4 = n2 * n2;

    const double dx = g.spacing;
    std::vector<double> weights;
    std::vector<cdouble> cond;
    MeasurementOutcome outcome;
    outcome.seed = seed;

    if (basis == JointBasis::Pi123) {
        // chi_{p,P,Q}(j4,j5) = a * FFT_{j1,j2}[ t(j1,j2,j2-m,j4,j5) ]
        const double alpha = std::pow(dx, 1.5) / static_cast<double>(n);
        const std::vector<int> ext4{n, n, n, n};
        weights.assign(static_cast<std::size_t>(n) * n2, 0.0);  // [m][kp][kP]
        std::vector<cdouble> slice(n4);
        for (int m = 0; m < n; ++m) {
#pragma omp parallel for schedule(static)
            for (int j1 = 0; j1 < n; ++j1)
                for (int j2 = 0; j2 < n; ++j2) {
                    const int j3 = g.wrap(j2 - m);
                    const std::size_t src =
                        ((static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j2)) * n +
                         static_cast<std::size_t>(j3)) * n2;
                    const std::size_t dst = (static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j2)) * n2;
                    std::copy(td.begin() + static_cast<std::ptrdiff_t>(src),
                              td.begin() + static_cast<std::ptrdiff_t>(src + n2),
                              slice.begin() + static_cast<std::ptrdiff_t>(dst));
                }
            centered_fft_axis(slice, ext4, 0, -1);
            centered_fft_axis(slice, ext4, 1, -1);
            for (int kp = 0; kp < n; ++kp)
                for (int kP = 0; kP < n; ++kP) {
                    double s = 0.0;
                    const std::size_t base = (static_cast<std::size_t>(kp) * n + static_cast<std::size_t>(kP)) * n2;
                    for (std::size_t r = 0; r < n2; ++r) s += std::norm(slice[base + r]);
                    weights[(static_cast<std::size_t>(m) * n + static_cast<std::size_t>(kp)) * n +
                            static_cast<std::size_t>(kP)] = s * alpha * alpha * dx * dx;
                }
        }
        SeededRng rng(seed);
        const std::size_t pick = rng.discrete(weights);
        const int m = static_cast<int>(pick / n2);
        const int kp = static_cast<int>((pick / n) % static_cast<std::size_t>(n));
        const int kP = static_cast<int>(pick % static_cast<std::size_t>(n));
        // rebuild the sampled slice
#pragma omp parallel for schedule(static)
        for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2) {
                const int j3 = g.wrap(j2 - m);
                const std::size_t src =
                    ((static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j2)) * n +
                     static_cast<std::size_t>(j3)) * n2;
                const std::size_t dst = (static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j2)) * n2;
                std::copy(td.begin() + static_cast<std::ptrdiff_t>(src),
                          td.begin() + static_cast<std::ptrdiff_t>(src + n2),
                          slice.begin() + static_cast<std::ptrdiff_t>(dst));
            }
        centered_fft_axis(slice, ext4, 0, -1);
        centered_fft_axis(slice, ext4, 1, -1);
        cond.assign(slice.begin() + static_cast<std::ptrdiff_t>(
                        (static_cast<std::size_t>(kp) * n + static_cast<std::size_t>(kP)) * n2),
                    slice.begin() + static_cast<std::ptrdiff_t>(
                        (static_cast<std::size_t>(kp) * n + static_cast<std::size_t>(kP) + 1) * n2));
        outcome.label.p = principal_negated_momentum(g, kp);
        outcome.label.P = principal_negated_momentum(g, kP);
        outcome.label.Q = principal_negated_position(g, m);
        outcome.density = weights[pick];
    } else {
        const double alpha = std::pow(dx, 1.5) / std::sqrt(static_cast<double>(n));
        weights.assign(static_cast<std::size_t>(n) * n2, 0.0);  // [mQ][mR][k]
        std::vector<cdouble> lines(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * n2);
        for (int mQ = 0; mQ < n; ++mQ) {
#pragma omp parallel for schedule(static)
            for (int mR = 0; mR < n; ++mR)
                for (int j = 0; j < n; ++j) {
                    const std::size_t src =
                        ((static_cast<std::size_t>(j) * n + static_cast<std::size_t>(g.wrap(j - mQ))) * n +
                         static_cast<std::size_t>(g.wrap(j - mR))) * n2;
                    const std::size_t dst = (static_cast<std::size_t>(mR) * n + static_cast<std::size_t>(j)) * n2;
                    std::copy(td.begin() + static_cast<std::ptrdiff_t>(src),
                              td.begin() + static_cast<std::ptrdiff_t>(src + n2),
                              lines.begin() + static_cast<std::ptrdiff_t>(dst));
                }
            // transform the j axis (axis 1 of [mR][j][rest])
            centered_fft_axis(lines, std::vector<int>{n, n, static_cast<int>(n2)}, 1, -1);
            for (int mR = 0; mR < n; ++mR)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    const std::size_t base = (static_cast<std::size_t>(mR) * n + static_cast<std::size_t>(k)) * n2;
                    for (std::size_t r = 0; r < n2; ++r) s += std::norm(lines[base + r]);
                    weights[(static_cast<std::size_t>(mQ) * n + static_cast<std::size_t>(mR)) * n +
                            static_cast<std::size_t>(k)] = s * alpha * alpha * dx * dx;
                }
        }
        SeededRng rng(seed);
        const std::size_t pick = rng.discrete(weights);
        const int mQ = static_cast<int>(pick / n2);
        const int mR = static_cast<int>((pick / n) % static_cast<std::size_t>(n));
        const int k = static_cast<int>(pick % static_cast<std::size_t>(n));
        std::vector<cdouble> v(static_cast<std::size_t>(n) * n2);
#pragma omp parallel for schedule(static)
        for (int j = 0; j < n; ++j) {
            const std::size_t src =
                ((static_cast<std::size_t>(j) * n + static_cast<std::size_t>(g.wrap(j - mQ))) * n +
                 static_cast<std::size_t>(g.wrap(j - mR))) * n2;
            std::copy(td.begin() + static_cast<std::ptrdiff_t>(src),
                      td.begin() + static_cast<std::ptrdiff_t>(src + n2),
                      v.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(j) * n2));
        }
        centered_fft_axis(v, std::vector<int>{n, static_cast<int>(n2)}, 0, -1);
        cond.assign(v.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(k) * n2),
                    v.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(k) + 1) * n2));
        const double period = static_cast<double>(n) * triple_momentum_spacing(g);
        const double pval = (k - g.origin_index) * triple_momentum_spacing(g);
        outcome.label.P = Grid::principal(-Grid::principal(pval, period), period);
        outcome.label.Q = principal_negated_position(g, mQ);
        outcome.label.R = principal_negated_position(g, mR);
        outcome.density = weights[pick];
    }

    WaveFunction conditional(g, {rest[0], rest[1]}, std::move(cond));
    return {outcome, std::move(conditional)};
}

int diagonal_offset(const WaveFunction& input2, double tol) {
    if (input2.arity() != 2) throw std::invalid_argument("diagonal_offset: arity-2 state required");
    const Grid& g = input2.grid();
    const int n = g.n_points;
    const auto& d = input2.data();
    int offset = -1;
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            if (std::abs(d[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(l)]) <= tol)
                continue;
            const int m = g.wrap(j - l);
            if (offset < 0) offset = m;
            if (m != offset)
                throw std::invalid_argument("diagonal_offset: state is not a single sub-diagonal");
        }
    }
    if (offset < 0) throw std::invalid_argument("diagonal_offset: empty state");
    return offset;
}

namespace {

Eigen::MatrixXcd ghz_gram(const WaveFunction& ghz3) {
    const int n = ghz3.grid().n_points;
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    Eigen::Map<const Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> G(
        ghz3.data().data(), n, static_cast<Eigen::Index>(n2));
    return G * G.adjoint();  // K(s,s') = sum_{45} G(s,..) conj(G(s',..))
}

} // namespace

IsometryDefectReport demonstrate_triple_basis_failure(const WaveFunction& input2,
                                                      const WaveFunction& ghz3,
                                                      std::uint64_t seed) {
    const Grid& g = input2.grid();
    if (ghz3.grid() != g) throw std::invalid_argument("triple failure demo: grid mismatch");
    const int n = g.n_points;
    const double dx = g.spacing;
    const int mq = diagonal_offset(input2);

    IsometryDefectReport report;
    report.input_q = Grid::principal(mq * dx, g.extent());

    // Test set: smooth random profiles sharing the protocol's q.
    constexpr int kTestStates = 8;
    std::vector<WaveFunction> tests;
    tests.reserve(kTestStates);
    for (int i = 0; i < kTestStates; ++i) {
        InputSpec spec;
        spec.profile = RandomSmooth{seed + static_cast<std::uint64_t>(i)};
        spec.q = report.input_q;
        tests.push_back(make_input_state(spec, g, {1, 2}));
    }

    const Eigen::MatrixXcd K = ghz_gram(ghz3);
    const double outcomes_scale = std::pow(static_cast<double>(n), 1.5);  // sqrt(N^3)

    auto map_norm = [&](const std::vector<cdouble>& bracket) {
        Eigen::Map<const Eigen::VectorXcd> b(bracket.data(), n);
        const double w = std::max(0.0, (b.adjoint() * K * b)(0).real() * dx * dx);
        return outcomes_scale * std::sqrt(w);
    };

    const std::array<int, 2> kp_probe{n / 2, n / 2 + 3};
    const std::array<int, 2> kP_probe{n / 2, n / 2 + 5};
    const std::array<int, 2> mR_probe{0, n / 4};
    std::vector<int> mQ_probe;
    for (int d = -2; d <= 2; ++d) mQ_probe.push_back(g.wrap(mq + d));

    // Fully entangled triple family: U_C carries a delta(Q - q) factor, so the
    // induced map annihilates Q != q and over-concentrates Q = q.
    for (int mQ : mQ_probe) {
        for (int mR : mR_probe) {
            for (int k : kp_probe) {
                IsometryDefectReport::Row row;
                const double pval = (k - g.origin_index) * triple_momentum_spacing(g);
                row.label = TripleLabel{0.0, pval, Grid::principal(mQ * dx, g.extent()),
                                        Grid::principal(mR * dx, g.extent())};
                row.min_norm = 1e300;
                for (const auto& t : tests) {
                    std::vector<cdouble> bracket(static_cast<std::size_t>(n), cdouble{0.0, 0.0});
                    const double c3 = 1.0 / std::sqrt(static_cast<double>(n) * dx * dx * dx);
                    for (int j1 = 0; j1 < n; ++j1) {
                        const cdouble v = t.data()[static_cast<std::size_t>(j1) * n +
                                                   static_cast<std::size_t>(g.wrap(j1 - mQ))];
                        if (v == cdouble{0.0, 0.0}) continue;
                        const cdouble ph = std::polar(c3, -3.0 * pval * g.position(j1));
                        bracket[static_cast<std::size_t>(g.wrap(j1 - mR))] += ph * v * dx * dx * dx;
                    }
                    const double nm = map_norm(bracket);
                    row.min_norm = std::min(row.min_norm, nm);
                    row.max_norm = std::max(row.max_norm, nm);
                    if (mQ != mq)
                        report.offdiagonal_weight =
                            std::max(report.offdiagonal_weight, nm / outcomes_scale);
                }
                row.max_defect = std::max(std::abs(row.max_norm - 1.0), std::abs(row.min_norm - 1.0));
                report.triple_max_defect = std::max(report.triple_max_defect, row.max_defect);
                report.triple_rows.push_back(row);
            }
        }
    }

    // Momentum/Bell family: exact isometry on this input class.
    for (int mQ : mQ_probe) {
        for (int kp : kp_probe) {
            for (int kP : kP_probe) {
                IsometryDefectReport::Row row;
                row.label = TripleLabel{g.momentum(kp), g.momentum(kP),
                                        Grid::principal(mQ * dx, g.extent()), 0.0};
                row.min_norm = 1e300;
                const double cu = 1.0 / std::sqrt(static_cast<double>(n) * dx);
                const double cb = 1.0 / std::sqrt(static_cast<double>(n) * dx * dx);
                for (const auto& t : tests) {
                    std::vector<cdouble> bracket(static_cast<std::size_t>(n), cdouble{0.0, 0.0});
                    for (int j1 = 0; j1 < n; ++j1)
                        for (int j2 = 0; j2 < n; ++j2) {
                            const cdouble v = t.data()[static_cast<std::size_t>(j1) * n +
                                                       static_cast<std::size_t>(j2)];
                            if (v == cdouble{0.0, 0.0}) continue;
                            const double phase =
                                -2.0 * g.momentum(kp) * g.position(j1) - 2.0 * g.momentum(kP) * g.position(j2);
                            bracket[static_cast<std::size_t>(g.wrap(j2 - mQ))] +=
                                std::polar(cu * cb, phase) * v * dx * dx * dx;
                        }
                    const double nm = map_norm(bracket);
                    row.min_norm = std::min(row.min_norm, nm);
                    row.max_norm = std::max(row.max_norm, nm);
                }
                row.max_defect = std::max(std::abs(row.max_norm - 1.0), std::abs(row.min_norm - 1.0));
                report.pi123_max_defect = std::max(report.pi123_max_defect, row.max_defect);
                report.pi123_rows.push_back(row);
            }
        }
    }
    return report;
}

namespace {

WaveFunction random_state(const Grid& g, int arity, std::uint64_t seed,
                          const std::vector<int>& labels) {
    SeededRng rng(seed);
    std::size_t total = 1;
    for (int i = 0; i < arity; ++i) total *= static_cast<std::size_t>(g.n_points);
    std::vector<cdouble> amp(total);
    for (auto& v : amp) v = cdouble{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
    return WaveFunction(g, labels, std::move(amp));
}

double max_abs_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<int> spread_indices(int n, int count) {
    std::vector<int> out;
    for (int i = 0; i < count; ++i) out.push_back(((i * 2 + 1) * n / (2 * count)) % n);
    return out;
}

double parseval_deviation(const std::vector<cdouble>& coeff) {
    double s = 0.0;
    for (const auto& c : coeff) s += std::norm(c);
    return std::abs(s - 1.0);
}

} // namespace

FamilyCheck check_bell_family(const Grid& grid, std::uint64_t seed) {
    FamilyCheck out;
    const auto ks = spread_indices(grid.n_points, 4);
    const auto ms = spread_indices(grid.n_points, 4);
    std::vector<WaveFunction> states;
    for (int k : ks)
        for (int m : ms)
            states.push_back(bell_state(BellLabel{grid.momentum(k), m * grid.spacing}, grid, {1, 2}));
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i; j < states.size(); ++j) {
            const cdouble g = inner_product(states[i], states[j]);
            out.gram_deviation = std::max(out.gram_deviation, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    const WaveFunction psi = random_state(grid, 2, seed, {1, 2});
    const auto coeff = bell_analysis(psi);
    const WaveFunction rec = bell_synthesis(coeff, grid, {1, 2});
    out.completeness_deviation =
        std::max(max_abs_diff(psi.data(), rec.data()), parseval_deviation(coeff));
    return out;
}

FamilyCheck check_pi123_family(const Grid& grid, std::uint64_t seed) {
    FamilyCheck out;
    const auto ks = spread_indices(grid.n_points, 2);
    const auto ms = spread_indices(grid.n_points, 2);
    std::vector<TripleLabel> labels;
    for (int kp : ks)
        for (int kP : ks)
            for (int m : ms)
                labels.push_back(TripleLabel{grid.momentum(kp), grid.momentum(kP),
                                             m * grid.spacing, 0.0});
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const WaveFunction a = pi123_state(labels[i], grid, {1, 2, 3});
        for (std::size_t j = i; j < labels.size(); ++j) {
            const WaveFunction b = pi123_state(labels[j], grid, {1, 2, 3});
            const cdouble g = inner_product(a, b);
            out.gram_deviation = std::max(out.gram_deviation, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    }
    const WaveFunction psi = random_state(grid, 3, seed, {1, 2, 3});
    const auto coeff = pi123_analysis(psi);
    const WaveFunction rec = pi123_synthesis(coeff, grid, {1, 2, 3});
    out.completeness_deviation =
        std::max(max_abs_diff(psi.data(), rec.data()), parseval_deviation(coeff));
    return out;
}

FamilyCheck check_triple_family(const Grid& grid, std::uint64_t seed) {
    FamilyCheck out;
    const auto ks = spread_indices(grid.n_points, 2);
    const auto ms = spread_indices(grid.n_points, 2);
    const double pstep = triple_momentum_spacing(grid);
    std::vector<TripleLabel> labels;
    for (int k : ks)
        for (int mQ : ms)
            for (int mR : ms)
                labels.push_back(TripleLabel{0.0, (k - grid.origin_index) * pstep,
                                             mQ * grid.spacing, mR * grid.spacing});
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const WaveFunction a = triple_basis_state(labels[i], grid, {1, 2, 3});
        for (std::size_t j = i; j < labels.size(); ++j) {
            const WaveFunction b = triple_basis_state(labels[j], grid, {1, 2, 3});
            const cdouble g = inner_product(a, b);
            out.gram_deviation = std::max(out.gram_deviation, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    }
    const WaveFunction psi = random_state(grid, 3, seed ^ 0x5bd1e995u, {1, 2, 3});
    const auto coeff = triple_analysis(psi);
    const WaveFunction rec = triple_synthesis(coeff, grid, {1, 2, 3});
    out.completeness_deviation =
        std::max(max_abs_diff(psi.data(), rec.data()), parseval_deviation(coeff));
    return out;
}

IsometryDefectReport demonstrate_triple_basis_failure(const WaveFunction& state5,
                                                      const Grid& grid) {
    if (state5.arity() != 5)
        throw std::invalid_argument("triple failure demo: arity-5 state required");
    const int n = grid.n_points;
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const std::size_t n3 = n2 * static_cast<std::size_t>(n);
    const auto& d = state5.data();

    // Locate the heaviest cells of the two factors (product form per contract).
    std::size_t best_in = 0, best_ghz = 0;
    double best_in_mass = -1.0, best_ghz_mass = -1.0;
    std::vector<double> in_mass(n2, 0.0), ghz_mass(n3, 0.0);
    for (std::size_t f = 0; f < d.size(); ++f) {
        const double m = std::norm(d[f]);
        in_mass[f / n3] += m;
        ghz_mass[f % n3] += m;
    }
    for (std::size_t i = 0; i < n2; ++i)
        if (in_mass[i] > best_in_mass) { best_in_mass = in_mass[i]; best_in = i; }
    for (std::size_t i = 0; i < n3; ++i)
        if (ghz_mass[i] > best_ghz_mass) { best_ghz_mass = ghz_mass[i]; best_ghz = i; }

    std::vector<cdouble> in_amp(n2), ghz_amp(n3);
    for (std::size_t i = 0; i < n2; ++i) in_amp[i] = d[i * n3 + best_ghz];
    for (std::size_t i = 0; i < n3; ++i) ghz_amp[i] = d[best_in * n3 + i];
    WaveFunction input2(grid, {state5.labels()[0], state5.labels()[1]}, std::move(in_amp));
    WaveFunction ghz3(grid, {state5.labels()[2], state5.labels()[3], state5.labels()[4]},
                      std::move(ghz_amp));
    return demonstrate_triple_basis_failure(input2, ghz3, 1234);
}

} // namespace cvtel
