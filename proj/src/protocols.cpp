#include "cvtel/protocols.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "cvtel/rng.hpp"

namespace cvtel {

namespace {

void require_on_lattice_momentum(const Grid& g, double P, const char* what) {
    const double steps = P / g.momentum_spacing();
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw std::invalid_argument(std::string(what) + ": phase parameter off the momentum lattice");
}

void require_on_lattice_position(const Grid& g, double Q, const char* what) {
    const double steps = Q / g.spacing;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw std::invalid_argument(std::string(what) + ": shift parameter off the lattice");
}

double input_position_sigma(const WaveFunction& w1) {
    const Grid& g = w1.grid();
    double m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        const double w = std::norm(w1.data()[static_cast<std::size_t>(j)]) * g.spacing;
        m1 += w * g.position(j);
        m2 += w * g.position(j) * g.position(j);
    }
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

} // namespace

WaveFunction bob_correction(const WaveFunction& w, double P, double Q, int label, bool adjoint) {
    require_on_lattice_momentum(w.grid(), P, "bob_correction");
    require_on_lattice_position(w.grid(), Q, "bob_correction");
    if (!adjoint)
        return apply_operator(w, composed({position_shift(label, Q), momentum_phase(label, P)}));
    return apply_operator(w, composed({momentum_phase(label, -P), position_shift(label, -Q)}));
}

WaveFunction claire_correction(const WaveFunction& w, double p, double P, double Q, double q,
                               int label, bool adjoint) {
    (void)P;  // carried in the classical message only
    require_on_lattice_momentum(w.grid(), p, "claire_correction");
    require_on_lattice_position(w.grid(), Q, "claire_correction");
    const double sign = adjoint ? -1.0 : 1.0;
    WaveFunction out =
        adjoint ? apply_operator(w, composed({momentum_phase(label, -p), position_shift(label, -Q)}))
                : apply_operator(w, composed({position_shift(label, Q), momentum_phase(label, p)}));
    scale(out.data(), std::polar(1.0, sign * 2.0 * p * q));
    return out;
}

WaveFunction apply_correction(const WaveFunction& w, const CorrectionOp& op) {
    switch (op.kind) {
        case CorrectionOp::Kind::ReceiverB:
            return bob_correction(w, op.P, op.Q, op.target, op.adjoint);
        case CorrectionOp::Kind::ReceiverC:
            return claire_correction(w, op.p, op.P, op.Q, op.q, op.target, op.adjoint);
        case CorrectionOp::Kind::Displacement: {
            WaveFunction out = w;
            if (op.dx != 0.0) out = apply_operator(out, position_shift(op.target, op.dx));
            if (op.dp != 0.0) out = apply_operator(out, momentum_phase(op.target, op.dp));
            return out;
        }
    }
    throw std::logic_error("apply_correction: bad kind");
}

// ---------------------------------------------------------------------------
// Single-particle protocol. The three-particle state input x EPR is held in
// product form; the Bell projection reduces to one centered transform per
// relative-position offset.
// ---------------------------------------------------------------------------

namespace {

struct SingleEngine {
    Grid g;
    int n = 0;
    std::vector<cdouble> psi;   // input amplitudes, label 1
    bool ideal = false;
    std::vector<cdouble> epr;   // dense [j2][j3] when finite
    std::vector<double> weights;  // [m][kP] Born masses, sum 1

    SingleEngine(const WaveFunction& input1, const ResourceQuality& quality, const Grid& grid)
        : g(grid), n(grid.n_points), psi(input1.data()) {
        if (input1.arity() != 1) throw std::invalid_argument("teleport_single: arity-1 input");
        if (input1.grid() != grid) throw std::invalid_argument("teleport_single: grid mismatch");
        if (grid.extent() < 8.0 * input_position_sigma(input1))
            throw std::invalid_argument("teleport_single: grid too small for the input support");
        ideal = quality.is_ideal();
        if (!ideal) {
            const WaveFunction e = make_epr_wavefunction(quality, grid, {2, 3});
            epr = e.data();
        }
        build_weights();
    }

    // chi rows for every total-momentum index at one relative offset m:
    // chi_{P,m}(j3) = dx^2 C sum_{j1} e^{-2iP x_{j1}} psi(j1) E(j1-m, j3).
    std::vector<cdouble> conditional_slab(int m) const {
        std::vector<cdouble> slab(static_cast<std::size_t>(n) * n);
        if (ideal) {
            const double c = 1.0 / std::sqrt(static_cast<double>(n) * g.spacing * g.spacing);
            for (int k = 0; k < n; ++k)
                for (int j3 = 0; j3 < n; ++j3) {
                    const int j1 = g.wrap(j3 + m);
                    slab[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(j3)] =
                        g.spacing * g.spacing * c * c *
                        std::polar(1.0, -2.0 * g.momentum(k) * g.position(j1)) *
                        psi[static_cast<std::size_t>(j1)];
                }
            return slab;
        }
        const double c = 1.0 / std::sqrt(static_cast<double>(n) * g.spacing * g.spacing);
        const double alpha = g.spacing * g.spacing * c;
        for (int j1 = 0; j1 < n; ++j1) {
            const int j2 = g.wrap(j1 - m);
            for (int j3 = 0; j3 < n; ++j3)
                slab[static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(j3)] =
                    psi[static_cast<std::size_t>(j1)] *
                    epr[static_cast<std::size_t>(j2) * n + static_cast<std::size_t>(j3)];
        }
        const std::vector<int> ext{n, n};
        std::vector<cdouble> parity(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) parity[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
        serial::weight_axis(slab, ext, 0, parity);
        serial::fft_axis(slab, ext, 0, -1);
        serial::weight_axis(slab, ext, 0, parity);
        serial::scale(slab, cdouble{alpha, 0.0});
        return slab;
    }

    void build_weights() {
        const std::size_t n2 = static_cast<std::size_t>(n) * n;
        weights.assign(n2, 0.0);
        if (ideal) {
            const double uniform = 1.0 / static_cast<double>(n2);
            std::fill(weights.begin(), weights.end(), uniform);
            return;
        }
#pragma omp parallel for schedule(static)
        for (int m = 0; m < n; ++m) {
            const auto slab = conditional_slab(m);
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int j3 = 0; j3 < n; ++j3)
                    s += std::norm(slab[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(j3)]);
                weights[static_cast<std::size_t>(m) * n + static_cast<std::size_t>(k)] = s * g.spacing;
            }
        }
    }

    // Conditional receiver state for eigenvalue labels (kP, m), unnormalized.
    std::vector<cdouble> conditional(int kP, int m) const {
        std::vector<cdouble> chi(static_cast<std::size_t>(n), cdouble{0.0, 0.0});
        if (ideal) {
            const double c = 1.0 / std::sqrt(static_cast<double>(n) * g.spacing * g.spacing);
            for (int j3 = 0; j3 < n; ++j3) {
                const int j1 = g.wrap(j3 + m);
                chi[static_cast<std::size_t>(j3)] =
                    g.spacing * g.spacing * c * c *
                    std::polar(1.0, -2.0 * g.momentum(kP) * g.position(j1)) *
                    psi[static_cast<std::size_t>(j1)];
            }
            return chi;
        }
        const double c = 1.0 / std::sqrt(static_cast<double>(n) * g.spacing * g.spacing);
        for (int j1 = 0; j1 < n; ++j1) {
            const int j2 = g.wrap(j1 - m);
            const cdouble f = g.spacing * g.spacing * c *
                              std::polar(1.0, -2.0 * g.momentum(kP) * g.position(j1)) *
                              psi[static_cast<std::size_t>(j1)];
            for (int j3 = 0; j3 < n; ++j3)
                chi[static_cast<std::size_t>(j3)] +=
                    f * epr[static_cast<std::size_t>(j2) * n + static_cast<std::size_t>(j3)];
        }
        return chi;
    }

    SingleRunResult run(const WaveFunction& input1, const ResourceQuality& quality,
                        std::uint64_t seed) const {
        SeededRng rng(seed);
        const std::size_t pick = rng.discrete(weights);
        const int m = static_cast<int>(pick / static_cast<std::size_t>(n));
        const int kP = static_cast<int>(pick % static_cast<std::size_t>(n));
        return run_outcome(input1, quality, seed, m, kP, weights[pick]);
    }

    SingleRunResult run_outcome(const WaveFunction& input1, const ResourceQuality& quality,
                                std::uint64_t seed, int m, int kP, double density) const {
        const double period_p = n * g.momentum_spacing();
        const double P_rep = Grid::principal(-g.momentum(kP), period_p);
        const double Q_rep = Grid::principal(-Grid::principal(m * g.spacing, g.extent()), g.extent());

        WaveFunction cond(g, {3}, conditional(kP, m));
        WaveFunction out = bob_correction(cond, P_rep, Q_rep, 3, true);
        out = relabeled(out, {input1.labels()[0]});
        const double fid = std::min(1.0, std::norm(inner_product(input1, out)));

        SingleRunResult res{TeleportRecord{}, std::move(out)};
        res.record.protocol = TeleportRecord::Protocol::Single;
        res.record.quality = quality;
        res.record.outcome = MeasurementOutcome{TripleLabel{0.0, P_rep, Q_rep, 0.0}, density, seed};
        res.record.classical_message = {0.0, P_rep, Q_rep};
        res.record.corrections = {CorrectionOp{CorrectionOp::Kind::ReceiverB, true, 3,
                                               0.0, P_rep, Q_rep, 0.0, 0.0, 0.0}};
        res.record.fidelity = fid;
        res.record.seed = seed;
        return res;
    }
};

} // namespace

SingleRunResult teleport_single(const WaveFunction& input1, const ResourceQuality& quality,
                                const Grid& grid, std::uint64_t seed) {
    SingleEngine engine(input1, quality, grid);
    return engine.run(input1, quality, seed);
}

std::vector<SingleRunResult> teleport_single_batch(const WaveFunction& input1,
                                                   const ResourceQuality& quality,
                                                   const Grid& grid,
                                                   std::span<const std::uint64_t> seeds) {
    SingleEngine engine(input1, quality, grid);
    std::vector<std::optional<SingleRunResult>> staged(seeds.size());
    // independent seeds; results land in seed order regardless of scheduling
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < seeds.size(); ++i)
        staged[i].emplace(engine.run(input1, quality, seeds[i]));
    std::vector<SingleRunResult> out;
    out.reserve(seeds.size());
    for (auto& s : staged) out.push_back(std::move(*s));
    return out;
}

double teleport_single_expected_fidelity(const WaveFunction& input1,
                                         const ResourceQuality& quality, const Grid& grid) {
    // E[F] = sum over outcomes of |<psi| B^dag chi_raw>|^2 in the lattice
    // measure: the conditional norm cancels against the Born weight, so the
    // whole average is one corrected-overlap pass per outcome.
    SingleEngine engine(input1, quality, grid);
    const Grid& g = grid;
    const int n = g.n_points;
    const double dx = g.spacing;
    double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
    for (int m = 0; m < n; ++m) {
        const auto slab = engine.conditional_slab(m);
        for (int kP = 0; kP < n; ++kP) {
            // (B^dag chi)(j) = e^{2i P_k x_j} chi(j - m) up to a global phase
            const cdouble* chi = slab.data() + static_cast<std::size_t>(kP) * n;
            cdouble ov{0.0, 0.0};
            for (int j = 0; j < n; ++j) {
                const cdouble corrected = std::polar(1.0, 2.0 * g.momentum(kP) * g.position(j)) *
                                          chi[g.wrap(j - m)];
                ov += std::conj(engine.psi[static_cast<std::size_t>(j)]) * corrected;
            }
            acc += std::norm(ov * dx);
        }
    }
    return std::min(1.0, acc);
}

// ---------------------------------------------------------------------------
// Entangled protocol. The input is an exact relative-position eigenstate, so
// the five-particle state factors as profile x GHZ and the measurement only
// ever touches one GHZ coordinate. Born masses depend on the outcome through
// (Q, p+P) alone, which keeps the table quadratic in the grid size.
// ---------------------------------------------------------------------------

namespace {

struct EntangledEngine {
    Grid g;
    int n = 0;
    std::vector<cdouble> a;  // profile, sum |a|^2 dx = 1
    int mq = 0;
    double q_principal = 0.0;
    bool ghz_ideal = false;
    std::vector<cdouble> ghz_diag;   // ideal GHZ diagonal amplitudes
    std::vector<cdouble> ghz_dense;  // finite GHZ [s][j4][j5]
    Eigen::MatrixXcd gram;           // K(s,s') = sum_{45} G(s,..) conj(G(s',..))
    std::vector<double> class_weights;  // [m][kt], each = N * single-outcome mass

    EntangledEngine(const InputSpec& spec, const ResourceQuality& quality, const Grid& grid)
        : g(grid), n(grid.n_points) {
        const WaveFunction prof = profile_wavefunction(spec.profile, grid, 1);
        if (grid.extent() < 8.0 * input_position_sigma(prof))
            throw std::invalid_argument("teleport_entangled: grid too small for the input support");
        a = prof.data();
        mq = grid.wrap(static_cast<long long>(std::llround(spec.q / grid.spacing)));
        q_principal = Grid::principal(mq * grid.spacing, grid.extent());
        ghz_ideal = quality.is_ideal();
        if (ghz_ideal) {
            ghz_diag.assign(static_cast<std::size_t>(n),
                            cdouble{1.0 / std::sqrt(static_cast<double>(n) *
                                                    std::pow(grid.spacing, 3.0)), 0.0});
        } else {
            if (n > 256)
                throw std::invalid_argument(
                    "teleport_entangled: finite resources limited to 256 grid points");
            const WaveFunction ghz = make_ghz_wavefunction(quality, grid, {3, 4, 5});
            ghz_dense = ghz.data();
            const std::size_t n2 = static_cast<std::size_t>(n) * n;
            Eigen::Map<const Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                G(ghz_dense.data(), n, static_cast<Eigen::Index>(n2));
            gram = G * G.adjoint();
        }
        build_class_weights();
    }

    // Bracket over the collapsed measurement coordinates for eigen labels
    // (kp, kP, m): chi(j4,j5) = sum_s bracket(s) G(s, j4, j5).
    std::vector<cdouble> bracket(int kp, int kP, int m) const {
        std::vector<cdouble> br(static_cast<std::size_t>(n));
        const double scale = g.spacing / static_cast<double>(n);
        const double p = g.momentum(kp);
        const double P = g.momentum(kP);
        for (int s = 0; s < n; ++s) {
            const int j1 = g.wrap(s + mq + m);
            const int j2 = g.wrap(s + m);
            br[static_cast<std::size_t>(s)] =
                scale * std::polar(1.0, -2.0 * (p * g.position(j1) + P * g.position(j2))) *
                a[static_cast<std::size_t>(j1)];
        }
        return br;
    }

    double outcome_mass(const std::vector<cdouble>& br) const {
        const double dx2 = g.spacing * g.spacing;
        if (ghz_ideal) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += std::norm(br[static_cast<std::size_t>(i)] * ghz_diag[static_cast<std::size_t>(i)]);
            return s * dx2;
        }
        Eigen::Map<const Eigen::VectorXcd> b(br.data(), n);
        const Eigen::VectorXcd bc = b.conjugate();
        return std::max(0.0, bc.dot(gram * bc).real() * dx2);
    }

    void build_class_weights() {
        // Mass depends on (m, t = p + P) only; tabulate per class and scale by
        // the class size N.
        class_weights.assign(static_cast<std::size_t>(n) * n, 0.0);
#pragma omp parallel for schedule(static)
        for (int m = 0; m < n; ++m) {
            // rho_m(d) = sum_s v_s K(s, s-d) conj(v_{s-d}), v_s = scale a(j1(s))
            std::vector<cdouble> rho(static_cast<std::size_t>(n), cdouble{0.0, 0.0});
            const double scale_f = g.spacing / static_cast<double>(n);
            std::vector<cdouble> v(static_cast<std::size_t>(n));
            for (int s = 0; s < n; ++s)
                v[static_cast<std::size_t>(s)] = scale_f * a[static_cast<std::size_t>(g.wrap(s + mq + m))];
            for (int d = 0; d < n; ++d) {
                cdouble acc{0.0, 0.0};
                for (int s = 0; s < n; ++s) {
                    const int sp = g.wrap(s - d);
                    const cdouble k = ghz_ideal
                                          ? ((d == 0) ? cdouble{std::norm(ghz_diag[static_cast<std::size_t>(s)]), 0.0}
                                                      : cdouble{0.0, 0.0})
                                          : gram(s, sp);
                    acc += v[static_cast<std::size_t>(s)] * k * std::conj(v[static_cast<std::size_t>(sp)]);
                }
                rho[static_cast<std::size_t>(d)] = acc;
            }
            // w(m, kt) = dx^2 sum_d e^{-2 i t_k d dx} rho(d)
            std::vector<cdouble> f(static_cast<std::size_t>(n));
            for (int d = 0; d < n; ++d)
                f[static_cast<std::size_t>(d)] = ((d % 2 == 0) ? 1.0 : -1.0) * rho[static_cast<std::size_t>(d)];
            serial::fft_axis(f, std::vector<int>{n}, 0, -1);
            for (int kt = 0; kt < n; ++kt) {
                const double w = f[static_cast<std::size_t>(kt)].real() * g.spacing * g.spacing;
                class_weights[static_cast<std::size_t>(m) * n + static_cast<std::size_t>(kt)] =
                    std::max(0.0, w * static_cast<double>(n));
            }
        }
    }

    std::vector<cdouble> conditional(const std::vector<cdouble>& br) const {
        const std::size_t n2 = static_cast<std::size_t>(n) * n;
        std::vector<cdouble> chi(n2, cdouble{0.0, 0.0});
        if (ghz_ideal) {
            for (int s = 0; s < n; ++s)
                chi[static_cast<std::size_t>(s) * n + static_cast<std::size_t>(s)] =
                    br[static_cast<std::size_t>(s)] * ghz_diag[static_cast<std::size_t>(s)];
            return chi;
        }
        Eigen::Map<const Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> G(
            ghz_dense.data(), n, static_cast<Eigen::Index>(n2));
        Eigen::Map<const Eigen::VectorXcd> b(br.data(), n);
        Eigen::Map<Eigen::VectorXcd> out(chi.data(), static_cast<Eigen::Index>(n2));
        out = G.transpose() * b;
        return chi;
    }

    WaveFunction exchanged_reference() const {
        const std::size_t n2 = static_cast<std::size_t>(n) * n;
        std::vector<cdouble> amp(n2, cdouble{0.0, 0.0});
        for (int j5 = 0; j5 < n; ++j5) {
            const int j4 = g.wrap(j5 - mq);
            amp[static_cast<std::size_t>(j4) * n + static_cast<std::size_t>(j5)] =
                a[static_cast<std::size_t>(j5)];
        }
        return WaveFunction(g, {4, 5}, std::move(amp));
    }

    WaveFunction input_state() const {
        const std::size_t n2 = static_cast<std::size_t>(n) * n;
        std::vector<cdouble> amp(n2, cdouble{0.0, 0.0});
        for (int j1 = 0; j1 < n; ++j1)
            amp[static_cast<std::size_t>(j1) * n + static_cast<std::size_t>(g.wrap(j1 - mq))] =
                a[static_cast<std::size_t>(j1)];
        return WaveFunction(g, {1, 2}, std::move(amp));
    }

    EntangledRunResult run_outcome(const ResourceQuality& quality, std::uint64_t seed, int kp,
                                   int kP, int m, double density) const {
        const double period_p = n * g.momentum_spacing();
        const double p_rep = Grid::principal(-g.momentum(kp), period_p);
        const double P_rep = Grid::principal(-g.momentum(kP), period_p);
        const double Q_rep = Grid::principal(-Grid::principal(m * g.spacing, g.extent()), g.extent());

        WaveFunction cond(g, {4, 5}, conditional(bracket(kp, kP, m)));
        WaveFunction out = bob_correction(cond, P_rep, Q_rep, 4, true);
        if (mq != 0) out = apply_operator(out, position_shift(5, q_principal));
        out = claire_correction(out, p_rep, P_rep, Q_rep, q_principal, 5, true);

        const WaveFunction ref = exchanged_reference();
        const double fid = std::min(1.0, std::norm(inner_product(ref, out)));

        EntangledRunResult res{TeleportRecord{}, input_state(), std::move(cond), std::move(out), ref};
        res.record.protocol = TeleportRecord::Protocol::Entangled;
        res.record.quality = quality;
        res.record.outcome = MeasurementOutcome{TripleLabel{p_rep, P_rep, Q_rep, 0.0}, density, seed};
        res.record.classical_message = {p_rep, P_rep, Q_rep};
        res.record.corrections = {
            CorrectionOp{CorrectionOp::Kind::ReceiverB, true, 4, 0.0, P_rep, Q_rep, 0.0, 0.0, 0.0}};
        if (mq != 0)
            res.record.corrections.push_back(CorrectionOp{CorrectionOp::Kind::Displacement, false, 5,
                                                          0.0, 0.0, 0.0, 0.0, q_principal, 0.0});
        res.record.corrections.push_back(CorrectionOp{CorrectionOp::Kind::ReceiverC, true, 5, p_rep,
                                                      P_rep, Q_rep, q_principal, 0.0, 0.0});
        res.record.fidelity = fid;
        res.record.seed = seed;
        return res;
    }

    EntangledRunResult run(const ResourceQuality& quality, std::uint64_t seed) const {
        SeededRng rng(seed);
        const std::size_t pick = rng.discrete(class_weights);
        const int m = static_cast<int>(pick / static_cast<std::size_t>(n));
        const int kt = static_cast<int>(pick % static_cast<std::size_t>(n));
        const int kp = static_cast<int>(rng.uniform01() * n) % n;
        const int kP = g.wrap(kt - kp + g.origin_index);
        const double density = class_weights[pick] / static_cast<double>(n);
        return run_outcome(quality, seed, kp, kP, m, density);
    }
};

} // namespace

EntangledRunResult teleport_entangled(const InputSpec& spec, const ResourceQuality& quality,
                                      const Grid& grid, std::uint64_t seed) {
    EntangledEngine engine(spec, quality, grid);
    return engine.run(quality, seed);
}

std::vector<EntangledRunResult> teleport_entangled_batch(const InputSpec& spec,
                                                         const ResourceQuality& quality,
                                                         const Grid& grid,
                                                         std::span<const std::uint64_t> seeds) {
    EntangledEngine engine(spec, quality, grid);
    std::vector<std::optional<EntangledRunResult>> staged(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < seeds.size(); ++i) staged[i].emplace(engine.run(quality, seeds[i]));
    std::vector<EntangledRunResult> out;
    out.reserve(seeds.size());
    for (auto& s : staged) out.push_back(std::move(*s));
    return out;
}

double teleport_entangled_expected_fidelity(const InputSpec& spec, const ResourceQuality& quality,
                                            const Grid& grid) {
    // Fidelity is constant across the (p, P) pairs of one (Q, p+P) class, so
    // one representative per class suffices; the corrected overlap only ever
    // touches the diagonal of the conditional state, because the exchanged
    // reference is supported on a single sub-diagonal.
    EntangledEngine engine(spec, quality, grid);
    if (!engine.ghz_ideal && grid.n_points > 128)
        throw std::invalid_argument(
            "teleport_entangled_expected_fidelity: finite resources limited to 128 points");
    const Grid& g = grid;
    const int n = g.n_points;
    const double dx = g.spacing;

    // D(s', s) = G(s', s, s): the only GHZ entries the overlap needs.
    std::vector<cdouble> diag_slice;
    if (!engine.ghz_ideal) {
        diag_slice.assign(static_cast<std::size_t>(n) * n, cdouble{0.0, 0.0});
        const std::size_t n2 = static_cast<std::size_t>(n) * n;
        for (int sp = 0; sp < n; ++sp)
            for (int s = 0; s < n; ++s)
                diag_slice[static_cast<std::size_t>(sp) * n + static_cast<std::size_t>(s)] =
                    engine.ghz_dense[static_cast<std::size_t>(sp) * n2 +
                                     static_cast<std::size_t>(s) * n + static_cast<std::size_t>(s)];
    }

    double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
    for (int m = 0; m < n; ++m) {
        for (int kt = 0; kt < n; ++kt) {
            const int kp = g.origin_index;  // class representative
            const int kP = g.wrap(kt - kp + g.origin_index);
            const auto br = engine.bracket(kp, kP, m);
            // diag(chi)(s) = sum_{s'} br(s') G(s', s, s)
            std::vector<cdouble> chid(static_cast<std::size_t>(n), cdouble{0.0, 0.0});
            if (engine.ghz_ideal) {
                for (int s = 0; s < n; ++s)
                    chid[static_cast<std::size_t>(s)] =
                        br[static_cast<std::size_t>(s)] * engine.ghz_diag[static_cast<std::size_t>(s)];
            } else {
                for (int sp = 0; sp < n; ++sp) {
                    const cdouble b = br[static_cast<std::size_t>(sp)];
                    if (b == cdouble{0.0, 0.0}) continue;
                    const cdouble* row = diag_slice.data() + static_cast<std::size_t>(sp) * n;
                    for (int s = 0; s < n; ++s) chid[static_cast<std::size_t>(s)] += b * row[s];
                }
            }
            // corrected overlap against the exchanged reference
            const double p_e = g.momentum(kp);
            const double P_e = g.momentum(kP);
            cdouble ov{0.0, 0.0};
            for (int j5 = 0; j5 < n; ++j5) {
                const int j4 = g.wrap(j5 - engine.mq);
                const int s = g.wrap(j4 - m);
                if (chid[static_cast<std::size_t>(s)] == cdouble{0.0, 0.0}) continue;
                // adjoint corrections contribute e^{2i(P_e x_4 + p_e x_5)} up
                // to outcome-constant phases that drop out of |ov|
                const double phase = 2.0 * (P_e * g.position(j4) + p_e * g.position(j5));
                ov += std::conj(engine.a[static_cast<std::size_t>(j5)] / std::sqrt(dx)) *
                      std::polar(1.0, phase) * chid[static_cast<std::size_t>(s)];
            }
            acc += static_cast<double>(n) * std::norm(ov * dx * dx);
        }
    }
    return std::min(1.0, acc);
}

CorrelationReport verify_output_correlations(const EntangledRunResult& run) {
    if (run.record.protocol != TeleportRecord::Protocol::Entangled)
        throw std::invalid_argument("verify_output_correlations: entangled record required");
    CorrelationReport rep;
    // x statistics straight from the output amplitudes
    const WaveFunction& out = run.output;
    const Grid& g = out.grid();
    const int n = g.n_points;
    double m1 = 0.0, m2 = 0.0;
    const double cell = out.cell_measure();
    for (int j4 = 0; j4 < n; ++j4)
        for (int j5 = 0; j5 < n; ++j5) {
            const double w =
                std::norm(out.data()[static_cast<std::size_t>(j4) * n + static_cast<std::size_t>(j5)]) * cell;
            if (w == 0.0) continue;
            const double d = Grid::principal(g.position(j4) - g.position(j5), g.extent());
            m1 += w * d;
            m2 += w * d * d;
        }
    rep.mean_x_diff = m1;
    rep.var_x_diff = std::max(0.0, m2 - m1 * m1);

    auto p_sum_stats = [&](const WaveFunction& w2, double& mean, double& var) {
        WaveFunction mom = to_momentum(to_momentum(w2, w2.labels()[0]), w2.labels()[1]);
        const double cellm = mom.cell_measure();
        double s1 = 0.0, s2 = 0.0;
        for (int k4 = 0; k4 < n; ++k4)
            for (int k5 = 0; k5 < n; ++k5) {
                const double w =
                    std::norm(mom.data()[static_cast<std::size_t>(k4) * n + static_cast<std::size_t>(k5)]) * cellm;
                if (w == 0.0) continue;
                const double period = n * g.momentum_spacing();
                const double t = Grid::principal(g.momentum(k4) + g.momentum(k5), period);
                s1 += w * t;
                s2 += w * t * t;
            }
        mean = s1;
        var = std::max(0.0, s2 - s1 * s1);
    };
    p_sum_stats(run.output, rep.mean_p_sum_out, rep.var_p_sum_out);
    p_sum_stats(run.input, rep.mean_p_sum_in, rep.var_p_sum_in);
    return rep;
}

// ---------------------------------------------------------------------------
// Covariance-engine protocol
// ---------------------------------------------------------------------------

namespace {

GaussianState tensor_gaussian(const GaussianState& a, const GaussianState& b) {
    GaussianState out;
    out.n_modes = a.n_modes + b.n_modes;
    out.mean = Eigen::VectorXd::Zero(2 * out.n_modes);
    out.cov = Eigen::MatrixXd::Zero(2 * out.n_modes, 2 * out.n_modes);
    const int na = a.n_modes, nb = b.n_modes, n = out.n_modes;
    auto src_index = [&](int i) -> std::pair<bool, int> {
        // true -> from a; index within source state's (x..,p..) layout
        if (i < na) return {true, i};
        if (i < n) return {false, i - na};
        if (i < n + na) return {true, na + (i - n)};
        return {false, nb + (i - n - na)};
    };
    for (int i = 0; i < 2 * n; ++i) {
        const auto [ia, si] = src_index(i);
        out.mean(i) = ia ? a.mean(si) : b.mean(si);
        for (int j = 0; j < 2 * n; ++j) {
            const auto [ja, sj] = src_index(j);
            if (ia == ja) out.cov(i, j) = ia ? a.cov(si, sj) : b.cov(si, sj);
        }
    }
    return out;
}

} // namespace

GaussianTeleportResult teleport_entangled_gaussian(double input_r, double ghz_r, double q,
                                                   std::uint64_t seed) {
    GaussianState input = epr_pair(input_r, input_r);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(4);
    d(0) = q / 2.0;
    d(1) = -q / 2.0;
    input = displace(input, d);
    const GaussianState reference = marginal(input, {1, 0});

    GaussianState s = tensor_gaussian(input, ghz_resource(ghz_r));

    const int n = s.n_modes;  // 5: modes 0,1 input pair, 2,3,4 the GHZ triplet
    SeededRng rng(seed);
    auto measure = [&](const LinearForm& f) {
        const double var = variance(s, f);
        const double mean = mean_value(s, f);
        const double outcome = (var <= 1e-14) ? mean : rng.normal(mean, std::sqrt(var));
        s = condition_with_outcome(s, f, outcome);
        return outcome;
    };
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double v_p1 = measure(LinearForm::p(0, n));
    const double v_Pi = measure((LinearForm::p(1, n) + LinearForm::p(2, n)) * inv_sqrt2);
    const double v_Y = measure((LinearForm::x(1, n) - LinearForm::x(2, n)) * inv_sqrt2);

    const double p_e = v_p1;
    const double P_e = std::sqrt(2.0) * v_Pi;
    const double Q_e = std::sqrt(2.0) * v_Y;

    Eigen::VectorXd corr = Eigen::VectorXd::Zero(2 * n);
    corr(3) = Q_e;          // x of receiver B's mode
    corr(n + 3) = P_e;      // p of receiver B's mode
    corr(4) = Q_e + q;      // x of receiver C's mode
    corr(n + 4) = p_e;      // p of receiver C's mode
    s = displace(s, corr);

    GaussianTeleportResult res;
    res.classical_message = {-p_e, -P_e, -Q_e};
    res.output = marginal(s, {3, 4});
    res.reference = reference;
    res.var_x_diff = variance(res.output, LinearForm::x(0, 2) - LinearForm::x(1, 2));
    res.fidelity = pure_state_fidelity(res.output, res.reference);
    return res;
}

double gaussian_var_x_diff_prediction(double ghz_r) {
    return teleport_entangled_gaussian(1.0, ghz_r, 0.0, 1).var_x_diff;
}

} // namespace cvtel
