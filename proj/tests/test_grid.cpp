#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvtel/grid.hpp"
#include "cvtel/rng.hpp"

using namespace cvtel;

namespace {

WaveFunction gaussian_packet_state(const Grid& g, double sigma, int label) {
    std::vector<cdouble> amp(static_cast<std::size_t>(g.n_points));
    for (int j = 0; j < g.n_points; ++j) {
        const double x = g.position(j);
        amp[static_cast<std::size_t>(j)] = std::exp(-x * x / (4.0 * sigma * sigma));
    }
    return WaveFunction(g, {label}, std::move(amp));
}

WaveFunction random_wf(const Grid& g, int arity, std::uint64_t seed) {
    SeededRng rng(seed);
    std::size_t total = 1;
    for (int i = 0; i < arity; ++i) total *= static_cast<std::size_t>(g.n_points);
    std::vector<cdouble> amp(total);
    for (auto& v : amp) v = cdouble{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
    std::vector<int> labels;
    for (int i = 0; i < arity; ++i) labels.push_back(i + 1);
    return WaveFunction(g, labels, std::move(amp));
}

double max_amp_diff(const WaveFunction& a, const WaveFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// Direct-quadrature momentum transform, independent of the FFT path.
std::vector<cdouble> quadrature_momentum_transform(const Grid& g, const std::vector<cdouble>& psi) {
    std::vector<cdouble> out(static_cast<std::size_t>(g.n_points));
    for (int k = 0; k < g.n_points; ++k) {
        cdouble acc{0.0, 0.0};
        for (int j = 0; j < g.n_points; ++j)
            acc += psi[static_cast<std::size_t>(j)] *
                   std::polar(1.0, -2.0 * g.momentum(k) * g.position(j));
        out[static_cast<std::size_t>(k)] =
            acc * g.spacing / std::sqrt(std::numbers::pi);
    }
    return out;
}

} // namespace

TEST_CASE("make_grid arithmetic and preconditions") {
    const Grid a = make_grid(256, 16.0);
    CHECK(a.spacing == doctest::Approx(0.0625));
    CHECK(a.origin_index == 128);
    const Grid b = make_grid(8, 8.0);
    CHECK(b.spacing == doctest::Approx(1.0));
    CHECK(b.origin_index == 4);
    CHECK(b.momentum_spacing() == doctest::Approx(std::numbers::pi / 8.0));
    CHECK_THROWS(make_grid(100, 16.0));
    CHECK_THROWS(make_grid(4, 16.0));
    CHECK_THROWS(make_grid(256, -1.0));
}

TEST_CASE("inner product basics") {
    const Grid g = make_grid(64, 16.0);
    const WaveFunction psi = random_wf(g, 1, 1);
    CHECK(inner_product(psi, psi).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inner_product(psi, psi).imag()) < 1e-12);

    // disjoint supports
    std::vector<cdouble> a(64, cdouble{0.0, 0.0}), b(64, cdouble{0.0, 0.0});
    a[10] = 1.0;
    b[50] = 1.0;
    const WaveFunction wa(g, {1}, a), wb(g, {1}, b);
    CHECK(std::abs(inner_product(wa, wb)) == 0.0);

    // conjugate linearity: <psi, i psi> = i
    WaveFunction ipsi = psi;
    scale(ipsi.data(), cdouble{0.0, 1.0});
    const cdouble ov = inner_product(psi, ipsi);
    CHECK(ov.real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ov.imag() == doctest::Approx(1.0).epsilon(1e-12));

    const WaveFunction other = random_wf(g, 2, 2);
    CHECK_THROWS(inner_product(psi, other));
}

TEST_CASE("momentum transform of a squeezed gaussian matches the closed form") {
    const Grid g = make_grid(256, 16.0);
    const double r = 1.0;
    const double sigma2 = std::exp(-2.0 * r) / 4.0;  // position-squeezed
    const WaveFunction psi = gaussian_packet_state(g, std::sqrt(sigma2), 1);
    const WaveFunction phi = to_momentum(psi, 1);

    // closed form: Var(p) = e^{2r}/4
    double mean = 0.0, second = 0.0;
    const double cell = phi.cell_measure();
    for (int k = 0; k < g.n_points; ++k) {
        const double w = std::norm(phi.data()[static_cast<std::size_t>(k)]) * cell;
        mean += w * g.momentum(k);
        second += w * g.momentum(k) * g.momentum(k);
    }
    CHECK(second - mean * mean == doctest::Approx(std::exp(2.0 * r) / 4.0).epsilon(1e-9));

    // direct-quadrature oracle for the transform itself
    const auto ref = quadrature_momentum_transform(g, psi.data());
    double err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
        err = std::max(err, std::abs(ref[i] - phi.data()[i]));
    CHECK(err < 1e-10);
}

TEST_CASE("momentum transform of a uniform state is a spike at zero") {
    const Grid g = make_grid(64, 8.0);
    std::vector<cdouble> amp(64, cdouble{1.0, 0.0});
    const WaveFunction psi(g, {1}, amp);
    const WaveFunction phi = to_momentum(psi, 1);
    for (int k = 0; k < 64; ++k) {
        const double mag = std::abs(phi.data()[static_cast<std::size_t>(k)]);
        if (k == g.origin_index)
            CHECK(mag > 1.0);
        else
            CHECK(mag < 1e-12);
    }
}

TEST_CASE("momentum transform is unitary on every slot") {
    const Grid g = make_grid(16, 8.0);
    const WaveFunction psi = random_wf(g, 3, 7);
    for (int label : {1, 2, 3}) {
        const WaveFunction phi = to_momentum(psi, label);
        CHECK(phi.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
        const WaveFunction back = to_position(phi, label);
        CHECK(max_amp_diff(back, psi) < 1e-12);
    }
    CHECK_THROWS(to_momentum(psi, 9));
}

TEST_CASE("position shift moves a delta by the requested amount") {
    const Grid g = make_grid(64, 16.0);
    std::vector<cdouble> amp(64, cdouble{0.0, 0.0});
    amp[static_cast<std::size_t>(g.origin_index)] = 1.0;  // delta at x=0
    const WaveFunction psi(g, {1}, amp);
    const double q = 2.0 * g.spacing;
    const WaveFunction shifted = apply_operator(psi, position_shift(1, q));
    CHECK(std::abs(shifted.data()[static_cast<std::size_t>(g.position_index(q))] ) ==
          doctest::Approx(std::abs(psi.data()[static_cast<std::size_t>(g.origin_index)])));
    const WaveFunction back = apply_operator(shifted, position_shift(1, -q));
    CHECK(max_amp_diff(back, psi) < 1e-12);
}

TEST_CASE("momentum phase at zero momentum is the identity") {
    const Grid g = make_grid(32, 8.0);
    const WaveFunction psi = random_wf(g, 1, 4);
    const WaveFunction out = apply_operator(psi, momentum_phase(1, 0.0));
    CHECK(max_amp_diff(out, psi) == 0.0);
}

TEST_CASE("shift and phase commute up to e^{2iPQ}") {
    const Grid g = make_grid(64, 16.0);
    const WaveFunction psi = random_wf(g, 1, 5);
    const double P = g.momentum(40);
    const double Q = 3.0 * g.spacing;
    const WaveFunction ps = apply_operator(apply_operator(psi, position_shift(1, Q)),
                                           momentum_phase(1, P));
    WaveFunction sp = apply_operator(apply_operator(psi, momentum_phase(1, P)),
                                     position_shift(1, Q));
    scale(sp.data(), std::polar(1.0, 2.0 * P * Q));
    CHECK(max_amp_diff(ps, sp) < 1e-12);
}

TEST_CASE("operators are unitary and compose with their adjoints to identity") {
    const Grid g = make_grid(32, 8.0);
    const WaveFunction psi = random_wf(g, 2, 6);
    const GridOperator op = composed({position_shift(2, 3.0 * g.spacing),
                                      momentum_phase(1, g.momentum(20)),
                                      momentum_phase(2, g.momentum(9))});
    const WaveFunction moved = apply_operator(psi, op);
    CHECK(moved.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
    const WaveFunction back = apply_operator(moved, adjoint(op));
    CHECK(max_amp_diff(back, psi) < 1e-12);
}

TEST_CASE("resolution of identity on the lattice is exact") {
    const Grid g = make_grid(16, 8.0);
    const WaveFunction psi = random_wf(g, 1, 8);
    // sum_j |x_j><x_j| spacing, with |x_j> the unit-norm lattice delta of
    // amplitude 1/sqrt(spacing)
    std::vector<cdouble> rebuilt(16, cdouble{0.0, 0.0});
    for (int j = 0; j < 16; ++j) {
        std::vector<cdouble> d(16, cdouble{0.0, 0.0});
        d[static_cast<std::size_t>(j)] = 1.0 / std::sqrt(g.spacing);
        const WaveFunction delta(g, {1}, std::move(d), false);
        const cdouble coeff = inner_product(delta, psi);
        rebuilt[static_cast<std::size_t>(j)] += coeff / std::sqrt(g.spacing);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < rebuilt.size(); ++i)
        err = std::max(err, std::abs(rebuilt[i] - psi.data()[i]));
    CHECK(err < 1e-14);
}

TEST_CASE("transpose and relabel preserve content") {
    const Grid g = make_grid(16, 8.0);
    const WaveFunction psi = random_wf(g, 2, 10);
    const WaveFunction swapped = transposed(psi, {2, 1});
    for (int j = 0; j < 16; ++j)
        for (int l = 0; l < 16; ++l)
            CHECK(swapped.data()[static_cast<std::size_t>(j) * 16 + static_cast<std::size_t>(l)] ==
                  psi.data()[static_cast<std::size_t>(l) * 16 + static_cast<std::size_t>(j)]);
    const WaveFunction renamed = relabeled(psi, {4, 5});
    CHECK(renamed.labels() == std::vector<int>{4, 5});
    CHECK(renamed.data() == psi.data());
}
