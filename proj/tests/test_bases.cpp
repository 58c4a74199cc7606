#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>

#include "cvtel/bases.hpp"
#include "cvtel/metrics.hpp"
#include "cvtel/resources.hpp"
#include "cvtel/rng.hpp"

using namespace cvtel;

namespace {

WaveFunction random_wf(const Grid& g, int arity, std::uint64_t seed,
                       std::vector<int> labels) {
    SeededRng rng(seed);
    std::size_t total = 1;
    for (int i = 0; i < arity; ++i) total *= static_cast<std::size_t>(g.n_points);
    std::vector<cdouble> amp(total);
    for (auto& v : amp) v = cdouble{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
    return WaveFunction(g, std::move(labels), std::move(amp));
}

} // namespace

TEST_CASE("bell states: the zero label is the uniform diagonal") {
    const Grid g = make_grid(32, 8.0);
    const WaveFunction e = bell_state(BellLabel{0.0, 0.0}, g, {1, 2});
    const WaveFunction epr = make_epr_wavefunction(ResourceQuality::ideal(), g, {1, 2});
    CHECK(std::norm(inner_product(e, epr)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(bell_state(BellLabel{0.1234, 0.0}, g, {1, 2}));  // off-lattice momentum
    CHECK_THROWS(bell_state(BellLabel{0.0, 0.33 * g.spacing}, g, {1, 2}));
}

TEST_CASE("bell states are relative-position and total-momentum eigenstates") {
    const Grid g = make_grid(32, 8.0);
    const double P = g.momentum(20);
    const double Q = 3.0 * g.spacing;
    const WaveFunction b = bell_state(BellLabel{P, Q}, g, {1, 2});
    CHECK(quadrature_variance(b, {{1, 1.0, 0.0}, {2, -1.0, 0.0}}) == 0.0);
    CHECK(quadrature_mean(b, {{1, 1.0, 0.0}, {2, -1.0, 0.0}}) == doctest::Approx(Q));
    CHECK(quadrature_variance(b, {{1, 0.0, 1.0}, {2, 0.0, 1.0}}) ==
          doctest::Approx(0.0).epsilon(1e-10));
    CHECK(quadrature_mean(b, {{1, 0.0, 1.0}, {2, 0.0, 1.0}}) == doctest::Approx(P).epsilon(1e-10));
}

TEST_CASE("bell family gram and completeness are lattice exact") {
    const Grid g = make_grid(16, 8.0);
    std::vector<WaveFunction> states;
    for (int k : {4, 8, 9, 13})
        for (int m : {0, 1, 5, 11})
            states.push_back(bell_state(BellLabel{g.momentum(k), m * g.spacing}, g, {1, 2}));
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i; j < states.size(); ++j) {
            const double expect = (i == j) ? 1.0 : 0.0;
            CHECK(std::abs(inner_product(states[i], states[j]) - expect) < 1e-10);
        }
    const FamilyCheck fc = check_bell_family(g, 5);
    CHECK(fc.gram_deviation < 1e-10);
    CHECK(fc.completeness_deviation < 1e-9);
}

TEST_CASE("triple basis family") {
    const Grid g = make_grid(16, 8.0);
    SUBCASE("zero label is the body-diagonal state") {
        const WaveFunction t = triple_basis_state(TripleLabel{0.0, 0.0, 0.0, 0.0}, g, {1, 2, 3});
        const WaveFunction ghz = make_ghz_wavefunction(ResourceQuality::ideal(), g, {1, 2, 3});
        CHECK(std::norm(inner_product(t, ghz)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("overlap with a product of position eigenstates follows the offsets") {
        std::vector<cdouble> amp(static_cast<std::size_t>(16) * 16 * 16, cdouble{0.0, 0.0});
        const int a = 9, b = 6;  // |x_a>|x_a>|x_b>
        amp[(static_cast<std::size_t>(a) * 16 + a) * 16 + b] = 1.0;
        const WaveFunction prod(g, {1, 2, 3}, std::move(amp));
        const double pstep = triple_momentum_spacing(g);
        const WaveFunction hit =
            triple_basis_state(TripleLabel{0.0, 2.0 * pstep, 0.0, (a - b) * g.spacing}, g, {1, 2, 3});
        CHECK(std::abs(inner_product(hit, prod)) > 1e-12);
        const WaveFunction miss =
            triple_basis_state(TripleLabel{0.0, 2.0 * pstep, 0.0, (a - b + 1) * g.spacing}, g,
                               {1, 2, 3});
        CHECK(std::abs(inner_product(miss, prod)) < 1e-14);
    }
    SUBCASE("gram and completeness") {
        const FamilyCheck fc = check_triple_family(g, 6);
        CHECK(fc.gram_deviation < 1e-10);
        CHECK(fc.completeness_deviation < 1e-9);
    }
}

TEST_CASE("pi123 family structure") {
    const Grid g = make_grid(16, 8.0);
    const TripleLabel label{g.momentum(11), g.momentum(5), 2.0 * g.spacing, 0.0};
    const WaveFunction s = pi123_state(label, g, {1, 2, 3});

    SUBCASE("first particle is a momentum eigenstate") {
        const WaveFunction m = to_momentum(s, 1);
        for (int k = 0; k < 16; ++k) {
            double mass = 0.0;
            for (int j2 = 0; j2 < 16; ++j2)
                for (int j3 = 0; j3 < 16; ++j3)
                    mass += std::norm(
                        m.data()[(static_cast<std::size_t>(k) * 16 + static_cast<std::size_t>(j2)) * 16 +
                                 static_cast<std::size_t>(j3)]);
            if (k == 11)
                CHECK(mass > 0.0);
            else
                CHECK(mass < 1e-20);
        }
    }
    SUBCASE("entanglement sits across the (12)|3 cut only") {
        CHECK(schmidt_entropy(s, {1}) == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(schmidt_entropy(s, {3}) == doctest::Approx(std::log(16.0)).epsilon(1e-9));
    }
    SUBCASE("gram and completeness") {
        const FamilyCheck fc = check_pi123_family(g, 7);
        CHECK(fc.gram_deviation < 1e-10);
        CHECK(fc.completeness_deviation < 1e-9);
    }
}

TEST_CASE("joint measurement on a five-particle state") {
    const Grid g = make_grid(8, 8.0);
    const WaveFunction input = make_input_state({GaussianPacket{0.0, 2.0}, 0.0}, g, {1, 2});
    const WaveFunction ghz = make_ghz_wavefunction(ResourceQuality::ideal(), g, {3, 4, 5});
    const WaveFunction state5 = tensor_product(input, ghz);

    SUBCASE("born masses sum to one and the conditional is normalized") {
        const auto [outcome, cond] = joint_measure(state5, JointBasis::Pi123, {1, 2, 3}, 11);
        CHECK(cond.squared_norm() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(cond.labels() == std::vector<int>{4, 5});
        CHECK(outcome.density > 0.0);
        CHECK(outcome.density == doctest::Approx(1.0 / (8.0 * 8.0 * 8.0)).epsilon(1e-9));
    }
    SUBCASE("fixed seeds reproduce the outcome") {
        const auto a = joint_measure(state5, JointBasis::Pi123, {1, 2, 3}, 21);
        const auto b = joint_measure(state5, JointBasis::Pi123, {1, 2, 3}, 21);
        CHECK(a.first.label.p == b.first.label.p);
        CHECK(a.first.label.P == b.first.label.P);
        CHECK(a.first.label.Q == b.first.label.Q);
        CHECK(a.second.data() == b.second.data());
    }
    SUBCASE("empirical frequencies follow the born masses") {
        // uniform distribution over 8^3 pi123 outcomes for the ideal state
        std::map<std::tuple<double, double, double>, int> counts;
        const int trials = 4096;
        for (int t = 0; t < trials; ++t) {
            const auto [outcome, cond] =
                joint_measure(state5, JointBasis::Pi123, {1, 2, 3}, 1000 + t);
            counts[{outcome.label.p, outcome.label.P, outcome.label.Q}]++;
        }
        const double expect = trials / 512.0;
        const double sigma = std::sqrt(trials * (1.0 / 512.0) * (1.0 - 1.0 / 512.0));
        int outliers = 0;
        for (const auto& [key, count] : counts)
            if (std::abs(count - expect) > 3.0 * sigma) ++outliers;
        CHECK(outliers <= 3);  // ~0.3% of 512 cells at three sigma
    }
    SUBCASE("triple-basis outcomes concentrate on the input offset") {
        const auto [outcome, cond] = joint_measure(state5, JointBasis::Triple, {1, 2, 3}, 5);
        CHECK(outcome.label.Q == doctest::Approx(0.0));  // q = 0 input
    }
}

TEST_CASE("triple basis fails as a teleportation measurement; pi123 does not") {
    const Grid g = make_grid(32, 10.0);
    const WaveFunction input = make_input_state({GaussianPacket{0.0, 1.0}, 0.0}, g, {1, 2});
    const WaveFunction ghz = make_ghz_wavefunction(ResourceQuality::ideal(), g, {3, 4, 5});
    const auto report = demonstrate_triple_basis_failure(input, ghz, 99);

    CHECK(report.pi123_max_defect < 1e-9);
    CHECK(report.triple_max_defect > 0.1);
    // off-diagonal outcomes carry no conditional weight at all
    CHECK(report.offdiagonal_weight < 1e-12);
    // on-support outcomes overshoot by the concentration factor sqrt(N)
    double max_norm = 0.0;
    for (const auto& row : report.triple_rows) max_norm = std::max(max_norm, row.max_norm);
    CHECK(max_norm == doctest::Approx(std::sqrt(32.0)).epsilon(1e-9));
}

TEST_CASE("the five-particle overload factors the state and agrees") {
    const Grid g = make_grid(16, 8.0);
    const WaveFunction input = make_input_state({GaussianPacket{0.0, 1.5}, 2.0 * g.spacing}, g, {1, 2});
    const WaveFunction ghz = make_ghz_wavefunction(ResourceQuality::ideal(), g, {3, 4, 5});
    const WaveFunction state5 = tensor_product(input, ghz);
    const auto via5 = demonstrate_triple_basis_failure(state5, g);
    const auto direct = demonstrate_triple_basis_failure(input, ghz, 1234);
    CHECK(via5.input_q == doctest::Approx(direct.input_q));
    CHECK(via5.triple_max_defect == doctest::Approx(direct.triple_max_defect).epsilon(1e-9));
    CHECK(via5.pi123_max_defect < 1e-9);
}
