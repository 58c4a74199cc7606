// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "cvtel/bases.hpp"
#include "cvtel/metrics.hpp"
#include "cvtel/protocols.hpp"

using namespace cvtel;

namespace {

int failures = 0;

void report(int criterion, bool pass, const char* description, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, description,
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- criterion 1: basis orthonormality and completeness -------------------

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g = make_grid(128, 16.0);
    const FamilyCheck bell = check_bell_family(g, 11);
    const FamilyCheck triple = check_triple_family(g, 12);
    const FamilyCheck pi = check_pi123_family(g, 13);
    const double worst =
        std::max({bell.gram_deviation, bell.completeness_deviation, triple.gram_deviation,
                  triple.completeness_deviation, pi.gram_deviation, pi.completeness_deviation});
    const double dt = elapsed_s(t0);
    report(1, worst < 1e-9 && dt < 10.0,
           "Bell/triple/pi123 Gram and completeness < 1e-9 on a 128-point grid in < 10 s",
           fmt("max deviation %.3e, %.1f s", worst, dt));
}

// --- criterion 2: exact recovery with ideal resources ---------------------

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    double worst_single = 1.0, worst_entangled = 1.0;

    {
        const Grid g = make_grid(256, 16.0);
        const WaveFunction input = profile_wavefunction(GaussianPacket{0.3, 0.9}, g, 1);
        std::vector<std::uint64_t> seeds(50);
        for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 100 + i;
        for (const auto& res : teleport_single_batch(input, ResourceQuality::ideal(), g, seeds)) {
            worst_single = std::min(worst_single, res.record.fidelity);
            pass = pass && res.record.fidelity >= 1.0 - 1e-8;
        }
    }
    {
        const Grid g = make_grid(64, 12.0);
        const InputSpec spec{GaussianPacket{0.0, 1.0}, 0.0};
        std::vector<std::uint64_t> seeds(50);
        for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 500 + i;
        for (const auto& res : teleport_entangled_batch(spec, ResourceQuality::ideal(), g, seeds)) {
            worst_entangled = std::min(worst_entangled, res.record.fidelity);
            pass = pass && res.record.fidelity >= 1.0 - 1e-8;
        }
    }
    const double dt = elapsed_s(t0);
    report(2, pass && dt < 60.0,
           "ideal-resource recovery fidelity >= 1-1e-8 on every outcome, 50 seeds each, < 60 s",
           fmt("worst single %.12f, worst entangled %.12f, %.1f s", worst_single, worst_entangled,
               dt));
}

// --- criterion 3: the fully entangled basis fails, pi123 does not ---------

void criterion_3() {
    const Grid g = make_grid(128, 16.0);
    const WaveFunction input = make_input_state({GaussianPacket{0.0, 1.0}, 0.0}, g, {1, 2});
    const WaveFunction ghz = make_ghz_wavefunction(ResourceQuality::ideal(), g, {3, 4, 5});
    const auto rep = demonstrate_triple_basis_failure(input, ghz, 77);
    report(3, rep.triple_max_defect > 0.1 && rep.pi123_max_defect < 1e-9,
           "triple-basis isometry defect > 0.1 while pi123 stays < 1e-9 on the same test set",
           fmt("triple defect %.3f, pi123 defect %.3e", rep.triple_max_defect,
               rep.pi123_max_defect));
}

// --- criterion 4: resource correlations as finite-r laws ------------------

void criterion_4() {
    bool sym_pass = true;
    double sym_worst = 0.0;
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        const GaussianState e = epr_pair(r, r);
        const GaussianState ghz = ghz_resource(r);
        const double law = std::exp(-2.0 * r);
        const double checks[] = {
            std::abs(variance(e, LinearForm::x(0, 2) - LinearForm::x(1, 2)) - law / 2.0),
            std::abs(variance(e, LinearForm::p(0, 2) + LinearForm::p(1, 2)) - law / 2.0),
            std::abs(variance(ghz, LinearForm::p(0, 3) + LinearForm::p(1, 3) +
                                       LinearForm::p(2, 3)) -
                     3.0 * law / 4.0),
            std::abs(variance(ghz, LinearForm::x(0, 3) - LinearForm::x(1, 3)) - law / 2.0),
            std::abs(variance(ghz, LinearForm::x(0, 3) - LinearForm::x(2, 3)) - law / 2.0)};
        for (double c : checks) {
            sym_worst = std::max(sym_worst, c);
            sym_pass = sym_pass && c < 1e-12;
        }
    }

    bool grid_pass = true;
    double grid_worst = 0.0;
    for (double r : {0.5, 1.0}) {
        const double law = std::exp(-2.0 * r);
        const Grid ge = make_grid(256, 20.0);
        const WaveFunction epr = make_epr_wavefunction(ResourceQuality::finite(r), ge, {2, 3});
        const Grid gg = make_grid(128, 20.0);
        const WaveFunction ghz = make_ghz_wavefunction(ResourceQuality::finite(r), gg, {3, 4, 5});
        const double checks[] = {
            std::abs(quadrature_variance(epr, {{2, 1.0, 0.0}, {3, -1.0, 0.0}}) - law / 2.0),
            std::abs(quadrature_variance(epr, {{2, 0.0, 1.0}, {3, 0.0, 1.0}}) - law / 2.0),
            std::abs(quadrature_variance(ghz, {{3, 0.0, 1.0}, {4, 0.0, 1.0}, {5, 0.0, 1.0}}) -
                     3.0 * law / 4.0),
            std::abs(quadrature_variance(ghz, {{3, 1.0, 0.0}, {4, -1.0, 0.0}}) - law / 2.0),
            std::abs(quadrature_variance(ghz, {{3, 1.0, 0.0}, {5, -1.0, 0.0}}) - law / 2.0)};
        for (double c : checks) {
            grid_worst = std::max(grid_worst, c);
            grid_pass = grid_pass && c < 1e-6;
        }
    }
    report(4, sym_pass && grid_pass,
           "EPR and GHZ correlation laws: covariance engine to 1e-12, grid resources to 1e-6",
           fmt("covariance worst %.3e (r in {0.5,1,2,3}), grid worst %.3e (r in {0.5,1})",
               sym_worst, grid_worst));
}

// --- criterion 5: output correlations --------------------------------------

void criterion_5() {
    bool pass = true;
    std::string detail;
    {
        const Grid g = make_grid(64, 12.0);
        const InputSpec spec{GaussianPacket{0.0, 1.0}, 0.0};
        const auto run = teleport_entangled(spec, ResourceQuality::ideal(), g, 21);
        const CorrelationReport corr = verify_output_correlations(run);
        pass = pass && corr.var_x_diff == 0.0;
        pass = pass && std::abs(corr.var_p_sum_out - corr.var_p_sum_in) < 1e-8 &&
               std::abs(corr.mean_p_sum_out - corr.mean_p_sum_in) < 1e-8;
        detail += fmt("ideal Var(x4-x5)=%.1e, p-sum stat diff %.1e; ", corr.var_x_diff,
                      std::abs(corr.var_p_sum_out - corr.var_p_sum_in));
    }
    {
        const double r = 2.0;
        const Grid g = make_grid(128, 18.0);
        const InputSpec spec{GaussianPacket{0.0, 1.0}, 0.0};
        const auto run = teleport_entangled(spec, ResourceQuality::finite(r), g, 22);
        const CorrelationReport corr = verify_output_correlations(run);
        const double predicted = gaussian_var_x_diff_prediction(r);
        pass = pass && std::abs(corr.var_x_diff - predicted) < 1e-4;
        detail += fmt("finite r=2 grid %.6e vs engine %.6e", corr.var_x_diff, predicted);
    }
    report(5, pass,
           "ideal output: Var(x4-x5)=0 and input p-sum statistics within 1e-8; finite r=2 within "
           "1e-4 of the covariance engine",
           detail);
}

// --- criterion 6: operator identities ---------------------------------------

void criterion_6() {
    const int n = 5;
    auto X = [&](int mode) { return LinearForm::x(mode - 1, n); };
    auto P = [&](int mode) { return LinearForm::p(mode - 1, n); };
    const double s2 = std::sqrt(2.0);
    const LinearForm XQ = (X(1) - X(2)) * (1.0 / s2);
    const LinearForm PP = (P(1) + P(2)) * (1.0 / s2);
    const LinearForm YQ = (X(2) - X(3)) * (1.0 / s2);
    const LinearForm PiP = (P(2) + P(3)) * (1.0 / s2);

    const bool base_identities =
        verify_identity(X(3), {X(1), (X(2) - X(3)) * -1.0, XQ * -s2}) &&
        verify_identity(P(3), {P(1), P(2) + P(3), PP * -s2}) &&
        verify_identity(X(4), {X(2), X(4) - X(3), YQ * -s2}) &&
        verify_identity(X(5), {X(1), X(2) - X(1), X(5) - X(3), YQ * -s2});

    const std::vector<LinearForm> printed_p5 = {P(2), P(3) + P(4) + P(5), P(1) - P(5),
                                                (P(1) + PiP * s2) * -1.0};
    const std::vector<LinearForm> printed_p4 = {P(1), P(3) + P(4) + P(5), P(2) - P(4),
                                                (P(1) + PiP * s2) * -1.0};
    const bool swapped_detected = !verify_identity(P(5), printed_p5) &&
                                  verify_identity(P(4), printed_p5) &&
                                  !verify_identity(P(4), printed_p4) &&
                                  verify_identity(P(5), printed_p4);
    std::vector<LinearForm> sum = printed_p5;
    for (const auto& t : printed_p4) sum.push_back(t);
    const bool sum_holds = verify_identity(P(4) + P(5), sum);

    report(6, base_identities && swapped_detected && sum_holds,
           "operator identities hold to 1e-12; the published momentum pair is label-swapped and "
           "the corrected forms pass",
           fmt("base %d, swap detected %d, sum rule %d", static_cast<int>(base_identities),
               static_cast<int>(swapped_detected), static_cast<int>(sum_holds)));
}

// --- criterion 7: entanglement reproduction ---------------------------------

void criterion_7() {
    bool pass = true;
    std::string detail;
    {
        const Grid g = make_grid(64, 12.0);
        const InputSpec spec{GaussianPacket{0.0, 1.0}, 0.0};
        const auto run = teleport_entangled(spec, ResourceQuality::ideal(), g, 31);
        const double s_in = schmidt_entropy(run.input, {1});
        const double s_out = schmidt_entropy(run.output, {4});
        pass = pass && std::abs(s_out - s_in) < 1e-8;
        detail += fmt("ideal |dS|=%.2e; ", std::abs(s_out - s_in));
    }
    {
        // Compared at the resolution where the residual e^{-2r} noise sits at
        // the lattice scale; finer grids inflate the input's entropy through
        // its exactly sharp relative coordinate.
        const Grid g = make_grid(64, 18.0);
        const InputSpec spec{GaussianPacket{0.0, 0.8}, 0.0};
        const auto run = teleport_entangled(spec, ResourceQuality::finite(2.0), g, 32);
        const double s_in = schmidt_entropy(run.input, {1});
        const double s_out = schmidt_entropy(run.output, {4});
        pass = pass && std::abs(s_out - s_in) / s_in < 0.05;
        detail += fmt("r=2 S_in %.4f vs S_out %.4f (%.1f%%)", s_in, s_out,
                      100.0 * std::abs(s_out - s_in) / s_in);
    }
    report(7, pass, "Schmidt entropy reproduced: ideal within 1e-8, finite r=2 within 5%", detail);
}

// --- criterion 8: finite-squeezing benchmark --------------------------------

void criterion_8() {
    bool pass = true;
    std::string detail;
    {
        const Grid g = make_grid(256, 16.0);
        const WaveFunction input = profile_wavefunction(GaussianPacket{0.0, 0.5}, g, 1);
        std::vector<std::uint64_t> seeds(200);
        for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 900 + i;
        for (const auto& [r, target] :
             std::vector<std::pair<double, double>>{{0.0, 0.50}, {1.0, 0.881}}) {
            double mean = 0.0;
            for (const auto& res :
                 teleport_single_batch(input, ResourceQuality::finite(r), g, seeds))
                mean += res.record.fidelity;
            mean /= static_cast<double>(seeds.size());
            pass = pass && std::abs(mean - target) < 0.02;
            detail += fmt("r=%.0f mean %.4f (target %.3f); ", r, mean, target);
        }
    }
    {
        // exchanged-pair protocol: exact Born-averaged fidelity, grid sized
        // per point so the resource respects the truncation guard
        double prev = -1.0;
        bool increasing = true;
        std::string curve = "entangled E[F]:";
        for (double r : {0.5, 1.0, 2.0, 3.0}) {
            const double extent = std::max(12.0, 8.01 * max_position_sigma(ghz_resource(r)));
            const Grid g = make_grid(32, extent);
            InputSpec spec{GaussianPacket{0.0, std::max(1.0, 2.05 * g.spacing)}, 0.0};
            const double f =
                teleport_entangled_expected_fidelity(spec, ResourceQuality::finite(r), g);
            curve += fmt(" %.6f", f);
            increasing = increasing && f > prev;
            prev = f;
        }
        pass = pass && increasing;
        detail += curve + (increasing ? " strictly increasing" : " NOT increasing");
    }
    report(8, pass,
           "single-protocol mean fidelity {0.50, 0.881} +/- 0.02 over 200 seeds; entangled "
           "fidelity strictly increasing in r over {0.5,1,2,3}",
           detail);
}

} // namespace

int main() {
    std::printf("acceptance suite: dual-engine teleportation simulator\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("%d of 8 criteria passed\n", 8 - failures);
    return failures;
}
