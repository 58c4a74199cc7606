#include "cvtel/gaussian.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "cvtel/rng.hpp"

namespace cvtel {

namespace {

void check_mode(const GaussianState& s, int mode, const char* what) {
    if (mode < 0 || mode >= s.n_modes)
        throw std::invalid_argument(std::string(what) + ": mode index out of range");
}

void check_form(const GaussianState& s, const LinearForm& f, const char* what) {
    if (f.coeff.size() != 2 * s.n_modes)
        throw std::invalid_argument(std::string(what) + ": coefficient length mismatch");
}

} // namespace

GaussianState GaussianState::vacuum(int n_modes) {
    GaussianState s;
    s.n_modes = n_modes;
    s.mean = Eigen::VectorXd::Zero(2 * n_modes);
    s.cov = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes) * 0.25;
    return s;
}

LinearForm LinearForm::zero(int n_modes) {
    return LinearForm{Eigen::VectorXd::Zero(2 * n_modes), 0.0};
}

LinearForm LinearForm::x(int mode, int n_modes) {
    LinearForm f = zero(n_modes);
    f.coeff(mode) = 1.0;
    return f;
}

LinearForm LinearForm::p(int mode, int n_modes) {
    LinearForm f = zero(n_modes);
    f.coeff(n_modes + mode) = 1.0;
    return f;
}

LinearForm LinearForm::operator+(const LinearForm& o) const {
    return LinearForm{coeff + o.coeff, constant + o.constant};
}

LinearForm LinearForm::operator-(const LinearForm& o) const {
    return LinearForm{coeff - o.coeff, constant - o.constant};
}

LinearForm LinearForm::operator*(double s) const { return LinearForm{coeff * s, constant * s}; }

GaussianState squeeze(const GaussianState& s, const SqueezeParam& param) {
    check_mode(s, param.mode, "squeeze");
    // Bogoliubov a -> a cosh r + a^dag sinh r: x scales by e^r, p by e^{-r}.
    GaussianState out = s;
    const int n = s.n_modes;
    const double ex = std::exp(param.r);
    const double ep = std::exp(-param.r);
    out.mean(param.mode) *= ex;
    out.mean(n + param.mode) *= ep;
    out.cov.row(param.mode) *= ex;
    out.cov.col(param.mode) *= ex;
    out.cov.row(n + param.mode) *= ep;
    out.cov.col(n + param.mode) *= ep;
    return out;
}

namespace {

// Orthogonal transform acting identically on the x and p blocks of two modes.
GaussianState two_mode_orthogonal(const GaussianState& s, int a, int b, double c00, double c01,
                                  double c10, double c11) {
    const int n = s.n_modes;
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int blk : {0, n}) {
        T(blk + a, blk + a) = c00;
        T(blk + a, blk + b) = c01;
        T(blk + b, blk + a) = c10;
        T(blk + b, blk + b) = c11;
    }
    GaussianState out = s;
    out.mean = T * s.mean;
    out.cov = T * s.cov * T.transpose();
    return out;
}

} // namespace

GaussianState beamsplit(const GaussianState& s, const BeamsplitterSpec& bs) {
    check_mode(s, bs.mode_a, "beamsplit");
    check_mode(s, bs.mode_b, "beamsplit");
    if (bs.mode_a == bs.mode_b) throw std::invalid_argument("beamsplit: modes must differ");
    const double c = std::cos(bs.theta);
    const double t = std::sin(bs.theta);
    return two_mode_orthogonal(s, bs.mode_a, bs.mode_b, c, t, t, -c);
}

GaussianState ghz_network(const GaussianState& s, const std::array<int, 3>& modes) {
    if (modes[0] == modes[1] || modes[1] == modes[2] || modes[0] == modes[2])
        throw std::invalid_argument("ghz_network: modes must be distinct");
    const double theta1 = std::acos(1.0 / std::sqrt(3.0));
    GaussianState out = beamsplit(s, BeamsplitterSpec{theta1, modes[0], modes[1]});
    out = beamsplit(out, BeamsplitterSpec{std::numbers::pi / 4.0, modes[1], modes[2]});
    return out;
}

GaussianState epr_pair(double r2, double r3) {
    GaussianState s = GaussianState::vacuum(2);
    s = squeeze(s, SqueezeParam{r2, 0});    // momentum-squeezed input
    s = squeeze(s, SqueezeParam{-r3, 1});   // position-squeezed input
    return beamsplit(s, BeamsplitterSpec{std::numbers::pi / 4.0, 0, 1});
}

GaussianState ghz_resource(double r) {
    GaussianState s = GaussianState::vacuum(3);
    s = squeeze(s, SqueezeParam{r, 0});
    s = squeeze(s, SqueezeParam{-r, 1});
    s = squeeze(s, SqueezeParam{-r, 2});
    return ghz_network(s, {0, 1, 2});
}

double variance(const GaussianState& s, const LinearForm& f) {
    check_form(s, f, "variance");
    return f.coeff.dot(s.cov * f.coeff);
}

double mean_value(const GaussianState& s, const LinearForm& f) {
    check_form(s, f, "mean_value");
    return f.coeff.dot(s.mean) + f.constant;
}

GaussianState condition_with_outcome(const GaussianState& s, const LinearForm& f, double value) {
    check_form(s, f, "condition_with_outcome");
    const double var = variance(s, f);
    if (var <= 1e-14) return s;  // deterministic quadrature: nothing to update
    const Eigen::VectorXd cross = s.cov * f.coeff;
    GaussianState out = s;
    out.mean = s.mean + cross * ((value - f.constant - f.coeff.dot(s.mean)) / var);
    out.cov = s.cov - (cross * cross.transpose()) / var;
    out.cov = ((out.cov + out.cov.transpose()) * 0.5).eval();
    return out;
}

std::pair<double, GaussianState> condition_on_quadrature(const GaussianState& s,
                                                         const LinearForm& f,
                                                         std::uint64_t seed) {
    check_form(s, f, "condition_on_quadrature");
    const double var = variance(s, f);
    if (var <= 1e-14) return {mean_value(s, f), s};
    SeededRng rng(seed);
    const double outcome = rng.normal(mean_value(s, f), std::sqrt(var));
    return {outcome, condition_with_outcome(s, f, outcome)};
}

GaussianState displace(const GaussianState& s, const Eigen::VectorXd& delta) {
    if (delta.size() != s.mean.size()) throw std::invalid_argument("displace: length mismatch");
    GaussianState out = s;
    out.mean += delta;
    return out;
}

GaussianState marginal(const GaussianState& s, const std::vector<int>& modes) {
    const int m = static_cast<int>(modes.size());
    GaussianState out;
    out.n_modes = m;
    out.mean = Eigen::VectorXd::Zero(2 * m);
    out.cov = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    auto src = [&](int i) {
        const int mode = modes[static_cast<std::size_t>(i % m)];
        check_mode(s, mode, "marginal");
        return (i < m) ? mode : s.n_modes + mode;
    };
    for (int i = 0; i < 2 * m; ++i) {
        out.mean(i) = s.mean(src(i));
        for (int j = 0; j < 2 * m; ++j) out.cov(i, j) = s.cov(src(i), src(j));
    }
    return out;
}

bool verify_identity(const LinearForm& lhs, const std::vector<LinearForm>& rhs_terms) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(lhs.coeff.size());
    double c = 0.0;
    for (const auto& t : rhs_terms) {
        if (t.coeff.size() != lhs.coeff.size())
            throw std::invalid_argument("verify_identity: mixed mode counts");
        sum += t.coeff;
        c += t.constant;
    }
    return (sum - lhs.coeff).lpNorm<Eigen::Infinity>() <= 1e-12 &&
           std::abs(c - lhs.constant) <= 1e-12;
}

Eigen::VectorXd symplectic_eigenvalues(const GaussianState& s) {
    const int n = s.n_modes;
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = Eigen::MatrixXcd::Identity(n, n);
    J.bottomLeftCorner(n, n) = -Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd M = std::complex<double>(0.0, 1.0) * J * s.cov;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<double> mags;
    for (int i = 0; i < 2 * n; ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mags.begin(), mags.end());
    Eigen::VectorXd nu(n);
    for (int i = 0; i < n; ++i) nu(i) = 0.5 * (mags[static_cast<std::size_t>(2 * i)] +
                                               mags[static_cast<std::size_t>(2 * i + 1)]);
    return nu;
}

bool is_pure(const GaussianState& s, double tol) {
    const Eigen::VectorXd nu = symplectic_eigenvalues(s);
    return ((nu.array() - 0.25).abs() < tol).all();
}

double uncertainty_min_eigenvalue(const GaussianState& s) {
    const int n = s.n_modes;
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = Eigen::MatrixXcd::Identity(n, n);
    J.bottomLeftCorner(n, n) = -Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd H = s.cov.cast<std::complex<double>>() +
                               std::complex<double>(0.0, 0.25) * J;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    return es.eigenvalues().minCoeff();
}

double pure_state_fidelity(const GaussianState& a, const GaussianState& b) {
    if (a.n_modes != b.n_modes) throw std::invalid_argument("fidelity: mode count mismatch");
    const int n = a.n_modes;
    auto xp_block_zero = [&](const GaussianState& s) {
        return s.cov.topRightCorner(n, n).lpNorm<Eigen::Infinity>() < 1e-9;
    };
    if (!is_pure(a) || !is_pure(b) || !xp_block_zero(a) || !xp_block_zero(b))
        throw std::invalid_argument("pure_state_fidelity: needs pure states without x-p correlations");

    // Position-space wavefunctions psi_i ~ exp(-1/4 (x-a_i)^T A_i^{-1} (x-a_i)
    // + 2 i b_i . x); the overlap is a single complex Gaussian integral.
    const Eigen::MatrixXd A1 = a.cov.topLeftCorner(n, n);
    const Eigen::MatrixXd A2 = b.cov.topLeftCorner(n, n);
    const Eigen::VectorXd a1 = a.mean.head(n), a2 = b.mean.head(n);
    const Eigen::VectorXd b1 = a.mean.tail(n), b2 = b.mean.tail(n);
    const Eigen::MatrixXd A1i = A1.inverse();
    const Eigen::MatrixXd A2i = A2.inverse();

    const Eigen::MatrixXd M = 0.25 * (A1i + A2i);
    Eigen::VectorXcd c = (0.5 * (A1i * a1 + A2i * a2)).cast<std::complex<double>>();
    c += std::complex<double>(0.0, 2.0) * (b2 - b1).cast<std::complex<double>>();
    const double d = -0.25 * (a1.dot(A1i * a1) + a2.dot(A2i * a2));

    const Eigen::MatrixXd Minv = M.inverse();
    std::complex<double> qform{0.0, 0.0};  // c^T M^{-1} c without conjugation
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) qform += c(i) * Minv(i, j) * c(j);

    const double log_norm1 = -0.25 * std::log((2.0 * std::numbers::pi * A1).determinant());
    const double log_norm2 = -0.25 * std::log((2.0 * std::numbers::pi * A2).determinant());
    const double log_gauss = 0.5 * (n * std::log(std::numbers::pi) - std::log(M.determinant()));
    const std::complex<double> log_overlap = log_norm1 + log_norm2 + log_gauss + 0.25 * qform + d;
    const double f = std::exp(2.0 * log_overlap.real());
    return std::min(1.0, f);
}

} // namespace cvtel
