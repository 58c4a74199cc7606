#ifndef CVTEL_GAUSSIAN_HPP
#define CVTEL_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace cvtel {

/// Heisenberg-picture engine: first and second quadrature moments under
/// squeezing, beamsplitters and homodyne conditioning.
///
/// Quadrature ordering is (x_1..x_n, p_1..p_n) with [x,p]=i/2, so the vacuum
/// covariance is diag(1/4). r>0 squeezes momentum (Var p -> e^{-2r}/4), r<0
/// squeezes position.
struct GaussianState {
    int n_modes = 0;
    Eigen::VectorXd mean;  // length 2n
    Eigen::MatrixXd cov;   // 2n x 2n symmetric

    static GaussianState vacuum(int n_modes);

    double mean_x(int mode) const { return mean(mode); }
    double mean_p(int mode) const { return mean(n_modes + mode); }
};

struct SqueezeParam {
    double r = 0.0;
    int mode = 0;
};

/// Nonabsorbing beamsplitter with matrix [[cos t, sin t],[sin t, -cos t]]
/// applied identically to the x and p blocks of the two modes.
struct BeamsplitterSpec {
    double theta = 0.0;
    int mode_a = 0;
    int mode_b = 1;
};

/// Real linear combination of quadratures plus a constant.
struct LinearForm {
    Eigen::VectorXd coeff;  // length 2n
    double constant = 0.0;

    static LinearForm zero(int n_modes);
    static LinearForm x(int mode, int n_modes);
    static LinearForm p(int mode, int n_modes);

    LinearForm operator+(const LinearForm& o) const;
    LinearForm operator-(const LinearForm& o) const;
    LinearForm operator*(double s) const;
};

GaussianState squeeze(const GaussianState& s, const SqueezeParam& param);
GaussianState beamsplit(const GaussianState& s, const BeamsplitterSpec& bs);

/// Three-mode mixing network producing GHZ-type correlations: a beamsplitter
/// with cos(theta)=1/sqrt(3) on (modes[0],modes[1]) followed by a balanced one
/// on (modes[1],modes[2]). The resulting coefficient matrix has first row
/// (1/sqrt3, sqrt(2/3), 0).
GaussianState ghz_network(const GaussianState& s, const std::array<int, 3>& modes);

/// Momentum-squeezed (magnitude r2) and position-squeezed (magnitude r3)
/// vacua mixed on a balanced beamsplitter. For r2=r3=r the pair satisfies
/// Var(x_a - x_b) = Var(p_a + p_b) = e^{-2r}/2.
GaussianState epr_pair(double r2, double r3);

/// Three squeezed vacua (momentum-squeezed r, two position-squeezed r) fed
/// through ghz_network; Var(p sum) = 3 e^{-2r}/4, pairwise
/// Var(x_i - x_j) = e^{-2r}/2.
GaussianState ghz_resource(double r);

double variance(const GaussianState& s, const LinearForm& f);
double mean_value(const GaussianState& s, const LinearForm& f);

/// Homodyne conditioning on the quadrature combination f. The outcome is
/// sampled from the Gaussian marginal of f; the returned state is the
/// conditional one (rank-one Schur update). Zero-variance forms return the
/// deterministic value and leave the state untouched.
std::pair<double, GaussianState> condition_on_quadrature(const GaussianState& s,
                                                         const LinearForm& f,
                                                         std::uint64_t seed);
/// Same update with a caller-chosen outcome value.
GaussianState condition_with_outcome(const GaussianState& s, const LinearForm& f, double value);

GaussianState displace(const GaussianState& s, const Eigen::VectorXd& delta);
GaussianState marginal(const GaussianState& s, const std::vector<int>& modes);

/// Coefficient-level check that lhs equals the sum of rhs_terms to 1e-12.
/// Operator identities are verified symbolically, not statistically.
bool verify_identity(const LinearForm& lhs, const std::vector<LinearForm>& rhs_terms);

/// Symplectic spectrum (n values, vacuum value 1/4 each for a pure state).
Eigen::VectorXd symplectic_eigenvalues(const GaussianState& s);
bool is_pure(const GaussianState& s, double tol = 1e-9);

/// Smallest eigenvalue of cov + (i/4) J; >= -1e-10 for a physical state.
double uncertainty_min_eigenvalue(const GaussianState& s);

/// |<psi1|psi2>|^2 for pure states with vanishing x-p correlations.
double pure_state_fidelity(const GaussianState& a, const GaussianState& b);

} // namespace cvtel

#endif
