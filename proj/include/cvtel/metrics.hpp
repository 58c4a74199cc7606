#ifndef CVTEL_METRICS_HPP
#define CVTEL_METRICS_HPP

#include <Eigen/Dense>
#include <vector>

#include "cvtel/grid.hpp"

namespace cvtel {

struct FidelityResult {
    double value = 0.0;  // squared overlap in [0,1]
    double phase = 0.0;  // extracted global phase
};

FidelityResult fidelity(const WaveFunction& a, const WaveFunction& b);

/// Quadrature combination over a wavefunction's particles.
struct QuadratureTerm {
    int label = 0;
    double x_coeff = 0.0;
    double p_coeff = 0.0;
};
using GridForm = std::vector<QuadratureTerm>;

double quadrature_mean(const WaveFunction& w, const GridForm& form);
/// Variance of the form, momentum terms evaluated spectrally; mixed x-p terms
/// use the symmetrized product.
double quadrature_variance(const WaveFunction& w, const GridForm& form);

/// Full symmetrized covariance matrix, ordered (x_1..x_k, p_1..p_k) in label
/// order.
Eigen::MatrixXd symmetric_covariance(const WaveFunction& w);
Eigen::VectorXd quadrature_means(const WaveFunction& w);

/// Entanglement entropy (natural log) of a bipartition. For arity 2 the cut
/// is the single particle split; arity 3 accepts any one-or-two label cut.
double schmidt_entropy(const WaveFunction& w, const std::vector<int>& cut_labels);

} // namespace cvtel

#endif
