#include "cvtel/metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvtel {

FidelityResult fidelity(const WaveFunction& a, const WaveFunction& b) {
    const cdouble ov = inner_product(a, b);
    return FidelityResult{std::min(1.0, std::norm(ov)), std::arg(ov)};
}

namespace {

// A form is foldable when it is a scalar multiple of an integer combination
// of one quadrature type; its value is then well defined modulo scale*period.
struct FoldedForm {
    bool pure_x = false, pure_p = false;
    double scale = 1.0;
    std::vector<std::pair<int, double>> terms;  // label -> coefficient
};

bool integer_ratio_form(const GridForm& form, bool want_x, FoldedForm& out) {
    double scale = 0.0;
    for (const auto& t : form) {
        const double on = want_x ? t.x_coeff : t.p_coeff;
        const double off = want_x ? t.p_coeff : t.x_coeff;
        if (off != 0.0) return false;
        if (on != 0.0 && (scale == 0.0 || std::abs(on) < scale)) scale = std::abs(on);
    }
    if (scale == 0.0) return false;
    for (const auto& t : form) {
        const double on = want_x ? t.x_coeff : t.p_coeff;
        const double ratio = on / scale;
        if (std::abs(ratio - std::round(ratio)) > 1e-9) return false;
    }
    out.pure_x = want_x;
    out.pure_p = !want_x;
    out.scale = scale;
    for (const auto& t : form) out.terms.emplace_back(t.label, want_x ? t.x_coeff : t.p_coeff);
    return true;
}

// One pass over the probability mass with per-cell folded form values.
void folded_moments(const WaveFunction& w, const FoldedForm& ff, double& mean, double& var) {
    WaveFunction state = w;
    if (ff.pure_p)
        for (const auto& [label, c] : ff.terms)
            if (c != 0.0) state = to_momentum(state, label);
    const Grid& g = state.grid();
    const int n = g.n_points;
    const int k = state.arity();
    std::vector<int> axes;
    std::vector<double> coeffs;
    for (const auto& [label, c] : ff.terms) {
        if (c == 0.0) continue;
        axes.push_back(state.axis_of(label));
        coeffs.push_back(c);
    }
    const double step = ff.pure_x ? g.spacing : g.momentum_spacing();
    const double period = ff.scale * n * step;
    const double cell = state.cell_measure();
    const auto& d = state.data();
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t f = 0; f < d.size(); ++f) {
        const double wgt = std::norm(d[f]) * cell;
        if (wgt == 0.0) continue;
        std::size_t rem = f;
        int idx[5];
        for (int a = k - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        double v = 0.0;
        for (std::size_t t = 0; t < axes.size(); ++t)
            v += coeffs[t] * (idx[axes[t]] - g.origin_index) * step;
        v = Grid::principal(v, period);
        m1 += wgt * v;
        m2 += wgt * v * v;
    }
    mean = m1;
    var = std::max(0.0, m2 - m1 * m1);
}

} // namespace

Eigen::VectorXd quadrature_means(const WaveFunction& w) {
    const int k = w.arity();
    const Grid& g = w.grid();
    const int n = g.n_points;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(2 * k);
    // position block
    {
        const auto& d = w.data();
        const double cell = w.cell_measure();
        for (std::size_t f = 0; f < d.size(); ++f) {
            const double wgt = std::norm(d[f]) * cell;
            if (wgt == 0.0) continue;
            std::size_t rem = f;
            for (int a = k - 1; a >= 0; --a) {
                mu(a) += wgt * g.position(static_cast<int>(rem % static_cast<std::size_t>(n)));
                rem /= static_cast<std::size_t>(n);
            }
        }
    }
    for (int a = 0; a < k; ++a) {
        WaveFunction m = to_momentum(w, w.labels()[static_cast<std::size_t>(a)]);
        const auto& d = m.data();
        const double cell = m.cell_measure();
        const std::size_t stride = axis_stride(m.extents(), a);
        for (std::size_t f = 0; f < d.size(); ++f) {
            const double wgt = std::norm(d[f]) * cell;
            if (wgt == 0.0) continue;
            const int kk = static_cast<int>((f / stride) % static_cast<std::size_t>(n));
            mu(k + a) += wgt * g.momentum(kk);
        }
    }
    return mu;
}

Eigen::MatrixXd symmetric_covariance(const WaveFunction& w) {
    const int k = w.arity();
    const Grid& g = w.grid();
    const int n = g.n_points;
    const Eigen::VectorXd mu = quadrature_means(w);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * k, 2 * k);

    auto accumulate_pair = [&](const WaveFunction& state, int axis_a, int axis_b, bool a_is_p,
                               bool b_is_p) {
        const auto& d = state.data();
        const double cell = state.cell_measure();
        const std::size_t sa = axis_stride(state.extents(), axis_a);
        const std::size_t sb = axis_stride(state.extents(), axis_b);
        double acc = 0.0;
        for (std::size_t f = 0; f < d.size(); ++f) {
            const double wgt = std::norm(d[f]) * cell;
            if (wgt == 0.0) continue;
            const int ia = static_cast<int>((f / sa) % static_cast<std::size_t>(n));
            const int ib = static_cast<int>((f / sb) % static_cast<std::size_t>(n));
            const double va = a_is_p ? g.momentum(ia) : g.position(ia);
            const double vb = b_is_p ? g.momentum(ib) : g.position(ib);
            acc += wgt * va * vb;
        }
        return acc;
    };

    // x-x block
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
            const double m2 = accumulate_pair(w, a, b, false, false);
            C(a, b) = C(b, a) = m2 - mu(a) * mu(b);
        }
    // p-p block
    {
        WaveFunction mom = w;
        for (int a = 0; a < k; ++a) mom = to_momentum(mom, w.labels()[static_cast<std::size_t>(a)]);
        for (int a = 0; a < k; ++a)
            for (int b = a; b < k; ++b) {
                const double m2 = accumulate_pair(mom, a, b, true, true);
                C(k + a, k + b) = C(k + b, k + a) = m2 - mu(k + a) * mu(k + b);
            }
    }
    // x-p cross terms
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            double m2;
            if (a != b) {
                WaveFunction mixed = to_momentum(w, w.labels()[static_cast<std::size_t>(b)]);
                m2 = accumulate_pair(mixed, a, b, false, true);
            } else {
                // symmetrized on-site moment Re<x p> via the spectral derivative
                WaveFunction pw = to_momentum(w, w.labels()[static_cast<std::size_t>(a)]);
                std::vector<cdouble> pvals(static_cast<std::size_t>(n));
                for (int kk = 0; kk < n; ++kk) pvals[static_cast<std::size_t>(kk)] = g.momentum(kk);
                weight_axis(pw.data(), pw.extents(), a, pvals);
                WaveFunction xpw = to_position(pw, w.labels()[static_cast<std::size_t>(a)]);
                std::vector<cdouble> xvals(static_cast<std::size_t>(n));
                for (int j = 0; j < n; ++j) xvals[static_cast<std::size_t>(j)] = g.position(j);
                weight_axis(xpw.data(), xpw.extents(), a, xvals);
                m2 = inner_product(w, xpw).real();
            }
            C(a, k + b) = C(k + b, a) = m2 - mu(a) * mu(k + b);
        }
    return C;
}

double quadrature_mean(const WaveFunction& w, const GridForm& form) {
    FoldedForm ff;
    if (integer_ratio_form(form, true, ff) || integer_ratio_form(form, false, ff)) {
        double mean, var;
        folded_moments(w, ff, mean, var);
        return mean;
    }
    const Eigen::VectorXd mu = quadrature_means(w);
    double m = 0.0;
    for (const auto& t : form) {
        const int a = w.axis_of(t.label);
        m += t.x_coeff * mu(a) + t.p_coeff * mu(w.arity() + a);
    }
    return m;
}

double quadrature_variance(const WaveFunction& w, const GridForm& form) {
    FoldedForm ff;
    if (integer_ratio_form(form, true, ff) || integer_ratio_form(form, false, ff)) {
        double mean, var;
        folded_moments(w, ff, mean, var);
        return var;
    }
    const int k = w.arity();
    const Eigen::MatrixXd C = symmetric_covariance(w);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * k);
    for (const auto& t : form) {
        const int a = w.axis_of(t.label);
        c(a) += t.x_coeff;
        c(k + a) += t.p_coeff;
    }
    return c.dot(C * c);
}

double schmidt_entropy(const WaveFunction& w, const std::vector<int>& cut_labels) {
    if (w.arity() < 2) throw std::invalid_argument("schmidt_entropy: need at least two particles");
    if (cut_labels.empty() || cut_labels.size() >= static_cast<std::size_t>(w.arity()))
        throw std::invalid_argument("schmidt_entropy: cut must be a proper bipartition");
    std::vector<int> order = cut_labels;
    for (int lb : w.labels())
        if (std::find(order.begin(), order.end(), lb) == order.end()) order.push_back(lb);
    const WaveFunction t = transposed(w, order);
    const int n = w.grid().n_points;
    std::size_t rows = 1;
    for (std::size_t i = 0; i < cut_labels.size(); ++i) rows *= static_cast<std::size_t>(n);
    const std::size_t cols = t.data().size() / rows;
    Eigen::Map<const Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
        t.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
    const auto& sv = svd.singularValues();
    double total = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) total += sv(i) * sv(i);
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const double lambda = sv(i) * sv(i) / total;
        if (lambda > 1e-15) entropy -= lambda * std::log(lambda);
    }
    return entropy;
}

} // namespace cvtel
