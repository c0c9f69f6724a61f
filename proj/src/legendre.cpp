#include "sebm/legendre.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sebm {

double eval_legendre(int n, double x) {
    if (n < 0) throw std::domain_error("eval_legendre: negative degree");
    if (std::abs(x) > 1.0 + 1e-12)
        throw std::domain_error("eval_legendre: |x| > 1");
    if (n == 0) return 1.0;
    if (n == 1) return x;
    double pm2 = 1.0, pm1 = x, p = x;
    for (int k = 2; k <= n; ++k) {
        p = ((2.0 * k - 1.0) * x * pm1 - (k - 1.0) * pm2) / k;
        pm2 = pm1;
        pm1 = p;
    }
    return p;
}

double eval_basis(int n, double x) {
    return std::sqrt((2.0 * n + 1.0) / 2.0) * eval_legendre(n, x);
}

namespace {

// P_m and P_m' together, for the Newton iteration.
std::pair<double, double> legendre_and_derivative(int m, double x) {
    double pm2 = 1.0, pm1 = x;
    if (m == 0) return {1.0, 0.0};
    if (m == 1) return {x, 1.0};
    double p = x;
    for (int k = 2; k <= m; ++k) {
        p = ((2.0 * k - 1.0) * x * pm1 - (k - 1.0) * pm2) / k;
        pm2 = pm1;
        pm1 = p;
    }
    // (1-x^2) P_m'(x) = m (P_{m-1}(x) - x P_m(x))
    double dp = m * (pm2 - x * p) / (1.0 - x * x);
    return {p, dp};
}

} // namespace

QuadratureRule gauss_nodes(int m) {
    if (m < 1) throw std::invalid_argument("gauss_nodes: order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess, refined by Newton on P_m.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = legendre_and_derivative(m, x);
            dp = d;
            double dx = p / d;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        auto [p, d] = legendre_and_derivative(m, x);
        (void)p;
        dp = d;
        rule.nodes[m - 1 - i] = x; // cos ordering is decreasing
        rule.weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    if (m == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return rule;
}

double inner_product(std::span<const double> u, std::span<const double> v,
                     const QuadratureRule& rule) {
    if (u.size() != v.size() || u.size() != rule.nodes.size())
        throw std::invalid_argument("inner_product: length mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        acc += rule.weights[j] * u[j] * v[j];
    return acc;
}

double SpectralField::norm_squared() const {
    double acc = 0.0;
    for (double a : coeffs) acc += a * a;
    return acc;
}

double SpectralField::norm() const { return std::sqrt(norm_squared()); }

bool SpectralField::finite() const {
    for (double a : coeffs)
        if (!std::isfinite(a)) return false;
    return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += other.coeffs[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= other.coeffs[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (double& a : coeffs) a *= s;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralTransform::SpectralTransform(int modes, int quad_order)
    : modes_(modes),
      rule_(gauss_nodes(quad_order < 0 ? 2 * modes : quad_order)) {
    if (modes < 1) throw std::invalid_argument("SpectralTransform: modes < 1");
    if (rule_.order() < modes)
        throw std::invalid_argument("SpectralTransform: quadrature order below truncation");
    basis_.resize(static_cast<std::size_t>(rule_.order()) * modes_);
    for (int j = 0; j < rule_.order(); ++j)
        for (int n = 0; n < modes_; ++n)
            basis_[static_cast<std::size_t>(j) * modes_ + n] =
                eval_basis(n, rule_.nodes[j]);
}

SpectralField SpectralTransform::to_spectral(std::span<const double> samples) const {
    if (samples.size() != rule_.nodes.size())
        throw std::invalid_argument("to_spectral: sample count != quadrature order");
    SpectralField field(modes_);
    for (int j = 0; j < rule_.order(); ++j) {
        const double wf = rule_.weights[j] * samples[j];
        const double* row = &basis_[static_cast<std::size_t>(j) * modes_];
        for (int n = 0; n < modes_; ++n) field.coeffs[n] += wf * row[n];
    }
    return field;
}

std::vector<double> SpectralTransform::to_physical(const SpectralField& field) const {
    std::vector<double> samples(rule_.order(), 0.0);
    for (int j = 0; j < rule_.order(); ++j) {
        const double* row = &basis_[static_cast<std::size_t>(j) * modes_];
        double acc = 0.0;
        for (int n = 0; n < field.modes() && n < modes_; ++n)
            acc += field.coeffs[n] * row[n];
        samples[j] = acc;
    }
    return samples;
}

double SpectralTransform::evaluate(const SpectralField& field, double x) const {
    double acc = 0.0;
    for (int n = 0; n < field.modes(); ++n)
        acc += field.coeffs[n] * eval_basis(n, x);
    return acc;
}

SpectralField apply_operator(const SpectralField& field, double mu) {
    SpectralField out = field;
    for (int n = 0; n < out.modes(); ++n)
        out.coeffs[n] *= static_cast<double>(n) * (n + 1.0) + mu;
    return out;
}

SpectralField semigroup_apply(const SpectralField& field, double tau, double mu) {
    if (tau < 0.0) throw std::domain_error("semigroup_apply: negative time");
    SpectralField out = field;
    for (int n = 0; n < out.modes(); ++n)
        out.coeffs[n] *= std::exp(-(static_cast<double>(n) * (n + 1.0) + mu) * tau);
    return out;
}

} // namespace sebm
