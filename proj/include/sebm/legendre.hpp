#pragma once

#include <span>
#include <vector>

// Legendre polynomials, Gauss-Legendre quadrature and spectral transforms
// on I = (-1,1). The basis {e_n} is the unit-norm Legendre family
// e_n = sqrt((2n+1)/2) P_n, so coefficient vectors carry the full L2 norm
// (Parseval). The degenerate diffusion -d/dx((1-x^2) d/dx) is diagonal in
// this basis with eigenvalues mu_n = n(n+1).

namespace sebm {

struct QuadratureRule {
    std::vector<double> nodes;   // strictly increasing, in (-1,1)
    std::vector<double> weights; // positive, sum to 2
    int order() const { return static_cast<int>(nodes.size()); }
};

// P_n(x) by the three-term recurrence. Throws std::domain_error for |x|
// outside [-1,1] beyond a small slack.
double eval_legendre(int n, double x);

// Unit-norm basis function e_n(x).
double eval_basis(int n, double x);

// m-point Gauss-Legendre rule (Newton on P_m from Chebyshev initial
// guesses), exact on polynomials of degree <= 2m-1.
QuadratureRule gauss_nodes(int m);

// Quadrature approximation of the L2(I) pairing of two sampled fields.
double inner_product(std::span<const double> u, std::span<const double> v,
                     const QuadratureRule& rule);

// Truncated coefficient vector w.r.t. {e_n}. Squared H-norm is the plain
// squared l2 norm of the coefficients.
struct SpectralField {
    std::vector<double> coeffs;

    SpectralField() = default;
    explicit SpectralField(int modes) : coeffs(modes, 0.0) {}
    explicit SpectralField(std::vector<double> c) : coeffs(std::move(c)) {}

    int modes() const { return static_cast<int>(coeffs.size()); }
    double norm() const;
    double norm_squared() const;
    bool finite() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

// Forward/inverse transforms for a fixed truncation and quadrature order.
// The basis matrix e_n(x_j) is precomputed once.
class SpectralTransform {
  public:
    // quad_order must be >= modes; the default 2*modes leaves dealiasing
    // headroom for pointwise nonlinearities.
    explicit SpectralTransform(int modes, int quad_order = -1);

    int modes() const { return modes_; }
    const QuadratureRule& rule() const { return rule_; }

    // a_n = <f, e_n> by quadrature on the rule nodes.
    SpectralField to_spectral(std::span<const double> samples) const;

    // Reconstruct sum a_n e_n at the rule nodes.
    std::vector<double> to_physical(const SpectralField& field) const;

    // Reconstruct at arbitrary points.
    double evaluate(const SpectralField& field, double x) const;

  private:
    int modes_;
    QuadratureRule rule_;
    std::vector<double> basis_; // [node][mode], row-major
};

// A_mu in spectral space: a_n -> (n(n+1) + mu) a_n.
SpectralField apply_operator(const SpectralField& field, double mu);

// exp(-tau A_mu): a_n -> exp(-(n(n+1)+mu) tau) a_n. Contraction for
// tau >= 0; throws for tau < 0.
SpectralField semigroup_apply(const SpectralField& field, double tau, double mu);

} // namespace sebm
