#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sigmak/symfun.hpp"

namespace sigmak {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Pointwise 2-jet (u, grad u, hess u) of a positive field at `point`.
/// The Hessian is symmetrized on construction.
struct Jet2 {
    Jet2(Vector point, double u, Vector grad, Matrix hess);

    int dim() const noexcept { return static_cast<int>(point.size()); }

    Vector point;
    double u;
    Vector grad;
    Matrix hess;
};

/// Symmetric n x n matrix, e.g. A^u or the Schouten tensor of a metric.
class SchoutenMatrix {
public:
    /// Throws PreconditionError if `m` is not square or is asymmetric beyond 1e-12 (relative).
    explicit SchoutenMatrix(Matrix m);

    int dim() const noexcept { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }

private:
    Matrix m_;
};

/// Sorted (ascending) eigenvalues of a symmetric matrix.
EigenVec eigenvalues(const SchoutenMatrix& a);

/// Eigenvalues of the (0,2)-tensor `a` with respect to the metric `g`,
/// i.e. of g^{-1} a, sorted ascending.
EigenVec eigenvalues_wrt(const SchoutenMatrix& a, const Matrix& g);

/// A^u = -2/(n-2) u^{-(n+2)/(n-2)} hess u + 2n/(n-2)^2 u^{-2n/(n-2)} grad u (x) grad u
///       - 2/(n-2)^2 u^{-2n/(n-2)} |grad u|^2 I.
SchoutenMatrix schouten_flat(const Jet2& jet);

/// Covariant derivative data of u with respect to a background metric g0.
struct MetricTerms {
    Vector grad;          ///< components of nabla_{g0} u (covector)
    Matrix hess;          ///< covariant Hessian nabla^2_{g0} u
    double grad_norm_sq;  ///< |nabla u|^2_{g0}
    Matrix g0;

    /// Flat background: g0 = I and covariant derivatives equal the jet's partials.
    static MetricTerms flat(const Jet2& jet);
};

/// Schouten tensor of g1 = u^{4/(n-2)} g0 given the background Schouten tensor A_{g0}.
SchoutenMatrix schouten_conformal_change(const Jet2& jet, const SchoutenMatrix& background,
                                         const MetricTerms& metric);

/// Where a scalar field may be evaluated.
struct Domain {
    enum class Kind { Whole, Ball, Annulus, Exterior };

    Kind kind = Kind::Whole;
    Vector center;
    double inner = 0.0;  ///< annulus inner radius, or exterior radius
    double outer = 0.0;  ///< ball or annulus outer radius

    static Domain whole() { return {}; }
    static Domain ball(Vector center, double radius);
    static Domain annulus(Vector center, double inner, double outer);
    static Domain exterior(Vector center, double radius);

    bool contains(const Vector& x) const;
};

/// A positive C^2 field on (part of) R^n with analytic 2-jets.
///
/// Evaluators must be safe to call concurrently.
class ScalarField {
public:
    using Evaluator = std::function<Jet2(const Vector&)>;
    using Membership = std::function<bool(const Vector&)>;

    ScalarField(int dim, Evaluator eval, Domain domain = Domain::whole(),
                std::optional<std::string> tag = std::nullopt);
    /// Field with a domain given only by a membership predicate (e.g. a preimage).
    ScalarField(int dim, Evaluator eval, Membership contains, std::optional<std::string> tag);

    int dim() const noexcept { return dim_; }
    const std::optional<Domain>& domain() const noexcept { return domain_; }
    const std::optional<std::string>& tag() const noexcept { return tag_; }

    bool contains(const Vector& x) const { return contains_(x); }

    /// Throws DomainError outside the domain and PreconditionError where u <= 0.
    Jet2 jet(const Vector& x) const;
    double value(const Vector& x) const { return jet(x).u; }

private:
    int dim_;
    Evaluator eval_;
    Membership contains_;
    std::optional<Domain> domain_;
    std::optional<std::string> tag_;
};

/// Profile data for radially symmetric fields u(x) = f(|x - center|).
/// `df_over_r` is f'(r)/r, which must carry the limit f''(0) at r = 0.
struct RadialJet {
    double f;
    double df;
    double df_over_r;
    double d2f;
};

ScalarField radial_field(Vector center, std::function<RadialJet(double)> profile,
                         Domain domain = Domain::whole(),
                         std::optional<std::string> tag = std::nullopt);

/// Constant positive field u = value.
ScalarField constant_field(int dim, double value);

}  // namespace sigmak
