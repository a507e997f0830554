#include "sigmak/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sigmak/errors.hpp"

namespace sigmak {

namespace {

bool nearly_symmetric(const Matrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

EigenVec sorted_eigenvec(const Vector& ev) {
    std::vector<double> v(ev.data(), ev.data() + ev.size());
    std::sort(v.begin(), v.end());
    return EigenVec(std::move(v));
}

}  // namespace

Jet2::Jet2(Vector p, double value, Vector g, Matrix h)
    : point(std::move(p)), u(value), grad(std::move(g)), hess(std::move(h)) {
    const auto n = point.size();
    if (grad.size() != n || hess.rows() != n || hess.cols() != n) {
        throw PreconditionError("Jet2: inconsistent dimensions");
    }
    if (!(u > 0.0) || !std::isfinite(u)) throw PreconditionError("Jet2: u must be positive");
    hess = 0.5 * (hess + hess.transpose()).eval();
}

SchoutenMatrix::SchoutenMatrix(Matrix m) : m_(std::move(m)) {
    if (!nearly_symmetric(m_)) throw PreconditionError("SchoutenMatrix: matrix not symmetric");
    m_ = 0.5 * (m_ + m_.transpose()).eval();
}

EigenVec eigenvalues(const SchoutenMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
    return sorted_eigenvec(solver.eigenvalues());
}

EigenVec eigenvalues_wrt(const SchoutenMatrix& a, const Matrix& g) {
    if (g.rows() != a.dim() || !nearly_symmetric(g)) {
        throw PreconditionError("eigenvalues_wrt: metric must be symmetric and match dimension");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(a.matrix(), g, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw PreconditionError("eigenvalues_wrt: metric is not positive definite");
    }
    return sorted_eigenvec(solver.eigenvalues());
}

SchoutenMatrix schouten_flat(const Jet2& jet) {
    const int n = jet.dim();
    if (n < 3) throw PreconditionError("schouten_flat: requires n >= 3");
    const double nm2 = n - 2.0;
    const double u_hess = std::pow(jet.u, -(n + 2.0) / nm2);
    const double u_grad = std::pow(jet.u, -2.0 * n / nm2);
    Matrix a = (-2.0 / nm2 * u_hess) * jet.hess;
    const Matrix gg = jet.grad * jet.grad.transpose();  // exactly symmetric
    a += (2.0 * n / (nm2 * nm2) * u_grad) * gg;
    a.diagonal().array() -= 2.0 / (nm2 * nm2) * u_grad * jet.grad.squaredNorm();
    return SchoutenMatrix(std::move(a));
}

MetricTerms MetricTerms::flat(const Jet2& jet) {
    return {jet.grad, jet.hess, jet.grad.squaredNorm(), Matrix::Identity(jet.dim(), jet.dim())};
}

SchoutenMatrix schouten_conformal_change(const Jet2& jet, const SchoutenMatrix& background,
                                         const MetricTerms& metric) {
    const int n = jet.dim();
    if (n < 3) throw PreconditionError("schouten_conformal_change: requires n >= 3");
    if (background.dim() != n || metric.grad.size() != n || metric.hess.rows() != n ||
        metric.g0.rows() != n) {
        throw PreconditionError("schouten_conformal_change: dimension mismatch");
    }
    if (!nearly_symmetric(metric.hess) || !nearly_symmetric(metric.g0)) {
        throw PreconditionError("schouten_conformal_change: asymmetric Hessian or metric");
    }
    const double nm2 = n - 2.0;
    const double u = jet.u;
    Matrix a = (-2.0 / nm2 / u) * metric.hess;
    const Matrix gg = metric.grad * metric.grad.transpose();
    a += (2.0 * n / (nm2 * nm2) / (u * u)) * gg;
    a -= (2.0 / (nm2 * nm2) / (u * u) * metric.grad_norm_sq) * metric.g0;
    a += background.matrix();
    return SchoutenMatrix(std::move(a));
}

Domain Domain::ball(Vector center, double radius) {
    if (!(radius > 0.0)) throw PreconditionError("Domain::ball: radius must be positive");
    return {Kind::Ball, std::move(center), 0.0, radius};
}

Domain Domain::annulus(Vector center, double inner, double outer) {
    if (!(inner >= 0.0 && outer > inner)) throw PreconditionError("Domain::annulus: bad radii");
    return {Kind::Annulus, std::move(center), inner, outer};
}

Domain Domain::exterior(Vector center, double radius) {
    if (!(radius >= 0.0)) throw PreconditionError("Domain::exterior: bad radius");
    return {Kind::Exterior, std::move(center), radius, 0.0};
}

bool Domain::contains(const Vector& x) const {
    if (kind == Kind::Whole) return true;
    const double r = (x - center).norm();
    switch (kind) {
        case Kind::Ball: return r < outer;
        case Kind::Annulus: return r > inner && r < outer;
        case Kind::Exterior: return r > inner;
        case Kind::Whole: break;
    }
    return true;
}

ScalarField::ScalarField(int dim, Evaluator eval, Domain domain, std::optional<std::string> tag)
    : dim_(dim), eval_(std::move(eval)), domain_(std::move(domain)), tag_(std::move(tag)) {
    if (dim < 1) throw PreconditionError("ScalarField: dimension must be positive");
    contains_ = [d = *domain_](const Vector& x) { return d.contains(x); };
}

ScalarField::ScalarField(int dim, Evaluator eval, Membership contains,
                         std::optional<std::string> tag)
    : dim_(dim), eval_(std::move(eval)), contains_(std::move(contains)), tag_(std::move(tag)) {
    if (dim < 1) throw PreconditionError("ScalarField: dimension must be positive");
}

Jet2 ScalarField::jet(const Vector& x) const {
    if (x.size() != dim_) throw PreconditionError("ScalarField: point dimension mismatch");
    if (!contains_(x)) throw DomainError("ScalarField: point outside the field's domain", 0.0);
    return eval_(x);
}

ScalarField radial_field(Vector center, std::function<RadialJet(double)> profile, Domain domain,
                         std::optional<std::string> tag) {
    const int n = static_cast<int>(center.size());
    auto eval = [center = std::move(center), profile = std::move(profile)](const Vector& x) {
        const Vector d = x - center;
        const double r = d.norm();
        const RadialJet p = profile(r);
        const auto dim = d.size();
        Vector grad = p.df_over_r * d;
        Matrix hess = p.df_over_r * Matrix::Identity(dim, dim);
        if (r > 0.0) {
            const Vector e = d / r;
            hess.noalias() += (p.d2f - p.df_over_r) * (e * e.transpose());
        }
        return Jet2(x, p.f, std::move(grad), std::move(hess));
    };
    return ScalarField(n, std::move(eval), std::move(domain), std::move(tag));
}

ScalarField constant_field(int dim, double value) {
    if (!(value > 0.0)) throw PreconditionError("constant_field: value must be positive");
    auto eval = [value](const Vector& x) {
        const auto n = x.size();
        return Jet2(x, value, Vector::Zero(n), Matrix::Zero(n, n));
    };
    return ScalarField(dim, std::move(eval), Domain::whole(), "constant");
}

}  // namespace sigmak
