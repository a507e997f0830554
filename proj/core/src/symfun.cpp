#include "sigmak/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sigmak/errors.hpp"

namespace sigmak {

const char* to_string(FailureKind kind) noexcept {
    switch (kind) {
        case FailureKind::ConeBoundary: return "cone-boundary";
        case FailureKind::PositivityLoss: return "positivity-loss";
        case FailureKind::StepUnderflow: return "step-underflow";
        case FailureKind::MaxIterations: return "max-iterations";
        case FailureKind::NoAdmissibleStep: return "no-admissible-step";
        case FailureKind::SingularJacobian: return "singular-jacobian";
        case FailureKind::PathFailure: return "path-failure";
    }
    return "unknown";
}

EigenVec::EigenVec(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw PreconditionError("EigenVec: empty");
    for (double v : values_) {
        if (!std::isfinite(v)) throw PreconditionError("EigenVec: non-finite entry");
    }
}

EigenVec::EigenVec(std::initializer_list<double> values)
    : EigenVec(std::vector<double>(values)) {}

OperatorSpec::OperatorSpec(int n, int k, double t)
    : OperatorSpec(n, k, t, std::vector<double>(static_cast<std::size_t>(std::max(n, 1)), 1.0 / std::max(n, 1))) {}

OperatorSpec::OperatorSpec(int n, int k, double t, std::vector<double> weight)
    : n_(n), k_(k), t_(t), weight_(std::move(weight)) {
    if (n < 1) throw PreconditionError("OperatorSpec: n must be positive");
    if (k < 1 || k > n) throw PreconditionError("OperatorSpec: k out of range [1, n]");
    if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("OperatorSpec: t outside [0, 1]");
    if (weight_.size() != static_cast<std::size_t>(n)) {
        throw PreconditionError("OperatorSpec: weight length differs from n");
    }
    double sum = 0.0;
    for (double w : weight_) {
        if (!(w > 0.0)) throw PreconditionError("OperatorSpec: weight entries must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw PreconditionError("OperatorSpec: weight must sum to 1");
}

OperatorSpec OperatorSpec::with_t(double t) const { return OperatorSpec(n_, k_, t, weight_); }

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

std::vector<double> elementary_symmetric(std::span<const double> values, int k) {
    // Coefficients of prod (x + lambda_i), truncated at degree k.
    std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    int filled = 0;
    for (double v : values) {
        filled = std::min(filled + 1, k);
        for (int j = filled; j >= 1; --j) e[j] += v * e[j - 1];
    }
    return e;
}

std::vector<double> elementary_symmetric(std::span<const double> values) {
    return elementary_symmetric(values, static_cast<int>(values.size()));
}

namespace {

void check_k(std::size_t n, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw PreconditionError("cone index k=" + std::to_string(k) + " out of range for n=" +
                                std::to_string(n));
    }
}

void check_dim(const EigenVec& lambda, const OperatorSpec& spec) {
    if (lambda.n() != static_cast<std::size_t>(spec.n())) {
        throw PreconditionError("eigenvalue vector length differs from operator dimension");
    }
}

}  // namespace

double sigma(std::span<const double> lambda, int k) {
    check_k(lambda.size(), k);
    return elementary_symmetric(lambda, k)[k];
}

double sigma(const EigenVec& lambda, ConeId k) { return sigma(lambda.values(), k.k); }

EigenVec sigma_gradient(const EigenVec& lambda, ConeId k) {
    check_k(lambda.n(), k.k);
    const auto n = lambda.n();
    std::vector<double> grad(n);
    std::vector<double> rest;
    rest.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        rest.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) rest.push_back(lambda[j]);
        }
        grad[i] = elementary_symmetric(rest, k.k - 1)[k.k - 1];
    }
    return EigenVec(std::move(grad));
}

ConeTest in_gamma_k(std::span<const double> lambda, int k) {
    check_k(lambda.size(), k);
    const auto e = elementary_symmetric(lambda, k);
    const double margin = *std::min_element(e.begin() + 1, e.end());
    return {margin > 0.0, margin};
}

ConeTest in_gamma_k(const EigenVec& lambda, ConeId k) { return in_gamma_k(lambda.values(), k.k); }

EigenVec homotopy_argument(const EigenVec& lambda, const OperatorSpec& spec) {
    check_dim(lambda, spec);
    const double t = spec.t();
    const auto v = lambda.values();
    const double trace = std::accumulate(v.begin(), v.end(), 0.0);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = t * v[i] + (1.0 - t) * trace * spec.weight()[i];
    }
    return EigenVec(std::move(out));
}

ConeTest in_gamma_t(const EigenVec& lambda, const OperatorSpec& spec) {
    return in_gamma_k(homotopy_argument(lambda, spec), ConeId{spec.k()});
}

double f_homotopy(const EigenVec& lambda, const OperatorSpec& spec) {
    const auto arg = homotopy_argument(lambda, spec);
    const auto e = elementary_symmetric(arg.values(), spec.k());
    const double margin = *std::min_element(e.begin() + 1, e.end());
    if (!(margin > 0.0)) {
        throw DomainError("f_homotopy: argument outside (Gamma_k)_t", margin);
    }
    return e[spec.k()];
}

EigenVec f_homotopy_gradient(const EigenVec& lambda, const OperatorSpec& spec) {
    const auto arg = homotopy_argument(lambda, spec);
    const auto cone = in_gamma_k(arg, ConeId{spec.k()});
    if (!cone.inside) {
        throw DomainError("f_homotopy_gradient: argument outside (Gamma_k)_t", cone.margin);
    }
    // d Lambda_j / d lambda_i = t delta_ij + (1 - t) w_j.
    const auto g = sigma_gradient(arg, ConeId{spec.k()});
    const double t = spec.t();
    double mixed = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) mixed += g[j] * spec.weight()[j];
    std::vector<double> out(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) out[i] = t * g[i] + (1.0 - t) * mixed;
    return EigenVec(std::move(out));
}

double check_ellipticity(const OperatorSpec& spec, const EigenVec& lambda) {
    const auto g = f_homotopy_gradient(lambda, spec);
    return *std::min_element(g.values().begin(), g.values().end());
}

bool check_concavity(ConeId k, const EigenVec& lambda, const EigenVec& mu) {
    if (lambda.n() != mu.n()) throw PreconditionError("check_concavity: dimension mismatch");
    for (const EigenVec* p : {&lambda, &mu}) {
        const auto cone = in_gamma_k(*p, k);
        if (!cone.inside) throw DomainError("check_concavity: endpoint outside Gamma_k", cone.margin);
    }
    std::vector<double> mid(lambda.n());
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (lambda[i] + mu[i]);
    const double inv_k = 1.0 / k.k;
    const double lhs = std::pow(sigma(mid, k.k), inv_k);
    const double rhs =
        0.5 * (std::pow(sigma(lambda, k), inv_k) + std::pow(sigma(mu, k), inv_k));
    return lhs >= rhs - 1e-12 * std::max(1.0, std::abs(rhs));
}

}  // namespace sigmak
