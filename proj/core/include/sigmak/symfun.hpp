#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sigmak {

/// Eigenvalue vector (lambda_1, ..., lambda_n). Entries are finite; n >= 1.
class EigenVec {
public:
    EigenVec() = default;
    explicit EigenVec(std::vector<double> values);
    EigenVec(std::initializer_list<double> values);

    std::size_t n() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const EigenVec&) const = default;

private:
    std::vector<double> values_;
};

/// Index k of the cone Gamma_k, checked against the ambient dimension.
struct ConeId {
    int k = 1;
};

/// Result of a cone membership test. `margin` is min_j sigma_j over j <= k,
/// so `inside` is equivalent to margin > 0.
struct ConeTest {
    bool inside = false;
    double margin = 0.0;

    explicit operator bool() const noexcept { return inside; }
};

/// Homotopy operator f_t(lambda) = sigma_k(t lambda + (1 - t) sigma_1(lambda) w).
///
/// The weight w has strictly positive entries summing to one, so the t = 0
/// endpoint maps lambda to an isotropic vector with the same trace and
/// f_0 = C(n,k) (sigma_1 / n)^k under the default w = (1/n, ..., 1/n).
class OperatorSpec {
public:
    OperatorSpec(int n, int k, double t);
    OperatorSpec(int n, int k, double t, std::vector<double> weight);

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    double t() const noexcept { return t_; }
    std::span<const double> weight() const noexcept { return weight_; }

    OperatorSpec with_t(double t) const;

private:
    int n_;
    int k_;
    double t_;
    std::vector<double> weight_;
};

double binomial(int n, int k);

/// All elementary symmetric functions e_0 = 1, e_1, ..., e_n of `values`.
std::vector<double> elementary_symmetric(std::span<const double> values);

/// e_0, ..., e_k only.
std::vector<double> elementary_symmetric(std::span<const double> values, int k);

double sigma(const EigenVec& lambda, ConeId k);
double sigma(std::span<const double> lambda, int k);

/// d sigma_k / d lambda_i = sigma_{k-1}(lambda with entry i removed).
EigenVec sigma_gradient(const EigenVec& lambda, ConeId k);

ConeTest in_gamma_k(const EigenVec& lambda, ConeId k);
ConeTest in_gamma_k(std::span<const double> lambda, int k);

/// Lambda_t(lambda) = t lambda + (1 - t) sigma_1(lambda) w.
EigenVec homotopy_argument(const EigenVec& lambda, const OperatorSpec& spec);

ConeTest in_gamma_t(const EigenVec& lambda, const OperatorSpec& spec);

/// Throws DomainError when Lambda_t(lambda) is outside Gamma_k.
double f_homotopy(const EigenVec& lambda, const OperatorSpec& spec);

/// Gradient of f_homotopy with respect to lambda. Throws DomainError outside (Gamma_k)_t.
EigenVec f_homotopy_gradient(const EigenVec& lambda, const OperatorSpec& spec);

/// min_i d f_t / d lambda_i; a positive value certifies ellipticity at lambda.
double check_ellipticity(const OperatorSpec& spec, const EigenVec& lambda);

/// Midpoint concavity of sigma_k^{1/k} on the segment [lambda, mu], with
/// slack 1e-12. Throws DomainError if either endpoint is outside Gamma_k.
bool check_concavity(ConeId k, const EigenVec& lambda, const EigenVec& mu);

}  // namespace sigmak
