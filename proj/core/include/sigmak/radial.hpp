#pragma once

#include <optional>
#include <vector>

#include "sigmak/conformal.hpp"
#include "sigmak/kelvin.hpp"

namespace sigmak {

/// Eigenvalues of A^u for radial u: lambda_rad (multiplicity 1) and
/// lambda_tan (multiplicity n - 1).
struct EigenPair {
    double rad;
    double tan;
};

/// With p = -2/(n-2) u^{-(n+2)/(n-2)} and q = u^{-2n/(n-2)}:
///   lambda_rad = p u'' + 2(n-1)/(n-2)^2 q u'^2
///   lambda_tan = p u'/r - 2/(n-2)^2 q u'^2
/// At r = 0, u'/r is replaced by its limit u''(0).
EigenPair radial_eigenvalues(double u, double du, double d2u, double r, int n);

/// Partial derivatives of the eigenpair with respect to (u, u', u'').
/// At r = 0 the pair is treated as (p u'', p u'') with u' = 0.
struct EigenPairDerivatives {
    EigenPair value;
    EigenPair d_u;
    EigenPair d_du;
    EigenPair d_d2u;
};

EigenPairDerivatives radial_eigenvalue_derivatives(double u, double du, double d2u, double r, int n);

/// (rad, tan, ..., tan) with n entries.
EigenVec expand(const EigenPair& pair, int n);

/// sigma_j of the expanded pair, j = 0..k.
std::vector<double> radial_sigmas(const EigenPair& pair, int n, int k);

/// u'' with sigma_k(lambda_rad, lambda_tan, ...) = rhs, plus the Gamma_k margin there.
struct SecondDerivative {
    double d2u;
    double margin;
};

/// Uses that sigma_k is affine in lambda_rad:
///   sigma_k = C(n-1,k-1) lambda_tan^{k-1} lambda_rad + C(n-1,k) lambda_tan^k.
/// Throws SolverError(ConeBoundary) when the lambda_rad coefficient vanishes.
/// At r = 0 (u' = 0) the isotropic equation C(n,k) lambda^k = rhs is solved on its
/// Gamma_k branch instead.
SecondDerivative solve_for_u2(double u, double du, double r, int n, int k, double rhs = 1.0);

struct RadialProfile {
    int n = 3;
    int k = 1;
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
    std::vector<double> d2u;

    std::size_t size() const noexcept { return r.size(); }
    double r_max() const { return r.empty() ? 0.0 : r.back(); }

    /// Throws PreconditionError unless the mesh starts at 0, increases strictly,
    /// values are positive, du[0] == 0 and all columns have equal length.
    void validate() const;
};

/// sigma_k(lambda) - rhs and the Gamma_k margin at mesh node i.
struct NodeDiagnostics {
    double sigma_residual;
    double cone_margin;
};

NodeDiagnostics node_diagnostics(const RadialProfile& profile, std::size_t i, double rhs = 1.0);

struct ShootOptions {
    bool adaptive = true;
    double rtol = 1e-11;
    double atol = 1e-14;
    double step = 0.01;         ///< fixed step, or initial step when adaptive
    double max_step = 0.25;
    double min_step = 1e-12;
    double series_radius = 1e-4;  ///< first node, reached by the Taylor start
    double cone_floor = 1e-10;
    double rhs = 1.0;
};

/// Integrates the radial equation sigma_k(lambda(A^u)) = rhs from u(0) = u0,
/// u'(0) = 0 outward to r_max with classical RK4.
/// Throws PreconditionError for u0 <= 0 and SolverError on cone contact,
/// positivity loss or step underflow.
RadialProfile shoot(double u0, int n, int k, double r_max, const ShootOptions& options = {});

/// C^2 radial field interpolating the profile (quintic Hermite per interval) on |x| <= r_max.
ScalarField profile_field(const RadialProfile& profile);

struct LiouvilleReport {
    double a_fit = 0.0;
    double max_relative_deviation = 0.0;
    double deviation_radius = 0.0;
    bool tail_sufficient = false;
    std::optional<KelvinProbeReport> probe;
    bool probe_passed = false;
};

/// Compares a profile with the bubble matching u(0), and probes the Kelvin
/// image of its tail. The tail is probed only when a_fit * r_max >= 4.
LiouvilleReport liouville_report(const RadialProfile& profile);

}  // namespace sigmak
