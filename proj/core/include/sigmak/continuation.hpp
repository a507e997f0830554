#pragma once

#include <optional>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/radial.hpp"
#include "sigmak/symfun.hpp"

namespace sigmak {

enum class OperatorForm {
    Polynomial,  ///< residual f_t(lambda) - rhs
    KthRoot,     ///< residual f_t(lambda)^{1/k} - rhs^{1/k}
};

/// Which of the two bubbles through the boundary value seeds the path.
enum class BubbleBranch { Concentrated, Spread };

struct NewtonOptions {
    double tolerance = 1e-10;
    int max_iterations = 30;
    int max_backtracks = 30;
};

/// Radial Dirichlet problem f_t(lambda(A^u)) = rhs on [0, R_b], u'(0) = 0, u(R_b) = u_b,
/// discretized on the uniform mesh r_i = i R_b / m, i = 0..m.
struct BvpSpec {
    int n = 3;
    int k = 1;
    std::vector<double> t_path{0.0, 1.0};
    double R_b = 1.0;
    double u_b = 1.0;
    int m = 64;
    double rhs = 1.0;
    NewtonOptions newton;
    OperatorForm form = OperatorForm::Polynomial;
    std::vector<double> weight;  ///< homotopy weight; empty means (1/n, ..., 1/n)
    BubbleBranch branch = BubbleBranch::Concentrated;

    /// Throws PreconditionError on violated invariants.
    void validate() const;
    OperatorSpec op(double t) const;
    double h() const { return R_b / m; }
    std::vector<double> mesh() const;
};

/// t_path with `steps` uniform points including both endpoints (steps >= 2),
/// or {0, 1} for steps <= 2.
std::vector<double> uniform_t_path(int steps);

/// Profile on the spec's mesh from nodal values; u', u'' from the same
/// difference formulas the residual uses (one-sided at r = R_b).
RadialProfile profile_from_values(const BvpSpec& spec, std::vector<double> u);

/// Row 0: f_t at the center with u'(0) = 0 imposed by the even reflection u_{-1} = u_1.
/// Rows 1..m-1: f_t with central second-order differences. Row m: u_m - u_b.
/// Throws DomainError if a node lies strictly outside the closure of (Gamma_k)_t.
std::vector<double> assemble_residual(const RadialProfile& profile, const BvpSpec& spec, double t);

struct Tridiagonal {
    std::vector<double> lower;  ///< lower[i] = dF_i / du_{i-1}, lower[0] unused
    std::vector<double> diag;
    std::vector<double> upper;  ///< upper[i] = dF_i / du_{i+1}, upper[m] unused

    /// Solves J x = b (Thomas algorithm). Throws SolverError(SingularJacobian).
    std::vector<double> solve(std::vector<double> b) const;
};

/// Analytic Jacobian of assemble_residual.
Tridiagonal assemble_jacobian(const RadialProfile& profile, const BvpSpec& spec, double t);

/// Minimum (Gamma_k)_t margin and ellipticity certificate over rows 0..m-1.
struct Admissibility {
    double cone_margin;
    double ellipticity;
};

Admissibility admissibility(const RadialProfile& profile, const BvpSpec& spec, double t);

struct NewtonResult {
    RadialProfile profile;
    int iterations = 0;
    double residual = 0.0;
    bool at_rounding_floor = false;  ///< stopped above tolerance because every row is at rounding level
    Admissibility admissible{0.0, 0.0};
};

/// Damped Newton on assemble_residual. Trial steps are halved while they lose
/// positivity, leave (Gamma_k)_t or fail to decrease the residual.
/// Converged when the residual infinity norm is below the tolerance, or when each
/// row is within eps (1 + sum_j |J_ij u_j|), the change caused by rounding u
/// (16 eps if the line search can no longer decrease the residual).
/// Throws PreconditionError for an inadmissible initial profile and SolverError
/// (MaxIterations, NoAdmissibleStep, SingularJacobian) on failure.
NewtonResult newton_solve(const RadialProfile& initial, const BvpSpec& spec, double t);

struct ContinuationRecord {
    double t;
    bool converged;
    int iterations;
    double residual;
    double cone_margin;
    double ellipticity;
};

struct ContinuationTrace {
    std::vector<ContinuationRecord> records;  ///< ordered by t
    int bisections = 0;
    int failed_attempts = 0;
    std::optional<double> last_good_t;
};

struct ContinuationResult {
    RadialProfile profile;  ///< solution at t = 1
    ContinuationTrace trace;
};

class ContinuationError : public SolverError {
public:
    ContinuationError(const std::string& what, ContinuationTrace trace)
        : SolverError(FailureKind::PathFailure, what, trace.last_good_t.value_or(-1.0)),
          trace_(std::move(trace)) {}

    const ContinuationTrace& trace() const noexcept { return trace_; }

private:
    ContinuationTrace trace_;
};

/// Bubble scale a with prefactor `c` and bubble(R_b) = u_b on the requested branch,
/// or nullopt when u_b exceeds every bubble with that prefactor at R_b.
std::optional<double> bubble_scale_for_boundary(int n, double c, double R_b, double u_b,
                                                BubbleBranch branch);

/// Initial guess at t = t_path[0]: the bubble solving the isotropic
/// (sigma_1-type) endpoint equation with the spec's boundary value.
RadialProfile initial_guess(const BvpSpec& spec);

/// Marches t along t_path from the endpoint guess, bisecting a failing t-step
/// up to 10 times. Throws ContinuationError carrying the trace on failure.
ContinuationResult continue_path(const BvpSpec& spec);

}  // namespace sigmak
