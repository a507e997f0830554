#include "sigmak/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sigmak/bubbles.hpp"

namespace sigmak {

void BvpSpec::validate() const {
    if (n < 3 || k < 1 || k > n) throw PreconditionError("BvpSpec: need n >= 3 and 1 <= k <= n");
    if (t_path.size() < 2 || t_path.front() != 0.0 || t_path.back() != 1.0) {
        throw PreconditionError("BvpSpec: t_path must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < t_path.size(); ++i) {
        if (!(t_path[i] > t_path[i - 1])) throw PreconditionError("BvpSpec: t_path must increase");
    }
    if (!(u_b > 0.0) || !(R_b > 0.0)) throw PreconditionError("BvpSpec: u_b and R_b must be positive");
    if (m < 16) throw PreconditionError("BvpSpec: mesh size m must be at least 16");
    if (!(rhs > 0.0)) throw PreconditionError("BvpSpec: rhs must be positive");
    if (!(newton.tolerance > 0.0) || newton.max_iterations < 1) {
        throw PreconditionError("BvpSpec: bad Newton options");
    }
    op(1.0);
}

OperatorSpec BvpSpec::op(double t) const {
    if (weight.empty()) return OperatorSpec(n, k, t);
    return OperatorSpec(n, k, t, weight);
}

std::vector<double> BvpSpec::mesh() const {
    std::vector<double> r(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) r[i] = R_b * i / m;
    r[m] = R_b;
    return r;
}

std::vector<double> uniform_t_path(int steps) {
    steps = std::max(steps, 2);
    std::vector<double> t(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) t[i] = static_cast<double>(i) / (steps - 1);
    t.back() = 1.0;
    return t;
}

namespace {

// (u_{i+1} - u_i) - (u_i - u_{i-1}) is exact for neighbouring values within a
// factor of two, unlike u_{i+1} - 2 u_i + u_{i-1}.
double second_difference(double lo, double mid, double hi) { return (hi - mid) - (mid - lo); }

struct NodeStencil {
    EigenPairDerivatives pair;
    double w_lo;   // d(.)/du_{i-1} = d_du * w_du_lo + d_d2u * w_lo
    double w_mid;
    double w_hi;
    double w_du_lo;
    double w_du_hi;
};

NodeStencil node_stencil(const std::vector<double>& u, std::size_t i, double h, double r, int n) {
    const double h2 = h * h;
    if (i == 0) {
        const double d2u = 2.0 * (u[1] - u[0]) / h2;
        return {radial_eigenvalue_derivatives(u[0], 0.0, d2u, 0.0, n), 0.0, -2.0 / h2, 2.0 / h2, 0.0,
                0.0};
    }
    const double du = (u[i + 1] - u[i - 1]) / (2.0 * h);
    const double d2u = second_difference(u[i - 1], u[i], u[i + 1]) / h2;
    return {radial_eigenvalue_derivatives(u[i], du, d2u, r, n),
            1.0 / h2,
            -2.0 / h2,
            1.0 / h2,
            -1.0 / (2.0 * h),
            1.0 / (2.0 * h)};
}

void check_profile(const RadialProfile& profile, const BvpSpec& spec) {
    spec.validate();
    if (profile.size() != static_cast<std::size_t>(spec.m) + 1) {
        throw PreconditionError("profile length does not match the spec's mesh");
    }
    if (profile.n != spec.n) throw PreconditionError("profile dimension does not match the spec");
    for (double v : profile.u) {
        if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError("profile must be positive");
    }
}

double residual_value(double f, const BvpSpec& spec) {
    if (spec.form == OperatorForm::KthRoot) {
        return std::pow(f, 1.0 / spec.k) - std::pow(spec.rhs, 1.0 / spec.k);
    }
    return f - spec.rhs;
}

double residual_scale(double f, const BvpSpec& spec) {
    if (spec.form == OperatorForm::KthRoot) return std::pow(f, 1.0 / spec.k - 1.0) / spec.k;
    return 1.0;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// f_t on the closure of (Gamma_k)_t, so boundary states such as lambda = 0 still
// have a residual.
double f_on_closure(const EigenVec& lambda, const OperatorSpec& op) {
    const auto e = elementary_symmetric(homotopy_argument(lambda, op).values(), op.k());
    const double margin = *std::min_element(e.begin() + 1, e.end());
    if (margin < 0.0) throw DomainError("assemble_residual: node outside (Gamma_k)_t", margin);
    return e[op.k()];
}

std::vector<double> residual_of_values(const std::vector<double>& u, const BvpSpec& spec,
                                       const OperatorSpec& op) {
    const auto m = static_cast<std::size_t>(spec.m);
    const double h = spec.h();
    std::vector<double> F(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        const auto st = node_stencil(u, i, h, h * static_cast<double>(i), spec.n);
        F[i] = residual_value(f_on_closure(expand(st.pair.value, spec.n), op), spec);
    }
    F[m] = u[m] - spec.u_b;
    return F;
}

}  // namespace

RadialProfile profile_from_values(const BvpSpec& spec, std::vector<double> u) {
    const auto m = static_cast<std::size_t>(spec.m);
    if (u.size() != m + 1) throw PreconditionError("profile_from_values: wrong length");
    const double h = spec.h();
    RadialProfile p;
    p.n = spec.n;
    p.k = spec.k;
    p.r = spec.mesh();
    p.du.assign(m + 1, 0.0);
    p.d2u.assign(m + 1, 0.0);
    p.d2u[0] = 2.0 * (u[1] - u[0]) / (h * h);
    for (std::size_t i = 1; i < m; ++i) {
        p.du[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        p.d2u[i] = second_difference(u[i - 1], u[i], u[i + 1]) / (h * h);
    }
    p.du[m] = (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * h);
    p.d2u[m] = (2.0 * u[m] - 5.0 * u[m - 1] + 4.0 * u[m - 2] - u[m - 3]) / (h * h);
    p.u = std::move(u);
    return p;
}

std::vector<double> assemble_residual(const RadialProfile& profile, const BvpSpec& spec, double t) {
    check_profile(profile, spec);
    return residual_of_values(profile.u, spec, spec.op(t));
}

Tridiagonal assemble_jacobian(const RadialProfile& profile, const BvpSpec& spec, double t) {
    check_profile(profile, spec);
    const auto m = static_cast<std::size_t>(spec.m);
    const double h = spec.h();
    const OperatorSpec op = spec.op(t);
    Tridiagonal J;
    J.lower.assign(m + 1, 0.0);
    J.diag.assign(m + 1, 0.0);
    J.upper.assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto st = node_stencil(profile.u, i, h, h * static_cast<double>(i), spec.n);
        const EigenVec lambda = expand(st.pair.value, spec.n);
        const EigenVec g = f_homotopy_gradient(lambda, op);
        const double scale = residual_scale(f_homotopy(lambda, op), spec);
        const double g_rad = scale * g[0];
        double g_tan = 0.0;
        for (std::size_t l = 1; l < g.n(); ++l) g_tan += g[l];
        g_tan *= scale;
        const auto& d = st.pair;
        const auto chain = [&](double w_du, double w_d2u, bool self) {
            double rad = d.d_du.rad * w_du + d.d_d2u.rad * w_d2u;
            double tan = d.d_du.tan * w_du + d.d_d2u.tan * w_d2u;
            if (self) {
                rad += d.d_u.rad;
                tan += d.d_u.tan;
            }
            return g_rad * rad + g_tan * tan;
        };
        if (i > 0) J.lower[i] = chain(st.w_du_lo, st.w_lo, false);
        J.diag[i] = chain(0.0, st.w_mid, true);
        J.upper[i] = chain(st.w_du_hi, st.w_hi, false);
    }
    J.diag[m] = 1.0;
    return J;
}

std::vector<double> Tridiagonal::solve(std::vector<double> b) const {
    const std::size_t size = diag.size();
    if (b.size() != size || lower.size() != size || upper.size() != size) {
        throw PreconditionError("Tridiagonal::solve: size mismatch");
    }
    std::vector<double> c(size, 0.0);
    double scale = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        scale = std::max({scale, std::abs(lower[i]), std::abs(diag[i]), std::abs(upper[i])});
    }
    double pivot = diag[0];
    for (std::size_t i = 0;; ++i) {
        if (!(std::abs(pivot) > 1e-14 * scale) || !std::isfinite(pivot)) {
            throw SolverError(FailureKind::SingularJacobian, "singular Newton Jacobian",
                              static_cast<double>(i));
        }
        c[i] = upper[i] / pivot;
        b[i] /= pivot;
        if (i + 1 == size) break;
        pivot = diag[i + 1] - lower[i + 1] * c[i];
        b[i + 1] -= lower[i + 1] * b[i];
    }
    for (std::size_t i = size - 1; i-- > 0;) b[i] -= c[i] * b[i + 1];
    return b;
}

Admissibility admissibility(const RadialProfile& profile, const BvpSpec& spec, double t) {
    check_profile(profile, spec);
    const auto m = static_cast<std::size_t>(spec.m);
    const double h = spec.h();
    const OperatorSpec op = spec.op(t);
    Admissibility out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < m; ++i) {
        const auto st = node_stencil(profile.u, i, h, h * static_cast<double>(i), spec.n);
        const EigenVec lambda = expand(st.pair.value, spec.n);
        const ConeTest cone = in_gamma_t(lambda, op);
        out.cone_margin = std::min(out.cone_margin, cone.margin);
        if (!cone.inside) {
            out.ellipticity = std::min(out.ellipticity, 0.0);
            continue;
        }
        out.ellipticity = std::min(out.ellipticity, check_ellipticity(op, lambda));
    }
    return out;
}

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFloorFactor = 1.0;     // stop without trying another step
constexpr double kNearFloorFactor = 16.0;  // accept when the line search stalls in the noise
}  // namespace

NewtonResult newton_solve(const RadialProfile& initial, const BvpSpec& spec, double t) {
    check_profile(initial, spec);
    const Admissibility start = admissibility(initial, spec, t);
    if (!(start.cone_margin > 0.0) || !(start.ellipticity > 0.0)) {
        throw PreconditionError("newton_solve: initial profile is not admissible (cone margin " +
                                std::to_string(start.cone_margin) + ")");
    }
    const OperatorSpec op = spec.op(t);
    std::vector<double> u = initial.u;
    std::vector<double> F = residual_of_values(u, spec, op);
    double norm = inf_norm(F);
    int iter = 0;
    bool at_floor = false;
    for (;;) {
        const Tridiagonal J = assemble_jacobian(profile_from_values(spec, u), spec, t);
        if (norm < spec.newton.tolerance) break;
        // Rows whose residual is already at the level of rounding in u cannot improve.
        bool floor_reached = true;
        bool near_floor = true;
        for (std::size_t i = 0; i < F.size() && near_floor; ++i) {
            double scale = std::abs(J.diag[i] * u[i]) + 1.0;
            if (i > 0) scale += std::abs(J.lower[i] * u[i - 1]);
            if (i + 1 < u.size()) scale += std::abs(J.upper[i] * u[i + 1]);
            floor_reached = floor_reached && std::abs(F[i]) <= kFloorFactor * kEps * scale;
            near_floor = std::abs(F[i]) <= kNearFloorFactor * kEps * scale;
        }
        if (floor_reached) {
            at_floor = true;
            break;
        }
        if (iter >= spec.newton.max_iterations) {
            throw SolverError(FailureKind::MaxIterations,
                              "newton_solve: no convergence after " + std::to_string(iter) +
                                  " iterations (residual " + std::to_string(norm) + ")",
                              t);
        }
        ++iter;
        for (double& v : F) v = -v;
        const std::vector<double> step = J.solve(std::move(F));

        bool accepted = false;
        double alpha = 1.0;
        std::vector<double> trial(u.size());
        for (int bt = 0; bt <= spec.newton.max_backtracks; ++bt, alpha *= 0.5) {
            bool positive = true;
            for (std::size_t i = 0; i < u.size(); ++i) {
                trial[i] = u[i] + alpha * step[i];
                if (!(trial[i] > 0.0) || !std::isfinite(trial[i])) positive = false;
            }
            if (!positive) continue;
            std::vector<double> trial_F;
            try {
                trial_F = residual_of_values(trial, spec, op);
            } catch (const DomainError&) {
                continue;
            }
            const double trial_norm = inf_norm(trial_F);
            if (!(trial_norm <= (1.0 - 1e-4 * alpha) * norm)) continue;
            const Admissibility adm = admissibility(profile_from_values(spec, trial), spec, t);
            if (!(adm.cone_margin > 0.0) || !(adm.ellipticity > 0.0)) continue;
            u.swap(trial);
            F = std::move(trial_F);
            norm = trial_norm;
            accepted = true;
            break;
        }
        if (!accepted && near_floor) {
            at_floor = true;
            break;
        }
        if (!accepted) {
            throw SolverError(FailureKind::NoAdmissibleStep,
                              "newton_solve: line search found no admissible step (residual " +
                                  std::to_string(norm) + ")",
                              t);
        }
    }
    NewtonResult result;
    result.profile = profile_from_values(spec, std::move(u));
    result.iterations = iter;
    result.residual = norm;
    result.at_rounding_floor = at_floor;
    result.admissible = admissibility(result.profile, spec, t);
    return result;
}

std::optional<double> bubble_scale_for_boundary(int n, double c, double R_b, double u_b,
                                                BubbleBranch branch) {
    // c (a / (1 + a^2 R^2))^{(n-2)/2} = u_b  <=>  beta R^2 a^2 - a + beta = 0.
    const double beta = std::pow(u_b / c, 2.0 / (n - 2.0));
    const double disc = 1.0 - 4.0 * beta * beta * R_b * R_b;
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    if (branch == BubbleBranch::Concentrated) return (1.0 + s) / (2.0 * beta * R_b * R_b);
    // Small root written without cancellation.
    return 2.0 * beta / (1.0 + s);
}

RadialProfile initial_guess(const BvpSpec& spec) {
    spec.validate();
    const OperatorSpec op = spec.op(0.0);
    // At t = 0, f_0 = sigma_1^k sigma_k(w); isotropic bubbles with eigenvalue mu solve it iff
    // (n mu)^k sigma_k(w) = rhs, and a bubble with prefactor c has mu = 2 c^{-4/(n-2)}.
    const double sk_w = sigma(op.weight(), spec.k);
    const double mu = std::pow(spec.rhs / sk_w, 1.0 / spec.k) / spec.n;
    const double c = std::pow(2.0 / mu, (spec.n - 2.0) / 4.0);
    double scale = 1.0;
    double a;
    if (auto root = bubble_scale_for_boundary(spec.n, c, spec.R_b, spec.u_b, spec.branch)) {
        a = *root;
    } else {
        a = 1.0 / spec.R_b;
        scale = spec.u_b / bubble_profile(spec.n, c, a, spec.R_b).f;
    }
    std::vector<double> u;
    for (double r : spec.mesh()) u.push_back(scale * bubble_profile(spec.n, c, a, r).f);
    u.back() = spec.u_b;
    return profile_from_values(spec, std::move(u));
}

ContinuationResult continue_path(const BvpSpec& spec) {
    spec.validate();
    constexpr int kMaxBisections = 10;
    ContinuationTrace trace;

    const auto attempt = [&](const RadialProfile& start, double t) -> std::optional<NewtonResult> {
        try {
            return newton_solve(start, spec, t);
        } catch (const SolverError&) {
        } catch (const DomainError&) {
        } catch (const PreconditionError&) {
        }
        return std::nullopt;
    };
    const auto record = [&](double t, const NewtonResult& r) {
        trace.records.push_back({t, true, r.iterations, r.residual, r.admissible.cone_margin,
                                 r.admissible.ellipticity});
        trace.last_good_t = t;
    };
    const auto fail = [&](double t, const std::string& why) {
        trace.records.push_back({t, false, 0, std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN()});
        const std::string last =
            trace.last_good_t ? std::to_string(*trace.last_good_t) : std::string("none");
        throw ContinuationError(why + " (last good t = " + last + ")", trace);
    };

    auto first = attempt(initial_guess(spec), spec.t_path.front());
    if (!first) fail(spec.t_path.front(), "continuation: no solution at the t = 0 endpoint");
    record(spec.t_path.front(), *first);
    RadialProfile current = std::move(first->profile);
    double t_prev = spec.t_path.front();

    for (std::size_t j = 1; j < spec.t_path.size(); ++j) {
        const double goal = spec.t_path[j];
        int depth = 0;
        double t_try = goal;
        while (t_prev < goal) {
            auto result = attempt(current, t_try);
            if (result) {
                record(t_try, *result);
                current = std::move(result->profile);
                t_prev = t_try;
                t_try = goal;
                depth = 0;
                continue;
            }
            ++trace.failed_attempts;
            if (depth == kMaxBisections) {
                fail(t_try, "continuation: t-step failed after maximal bisection");
            }
            ++depth;
            ++trace.bisections;
            t_try = 0.5 * (t_prev + t_try);
        }
    }
    return {std::move(current), std::move(trace)};
}

}  // namespace sigmak
