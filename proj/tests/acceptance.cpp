// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sigmak/bubbles.hpp"
#include "sigmak/conformal.hpp"
#include "sigmak/continuation.hpp"
#include "sigmak/mobius.hpp"
#include "sigmak/radial.hpp"
#include "sigmak/sampling.hpp"
#include "sigmak/symfun.hpp"
#include "support/oracles.hpp"

using namespace sigmak;
namespace oracle = sigmak::testing;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// sigma vs subset enumeration for 1 <= k <= n <= 12.
Outcome symmetric_functions() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int n = 1; n <= 12; ++n) {
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> l(static_cast<std::size_t>(n));
            for (auto& v : l) v = g(rng);
            for (int k = 1; k <= n; ++k) {
                const double err = std::abs(sigma(l, k) - oracle::sigma_bruteforce(l, k));
                worst = std::max(worst, err / oracle::sigma_abs_scale(l, k));
            }
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 10.0,
            fmt("max relative error %.3g (tol 1e-12), %.2f s (limit 10 s)", worst, secs)};
}

// Nesting, gradient positivity and midpoint concavity for n <= 6.
Outcome cone_suite() {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> entry(-1.0, 2.0);
    long violations = 0, checks = 0;
    for (int n = 1; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (int s = 0; s < 10000; ++s) {
                std::vector<double> x(static_cast<std::size_t>(n));
                for (auto& v : x) v = entry(rng);
                // Membership agrees with the subset oracle, and Gamma_{k+1} lies in Gamma_k.
                const bool inside = in_gamma_k(x, k).inside;
                if (inside != oracle::in_cone_bruteforce(x, k)) ++violations;
                if (k < n && in_gamma_k(x, k + 1).inside && !inside) ++violations;

                const auto l = oracle::random_gamma_k(n, k, rng);
                for (double d : sigma_gradient(EigenVec(l), ConeId{k}).values()) {
                    if (!(d > 0.0)) ++violations;
                }
                const auto mu = oracle::random_gamma_k(n, k, rng);
                if (!check_concavity(ConeId{k}, EigenVec(l), EigenVec(mu))) ++violations;
                checks += 4;
            }
        }
    }
    return {violations == 0, fmt("%ld violations in %ld checks", violations, checks)};
}

// Every intermediate image of x stays away from inversion poles and infinity.
bool tame(const MobiusMap& psi, const Vector& x) {
    Vector y = x;
    for (const auto& atom : psi.word()) {
        if (std::holds_alternative<Inversion>(atom) && y.norm() < 0.3) return false;
        y = mobius_apply(MobiusMap(psi.dim(), {atom}), y);
        if (y.norm() > 20.0) return false;
    }
    return true;
}

std::vector<double> sorted_spectrum(const Jet2& jet) {
    const auto e = eigenvalues(schouten_flat(jet));
    return {e.values().begin(), e.values().end()};
}

// Sorted spectra of A^{u_psi}(x) and A^u(psi(x)).
Outcome conformal_invariance() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    double worst = 0.0;
    long points = 0;
    for (int n = 3; n <= 5; ++n) {
        std::vector<ScalarField> fields;
        for (int f = 0; f < 5; ++f) fields.push_back(oracle::PolyGaussField::random(n, rng).field());
        for (int w = 0; w < 50; ++w) {
            const MobiusMap psi = random_mobius(n, 1 + w % 6, rng);
            for (const auto& u : fields) {
                const auto image = transform_field(u, psi);
                for (int p = 0; p < 100;) {
                    Vector x(n);
                    for (int i = 0; i < n; ++i) x[i] = box(rng);
                    if (!tame(psi, x)) continue;
                    const auto lhs = sorted_spectrum(image.jet(x));
                    const auto rhs = sorted_spectrum(u.jet(mobius_apply(psi, x)));
                    worst = std::max(worst, oracle::max_abs_diff(lhs, rhs));
                    ++points;
                    ++p;
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 60.0,
            fmt("max |spectrum difference| %.3g (tol 1e-9) over %ld points, %.2f s (limit 60 s)", worst,
                points, secs)};
}

// Residual and margin of bubbles and their Moebius images at Halton points.
Outcome bubble_verification() {
    std::mt19937_64 rng(4);
    double worst = 0.0, margin = std::numeric_limits<double>::infinity();
    long fields = 0;
    for (int n = 3; n <= 6; ++n) {
        const auto points = halton_box(n, 1000, 4.0);
        for (int k = 1; k <= n; ++k) {
            const auto bubble = bubble_field(BubbleSpec(n, k, 1.0));
            std::vector<ScalarField> family{bubble};
            for (int w = 0; w < 4; ++w) family.push_back(transform_field(bubble, random_mobius(n, 1 + w, rng)));
            for (const auto& u : family) {
                std::vector<Vector> inside;
                for (const auto& x : points) {
                    if (u.contains(x)) inside.push_back(x);
                }
                const auto rep = verify_solution(u, n, k, inside);
                worst = std::max(worst, rep.max_residual);
                margin = std::min(margin, rep.min_margin);
                ++fields;
            }
        }
    }
    return {worst <= 1e-8 && margin > 0.0,
            fmt("max residual %.3g (tol 1e-8), min cone margin %.3g over %ld fields", worst, margin, fields)};
}

// Scale of a shot profile from the radius where u falls to u(0) / 2, using
// u(r) / u(0) = (1 + a^2 r^2)^{-(n-2)/2} for bubbles.
double half_value_scale(const RadialProfile& p) {
    const auto field = profile_field(p);
    Vector x = Vector::Zero(p.n);
    const auto value_at = [&](double r) {
        x[0] = r;
        return field.value(x);
    };
    double lo = 0.0, hi = p.r_max();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (value_at(mid) > 0.5 * p.u[0] ? lo : hi) = mid;
    }
    return std::sqrt(std::pow(2.0, 2.0 / (p.n - 2.0)) - 1.0) / (0.5 * (lo + hi));
}

// Shooting from c(n,k) reproduces the a = 1 bubble, and the scale of a shot
// profile follows a = (u0 / c)^{2/(n-2)}.
Outcome liouville() {
    double worst_dev = 0.0, worst_law = 0.0;
    for (int n = 3; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            const double c = c_constant(n, k);
            const auto p = shoot(c, n, k, 10.0);
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double exact = bubble_profile(n, c, 1.0, p.r[i]).f;
                worst_dev = std::max(worst_dev, std::abs(p.u[i] - exact) / exact);
            }
            for (double u0 : {0.25 * c, c, 2.0 * c, 7.0 * c}) {
                const double expected = std::pow(u0 / c, 2.0 / (n - 2.0));
                const double fitted = half_value_scale(shoot(u0, n, k, 10.0 / expected));
                worst_law = std::max(worst_law, std::abs(fitted - expected) / expected);
            }
        }
    }
    return {worst_dev <= 1e-6 && worst_law <= 1e-6,
            fmt("max relative deviation %.3g (tol 1e-6), scale law error %.3g (tol 1e-6)", worst_dev,
                worst_law)};
}

// Centered-bubble Harnack products against c(n,k)^2 2^{2-n}.
Outcome harnack() {
    std::vector<double> a_grid;
    for (int i = 0; i < 25; ++i) a_grid.push_back(std::pow(10.0, -2.0 + 6.0 * i / 24.0));
    const std::vector<double> R_grid{1.0, 2.0, 3.0, 4.0};
    double worst_ratio = 0.0, worst_limit = 0.0;
    for (int n = 3; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            const double limit = harnack_bubble_limit(n, k);
            const auto table = harnack_sweep(n, k, a_grid, R_grid);
            worst_ratio = std::max(worst_ratio, table.sup_centered / limit);
            double at_largest = 0.0;
            for (const auto& row : table.rows) {
                if (row.a == a_grid.back()) at_largest = std::max(at_largest, row.report.product_scaled);
            }
            worst_limit = std::max(worst_limit, std::abs(at_largest / limit - 1.0));
        }
    }
    return {worst_ratio <= 1.01 && worst_limit <= 0.01,
            fmt("max sup_centered / limit %.6f (tol 1.01), a = 1e4 off the limit by %.3g (tol 0.01)",
                worst_ratio, worst_limit)};
}

// Path to t = 1 and second-order convergence to the bubble.
Outcome continuation() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (int k : {2, 3}) {
        std::vector<double> errors;
        for (int m : {64, 128, 256, 512}) {
            BvpSpec s;
            s.n = 3;
            s.k = k;
            s.m = m;
            s.R_b = 5.0;
            s.u_b = bubble_profile(3, c_constant(3, k), 1.0, s.R_b).f;
            s.t_path = uniform_t_path(11);
            try {
                const auto res = continue_path(s);
                ok = ok && res.trace.records.back().t == 1.0;
                double e = 0.0;
                for (std::size_t i = 0; i < res.profile.size(); ++i) {
                    e = std::max(e, std::abs(res.profile.u[i] -
                                             bubble_profile(3, c_constant(3, k), 1.0, res.profile.r[i]).f));
                }
                errors.push_back(e);
            } catch (const std::exception& e) {
                ok = false;
                detail += fmt("k=%d m=%d failed: %s; ", k, m, e.what());
            }
        }
        double min_order = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < errors.size(); ++i) {
            min_order = std::min(min_order, std::log2(errors[i - 1] / errors[i]));
        }
        ok = ok && errors.size() == 4 && min_order >= 1.8;
        detail += fmt("k=%d min order %.3f (tol 1.8); ", k, min_order);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 300.0;
    return {ok, detail + fmt("%.1f s (limit 300 s)", secs)};
}

// f_homotopy gradients and Newton Jacobians against fourth-order finite differences.
Outcome derivatives() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0), entry(-1.0, 2.0);
    double worst_grad = 0.0, worst_jac = 0.0;
    int grad_states = 0, jac_states = 0;

    while (grad_states < 1000) {
        const int n = 3 + grad_states % 4;
        const int k = 1 + grad_states % n;
        const OperatorSpec spec(n, k, unit(rng));
        std::vector<double> l(static_cast<std::size_t>(n));
        for (auto& v : l) v = entry(rng);
        // Admissible: Lambda_t(l) in Gamma_k, checked with the subset oracle.
        double s1 = 0.0;
        for (double v : l) s1 += v;
        std::vector<double> arg(l.size());
        for (int i = 0; i < n; ++i) arg[i] = spec.t() * l[i] + (1.0 - spec.t()) * s1 / n;
        if (!oracle::in_cone_bruteforce(arg, k)) continue;
        const auto g = f_homotopy_gradient(EigenVec(l), spec);
        double gmax = 0.0;
        for (double v : g.values()) gmax = std::max(gmax, std::abs(v));
        for (int i = 0; i < n; ++i) {
            const double h = 1e-4;
            const auto f = [&](double d) {
                auto x = l;
                x[i] += d;
                return f_homotopy(EigenVec(x), spec);
            };
            const double fd = (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12.0 * h);
            worst_grad = std::max(worst_grad, std::abs(fd - g[i]) / gmax);
        }
        ++grad_states;
    }

    std::normal_distribution<double> amp(0.0, 0.03);
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    while (jac_states < 1000) {
        const int n = 3 + jac_states % 3;
        const int k = 1 + jac_states % n;
        BvpSpec s;
        s.n = n;
        s.k = k;
        s.m = 16;
        s.R_b = 3.0;
        if (jac_states % 2) s.form = OperatorForm::KthRoot;
        const double t = unit(rng);
        const double a1 = amp(rng), f1 = freq(rng), scale = std::exp(unit(rng) - 0.5);
        std::vector<double> u;
        for (double r : s.mesh()) {
            const double bump = a1 * std::cos(f1 * r) * std::exp(-r * r);
            u.push_back(bubble_profile(n, c_constant(n, k), scale, r).f * (1.0 + bump));
        }
        s.u_b = u.back();
        const auto p = profile_from_values(s, u);
        const auto adm = admissibility(p, s, t);
        if (!(adm.cone_margin > 0.0) || !(adm.ellipticity > 0.0)) continue;
        const auto J = assemble_jacobian(p, s, t);
        const auto m = static_cast<std::size_t>(s.m);
        for (std::size_t j = 0; j <= m; ++j) {
            const double h = 1e-6 * u[j];
            const auto shifted = [&](double d) {
                auto v = u;
                v[j] += d;
                return assemble_residual(profile_from_values(s, v), s, t);
            };
            const auto Fp = shifted(h), Fm = shifted(-h), Fp2 = shifted(2 * h), Fm2 = shifted(-2 * h);
            for (std::size_t i = 0; i <= m; ++i) {
                const double fd = (8.0 * (Fp[i] - Fm[i]) - (Fp2[i] - Fm2[i])) / (12.0 * h);
                double an = 0.0;
                if (i == j) an = J.diag[i];
                else if (i + 1 == j) an = J.upper[i];
                else if (i == j + 1) an = J.lower[i];
                const double row_scale =
                    std::max({std::abs(J.lower[i]), std::abs(J.diag[i]), std::abs(J.upper[i])});
                worst_jac = std::max(worst_jac, std::abs(fd - an) / row_scale);
            }
        }
        ++jac_states;
    }
    return {worst_grad <= 1e-6 && worst_jac <= 1e-6,
            fmt("gradient %.3g, Jacobian %.3g max relative difference (tol 1e-6) on %d + %d states",
                worst_grad, worst_jac, grad_states, jac_states)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"symmetric-function oracle", symmetric_functions},
        {"cone suite", cone_suite},
        {"conformal invariance", conformal_invariance},
        {"bubble verification", bubble_verification},
        {"liouville desk check", liouville},
        {"harnack bound", harnack},
        {"homotopy continuation", continuation},
        {"gradient and jacobian checks", derivatives},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s  %-30s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed;
}
