#include "sigmak/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sigmak/errors.hpp"
#include "sigmak/mobius.hpp"
#include "sigmak/parallel.hpp"

namespace sigmak {

namespace {

void check_nk(int n, int k) {
    if (n < 3) throw PreconditionError("dimension n must be at least 3");
    if (k < 1 || k > n) throw PreconditionError("cone index k must satisfy 1 <= k <= n");
}

}  // namespace

BubbleSpec::BubbleSpec(int n_, int k_, double a_) : BubbleSpec(n_, k_, a_, Vector::Zero(std::max(n_, 1))) {}

BubbleSpec::BubbleSpec(int n_, int k_, double a_, Vector center_)
    : n(n_), k(k_), a(a_), center(std::move(center_)) {
    check_nk(n, k);
    if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("BubbleSpec: a must be positive");
    if (center.size() != n) throw PreconditionError("BubbleSpec: center dimension mismatch");
}

double c_constant(int n, int k) {
    check_nk(n, k);
    return std::pow(2.0, (n - 2.0) / 4.0) * std::pow(binomial(n, k), (n - 2.0) / (4.0 * k));
}

double bubble_eigenvalue(int n, int k) {
    check_nk(n, k);
    return std::pow(binomial(n, k), -1.0 / k);
}

RadialJet bubble_profile(int n, double c, double a, double r) {
    const double m = 0.5 * (n - 2.0);
    const double q = 1.0 + a * a * r * r;
    const double f = c * std::pow(a / q, m);
    const double df_over_r = -2.0 * m * a * a * f / q;
    const double d2f = df_over_r + 4.0 * m * (m + 1.0) * std::pow(a, 4) * r * r * f / (q * q);
    return {f, df_over_r * r, df_over_r, d2f};
}

ScalarField bubble_field(const BubbleSpec& spec) {
    const double c = c_constant(spec.n, spec.k);
    const int n = spec.n;
    const double a = spec.a;
    return radial_field(
        spec.center, [n, c, a](double r) { return bubble_profile(n, c, a, r); }, Domain::whole(),
        "bubble");
}

double bubble_scale_from_center_value(int n, int k, double u0) {
    if (!(u0 > 0.0)) throw PreconditionError("center value must be positive");
    return std::pow(u0 / c_constant(n, k), 2.0 / (n - 2.0));
}

ResidualReport verify_solution(const ScalarField& u, int n, int k, std::span<const Vector> samples,
                               double rhs) {
    check_nk(n, k);
    if (u.dim() != n) throw PreconditionError("verify_solution: field dimension differs from n");
    ResidualReport report;
    report.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& x : samples) {
        const Jet2 jet = u.jet(x);
        const EigenVec lambda = eigenvalues(schouten_flat(jet));
        const auto e = elementary_symmetric(lambda.values(), k);
        const double residual = std::abs(e[k] - rhs);
        const double margin = *std::min_element(e.begin() + 1, e.end());
        if (report.samples == 0 || residual > report.max_residual) {
            report.max_residual = residual;
            report.worst_point = x;
        }
        if (margin < report.min_margin) {
            report.min_margin = margin;
            report.min_margin_point = x;
        }
        if (!(margin > 0.0)) {
            if (!report.first_violation) report.first_violation = x;
            ++report.cone_violations;
        }
        ++report.samples;
    }
    if (report.samples == 0) report.min_margin = 0.0;
    return report;
}

namespace {

struct Extremum {
    double value;
    Vector x;
};

// Improves a grid extremum of sign * u over the closed ball |x - center| <= radius.
Extremum polish(const ScalarField& u, const Vector& center, double radius, Extremum best,
                double sign) {
    const double boundary_tol = 1e-9 * radius;
    const auto better = [&](double v) { return sign * v > sign * best.value; };

    // Damped Newton / steepest ascent toward an interior critical point, with
    // projection onto the ball when a step leaves it.
    const auto project = [&](Vector x) {
        const double d = (x - center).norm();
        if (d > radius) x = center + (radius / d) * (x - center);
        return x;
    };
    double alpha = 0.05 * radius;
    for (int it = 0; it < 100; ++it) {
        const Jet2 jet = u.jet(best.x);
        const Vector g = sign * jet.grad;
        if (!(g.norm() > 0.0)) break;
        bool moved = false;
        Eigen::LDLT<Matrix> ldlt(-sign * jet.hess);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            const Vector x = project(best.x + ldlt.solve(g));
            if (x.allFinite() && u.contains(x)) {
                const double v = u.value(x);
                if (better(v)) {
                    best = {v, x};
                    moved = true;
                }
            }
        }
        if (!moved) {
            for (; alpha > 1e-15 * radius; alpha *= 0.5) {
                const Vector x = project(best.x + alpha * g.normalized());
                if (!u.contains(x)) continue;
                const double v = u.value(x);
                if (better(v)) {
                    best = {v, x};
                    moved = true;
                    alpha *= 2.0;
                    break;
                }
            }
        }
        if (!moved) break;
    }

    // Projected ascent along the boundary sphere.
    if ((best.x - center).norm() >= radius - boundary_tol) {
        double alpha = 0.1 * radius;
        for (int it = 0; it < 60 && alpha > 1e-14 * radius; ++it) {
            const Jet2 jet = u.jet(best.x);
            const Vector e = (best.x - center).normalized();
            Vector g = sign * jet.grad;
            g -= g.dot(e) * e;
            const double gn = g.norm();
            if (gn <= 1e-300) break;
            const Vector x = center + radius * (best.x - center + alpha * g / gn).normalized();
            const double v = u.value(x);
            if (better(v)) {
                best = {v, x};
                alpha *= 1.5;
            } else {
                alpha *= 0.5;
            }
        }
    }
    return best;
}

Extremum grid_extremum(const ScalarField& u, const Vector& center, double radius,
                       const HarnackOptions& opt, double sign) {
    const int n = u.dim();
    Extremum best{sign > 0 ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity(),
                  center};
    const int nr = std::max(opt.radial, 2);
    const int na = std::max(opt.angular, 1);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (int a = 0; a < nr; ++a) {
                const double rho = radius * a / (nr - 1);
                const int nang = a == 0 ? 1 : na;
                for (int b = 0; b < nang; ++b) {
                    const double th = 2.0 * std::numbers::pi * b / na;
                    Vector x = center;
                    x[i] += rho * std::cos(th);
                    x[j] += rho * std::sin(th);
                    const double v = u.value(x);
                    if (sign * v > sign * best.value) best = {v, std::move(x)};
                }
            }
        }
    }
    if (opt.refine) best = polish(u, center, radius, std::move(best), sign);
    return best;
}

}  // namespace

HarnackReport harnack_product(const ScalarField& u, double R, const Vector& center,
                              const HarnackOptions& options) {
    if (!(R > 0.0)) throw PreconditionError("harnack_product: R must be positive");
    if (center.size() != u.dim()) throw PreconditionError("harnack_product: center dimension mismatch");
    if (u.dim() < 2) throw PreconditionError("harnack_product: needs n >= 2");
    const int n = u.dim();
    const Extremum mx = grid_extremum(u, center, R, options, +1.0);
    const Extremum mn = grid_extremum(u, center, 2.0 * R, options, -1.0);

    HarnackReport report;
    report.R = R;
    report.maxBR = mx.value;
    report.min2BR = mn.value;
    report.argmax = mx.x;
    report.argmin = mn.x;
    report.product_scaled = mx.value * mn.value * std::pow(R, n - 2.0);
    if (options.check_k > 0) {
        const std::vector<Vector> pts{mx.x, mn.x};
        const auto res = verify_solution(u, n, options.check_k, pts);
        report.equation_residual = res.max_residual;
        report.solves_equation = res.max_residual <= options.solution_tol && res.cone_violations == 0;
    }
    return report;
}

double harnack_bubble_limit(int n, int k) {
    const double c = c_constant(n, k);
    return c * c * std::pow(2.0, 2.0 - n);
}

HarnackTable harnack_sweep(int n, int k, std::span<const double> a_grid,
                           std::span<const double> R_grid, const HarnackSweepOptions& options) {
    check_nk(n, k);
    for (double a : a_grid) {
        if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("harnack_sweep: a must be positive");
    }
    for (double r : R_grid) {
        if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError("harnack_sweep: R must be positive");
    }

    std::vector<HarnackRow> rows;
    for (double a : a_grid) {
        for (double R : R_grid) {
            rows.push_back({n, k, a, R, "centered", {}});
            if (options.include_images) {
                rows.push_back({n, k, a, R, "translated", {}});
                rows.push_back({n, k, a, R, "inverted", {}});
            }
        }
    }

    const Vector origin = Vector::Zero(n);
    parallel_for(
        rows.size(),
        [&](std::size_t i) {
            HarnackRow& row = rows[i];
            const ScalarField bubble = bubble_field(BubbleSpec(n, k, row.a));
            Vector shift = Vector::Zero(n);
            if (row.family == "translated") {
                shift[0] = -0.5 * row.R;
                const auto image = transform_field(bubble, MobiusMap(n, {Translation{shift}}));
                row.report = harnack_product(image, row.R, origin, options.harnack);
            } else if (row.family == "inverted") {
                // Pole at -3R e_1, outside the closed ball B_2R.
                shift[0] = 3.0 * row.R;
                const auto image =
                    transform_field(bubble, MobiusMap(n, {Translation{shift}, Inversion{}}));
                row.report = harnack_product(image, row.R, origin, options.harnack);
            } else {
                row.report = harnack_product(bubble, row.R, origin, options.harnack);
            }
        },
        options.threads ? options.threads : thread_cap());

    HarnackTable table;
    table.rows = std::move(rows);
    for (const auto& row : table.rows) {
        table.sup = std::max(table.sup, row.report.product_scaled);
        if (row.family == "centered") {
            table.sup_centered = std::max(table.sup_centered, row.report.product_scaled);
        }
    }
    return table;
}

}  // namespace sigmak
