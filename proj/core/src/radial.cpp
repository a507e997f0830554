#include "sigmak/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sigmak/bubbles.hpp"
#include "sigmak/errors.hpp"

namespace sigmak {

namespace {

struct Coefficients {
    double p;    // -2/(n-2) u^{-(n+2)/(n-2)}
    double q;    // u^{-2n/(n-2)}
    double dp;   // d p / d u
    double dq;   // d q / d u
    double alpha;
    double beta;
};

Coefficients coefficients(double u, int n) {
    if (!(u > 0.0)) throw PreconditionError("radial eigenvalues require u > 0");
    if (n < 3) throw PreconditionError("radial eigenvalues require n >= 3");
    const double nm2 = n - 2.0;
    Coefficients c;
    c.p = -2.0 / nm2 * std::pow(u, -(n + 2.0) / nm2);
    c.q = std::pow(u, -2.0 * n / nm2);
    c.dp = -(n + 2.0) / nm2 * c.p / u;
    c.dq = -2.0 * n / nm2 * c.q / u;
    c.alpha = 2.0 * (n - 1.0) / (nm2 * nm2);
    c.beta = 2.0 / (nm2 * nm2);
    return c;
}

}  // namespace

EigenPair radial_eigenvalues(double u, double du, double d2u, double r, int n) {
    if (r < 0.0) throw PreconditionError("radial_eigenvalues: r must be nonnegative");
    const auto c = coefficients(u, n);
    const double slope = r > 0.0 ? du / r : d2u;
    return {c.p * d2u + c.alpha * c.q * du * du, c.p * slope - c.beta * c.q * du * du};
}

EigenPairDerivatives radial_eigenvalue_derivatives(double u, double du, double d2u, double r, int n) {
    if (r < 0.0) throw PreconditionError("radial_eigenvalue_derivatives: r must be nonnegative");
    const auto c = coefficients(u, n);
    EigenPairDerivatives d;
    d.value = radial_eigenvalues(u, du, d2u, r, n);
    d.d_u.rad = c.dp * d2u + c.alpha * c.dq * du * du;
    d.d_du.rad = 2.0 * c.alpha * c.q * du;
    d.d_d2u.rad = c.p;
    if (r > 0.0) {
        d.d_u.tan = c.dp * du / r - c.beta * c.dq * du * du;
        d.d_du.tan = c.p / r - 2.0 * c.beta * c.q * du;
        d.d_d2u.tan = 0.0;
    } else {
        d.d_u.tan = c.dp * d2u - c.beta * c.dq * du * du;
        d.d_du.tan = -2.0 * c.beta * c.q * du;
        d.d_d2u.tan = c.p;
    }
    return d;
}

EigenVec expand(const EigenPair& pair, int n) {
    std::vector<double> v(static_cast<std::size_t>(n), pair.tan);
    v[0] = pair.rad;
    return EigenVec(std::move(v));
}

std::vector<double> radial_sigmas(const EigenPair& pair, int n, int k) {
    if (k < 0 || k > n) throw PreconditionError("radial_sigmas: k out of range");
    std::vector<double> s(static_cast<std::size_t>(k) + 1);
    s[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
        s[j] = binomial(n - 1, j - 1) * std::pow(pair.tan, j - 1) * pair.rad +
               binomial(n - 1, j) * std::pow(pair.tan, j);
    }
    return s;
}

namespace {

double margin_of(const EigenPair& pair, int n, int k) {
    const auto s = radial_sigmas(pair, n, k);
    return *std::min_element(s.begin() + 1, s.end());
}

}  // namespace

SecondDerivative solve_for_u2(double u, double du, double r, int n, int k, double rhs) {
    if (k < 1 || k > n) throw PreconditionError("solve_for_u2: k out of range");
    const auto c = coefficients(u, n);
    if (r == 0.0) {
        if (du != 0.0) throw PreconditionError("solve_for_u2: u'(0) must vanish at r = 0");
        if (!(rhs > 0.0)) {
            throw SolverError(FailureKind::ConeBoundary,
                              "solve_for_u2: isotropic equation has no Gamma_k root", 0.0);
        }
        const double lambda = std::pow(rhs / binomial(n, k), 1.0 / k);
        const double d2u = lambda / c.p;
        return {d2u, margin_of({lambda, lambda}, n, k)};
    }
    const double tan = c.p * du / r - c.beta * c.q * du * du;
    const double lead = binomial(n - 1, k - 1) * std::pow(tan, k - 1);
    if (lead == 0.0 || !std::isfinite(lead)) {
        throw SolverError(FailureKind::ConeBoundary,
                          "solve_for_u2: degenerate lambda_rad coefficient (lambda_tan = 0)", r);
    }
    const double rad = (rhs - binomial(n - 1, k) * std::pow(tan, k)) / lead;
    const double d2u = (rad - c.alpha * c.q * du * du) / c.p;
    return {d2u, margin_of({rad, tan}, n, k)};
}

void RadialProfile::validate() const {
    const auto m = r.size();
    if (m == 0 || u.size() != m || du.size() != m || d2u.size() != m) {
        throw PreconditionError("RadialProfile: empty or ragged columns");
    }
    if (r[0] != 0.0) throw PreconditionError("RadialProfile: mesh must start at r = 0");
    if (du[0] != 0.0) throw PreconditionError("RadialProfile: u'(0) must vanish");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(u[i] > 0.0)) throw PreconditionError("RadialProfile: nonpositive value");
        if (i > 0 && !(r[i] > r[i - 1])) throw PreconditionError("RadialProfile: mesh not increasing");
    }
    if (n < 3 || k < 1 || k > n) throw PreconditionError("RadialProfile: bad (n, k)");
}

NodeDiagnostics node_diagnostics(const RadialProfile& profile, std::size_t i, double rhs) {
    const auto pair =
        radial_eigenvalues(profile.u[i], profile.du[i], profile.d2u[i], profile.r[i], profile.n);
    const auto s = radial_sigmas(pair, profile.n, profile.k);
    return {s[profile.k] - rhs, *std::min_element(s.begin() + 1, s.end())};
}

namespace {

struct State {
    double u;
    double du;
};

class RadialOde {
public:
    RadialOde(int n, int k, double rhs) : n_(n), k_(k), rhs_(rhs) {}

    State deriv(double r, const State& y) const {
        if (!(y.u > 0.0) || !std::isfinite(y.u)) {
            throw SolverError(FailureKind::PositivityLoss, "shoot: u lost positivity", r);
        }
        return {y.du, solve_for_u2(y.u, y.du, r, n_, k_, rhs_).d2u};
    }

    State rk4(double r, const State& y, double h) const {
        const State k1 = deriv(r, y);
        const State k2 = deriv(r + 0.5 * h, {y.u + 0.5 * h * k1.u, y.du + 0.5 * h * k1.du});
        const State k3 = deriv(r + 0.5 * h, {y.u + 0.5 * h * k2.u, y.du + 0.5 * h * k2.du});
        const State k4 = deriv(r + h, {y.u + h * k3.u, y.du + h * k3.du});
        return {y.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
                y.du + h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du)};
    }

private:
    int n_;
    int k_;
    double rhs_;
};

}  // namespace

RadialProfile shoot(double u0, int n, int k, double r_max, const ShootOptions& opt) {
    if (!(u0 > 0.0) || !std::isfinite(u0)) throw PreconditionError("shoot: u0 must be positive");
    if (n < 3 || k < 1 || k > n) throw PreconditionError("shoot: need n >= 3 and 1 <= k <= n");
    if (!(r_max > 0.0)) throw PreconditionError("shoot: r_max must be positive");
    if (!(opt.step > 0.0) || !(opt.series_radius > 0.0)) {
        throw PreconditionError("shoot: steps must be positive");
    }

    RadialProfile profile;
    profile.n = n;
    profile.k = k;
    const auto push = [&](double r, const State& y) {
        const auto s = solve_for_u2(y.u, y.du, r, n, k, opt.rhs);
        if (s.margin < opt.cone_floor) {
            throw SolverError(FailureKind::ConeBoundary,
                              "shoot: Gamma_k margin fell below floor at r = " + std::to_string(r), r);
        }
        profile.r.push_back(r);
        profile.u.push_back(y.u);
        profile.du.push_back(y.du);
        profile.d2u.push_back(s.d2u);
    };

    // Taylor start: u(r) = u0 + u''(0) r^2 / 2.
    const double c2 = solve_for_u2(u0, 0.0, 0.0, n, k, opt.rhs).d2u;
    push(0.0, {u0, 0.0});
    double r = std::min(opt.series_radius, r_max);
    State y{u0 + 0.5 * c2 * r * r, c2 * r};
    if (!(y.u > 0.0)) throw SolverError(FailureKind::PositivityLoss, "shoot: u lost positivity", r);
    push(r, y);

    const RadialOde ode(n, k, opt.rhs);
    double h = opt.step;
    while (r < r_max) {
        h = std::min({h, r_max - r, opt.adaptive ? opt.max_step : h});
        if (r_max - r - h < 1e-12 * r_max) h = r_max - r;
        if (!opt.adaptive) {
            y = ode.rk4(r, y, h);
            r = (r_max - r - h <= 0.0) ? r_max : r + h;
            if (!(y.u > 0.0)) throw SolverError(FailureKind::PositivityLoss, "shoot: u lost positivity", r);
            push(r, y);
            h = opt.step;
            continue;
        }

        State coarse{};
        State fine{};
        bool stage_ok = true;
        std::optional<SolverError> stage_error;
        try {
            coarse = ode.rk4(r, y, h);
            fine = ode.rk4(r + 0.5 * h, ode.rk4(r, y, 0.5 * h), 0.5 * h);
        } catch (const SolverError& e) {
            stage_ok = false;
            stage_error = e;
        }
        double err = std::numeric_limits<double>::infinity();
        if (stage_ok) {
            const double su = opt.atol + opt.rtol * std::max(std::abs(y.u), std::abs(fine.u));
            const double sd = opt.atol + opt.rtol * std::max(std::abs(y.du), std::abs(fine.du));
            err = std::max(std::abs(fine.u - coarse.u) / su, std::abs(fine.du - coarse.du) / sd) / 15.0;
        }
        if (err <= 1.0) {
            const double next = (h == r_max - r) ? r_max : r + h;
            if (!(fine.u > 0.0)) {
                throw SolverError(FailureKind::PositivityLoss, "shoot: u lost positivity", next);
            }
            r = next;
            y = fine;
            push(r, y);
            const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 4.0;
            h *= std::clamp(grow, 0.2, 4.0);
        } else {
            h *= stage_ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.25;
            if (h < opt.min_step) {
                if (stage_error) throw *stage_error;
                throw SolverError(FailureKind::StepUnderflow,
                                  "shoot: step size underflow at r = " + std::to_string(r), r);
            }
        }
    }
    return profile;
}

ScalarField profile_field(const RadialProfile& profile) {
    profile.validate();
    const int n = profile.n;
    auto eval = [profile](double rq) -> RadialJet {
        const auto& r = profile.r;
        const double x = std::clamp(rq, 0.0, r.back());
        if (r.size() == 1) return {profile.u[0], 0.0, profile.d2u[0], profile.d2u[0]};
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t i = static_cast<std::size_t>(std::distance(r.begin(), it));
        i = std::clamp<std::size_t>(i, 1, r.size() - 1) - 1;
        const double h = r[i + 1] - r[i];
        const double s = (x - r[i]) / h;
        // Quintic Hermite in s on [r_i, r_{i+1}].
        const double c0 = profile.u[i];
        const double c1 = h * profile.du[i];
        const double c2 = 0.5 * h * h * profile.d2u[i];
        const double A = profile.u[i + 1] - (c0 + c1 + c2);
        const double B = h * profile.du[i + 1] - (c1 + 2.0 * c2);
        const double C = h * h * profile.d2u[i + 1] - 2.0 * c2;
        const double c3 = 10.0 * A - 4.0 * B + 0.5 * C;
        const double c4 = -15.0 * A + 7.0 * B - C;
        const double c5 = 6.0 * A - 3.0 * B + 0.5 * C;
        const double f = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
        const double fs = c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)));
        const double fss = 2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5));
        const double df = fs / h;
        const double d2f = fss / (h * h);
        const double df_over_r = x > 1e-12 ? df / x : d2f;
        return {f, df, df_over_r, d2f};
    };
    return radial_field(Vector::Zero(n), std::move(eval),
                        Domain::ball(Vector::Zero(n), profile.r_max() * (1.0 + 1e-9)), "profile");
}

LiouvilleReport liouville_report(const RadialProfile& profile) {
    profile.validate();
    const int n = profile.n;
    const int k = profile.k;
    LiouvilleReport report;
    report.a_fit = bubble_scale_from_center_value(n, k, profile.u[0]);
    const double c = c_constant(n, k);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double b = bubble_profile(n, c, report.a_fit, profile.r[i]).f;
        const double dev = std::abs(profile.u[i] - b) / b;
        if (dev > report.max_relative_deviation) {
            report.max_relative_deviation = dev;
            report.deviation_radius = profile.r[i];
        }
    }

    const double r_max = profile.r_max();
    report.tail_sufficient = report.a_fit * r_max >= 4.0;
    if (report.tail_sufficient) {
        // Kelvin radii 1/r for r geometric in [r_max/4, r_max].
        std::vector<double> radii;
        for (int j = 0; j <= 4; ++j) radii.push_back(1.0 / (r_max * std::pow(4.0, -0.25 * j)));
        report.probe = kelvin_regularity_probe(profile_field(profile), radii);
        report.probe_passed = report.probe->plausible;
    }
    return report;
}

}  // namespace sigmak
