#include "sigmak/kelvin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigmak/errors.hpp"
#include "sigmak/mobius.hpp"
#include "sigmak/sampling.hpp"

namespace sigmak {

KelvinProbeReport kelvin_regularity_probe(const ScalarField& u, std::span<const double> radii,
                                          const KelvinProbeOptions& options) {
    if (radii.empty()) throw PreconditionError("kelvin_regularity_probe: empty radius sequence");
    std::vector<double> rs(radii.begin(), radii.end());
    for (double r : rs) {
        if (!(r > 0.0)) throw PreconditionError("kelvin_regularity_probe: radii must be positive");
    }
    std::sort(rs.begin(), rs.end(), std::greater<>());

    const int n = u.dim();
    const std::size_t ndir = options.directions ? options.directions : 2 * n + 16;
    const auto dirs = sphere_directions(n, ndir);
    const ScalarField v = kelvin_transform(u);

    KelvinProbeReport report;
    report.v_inf = std::numeric_limits<double>::infinity();
    report.v_sup = 0.0;
    for (double r : rs) {
        KelvinProbeSample s{r, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        for (const auto& d : dirs) {
            const Jet2 jet = v.jet(r * d);
            s.v_min = std::min(s.v_min, jet.u);
            s.v_max = std::max(s.v_max, jet.u);
            s.scaled_gradient = std::max(s.scaled_gradient, r * jet.grad.norm());
        }
        report.v_inf = std::min(report.v_inf, s.v_min);
        report.v_sup = std::max(report.v_sup, s.v_max);
        report.samples.push_back(s);
    }

    const auto& last = report.samples.back();
    report.final_scaled_gradient = last.scaled_gradient;
    report.positive = report.v_inf > 0.0 && std::isfinite(report.v_sup);

    report.monotone = true;
    for (std::size_t i = 1; i < report.samples.size(); ++i) {
        const double prev = report.samples[i - 1].scaled_gradient;
        if (report.samples[i].scaled_gradient > prev * (1.0 + 1e-9) + 1e-15) report.monotone = false;
    }

    if (report.samples.size() >= 2) {
        const auto& prev = report.samples[report.samples.size() - 2];
        if (last.scaled_gradient > 0.0 && prev.scaled_gradient > 0.0) {
            report.decay_order = std::log(last.scaled_gradient / prev.scaled_gradient) /
                                 std::log(last.radius / prev.radius);
        } else {
            report.decay_order = std::numeric_limits<double>::infinity();
        }
    }

    report.below_threshold = last.scaled_gradient < options.gradient_threshold;
    report.plausible = report.positive && report.monotone &&
                       (report.below_threshold || report.decay_order >= options.min_decay_order);
    return report;
}

}  // namespace sigmak
