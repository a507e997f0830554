#pragma once

#include <span>
#include <vector>

#include "sigmak/conformal.hpp"

namespace sigmak {

struct KelvinProbeOptions {
    std::size_t directions = 0;      ///< sample directions per radius; 0 means 2n + 16
    double gradient_threshold = 1e-3;  ///< |x||grad v| at the smallest radius
    double min_decay_order = 0.5;      ///< accepted log-log decay of |x||grad v|
};

struct KelvinProbeSample {
    double radius;
    double v_min;
    double v_max;
    double scaled_gradient;  ///< max over directions of |x||grad v(x)|
};

/// Evidence (not a proof) that v(x) = |x|^{2-n} u(x/|x|^2) extends positively
/// and smoothly across x = 0.
struct KelvinProbeReport {
    std::vector<KelvinProbeSample> samples;  ///< ordered by decreasing radius
    double v_inf = 0.0;
    double v_sup = 0.0;
    double final_scaled_gradient = 0.0;
    double decay_order = 0.0;  ///< slope of log(|x||grad v|) vs log|x| over the last two radii
    bool positive = false;
    bool monotone = false;
    bool below_threshold = false;
    bool plausible = false;
};

/// Samples the Kelvin image of `u` on spheres |x| = r for each r in `radii`.
/// `u` must be defined on the images x/|x|^2. Radii are probed in decreasing order.
KelvinProbeReport kelvin_regularity_probe(const ScalarField& u, std::span<const double> radii,
                                          const KelvinProbeOptions& options = {});

}  // namespace sigmak
