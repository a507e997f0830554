#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigmak/conformal.hpp"

namespace sigmak {

/// u(x) = c(n,k) (a / (1 + a^2 |x - center|^2))^{(n-2)/2}.
struct BubbleSpec {
    BubbleSpec(int n, int k, double a);
    BubbleSpec(int n, int k, double a, Vector center);

    int n;
    int k;
    double a;
    Vector center;
};

/// c(n,k) = 2^{(n-2)/4} C(n,k)^{(n-2)/(4k)}.
double c_constant(int n, int k);

/// Common eigenvalue C(n,k)^{-1/k} of A^u for every bubble.
double bubble_eigenvalue(int n, int k);

/// Radial profile f(r) of the bubble with scale `a` and prefactor `c`.
RadialJet bubble_profile(int n, double c, double a, double r);

ScalarField bubble_field(const BubbleSpec& spec);

/// Scale a with bubble(0) = u0, i.e. a = (u0 / c(n,k))^{2/(n-2)}.
double bubble_scale_from_center_value(int n, int k, double u0);

struct ResidualReport {
    std::size_t samples = 0;
    double max_residual = 0.0;  ///< max |f(lambda(A^u)) - rhs|
    Vector worst_point;
    double min_margin = 0.0;  ///< min Gamma_k margin over the samples
    Vector min_margin_point;
    std::size_t cone_violations = 0;
    std::optional<Vector> first_violation;
};

/// Evaluates sigma_k(lambda(A^u)) - rhs and the Gamma_k margin at each sample from
/// analytic jets. Cone violations are counted, not thrown.
ResidualReport verify_solution(const ScalarField& u, int n, int k, std::span<const Vector> samples,
                               double rhs = 1.0);

struct HarnackOptions {
    int radial = 64;    ///< radial nodes per polar grid, endpoints included
    int angular = 64;   ///< angular nodes per polar grid
    bool refine = true; ///< polish the grid extrema
    int check_k = 0;    ///< if > 0, test sigma_k(lambda(A^u)) = 1 at the extrema
    double solution_tol = 1e-4;  ///< the residual floor grows like eps (a |x|)^2 for bubbles
};

struct HarnackReport {
    double R = 0.0;
    double maxBR = 0.0;
    double min2BR = 0.0;
    double product_scaled = 0.0;  ///< maxBR * min2BR * R^{n-2}
    Vector argmax;
    Vector argmin;
    std::optional<double> equation_residual;
    bool solves_equation = true;  ///< false when check_k > 0 and the residual test fails
};

/// Extrema of u over the closed balls B_R and B_2R around `center`, from
/// polar grids in every coordinate plane plus local refinement.
HarnackReport harnack_product(const ScalarField& u, double R, const Vector& center,
                              const HarnackOptions& options = {});

struct HarnackRow {
    int n;
    int k;
    double a;
    double R;
    std::string family;  ///< "centered", "translated" or "inverted"
    HarnackReport report;
};

struct HarnackSweepOptions {
    bool include_images = false;
    HarnackOptions harnack;
    std::size_t threads = 0;  ///< 0 means thread_cap()
};

struct HarnackTable {
    std::vector<HarnackRow> rows;
    double sup = 0.0;           ///< max product_scaled over all rows
    double sup_centered = 0.0;  ///< max over centered bubbles only
};

/// product_scaled over bubbles with scale in `a_grid` and radius in `R_grid`
/// (balls centered at the origin). With include_images, each cell also
/// evaluates a translated bubble and an inverted (Moebius image) bubble.
HarnackTable harnack_sweep(int n, int k, std::span<const double> a_grid,
                           std::span<const double> R_grid, const HarnackSweepOptions& options = {});

/// Analytic limit c(n,k)^2 2^{2-n} of product_scaled as a -> infinity.
double harnack_bubble_limit(int n, int k);

}  // namespace sigmak
