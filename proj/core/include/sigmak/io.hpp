#pragma once

#include <iosfwd>
#include <string>

#include "sigmak/bubbles.hpp"
#include "sigmak/continuation.hpp"
#include "sigmak/radial.hpp"

namespace sigmak {

/// First line of every CSV file written by this library.
inline constexpr const char* kCsvBanner = "# sigmak-lab v1";

/// Shortest round-trip decimal form of `v` ("nan"/"inf" for non-finite values).
std::string format_double(double v);

/// Columns: r,u,du,sigma_residual,cone_margin.
void write_profile_csv(std::ostream& os, const RadialProfile& profile, double rhs = 1.0);

/// Columns: n,k,a,R,maxBR,min2BR,product_scaled. One line per centered row; the
/// translated and inverted rows have no column to tell them apart and appear
/// only in harnack_to_json.
void write_harnack_csv(std::ostream& os, const HarnackTable& table);

/// {"n", "k", "columns": [...], "rows": [[r, u, du, sigma_residual, cone_margin], ...]}.
std::string profile_to_json(const RadialProfile& profile, double rhs = 1.0, int indent = 2);

/// {"sup", "sup_centered", "rows": [{n, k, a, R, family, maxBR, min2BR, product_scaled}, ...]}.
std::string harnack_to_json(const HarnackTable& table, int indent = 2);

/// Array of {t, converged, iters, residual, cone_margin, ellipticity}; NaN becomes null.
std::string trace_to_json(const ContinuationTrace& trace, int indent = 2);

}  // namespace sigmak
