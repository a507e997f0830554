#include "sigmak/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

namespace sigmak {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_profile_csv(std::ostream& os, const RadialProfile& profile, double rhs) {
    os << kCsvBanner << '\n' << "r,u,du,sigma_residual,cone_margin\n";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto d = node_diagnostics(profile, i, rhs);
        os << format_double(profile.r[i]) << ',' << format_double(profile.u[i]) << ','
           << format_double(profile.du[i]) << ',' << format_double(d.sigma_residual) << ','
           << format_double(d.cone_margin) << '\n';
    }
}

void write_harnack_csv(std::ostream& os, const HarnackTable& table) {
    os << kCsvBanner << '\n' << "n,k,a,R,maxBR,min2BR,product_scaled\n";
    for (const auto& row : table.rows) {
        if (row.family != "centered") continue;
        os << row.n << ',' << row.k << ',' << format_double(row.a) << ',' << format_double(row.R)
           << ',' << format_double(row.report.maxBR) << ',' << format_double(row.report.min2BR)
           << ',' << format_double(row.report.product_scaled) << '\n';
    }
}

namespace {

nlohmann::json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

std::string profile_to_json(const RadialProfile& profile, double rhs, int indent) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto d = node_diagnostics(profile, i, rhs);
        rows.push_back({num(profile.r[i]), num(profile.u[i]), num(profile.du[i]), num(d.sigma_residual),
                        num(d.cone_margin)});
    }
    nlohmann::json doc = {{"n", profile.n},
                          {"k", profile.k},
                          {"columns", {"r", "u", "du", "sigma_residual", "cone_margin"}},
                          {"rows", std::move(rows)}};
    return doc.dump(indent);
}

std::string harnack_to_json(const HarnackTable& table, int indent) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"n", row.n},
                        {"k", row.k},
                        {"a", num(row.a)},
                        {"R", num(row.R)},
                        {"family", row.family},
                        {"maxBR", num(row.report.maxBR)},
                        {"min2BR", num(row.report.min2BR)},
                        {"product_scaled", num(row.report.product_scaled)}});
    }
    nlohmann::json doc = {{"sup", num(table.sup)}, {"sup_centered", num(table.sup_centered)}, {"rows", rows}};
    return doc.dump(indent);
}

std::string trace_to_json(const ContinuationTrace& trace, int indent) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : trace.records) {
        arr.push_back({{"t", num(r.t)},
                       {"converged", r.converged},
                       {"iters", r.iterations},
                       {"residual", num(r.residual)},
                       {"cone_margin", num(r.cone_margin)},
                       {"ellipticity", num(r.ellipticity)}});
    }
    return arr.dump(indent);
}

}  // namespace sigmak
