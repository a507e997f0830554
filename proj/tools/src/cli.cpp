#include "sigmak/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sigmak/bubbles.hpp"
#include "sigmak/continuation.hpp"
#include "sigmak/errors.hpp"
#include "sigmak/io.hpp"
#include "sigmak/mobius.hpp"
#include "sigmak/radial.hpp"
#include "sigmak/sampling.hpp"

namespace sigmak::cli {

namespace {

double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

struct Common {
    int n = 3;
    int k = 1;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--n", c.n, "Dimension (n >= 3)")->required();
    cmd->add_option("--k", c.k, "Cone index (1 <= k <= n)")->required();
    cmd->add_option("--out", c.out, "Output file (default: standard output)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", c.seed, "Seed for all randomness");
}

void check_nk(const Common& c) {
    if (c.n < 3) throw std::invalid_argument("--n must be at least 3");
    if (c.k < 1 || c.k > c.n) throw std::invalid_argument("--k must satisfy 1 <= k <= n");
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
}

// Data to --out or to `out`; the summary stream is whichever one is left.
class Sink {
public:
    Sink(const Common& c, std::ostream& out, std::ostream& err) : out_(out), err_(err) {
        if (!c.out.empty()) {
            file_.open(c.out, std::ios::binary);
            if (!file_) throw std::invalid_argument("cannot open output file '" + c.out + "'");
        }
    }
    std::ostream& data() { return file_.is_open() ? static_cast<std::ostream&>(file_) : out_; }
    std::ostream& summary() { return file_.is_open() ? out_ : err_; }

private:
    std::ostream& out_;
    std::ostream& err_;
    std::ofstream file_;
};

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

// ---------------------------------------------------------------- verify-bubble

struct VerifyConfig {
    Common common;
    double a = 1.0;
    std::string center;
    double tol = 1e-7;  // the far shells sit near 1e-9..1e-8
    std::size_t samples = 1000;
    int images = 4;
    int word_length = 4;
};

// Halton points in [-4, 4]^n around the center, plus shells at |x - center| = 10, 100, 1000.
std::vector<Vector> verification_points(int n, std::size_t count, const Vector& center) {
    std::vector<Vector> pts;
    for (auto& x : halton_box(n, count, 4.0)) pts.push_back(center + x);
    for (double radius : {10.0, 100.0, 1000.0}) {
        for (const auto& d : sphere_directions(n, 2 * static_cast<std::size_t>(n) + 8)) {
            pts.push_back(center + radius * d);
        }
    }
    return pts;
}

int verify_bubble(const VerifyConfig& cfg, std::ostream& out, std::ostream& err) {
    const Common& c = cfg.common;
    check_nk(c);
    check_positive(cfg.a, "--a");
    check_positive(cfg.tol, "--tol");
    if (cfg.samples == 0) throw std::invalid_argument("--samples must be positive");
    if (cfg.images < 0) throw std::invalid_argument("--images must be nonnegative");
    Vector center = Vector::Zero(c.n);
    if (!cfg.center.empty()) {
        const auto parts = parse_grid(cfg.center);
        if (static_cast<int>(parts.size()) != c.n) throw std::invalid_argument("--center needs n coordinates");
        for (int i = 0; i < c.n; ++i) center[i] = parts[i];
    }

    Sink sink(c, out, err);
    const ScalarField bubble = bubble_field(BubbleSpec(c.n, c.k, cfg.a, center));
    const auto points = verification_points(c.n, cfg.samples, center);

    struct Row {
        std::string name;
        ResidualReport report;
    };
    std::vector<Row> rows;
    rows.push_back({"bubble", verify_solution(bubble, c.n, c.k, points)});
    std::mt19937_64 rng(c.seed);
    for (int i = 0; i < cfg.images; ++i) {
        const ScalarField image = transform_field(bubble, random_mobius(c.n, cfg.word_length, rng));
        std::vector<Vector> inside;
        for (const auto& x : points) {
            if (image.contains(x)) inside.push_back(x);
        }
        rows.push_back({"image-" + std::to_string(i + 1), verify_solution(image, c.n, c.k, inside)});
    }

    double worst = 0.0;
    bool cone_ok = true;
    for (const auto& r : rows) {
        worst = std::max(worst, r.report.max_residual);
        cone_ok = cone_ok && r.report.cone_violations == 0;
    }
    const bool passed = worst <= cfg.tol && cone_ok;

    if (c.format == "json") {
        nlohmann::json doc;
        doc["n"] = c.n;
        doc["k"] = c.k;
        doc["a"] = cfg.a;
        doc["tol"] = cfg.tol;
        doc["seed"] = c.seed;
        doc["fields"] = nlohmann::json::array();
        for (const auto& r : rows) {
            doc["fields"].push_back({{"field", r.name},
                                     {"samples", r.report.samples},
                                     {"max_residual", r.report.max_residual},
                                     {"min_margin", r.report.min_margin},
                                     {"cone_violations", r.report.cone_violations}});
        }
        doc["max_residual"] = worst;
        doc["passed"] = passed;
        sink.data() << doc.dump(2) << '\n';
    } else {
        sink.data() << kCsvBanner << '\n' << "field,samples,max_residual,min_margin,cone_violations\n";
        for (const auto& r : rows) {
            sink.data() << r.name << ',' << r.report.samples << ',' << format_double(r.report.max_residual)
                        << ',' << format_double(r.report.min_margin) << ',' << r.report.cone_violations
                        << '\n';
        }
    }

    auto& s = sink.summary();
    s << "verify-bubble n=" << c.n << " k=" << c.k << " a=" << fmt(cfg.a) << ": " << rows.size()
      << " fields, " << points.size() << " points each\n";
    s << "max residual " << fmt(worst) << " (tolerance " << fmt(cfg.tol) << ")";
    s << (cone_ok ? ", all points inside Gamma_k\n" : ", cone violations found\n");
    s << (passed ? "PASS\n" : "FAIL\n");
    return passed ? kOk : kNumericalFailure;
}

// ---------------------------------------------------------------- solve-radial

struct RadialConfig {
    Common common;
    double u0 = 0.0;
    double rmax = 10.0;
    double rtol = 1e-11;
    double fixed_step = 0.0;
};

int solve_radial(const RadialConfig& cfg, std::ostream& out, std::ostream& err) {
    const Common& c = cfg.common;
    check_nk(c);
    check_positive(cfg.u0, "--u0");
    check_positive(cfg.rmax, "--rmax");
    check_positive(cfg.rtol, "--rtol");
    if (cfg.fixed_step < 0.0) throw std::invalid_argument("--fixed-step must be positive");

    ShootOptions opt;
    opt.rtol = cfg.rtol;
    if (cfg.fixed_step > 0.0) {
        opt.adaptive = false;
        opt.step = cfg.fixed_step;
    }
    Sink sink(c, out, err);
    RadialProfile profile;
    try {
        profile = shoot(cfg.u0, c.n, c.k, cfg.rmax, opt);
    } catch (const SolverError& e) {
        sink.summary() << "solve-radial failed (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return kNumericalFailure;
    }
    const LiouvilleReport rep = liouville_report(profile);
    if (c.format == "json") {
        sink.data() << profile_to_json(profile) << '\n';
    } else {
        write_profile_csv(sink.data(), profile);
    }
    auto& s = sink.summary();
    s << "solve-radial n=" << c.n << " k=" << c.k << " u0=" << fmt(cfg.u0) << " r_max=" << fmt(cfg.rmax)
      << ": " << profile.size() << " nodes\n";
    s << "fitted a = " << std::setprecision(12) << rep.a_fit << '\n';
    s << "max relative deviation from bubble = " << std::setprecision(6) << rep.max_relative_deviation
      << " at r = " << fmt(rep.deviation_radius) << '\n';
    if (!rep.tail_sufficient) {
        s << "kelvin probe: insufficient tail (a * r_max < 4)\n";
    } else {
        s << "kelvin probe: " << (rep.probe_passed ? "passed" : "failed");
        if (rep.probe) {
            s << " (v in [" << fmt(rep.probe->v_inf) << ", " << fmt(rep.probe->v_sup)
              << "], decay order " << fmt(rep.probe->decay_order) << ")";
        }
        s << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- homotopy

struct HomotopyConfig {
    Common common;
    double rb = 5.0;
    double a = 1.0;
    double ub = 0.0;
    int m = 256;
    int steps = 11;
    std::string form = "polynomial";
    std::string branch = "concentrated";
    std::string trace;
    double tol = 1e-10;
};

int homotopy(const HomotopyConfig& cfg, std::ostream& out, std::ostream& err) {
    const Common& c = cfg.common;
    check_nk(c);
    check_positive(cfg.rb, "--rb");
    check_positive(cfg.a, "--a");
    check_positive(cfg.tol, "--tol");
    if (cfg.ub < 0.0) throw std::invalid_argument("--ub must be positive");
    if (cfg.steps < 1) throw std::invalid_argument("--steps must be at least 1");

    BvpSpec spec;
    spec.n = c.n;
    spec.k = c.k;
    spec.R_b = cfg.rb;
    spec.m = cfg.m;
    spec.t_path = uniform_t_path(cfg.steps + 1);
    spec.newton.tolerance = cfg.tol;
    spec.form = cfg.form == "kth-root" ? OperatorForm::KthRoot : OperatorForm::Polynomial;
    spec.branch = cfg.branch == "spread" ? BubbleBranch::Spread : BubbleBranch::Concentrated;
    const double cnk = c_constant(c.n, c.k);
    spec.u_b = cfg.ub > 0.0 ? cfg.ub : bubble_profile(c.n, cnk, cfg.a, cfg.rb).f;
    spec.validate();

    Sink sink(c, out, err);
    std::ofstream trace_file;
    if (!cfg.trace.empty()) {
        trace_file.open(cfg.trace, std::ios::binary);
        if (!trace_file) throw std::invalid_argument("cannot open trace file '" + cfg.trace + "'");
    }
    auto& s = sink.summary();
    s << "homotopy n=" << c.n << " k=" << c.k << " R_b=" << fmt(cfg.rb) << " u_b=" << std::setprecision(12)
      << spec.u_b << std::setprecision(6) << " m=" << cfg.m << " t-steps=" << cfg.steps << '\n';

    ContinuationResult result;
    try {
        result = continue_path(spec);
    } catch (const ContinuationError& e) {
        if (trace_file.is_open()) trace_file << trace_to_json(e.trace()) << '\n';
        s << "path failure: " << e.what() << '\n';
        s << "last good t = ";
        if (e.trace().last_good_t) {
            s << fmt(*e.trace().last_good_t) << '\n';
        } else {
            s << "none\n";
        }
        return kNumericalFailure;
    }
    if (trace_file.is_open()) trace_file << trace_to_json(result.trace) << '\n';
    if (c.format == "json") {
        sink.data() << profile_to_json(result.profile) << '\n';
    } else {
        write_profile_csv(sink.data(), result.profile);
    }

    int iterations = 0;
    for (const auto& r : result.trace.records) iterations += r.iterations;
    s << "reached t = 1 after " << result.trace.records.size() << " solves, " << iterations
      << " Newton iterations, " << result.trace.bisections << " bisections\n";
    if (const auto a = bubble_scale_for_boundary(c.n, cnk, cfg.rb, spec.u_b, spec.branch)) {
        double dev = 0.0;
        for (std::size_t i = 0; i < result.profile.size(); ++i) {
            dev = std::max(dev, std::abs(result.profile.u[i] - bubble_profile(c.n, cnk, *a, result.profile.r[i]).f));
        }
        s << "max deviation from the bubble with a = " << fmt(*a) << ": " << fmt(dev) << " (h = "
          << fmt(spec.h()) << ")\n";
    } else {
        s << "no bubble passes through the boundary value\n";
    }
    return kOk;
}

// ---------------------------------------------------------------- harnack-sweep

struct SweepConfig {
    Common common;
    std::string a_grid;
    std::string R_grid = "1";
    bool images = false;
    int radial = 64;
    int angular = 64;
};

int harnack_sweep_cmd(const SweepConfig& cfg, std::ostream& out, std::ostream& err) {
    const Common& c = cfg.common;
    check_nk(c);
    const auto a = parse_grid(cfg.a_grid);
    const auto R = parse_grid(cfg.R_grid);
    if (a.empty()) throw std::invalid_argument("--a grid is empty");
    if (R.empty()) throw std::invalid_argument("--R grid is empty");
    for (double v : a) check_positive(v, "--a values");
    for (double v : R) check_positive(v, "--R values");
    if (cfg.radial < 2 || cfg.angular < 1) throw std::invalid_argument("grid resolution too small");

    HarnackSweepOptions opt;
    opt.include_images = cfg.images;
    opt.harnack.radial = cfg.radial;
    opt.harnack.angular = cfg.angular;
    opt.harnack.check_k = c.k;
    Sink sink(c, out, err);
    const HarnackTable table = harnack_sweep(c.n, c.k, a, R, opt);
    if (c.format == "json") {
        sink.data() << harnack_to_json(table) << '\n';
    } else {
        write_harnack_csv(sink.data(), table);
    }
    const double limit = harnack_bubble_limit(c.n, c.k);
    auto& s = sink.summary();
    s << "harnack-sweep n=" << c.n << " k=" << c.k << ": " << table.rows.size() << " rows\n";
    s << "sup product_scaled = " << std::setprecision(10) << table.sup << '\n';
    s << "sup over centered bubbles = " << table.sup_centered << '\n';
    s << "bubble limit c(n,k)^2 2^(2-n) = " << limit << std::setprecision(6) << '\n';
    s << "ratio sup_centered / limit = " << table.sup_centered / limit << '\n';
    for (const auto& row : table.rows) {
        if (!row.report.solves_equation) {
            s << "warning: equation residual check failed for a=" << fmt(row.a) << " R=" << fmt(row.R) << '\n';
        }
    }
    return kOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& raw) {
    const std::string text = trim(raw);
    std::vector<double> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(trim(p));
        if (parts.size() != 3) throw std::invalid_argument("grid must look like lo:hi:N or lo:hi:Nlog");
        const double lo = parse_number(parts[0]);
        const double hi = parse_number(parts[1]);
        std::string count = parts[2];
        bool log = false;
        if (count.size() > 3 && count.compare(count.size() - 3, 3, "log") == 0) {
            log = true;
            count.resize(count.size() - 3);
        }
        const double nd = parse_number(count);
        if (nd < 0 || nd != std::floor(nd)) throw std::invalid_argument("grid count must be a nonnegative integer");
        const auto num = static_cast<int>(nd);
        if (log && (!(lo > 0.0) || !(hi > 0.0))) throw std::invalid_argument("log grid needs positive ends");
        for (int i = 0; i < num; ++i) {
            const double s = num == 1 ? 0.0 : static_cast<double>(i) / (num - 1);
            out.push_back(log ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s);
        }
        if (num > 1) out.back() = hi;
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_number(trim(p)));
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical tools for sigma_k curvature equations on R^n", "sigmak"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    VerifyConfig verify;
    auto* v = app.add_subcommand("verify-bubble", "Check that a bubble and its Moebius images solve sigma_k = 1");
    add_common(v, verify.common);
    v->add_option("--a", verify.a, "Bubble scale");
    v->add_option("--center", verify.center, "Bubble center as x1,...,xn");
    v->add_option("--tol", verify.tol, "Residual tolerance");
    v->add_option("--samples", verify.samples, "Halton points in [-4,4]^n");
    v->add_option("--images", verify.images, "Number of random Moebius images");
    v->add_option("--word-length", verify.word_length, "Generators per random Moebius word");

    RadialConfig radial;
    auto* r = app.add_subcommand("solve-radial", "Shoot the radial equation from u(0) = u0");
    add_common(r, radial.common);
    r->add_option("--u0", radial.u0, "Center value u(0)")->required();
    r->add_option("--rmax", radial.rmax, "Outer radius");
    r->add_option("--rtol", radial.rtol, "Relative tolerance of the adaptive integrator");
    r->add_option("--fixed-step", radial.fixed_step, "Use fixed RK4 steps of this size");

    HomotopyConfig hom;
    auto* h = app.add_subcommand("homotopy", "Continue from the sigma_1-type equation to sigma_k on a ball");
    add_common(h, hom.common);
    h->add_option("--rb", hom.rb, "Ball radius");
    h->add_option("--a", hom.a, "Scale of the bubble providing the boundary value");
    h->add_option("--ub", hom.ub, "Boundary value (overrides --a)");
    h->add_option("--m", hom.m, "Mesh intervals");
    h->add_option("--steps", hom.steps, "Uniform t-steps from 0 to 1 (1 means endpoints only)");
    h->add_option("--form", hom.form, "Residual form")->check(CLI::IsMember({"polynomial", "kth-root"}));
    h->add_option("--branch", hom.branch, "Initial bubble branch")->check(CLI::IsMember({"concentrated", "spread"}));
    h->add_option("--trace", hom.trace, "Write the continuation trace as JSON");
    h->add_option("--tol", hom.tol, "Newton residual tolerance");

    SweepConfig sweep;
    auto* s = app.add_subcommand("harnack-sweep", "Harnack product over centered bubbles");
    add_common(s, sweep.common);
    s->add_option("--a", sweep.a_grid, "Scale grid: v | v1,v2 | lo:hi:N | lo:hi:Nlog")->required();
    s->add_option("--R", sweep.R_grid, "Radius grid, same syntax");
    s->add_flag("--images", sweep.images, "Also evaluate translated and inverted bubbles");
    s->add_option("--radial", sweep.radial, "Radial grid nodes");
    s->add_option("--angular", sweep.angular, "Angular grid nodes");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kConfigError;
    }

    try {
        if (v->parsed()) return verify_bubble(verify, out, err);
        if (r->parsed()) return solve_radial(radial, out, err);
        if (h->parsed()) return homotopy(hom, out, err);
        return harnack_sweep_cmd(sweep, out, err);
    } catch (const std::invalid_argument& e) {
        // PreconditionError derives from std::invalid_argument.
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const SolverError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace sigmak::cli
