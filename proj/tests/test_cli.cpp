#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sigmak/bubbles.hpp"
#include "sigmak/cli.hpp"

namespace fs = std::filesystem;
using sigmak::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "sigmak_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

double number_after(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST_CASE("parse_grid") {
    using sigmak::cli::parse_grid;
    CHECK(parse_grid("1") == std::vector<double>{1.0});
    CHECK(parse_grid("1, 2,3") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(parse_grid("1:4:4") == std::vector<double>{1.0, 2.0, 3.0, 4.0});
    const auto g = parse_grid("1e-2:1e4:25log");
    REQUIRE(g.size() == 25);
    CHECK(g.front() == 1e-2);
    CHECK(g.back() == 1e4);
    CHECK(g[4] == Catch::Approx(0.1));
    CHECK(parse_grid("").empty());
    CHECK(parse_grid("1:2:0").empty());
    CHECK_THROWS_AS(parse_grid("1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("a,b"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("0:1:3log"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2:2.5"), std::invalid_argument);
}

TEST_CASE("cli: usage errors exit 1") {
    CHECK(call({}).code == 1);
    const auto bad = call({"homotopy", "--n", "3", "--k", "2", "--bogus"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("Usage") != std::string::npos);
    CHECK(call({"frobnicate"}).code == 1);
    CHECK(call({"verify-bubble", "--n", "x", "--k", "1"}).code == 1);
    CHECK(call({"solve-radial", "--n", "3", "--k", "1", "--u0", "1", "--format", "xml"}).code == 1);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("cli verify-bubble") {
    const auto ok = call({"verify-bubble", "--n", "4", "--k", "2", "--a", "1.5", "--tol", "1e-7"});
    CHECK(ok.code == 0);
    CHECK(ok.out.rfind("# sigmak-lab v1\nfield,samples,max_residual,min_margin,cone_violations\n", 0) == 0);
    CHECK(ok.err.find("PASS") != std::string::npos);

    CHECK(call({"verify-bubble", "--n", "2", "--k", "1"}).code == 1);
    CHECK(call({"verify-bubble", "--n", "4", "--k", "5"}).code == 1);
    CHECK(call({"verify-bubble", "--n", "4", "--k", "2", "--a", "-1"}).code == 1);

    const auto tight = call({"verify-bubble", "--n", "4", "--k", "2", "--tol", "1e-12"});
    CHECK(tight.code == 2);
    const double floor = number_after(tight.err, "max residual ");
    CHECK(floor >= 1e-10);
    CHECK(floor <= 1e-7);

    const auto js = call({"verify-bubble", "--n", "3", "--k", "3", "--images", "2", "--format", "json"});
    CHECK(js.code == 0);
    const auto doc = nlohmann::json::parse(js.out);
    CHECK(doc["fields"].size() == 3);
    CHECK(doc["passed"] == true);
}

TEST_CASE("cli solve-radial") {
    const auto path = scratch("profile.csv");
    const auto res = call({"solve-radial", "--n", "3", "--k", "3", "--u0", "2.0", "--rmax", "10", "--out", path.string()});
    CHECK(res.code == 0);
    CHECK(number_after(res.out, "max relative deviation from bubble = ") <= 1e-6);
    CHECK(number_after(res.out, "fitted a = ") == Catch::Approx(std::pow(2.0 / sigmak::c_constant(3, 3), 2.0)));
    CHECK(res.out.find("kelvin probe: passed") != std::string::npos);
    CHECK(slurp(path).rfind("# sigmak-lab v1\nr,u,du,sigma_residual,cone_margin\n", 0) == 0);

    CHECK(call({"solve-radial", "--n", "3", "--k", "3", "--u0", "0"}).code == 1);
    const auto short_tail = call({"solve-radial", "--n", "3", "--k", "3", "--u0", "2.0", "--rmax", "0.5"});
    CHECK(short_tail.code == 0);
    CHECK(short_tail.err.find("insufficient tail") != std::string::npos);
}

TEST_CASE("cli homotopy") {
    const auto trace = scratch("trace.json");
    const auto res = call({"homotopy", "--n", "3", "--k", "2", "--rb", "5", "--steps", "11", "--trace",
                           trace.string(), "--out", scratch("hom.csv").string()});
    CHECK(res.code == 0);
    CHECK(res.out.find("reached t = 1") != std::string::npos);
    CHECK(number_after(res.out, "max deviation from the bubble with a = 1: ") <= 1e-3);
    const auto doc = nlohmann::json::parse(slurp(trace));
    REQUIRE(doc.size() == 12);
    CHECK(doc.back()["t"] == 1.0);
    for (const auto& r : doc) {
        for (const char* key : {"t", "converged", "iters", "residual", "cone_margin", "ellipticity"}) {
            CHECK(r.contains(key));
        }
    }

    const auto a = call({"homotopy", "--n", "3", "--k", "3", "--steps", "1", "--m", "64"});
    const auto b = call({"homotopy", "--n", "3", "--k", "3", "--steps", "1", "--m", "64"});
    CHECK((a.code == 0 || a.code == 2));
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);

    const auto fail = call({"homotopy", "--n", "3", "--k", "2", "--ub", "100"});
    CHECK(fail.code == 2);
    CHECK(fail.err.find("last good t") != std::string::npos);
    CHECK(call({"homotopy", "--n", "3", "--k", "2", "--m", "4"}).code == 1);
}

TEST_CASE("cli harnack-sweep") {
    const auto one = call({"harnack-sweep", "--n", "3", "--k", "1", "--a", "1e-2:1e4:25log", "--R", "1"});
    CHECK(one.code == 0);
    const double limit = std::sqrt(6.0) / 2.0;
    const double sup1 = number_after(one.err, "sup product_scaled = ");
    CHECK(sup1 == Catch::Approx(limit).epsilon(0.01));

    const auto four = call({"harnack-sweep", "--n", "3", "--k", "1", "--a", "1e-2:1e4:25log", "--R", "1:4:4"});
    CHECK(four.code == 0);
    CHECK(number_after(four.err, "sup product_scaled = ") == Catch::Approx(sup1).epsilon(0.01));
    CHECK(four.err.find("warning") == std::string::npos);

    CHECK(call({"harnack-sweep", "--n", "3", "--k", "1", "--a", ""}).code == 1);
    CHECK(call({"harnack-sweep", "--n", "3", "--k", "1", "--a", "1", "--R", "1:2:0"}).code == 1);
    CHECK(call({"harnack-sweep", "--n", "3", "--k", "1", "--a", "-1"}).code == 1);
}

TEST_CASE("cli: identical configuration gives byte-identical files") {
    const auto p1 = scratch("v1.csv"), p2 = scratch("v2.csv");
    for (const auto& p : {p1, p2}) {
        CHECK(call({"verify-bubble", "--n", "5", "--k", "3", "--seed", "7", "--out", p.string()}).code == 0);
    }
    CHECK(slurp(p1) == slurp(p2));
    const auto p3 = scratch("v3.csv");
    call({"verify-bubble", "--n", "5", "--k", "3", "--seed", "8", "--out", p3.string()});
    CHECK(slurp(p1) != slurp(p3));

    const auto h1 = scratch("h1.json"), h2 = scratch("h2.json");
    for (const auto& p : {h1, h2}) {
        CHECK(call({"harnack-sweep", "--n", "4", "--k", "2", "--a", "0.1:10:5log", "--R", "1,2", "--images",
                    "--format", "json", "--out", p.string()})
                  .code == 0);
    }
    CHECK(slurp(h1) == slurp(h2));
}
