#include "cli.hpp"

#include <doctest.h>
#include <rotstar/errors.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using rotstar::cli::RunConfig;
using rotstar::cli::run;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream o, e;
    Run r;
    r.code = run(args, o, e);
    r.out = o.str();
    r.err = e.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rotstar_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
    std::istringstream in("# comment\nscf.damping = 0.25  # trailing\n\nradial.a=2\n");
    const RunConfig c = RunConfig::parse(in);
    CHECK(c.get_double("scf.damping", 0.5) == 0.25);
    CHECK(c.get_double("radial.a", 1.0) == 2.0);
    CHECK(c.get_int("scf.max_iter", 7) == 7);

    std::istringstream unknown("scf.dampng = 0.3\n");
    CHECK_THROWS_AS(RunConfig::parse(unknown), rotstar::ConfigError);
    std::istringstream noeq("radial.a 2\n");
    CHECK_THROWS_AS(RunConfig::parse(noeq), rotstar::ConfigError);
    std::istringstream dup("radial.a = 1\nradial.a = 2\n");
    CHECK_THROWS_AS(RunConfig::parse(dup), rotstar::ConfigError);
    std::istringstream badnum("radial.a = one\n");
    const RunConfig b = RunConfig::parse(badnum);
    CHECK_THROWS_AS(b.get_double("radial.a", 1.0), rotstar::ConfigError);
}

TEST_CASE("radial writes files and is deterministic") {
    const fs::path d1 = scratch("radial1"), d2 = scratch("radial2");
    const Run r1 = invoke({"radial", "--a", "1", "-o", d1.string()});
    REQUIRE(r1.code == 0);
    const Run r2 = invoke({"--out", d2.string(), "radial", "--a", "1"});
    REQUIRE(r2.code == 0);
    CHECK(slurp(d1 / "profile.csv") == slurp(d2 / "profile.csv"));
    CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
    const auto s = load(d1 / "summary.json");
    CHECK(s["virial_residual"].get<double>() <= 1e-6);
    CHECK(s["R"].get<double>() == doctest::Approx(0.5132707351585074).epsilon(1e-9));
    CHECK(s["alpha"].get<double>() < 0.0);
    CHECK(slurp(d1 / "profile.csv").rfind("r,w,u,rho\n", 0) == 0);
}

TEST_CASE("invalid input exits with 2") {
    const fs::path d = scratch("invalid");
    const Run neg = invoke({"radial", "--a", "-1", "-o", d.string()});
    CHECK(neg.code == 2);
    CHECK(neg.err.find("radial.a") != std::string::npos);
    CHECK(invoke({"bogus"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"radial", "--nonsense", "3"}).code == 2);
    CHECK(invoke({"--config", "/nonexistent.cfg", "radial"}).code == 2);
    CHECK(invoke({"sphere-test", "--order", "3", "-o", d.string()}).code == 2);
    CHECK(invoke({"--threads", "-2", "radial", "-o", d.string()}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config file values and flag overrides") {
    const fs::path d = scratch("config");
    fs::create_directories(d);
    {
        std::ofstream f(d / "run.cfg");
        f << "radial.a = 2\nout = " << (d / "from_file").string() << "\n";
    }
    REQUIRE(invoke({"--config", (d / "run.cfg").string(), "radial"}).code == 0);
    CHECK(load(d / "from_file" / "summary.json")["a"].get<double>() == 2.0);
    REQUIRE(invoke({"--config", (d / "run.cfg").string(), "radial", "--a", "3"}).code == 0);
    CHECK(load(d / "from_file" / "summary.json")["a"].get<double>() == 3.0);
    {
        std::ofstream f(d / "bad.cfg");
        f << "scf.damping = 1.5\n";
    }
    CHECK(invoke({"--config", (d / "bad.cfg").string(), "branch", "-o", d.string()}).code == 2);
}

TEST_CASE("mass curve") {
    const fs::path d = scratch("curve");
    const Run r = invoke({"mass-curve", "--a-min", "1e-4", "--a-max", "1e-2", "--n", "9", "-o", d.string()});
    REQUIRE(r.code == 0);
    const auto footer = nlohmann::json::parse(r.out);
    CHECK(footer["monotone"].get<bool>());
    CHECK(footer["small_a_slope"].get<double>() == doctest::Approx(0.75).epsilon(0.01 / 0.75));
    const std::string csv = slurp(d / "mass_curve.csv");
    CHECK(csv.find("# {") != std::string::npos);

    const fs::path d1 = scratch("curve1");
    REQUIRE(invoke({"mass-curve", "--n", "1", "-o", d1.string()}).code == 0);
    std::istringstream lines(slurp(d1 / "mass_curve.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(lines, line))
        rows += !line.empty() && line[0] != '#' && line[0] != 'a';
    CHECK(rows == 1);
}

TEST_CASE("branch rejects an inadmissible profile") {
    const fs::path d = scratch("uniform");
    const Run r = invoke({"branch", "--omega", "uniform", "-o", d.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("sω² not integrable") != std::string::npos);
    const auto t = load(d / "termination.json");
    CHECK(t["reason"] == "Inadmissible");
    CHECK(invoke({"branch", "--omega", "no-such-profile", "-o", d.string()}).code == 2);
}

TEST_CASE("short branch run") {
    const fs::path d = scratch("branch");
    const Run r = invoke({"branch", "--omega", "inverse-square", "--steps", "3", "--nodes", "48", "--snapshot-every",
                          "2", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    std::istringstream lines(slurp(d / "branch.jsonl"));
    std::string line;
    int n = 0;
    double prev_ratio = 0.0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["margin"].get<double>() > 0.0);
        for (const char* key : {"kappa", "alpha", "mass", "rho_max", "r_eq", "r_pole", "residual", "margin"})
            CHECK(j.contains(key));
        CHECK(j["oblateness"].get<double>() >= prev_ratio);
        prev_ratio = j["oblateness"].get<double>();
        ++n;
    }
    CHECK(n == 4);
    const auto t = load(d / "termination.json");
    CHECK(t["reason"] == "ScheduleExhausted");
    CHECK(t["accepted"] == 3);
    CHECK(t["support_audit_passed"].get<bool>());
    CHECK(fs::exists(d / "density_0000.csv"));
    CHECK(fs::exists(d / "density_0002.csv"));
    CHECK(fs::exists(d / "density_0003.csv"));
    CHECK_FALSE(fs::exists(d / "density_0001.csv"));
}

TEST_CASE("sphere test and poly43 reports") {
    const fs::path d = scratch("reports");
    REQUIRE(invoke({"sphere-test", "--resolution", "128", "--order", "16", "-o", d.string()}).code == 0);
    CHECK(load(d / "sphere_test.json")["max_rel_err"].get<double>() < 1e-3);

    REQUIRE(invoke({"poly43", "-o", d.string()}).code == 0);
    const auto p = load(d / "poly43.json");
    CHECK(std::abs(p["moment0"].get<double>()) <= 1e-6 * p["moment0_abs"].get<double>());
    CHECK(p["moment2"].get<double>() < 0.0);
    CHECK_FALSE(p.contains("probe"));

    REQUIRE(invoke({"poly43", "--probe-kappa", "1e-3", "--nodes", "48", "-o", d.string()}).code == 0);
    const auto q = load(d / "poly43.json")["probe"];
    CHECK(q["control_converged"].get<bool>());
    CHECK((!q["converged"].get<bool>() || q["plateau"].get<bool>()));
    CHECK(invoke({"poly43", "--probe-kappa", "0.5", "-o", d.string()}).code == 2);
}

TEST_CASE("thread count does not change the output") {
    const fs::path a = scratch("t1"), b = scratch("t4");
    REQUIRE(invoke({"--threads", "1", "branch", "--steps", "1", "--nodes", "40", "-o", a.string()}).code == 0);
    REQUIRE(invoke({"--threads", "4", "branch", "--steps", "1", "--nodes", "40", "-o", b.string()}).code == 0);
    CHECK(slurp(a / "branch.jsonl") == slurp(b / "branch.jsonl"));
    CHECK(slurp(a / "density_0001.csv") == slurp(b / "density_0001.csv"));
}

}
