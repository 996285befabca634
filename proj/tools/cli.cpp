#include "cli.hpp"

#include "rotstar/continuation.hpp"
#include "rotstar/diagnostics.hpp"
#include "rotstar/errors.hpp"
#include "rotstar/gravity.hpp"
#include "rotstar/io.hpp"
#include "rotstar/poly43.hpp"
#include "rotstar/radial.hpp"
#include "rotstar/rotation.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace rotstar::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw ConfigError(key + ": not a finite number: '" + text + "'");
    return v;
}

long parse_int(const std::string& key, const std::string& text) {
    long v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError(key + ": not an integer: '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on")
        return true;
    if (text == "false" || text == "0" || text == "no" || text == "off")
        return false;
    throw ConfigError(key + ": not a boolean: '" + text + "'");
}

void require(bool ok, const std::string& msg) {
    if (!ok)
        throw ConfigError(msg);
}

// JSON numbers cannot hold nan or inf.
ordered_json num(double v) {
    if (std::isfinite(v))
        return v;
    return nullptr;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path.string());
    f << text;
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_row(std::initializer_list<double> values) {
    std::string row;
    bool first = true;
    for (double v : values) {
        if (!first)
            row += ',';
        row += format_double(v);
        first = false;
    }
    return row;
}

// Settings shared by every subcommand.
struct Common {
    fs::path out_dir = ".";
    int threads = 0;
};

Common common_settings(const RunConfig& cfg) {
    Common c;
    c.out_dir = cfg.get_string("out", ".");
    c.threads = static_cast<int>(cfg.get_int("threads", 0));
    if (c.threads == 0) {
        if (const char* env = std::getenv("ROTSTAR_THREADS"); env && *env)
            c.threads = static_cast<int>(parse_int("ROTSTAR_THREADS", env));
    }
    require(c.threads >= 0, "threads must be >= 1");
    return c;
}

ScfConfig scf_settings(const RunConfig& cfg, ScfConfig s) {
    s.damping = cfg.get_double("scf.damping", s.damping);
    require(s.damping > 0.0 && s.damping <= 1.0, "scf.damping must lie in (0, 1]");
    s.min_damping = cfg.get_double("scf.min_damping", std::min(s.min_damping, s.damping));
    require(s.min_damping > 0.0 && s.min_damping <= s.damping, "scf.min_damping must lie in (0, scf.damping]");
    s.max_iter = static_cast<int>(cfg.get_int("scf.max_iter", s.max_iter));
    require(s.max_iter >= 1, "scf.max_iter must be >= 1");
    s.residual_tol = cfg.get_double("scf.residual_tol", s.residual_tol);
    require(s.residual_tol > 0.0, "scf.residual_tol must be > 0");
    s.mass_tol = cfg.get_double("scf.mass_tol", s.mass_tol);
    require(s.mass_tol > 0.0, "scf.mass_tol must be > 0");
    s.order = static_cast<int>(cfg.get_int("scf.order", s.order));
    require(s.order >= 0 && s.order <= 64 && s.order % 2 == 0, "scf.order must be even and in [0, 64]");
    return s;
}

// ---------------------------------------------------------------- radial

int cmd_radial(const RunConfig& cfg, const Common& common, std::ostream& out) {
    const double a = cfg.get_double("radial.a", 1.0);
    require(a > 0.0, "radial.a must be > 0");

    const RadialSolution sol = solve_radial(a);
    const EnergyReport en = energy_radial(sol);

    std::string csv = "r,w,u,rho\n";
    for (const auto& s : sol.samples()) {
        const double u = s.r > 0.0 ? s.w / s.r : a;
        csv += csv_row({s.r, s.w, u, sol.density_at(s.r)}) + "\n";
    }
    ordered_json summary;
    summary["a"] = a;
    summary["R"] = sol.R();
    summary["M"] = sol.M();
    summary["E"] = en.E;
    summary["virial_residual"] = num(en.virial_residual / std::abs(en.E));
    summary["pressure_virial_residual"] = num(en.pressure_residual / en.D);
    summary["alpha"] = alpha_radial(sol);

    fs::create_directories(common.out_dir);
    write_text(common.out_dir / "profile.csv", csv);
    write_json(common.out_dir / "summary.json", summary);
    out << summary.dump() << "\n";
    return Success;
}

// ---------------------------------------------------------------- mass-curve

int cmd_mass_curve(const RunConfig& cfg, const Common& common, std::ostream& out) {
    const double a_min = cfg.get_double("mass_curve.a_min", 1e-3);
    const double a_max = cfg.get_double("mass_curve.a_max", 1e4);
    const long n = cfg.get_int("mass_curve.n", 60);
    const bool log_grid = cfg.get_bool("mass_curve.log", true);
    require(a_min > 0.0, "mass_curve.a_min must be > 0");
    require(a_max >= a_min, "mass_curve.a_max must be >= mass_curve.a_min");
    require(n >= 1 && n <= 100000, "mass_curve.n must lie in [1, 100000]");
    require(n == 1 || a_max > a_min, "mass_curve: a_max must exceed a_min when n > 1");

    std::vector<double> grid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        grid[static_cast<std::size_t>(i)] =
            log_grid ? std::exp(std::log(a_min) + t * (std::log(a_max) - std::log(a_min)))
                     : a_min + t * (a_max - a_min);
    }
    grid.front() = a_min;
    if (n > 1)
        grid.back() = a_max;
    const std::vector<MassCurvePoint> curve = mass_curve(grid);

    std::string csv = "a,R,M,Mprime,E,status\n";
    std::size_t ok = 0;
    std::vector<double> lx, ly;
    for (const auto& p : curve) {
        if (p.ok) {
            ++ok;
            csv += csv_row({p.a, p.R, p.M, p.Mprime, p.E}) + ",ok\n";
            if (p.a <= 1e-2) {
                lx.push_back(std::log(p.a));
                ly.push_back(std::log(p.M));
            }
        } else {
            std::string msg = p.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            csv += format_double(p.a) + ",nan,nan,nan,nan,failed: " + msg + "\n";
        }
    }

    ordered_json footer;
    footer["points"] = curve.size();
    footer["succeeded"] = ok;
    footer["monotone"] = is_mass_monotone(curve);
    bool deriv_positive = true;
    for (const auto& p : curve)
        if (p.ok && !(p.Mprime > 0.0))
            deriv_positive = false;
    footer["mprime_positive"] = deriv_positive;
    // Least-squares slope of log M against log a over the points with a <= 1e-2.
    if (lx.size() >= 2) {
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        const double slope = sxy / sxx;
        footer["small_a_slope"] = num(slope);
        footer["small_a_prefactor"] = num(std::exp(my - slope * mx));
        footer["small_a_points"] = lx.size();
    } else {
        footer["small_a_slope"] = nullptr;
        footer["small_a_prefactor"] = nullptr;
        footer["small_a_points"] = lx.size();
    }
    csv += "# " + footer.dump() + "\n";

    fs::create_directories(common.out_dir);
    write_text(common.out_dir / "mass_curve.csv", csv);
    out << footer.dump() << "\n";
    return 10 * ok >= 9 * curve.size() ? Success : SolverFailure;
}

// ---------------------------------------------------------------- branch

RotationProfile select_profile(const std::string& spec) {
    std::error_code ec;
    if (fs::is_regular_file(spec, ec))
        return RotationProfile::from_csv_file(spec);
    return RotationProfile::from_name(spec);
}

ordered_json point_record(const BranchPoint& p, std::size_t index) {
    ordered_json j;
    j["index"] = index;
    j["kappa"] = p.kappa;
    j["kappa2"] = p.kappa * p.kappa;
    j["alpha"] = p.alpha;
    j["mass"] = p.mass;
    j["rho_max"] = p.rho_max;
    j["r_eq"] = p.r_eq;
    j["r_pole"] = p.r_pole;
    j["oblateness"] = num(p.r_eq / p.r_pole);
    j["residual"] = p.residual;
    j["margin"] = p.margin;
    j["weighted_norm"] = p.weighted_norm;
    j["iterations"] = p.iterations;
    j["grid"] = {p.rho.grid.nr(), p.rho.grid.nz(), p.rho.grid.r_dom(), p.rho.grid.z_dom()};
    return j;
}

int cmd_branch(const RunConfig& cfg, const Common& common, std::ostream& out, std::ostream& err) {
    const std::string omega = cfg.get_string("branch.omega", "inverse-square");
    const double mass_a = cfg.get_double("branch.mass_a", 1.0);
    const long steps = cfg.get_int("branch.steps", 20);
    const long nodes = cfg.get_int("branch.nodes", 128);
    const long every = cfg.get_int("branch.snapshot_every", 5);
    double kappa2_max = cfg.get_double("branch.kappa2_max", 0.0);
    require(mass_a > 0.0, "branch.mass_a must be > 0");
    require(steps >= 1 && steps <= 10000, "branch.steps must lie in [1, 10000]");
    require(nodes >= 16 && nodes <= 2048, "branch.nodes must lie in [16, 2048]");
    require(every >= 0, "branch.snapshot_every must be >= 0");
    require(kappa2_max >= 0.0, "branch.kappa2_max must be >= 0");
    BranchConfig bcfg;
    bcfg.scf = scf_settings(cfg, bcfg.scf);

    RotationProfile profile = [&] {
        try {
            return select_profile(omega);
        } catch (const Error& e) {
            throw ConfigError(std::string("branch.omega: ") + e.what());
        }
    }();
    const AdmissibilityVerdict verdict = check_admissible(profile);
    ordered_json adm;
    adm["admissible"] = verdict.admissible;
    adm["inconclusive"] = verdict.inconclusive;
    adm["extrapolated"] = verdict.extrapolated;
    adm["integrable"] = verdict.integrable;
    adm["not_compactly_supported"] = verdict.not_compactly_supported;
    adm["tail_decays"] = verdict.tail_decays;
    adm["tail_exponent"] = num(verdict.tail_exponent);
    adm["reasons"] = verdict.reasons;

    fs::create_directories(common.out_dir);
    ordered_json term;
    term["profile"] = profile.name();
    term["admissibility"] = adm;
    if (!verdict.admissible && !verdict.inconclusive) {
        std::string why;
        for (const auto& r : verdict.reasons)
            why += (why.empty() ? "" : "; ") + r;
        term["reason"] = "Inadmissible";
        term["message"] = why;
        write_json(common.out_dir / "termination.json", term);
        err << "inadmissible rotation profile '" << profile.name() << "': " << why << "\n";
        return InvalidInput;
    }
    if (verdict.inconclusive)
        err << "warning: admissibility of '" << profile.name() << "' is inconclusive; continuing\n";

    const BranchPoint start = radial_start(mass_a, bcfg, static_cast<std::size_t>(nodes));
    const double sup_j = profile.sup_j();
    if (kappa2_max == 0.0)
        kappa2_max = 0.5 * std::abs(start.alpha) / sup_j;
    std::vector<double> schedule;
    for (long i = 1; i <= steps; ++i)
        schedule.push_back(std::sqrt(kappa2_max * static_cast<double>(i) / static_cast<double>(steps)));

    const BranchReport rep = continue_branch(start, schedule, profile, bcfg);

    std::string lines;
    for (std::size_t i = 0; i < rep.points.size(); ++i)
        lines += point_record(rep.points[i], i).dump() + "\n";
    write_text(common.out_dir / "branch.jsonl", lines);

    std::vector<std::string> snapshots;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const bool last = i + 1 == rep.points.size();
        if (!last && (every == 0 || i % static_cast<std::size_t>(every) != 0))
            continue;
        std::ostringstream name;
        name << "density_" << std::setw(4) << std::setfill('0') << i << ".csv";
        std::ofstream f(common.out_dir / name.str(), std::ios::binary);
        if (!f)
            throw Error("cannot write " + (common.out_dir / name.str()).string());
        write_snapshot(f, rep.points[i].rho, "density");
        snapshots.push_back(name.str());
    }

    term["reason"] = to_string(rep.reason);
    term["message"] = rep.message;
    term["accepted"] = rep.points.empty() ? 0 : rep.points.size() - 1;
    term["requested"] = steps;
    term["kappa2_max"] = kappa2_max;
    term["sup_j"] = num(sup_j);
    term["alpha0"] = start.alpha;
    term["guard_n"] = rep.guard_n;
    term["c0"] = rep.c0;
    term["support_audit_passed"] = rep.support_audit_passed;
    term["enlargements"] = rep.enlargements;
    term["halvings"] = rep.halvings;
    term["snapshots"] = snapshots;
    write_json(common.out_dir / "termination.json", term);
    out << "branch: " << term["accepted"].get<std::size_t>() << " accepted points, termination "
        << to_string(rep.reason) << (rep.message.empty() ? "" : " (" + rep.message + ")") << "\n";
    return Success;
}

// ---------------------------------------------------------------- poly43

ordered_json probe_run_json(const ProbeRun& r) {
    ordered_json j;
    j["converged"] = r.converged;
    j["final_residual"] = num(r.final_residual);
    j["iterations"] = r.iterations;
    j["alpha"] = num(r.alpha);
    return j;
}

int cmd_poly43(const RunConfig& cfg, const Common& common, std::ostream& out) {
    const BallSolution ball = solve_u0();
    const KernelReport k = kernel_checks(ball);

    ordered_json rep;
    rep["u0_center"] = ball.center;
    rep["u0_surface_slope"] = ball.surface_slope;
    rep["mass"] = ball.mass;
    rep["chandrasekhar_mass"] = chandrasekhar_mass();
    rep["structure_residual"] = ball.residual;
    rep["v_center"] = k.v_center;
    rep["v_surface"] = k.v_surface;
    rep["dv_surface"] = k.dv_surface;
    rep["linearized_residual"] = k.linearized_residual;
    rep["moment0"] = k.moment0;
    rep["moment0_abs"] = k.moment0_abs;
    rep["moment2"] = k.moment2;
    rep["moment2_identity"] = k.moment2_identity;
    rep["sign_changes"] = k.sign_changes;
    double drift = 0.0;
    for (double f : {0.5, 0.8, 1.25, 2.0})
        drift = std::max(drift, std::abs(scaled_mass(f * ball.center, ball) - ball.mass) / ball.mass);
    rep["scaling_mass_max_rel_dev"] = drift;

    if (cfg.has("poly43.probe_kappa")) {
        const double kappa = cfg.get_double("poly43.probe_kappa", 0.0);
        require(kappa >= 0.0 && kappa * kappa <= 1e-2, "poly43.probe_kappa must satisfy 0 <= kappa^2 <= 1e-2");
        ProbeConfig pc;
        pc.nodes = static_cast<std::size_t>(cfg.get_int("poly43.nodes", static_cast<long>(pc.nodes)));
        require(pc.nodes >= 16 && pc.nodes <= 1024, "poly43.nodes must lie in [16, 1024]");
        pc.defect_correction = cfg.get_bool("poly43.defect_correction", pc.defect_correction);
        pc.scf = scf_settings(cfg, pc.scf);
        const ProbeReport p = degeneracy_probe(kappa, pc);
        ordered_json pj;
        pj["kappa"] = kappa;
        pj["nodes"] = pc.nodes;
        pj["defect_correction"] = p.defect_correction;
        pj["residual_tol"] = p.residual_tol;
        pj["converged"] = p.poly.converged;
        pj["plateau"] = p.plateau;
        pj["final_residual"] = num(p.poly.final_residual);
        pj["iterations"] = p.poly.iterations;
        pj["alpha_drift"] = num(p.alpha_drift);
        pj["control_converged"] = p.control.converged;
        pj["control"] = probe_run_json(p.control);
        pj["uncorrected_kappa0"] = probe_run_json(p.uncorrected_baseline);
        rep["probe"] = pj;
    }

    fs::create_directories(common.out_dir);
    write_json(common.out_dir / "poly43.json", rep);
    out << rep.dump() << "\n";
    return Success;
}

// ---------------------------------------------------------------- sphere-test

int cmd_sphere_test(const RunConfig& cfg, const Common& common, std::ostream& out) {
    const long res = cfg.get_int("sphere.resolution", 128);
    const long order = cfg.get_int("sphere.order", 16);
    require(res >= 8 && res <= 4096 && res % 2 == 0, "sphere.resolution must be even and in [8, 4096]");
    require(order >= 0 && order <= 64 && order % 2 == 0, "sphere.order must be even and in [0, 64]");
    const SphereTestReport r = sphere_test(static_cast<std::size_t>(res), static_cast<int>(order));
    ordered_json j;
    j["resolution"] = r.resolution;
    j["order"] = r.order;
    j["max_rel_err"] = r.max_rel_err;
    j["coarse_max_rel_err"] = r.coarse_max_rel_err;
    j["observed_order"] = num(r.observed_order);
    j["center_rel_err"] = r.center_rel_err;
    j["exterior_rel_err"] = r.exterior_rel_err;
    j["mass"] = r.mass;
    fs::create_directories(common.out_dir);
    write_json(common.out_dir / "sphere_test.json", j);
    out << j.dump() << "\n";
    return Success;
}

} // namespace

// ---------------------------------------------------------------- RunConfig

const std::vector<std::string>& RunConfig::known_keys() {
    static const std::vector<std::string> keys = {
        "out",
        "threads",
        "radial.a",
        "mass_curve.a_min",
        "mass_curve.a_max",
        "mass_curve.n",
        "mass_curve.log",
        "branch.omega",
        "branch.mass_a",
        "branch.kappa2_max",
        "branch.steps",
        "branch.nodes",
        "branch.snapshot_every",
        "scf.damping",
        "scf.min_damping",
        "scf.max_iter",
        "scf.residual_tol",
        "scf.mass_tol",
        "scf.order",
        "poly43.probe_kappa",
        "poly43.nodes",
        "poly43.defect_correction",
        "sphere.resolution",
        "sphere.order",
    };
    return keys;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& origin) {
    RunConfig cfg;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos)
            throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(where + "empty key or value");
        if (cfg.has(key))
            throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            cfg.set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file " + path);
    return parse(f, path);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ConfigError("unknown key '" + key + "'");
    values_[key] = value;
}

std::optional<std::string> RunConfig::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto v = raw(key);
    return v ? parse_double(key, *v) : fallback;
}

long RunConfig::get_int(const std::string& key, long fallback) const {
    const auto v = raw(key);
    return v ? parse_int(key, *v) : fallback;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = raw(key);
    return v ? parse_bool(key, *v) : fallback;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto v = raw(key);
    return v ? *v : fallback;
}

// ---------------------------------------------------------------- run

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rotating white-dwarf equilibria: radial stars, SCF branches and the 4/3 degeneracy"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    // Flag values are kept as strings and validated through RunConfig, so file
    // and command-line values go through the same checks.
    std::map<std::string, std::string> flags;
    auto add = [&flags](CLI::App* sub, const std::string& names, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(
            names, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    std::string config_path;
    app.add_option("--config", config_path, "key = value configuration file");
    add(&app, "-o,--out", "out", "output directory (default .)");
    add(&app, "--threads", "threads", "OpenMP threads (fallback: ROTSTAR_THREADS)");

    auto* radial = app.add_subcommand("radial", "solve one non-rotating star");
    add(radial, "--a", "radial.a", "central value a = w'(0) > 0");

    auto* curve = app.add_subcommand("mass-curve", "tabulate R, M, M', E over central values");
    add(curve, "--a-min", "mass_curve.a_min", "smallest a");
    add(curve, "--a-max", "mass_curve.a_max", "largest a");
    add(curve, "--n", "mass_curve.n", "number of points");
    curve->add_flag_function("--log", [&flags](std::int64_t) { flags["mass_curve.log"] = "true"; },
                             "log-spaced grid (default)");
    curve->add_flag_function("--linear", [&flags](std::int64_t) { flags["mass_curve.log"] = "false"; },
                             "uniform grid");

    auto* branch = app.add_subcommand("branch", "continue a rotating branch in kappa");
    add(branch, "--omega", "branch.omega", "profile name or two-column CSV file");
    add(branch, "--mass-a", "branch.mass_a", "central value of the non-rotating start");
    add(branch, "--kappa2-max", "branch.kappa2_max", "largest kappa^2 (default 0.5 |alpha0| / sup j)");
    add(branch, "--steps", "branch.steps", "number of kappa^2 steps");
    add(branch, "--nodes", "branch.nodes", "grid nodes per direction");
    add(branch, "--snapshot-every", "branch.snapshot_every", "density snapshot period (0: last only)");
    add(branch, "--out-dir", "out", "output directory");

    auto* poly = app.add_subcommand("poly43", "kernel checks for the 4/3 polytrope");
    add(poly, "--probe-kappa", "poly43.probe_kappa", "also run the degeneracy probe at this kappa");
    add(poly, "--nodes", "poly43.nodes", "probe grid nodes per direction");

    auto* sphere = app.add_subcommand("sphere-test", "uniform-ball potential check");
    add(sphere, "--resolution", "sphere.resolution", "grid nodes per direction");
    add(sphere, "--order", "sphere.order", "Legendre order");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return InvalidInput;
    }

    RunConfig cfg;
    Common common;
    try {
        if (!config_path.empty())
            cfg = RunConfig::from_file(config_path);
        for (const auto& [k, v] : flags)
            cfg.set(k, v);
        common = common_settings(cfg);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return InvalidInput;
    }
    if (common.threads > 0)
        omp_set_num_threads(common.threads);

    try {
        if (radial->parsed())
            return cmd_radial(cfg, common, out);
        if (curve->parsed())
            return cmd_mass_curve(cfg, common, out);
        if (branch->parsed())
            return cmd_branch(cfg, common, out, err);
        if (poly->parsed())
            return cmd_poly43(cfg, common, out);
        if (sphere->parsed())
            return cmd_sphere_test(cfg, common, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return InvalidInput;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return InvalidInput;
    } catch (const std::exception& e) {
        err << "solver failure: " << e.what() << "\n";
        return SolverFailure;
    }
    return InvalidInput;
}

} // namespace rotstar::cli
