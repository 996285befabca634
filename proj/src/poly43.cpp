#include "rotstar/poly43.hpp"

#include "rotstar/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace rotstar {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

RadialConfig ball_config() {
    RadialConfig cfg;
    cfg.tol.rel = 1e-12;
    cfg.tol.abs = 1e-14;
    return cfg;
}

double weighted_dot(const AxisymGrid& g, const std::vector<double>& f, const std::vector<double>& h) {
    std::vector<double> prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        prod[i] = f[i] * h[i];
    return integrate(g, prod);
}

} // namespace

BallSolution solve_u0(double tol) {
    const EquationOfState eos = EquationOfState::poly43_normalized();
    const RadialConfig cfg = ball_config();
    // Secant on the central value for R(a) - 1.
    double a0 = 1.0;
    RadialSolution s0 = solve_radial(a0, cfg, eos);
    double f0 = s0.R() - 1.0;
    double a1 = a0 * s0.R();  // exact for R proportional to 1/a
    RadialSolution s1 = solve_radial(a1, cfg, eos);
    double f1 = s1.R() - 1.0;
    for (int it = 0; std::abs(f1) > tol; ++it) {
        if (it > 50 || f1 == f0)
            throw NumericsError("solve_u0: secant on the central value did not converge");
        const double a2 = a1 - f1 * (a1 - a0) / (f1 - f0);
        a0 = a1;
        f0 = f1;
        a1 = a2;
        s1 = solve_radial(a1, cfg, eos);
        f1 = s1.R() - 1.0;
    }

    BallSolution b;
    b.center = s1.a();
    b.mass = s1.M();
    b.surface_slope = s1.samples().back().dw;  // w' = u + r u' = u'(1) at the surface
    // w'(r_k) - w'(0) = -int_0^{r_k} 4 pi s u^3 ds on every stored sample.
    const auto& samples = s1.samples();
    double integral = 0.0;
    double residual = 0.0;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        integral += boost::math::quadrature::gauss<double, 10>::integrate(
            [&](double r) { return r > 0.0 ? g_rhs(std::max(s1.w_at(r), 0.0), r, eos) : 0.0; }, samples[k - 1].r,
            samples[k].r);
        residual = std::max(residual, std::abs(samples[k].dw - b.center + integral) / b.center);
    }
    b.residual = residual;
    b.radial = std::move(s1);
    return b;
}

double scaled_density(const BallSolution& base, double alpha, double s) {
    if (!(alpha > 0.0))
        throw DomainError("scaling family: alpha must be positive");
    const double lambda = alpha / base.center;
    return lambda * lambda * lambda * base.radial.density_at(lambda * s);
}

DensityField scaling_family(double alpha, const BallSolution& base, const AxisymGrid& grid) {
    DensityField rho(grid);
    for (std::size_t i = 0; i < grid.nr(); ++i)
        for (std::size_t k = 0; k < grid.nz(); ++k)
            rho.at(i, k) = scaled_density(base, alpha, std::hypot(grid.r(i), grid.zeta(k)));
    return rho;
}

double scaled_mass(double alpha, const BallSolution& base) {
    if (!(alpha > 0.0))
        throw DomainError("scaling family: alpha must be positive");
    const double support = base.center / alpha * base.radial.R();
    auto f = [&](double s) { return kFourPi * s * s * scaled_density(base, alpha, s); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, support, 15, 1e-14);
}

DensityField scaling_mode(const BallSolution& base, const AxisymGrid& grid) {
    DensityField m(grid);
    const RadialSolution& sol = base.radial;
    for (std::size_t i = 0; i < grid.nr(); ++i)
        for (std::size_t k = 0; k < grid.nz(); ++k) {
            const double s = std::hypot(grid.r(i), grid.zeta(k));
            if (s >= sol.R())
                continue;
            const double u = sol.u_at(s);
            m.at(i, k) = 3.0 * u * u * sol.dw_at(s) / base.center;
        }
    return m;
}

KernelReport kernel_checks(const BallSolution& base) {
    const RadialSolution& sol = base.radial;
    KernelReport rep;
    for (const auto& s : sol.samples()) {
        rep.r.push_back(s.r);
        rep.v.push_back(s.dw);
    }
    rep.v_center = rep.v.front();
    rep.v_surface = rep.v.back();
    rep.dv_surface = std::abs(g_rhs(std::max(sol.samples().back().w, 0.0), sol.R(), sol.eos()));

    for (std::size_t k = 1; k + 1 < rep.v.size(); ++k)
        if ((rep.v[k] > 0.0) != (rep.v[k + 1] > 0.0))
            ++rep.sign_changes;

    // (r v)'' = -12 pi u0^2 (r v): compare with the independently integrated z.
    const VariationalSolution var = solve_variational(sol);
    double lin = 0.0;
    for (const auto& s : var.samples) {
        if (s.r <= 0.0 || s.r >= sol.R())
            continue;
        lin = std::max(lin, std::abs(sol.dw_at(s.r) - base.center * s.z / s.r) / base.center);
    }
    rep.linearized_residual = lin;

    auto u = [&](double r) { return sol.u_at(r); };
    rep.moment0 = kFourPi * sol.integrate([&](double r) { return r * r * u(r) * u(r) * sol.dw_at(r); });
    rep.moment0_abs = kFourPi * sol.integrate([&](double r) { return r * r * u(r) * u(r) * std::abs(sol.dw_at(r)); });
    rep.moment2 = kFourPi * sol.integrate([&](double r) { return std::pow(r, 4) * u(r) * u(r) * sol.dw_at(r); });
    rep.moment2_identity =
        -(8.0 * std::numbers::pi / 3.0) * sol.integrate([&](double r) { return std::pow(r, 4) * std::pow(u(r), 3); });
    return rep;
}

namespace {

ProbeRun run_probe(const DensityField& initial, ScfProblem problem, const ScfConfig& cfg,
                   const SweepObserver& observer, DensityField* last) {
    ProbeRun run;
    try {
        ScfResult res = scf_solve(initial, problem, cfg, observer);
        run.converged = true;
        run.history = std::move(res.history);
        run.alpha = res.point.alpha;
        run.iterations = res.point.iterations;
        if (last)
            *last = std::move(res.point.rho);
    } catch (const NoConvergence& e) {
        run.converged = false;
        run.history = e.history();
        run.alpha = e.last().alpha;
        run.iterations = e.last().iterations;
        if (last)
            *last = e.last().rho;
    }
    run.final_residual = run.history.empty() ? 0.0 : run.history.back();
    return run;
}

ScfProblem probe_problem(const AxisymGrid& grid, const EquationOfState& eos, double mass, double kappa,
                         double mask_radius) {
    ScfProblem p;
    p.eos = eos;
    p.mass = mass;
    p.kappa = kappa;
    p.centrifugal.resize(grid.nr());
    for (std::size_t i = 0; i < grid.nr(); ++i)
        p.centrifugal[i] = kappa * grid.r(i) * grid.r(i);
    p.form = PotentialForm::Anchored;
    p.allow_positive_alpha = true;
    p.mask_radius = mask_radius;
    return p;
}

} // namespace

ProbeReport degeneracy_probe(double kappa, const ProbeConfig& cfg) {
    if (!(kappa >= 0.0) || kappa * kappa > 1e-2)
        throw DomainError("degeneracy_probe: need 0 <= kappa^2 <= 1e-2");
    ProbeReport rep;
    rep.kappa = kappa;
    rep.residual_tol = cfg.scf.residual_tol;
    rep.defect_correction = cfg.defect_correction;
    ScfConfig scf = cfg.scf;
    scf.guard_n = 0.0;

    const BallSolution base = solve_u0();
    const AxisymGrid grid(cfg.nodes, cfg.nodes, cfg.domain, cfg.domain);
    const DensityField start = scaling_family(base.center, base, grid);
    const DensityField mode = scaling_mode(base, grid);
    const double mode_norm2 = weighted_dot(grid, mode.values, mode.values);
    const EquationOfState poly = EquationOfState::poly43_normalized();
    const double mass = total_mass(start);

    ScfProblem problem = probe_problem(grid, poly, mass, kappa, cfg.domain);
    if (cfg.defect_correction)
        problem.target_shift = sweep_defect(start, probe_problem(grid, poly, mass, 0.0, cfg.domain), scf.order);

    DensityField prev = start;
    auto observer = [&](const DensityField& rho) {
        std::vector<double> inc(rho.values.size());
        for (std::size_t i = 0; i < inc.size(); ++i)
            inc[i] = rho.values[i] - prev.values[i];
        rep.drift_history.push_back(weighted_dot(grid, inc, mode.values) / mode_norm2);
        prev = rho;
    };
    DensityField last;
    rep.poly = run_probe(start, problem, scf, observer, &last);
    std::vector<double> shift(last.values.size());
    for (std::size_t i = 0; i < shift.size(); ++i)
        shift[i] = last.values[i] - start.values[i];
    rep.alpha_drift = weighted_dot(grid, shift, mode.values) / mode_norm2;
    rep.plateau = !rep.poly.converged && rep.poly.final_residual >= 10.0 * rep.residual_tol;

    rep.uncorrected_baseline = run_probe(start, probe_problem(grid, poly, mass, 0.0, cfg.domain), scf, {}, nullptr);

    const RadialSolution star = solve_radial(cfg.control_a);
    const double extent = cfg.domain * star.R();
    const AxisymGrid cgrid(cfg.nodes, cfg.nodes, extent, extent);
    const DensityField cstart = discretize_radial(star, cgrid);
    const EquationOfState wd = EquationOfState::white_dwarf();
    const double cmass = total_mass(cstart);
    ScfProblem cproblem = probe_problem(cgrid, wd, cmass, kappa, extent);
    if (cfg.defect_correction)
        cproblem.target_shift = sweep_defect(cstart, probe_problem(cgrid, wd, cmass, 0.0, extent), scf.order);
    rep.control = run_probe(cstart, cproblem, scf, {}, nullptr);
    return rep;
}

} // namespace rotstar
