#include "rotstar/continuation.hpp"

#include "rotstar/diagnostics.hpp"
#include "rotstar/gravity.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace rotstar {

namespace {

// 1 for nodes inside the mask radius, 0 outside.
std::vector<char> node_mask(const AxisymGrid& g, double mask_radius) {
    std::vector<char> m(g.size(), 1);
    if (!std::isfinite(mask_radius))
        return m;
    for (std::size_t i = 0; i < g.nr(); ++i)
        for (std::size_t k = 0; k < g.nz(); ++k)
            if (std::hypot(g.r(i), g.zeta(k)) > mask_radius)
                m[g.index(i, k)] = 0;
    return m;
}

double mass_sum(const PotentialField& phi, double alpha, const EquationOfState& eos, const std::vector<char>& mask) {
    const AxisymGrid& g = phi.grid;
    const auto& w = g.weights();
    std::vector<double> rows(g.nr(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < g.nr(); ++i) {
        double row = 0.0;
        for (std::size_t k = 0; k < g.nz(); ++k) {
            const std::size_t idx = g.index(i, k);
            if (mask[idx])
                row += w[idx] * eos.density_from_enthalpy(phi.values[idx] + alpha);
        }
        rows[i] = row;
    }
    double total = 0.0;
    for (double r : rows)
        total += r;
    return total;
}

double solve_alpha(const PotentialField& phi, double mass, const EquationOfState& eos, double rel_tol,
                   bool allow_positive, const std::vector<char>& mask) {
    if (!(mass > 0.0))
        throw DomainError("alpha_for_mass: target mass must be positive");
    double phi_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        if (!std::isfinite(phi.values[i]))
            throw DomainError("alpha_for_mass: non-finite potential");
        if (mask[i])
            phi_max = std::max(phi_max, phi.values[i]);
    }
    auto f = [&](double alpha) { return mass_sum(phi, alpha, eos, mask) - mass; };

    const double lo = -phi_max;  // [Phi + lo]_+ = 0 everywhere
    double hi = 0.0;
    double f_hi = 0.0;
    if (allow_positive) {
        hi = std::max(1.0, std::abs(lo));
        f_hi = f(hi);
        for (int n = 0; f_hi < 0.0; ++n) {
            if (n > 60)
                throw MassUnreachable("alpha_for_mass: mass not reached for any alpha");
            hi *= 2.0;
            f_hi = f(hi);
        }
    } else {
        if (!(lo < 0.0))
            throw MassUnreachable("alpha_for_mass: potential is not positive anywhere");
        f_hi = f(hi);
        if (f_hi < 0.0)
            throw MassUnreachable("alpha_for_mass: mass not reachable with alpha < 0");
    }
    const double f_lo = -mass;
    if (f_hi == 0.0)
        return hi;

    std::uintmax_t max_iter = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2),
        max_iter);
    // Pick the end of the final bracket with the smaller mismatch.
    const double e1 = std::abs(f(bracket.first));
    const double e2 = std::abs(f(bracket.second));
    const double alpha = e1 <= e2 ? bracket.first : bracket.second;
    const double err = std::min(e1, e2) / mass;
    if (err > rel_tol)
        throw MassUnreachable("alpha_for_mass: mass mismatch " + std::to_string(err) + " after root search");
    return alpha;
}

PotentialField shifted(const PotentialField& u, const std::vector<double>& centrifugal, PotentialForm form) {
    const AxisymGrid& g = u.grid;
    if (centrifugal.size() != g.nr())
        throw DomainError("centrifugal term does not match the grid");
    PotentialField phi(g);
    const double shift = form == PotentialForm::Anchored ? u.at(0, 0) : 0.0;
    for (std::size_t i = 0; i < g.nr(); ++i)
        for (std::size_t k = 0; k < g.nz(); ++k)
            phi.at(i, k) = u.at(i, k) - shift + centrifugal[i];
    return phi;
}

// Zero of t = Phi + alpha walking outward from the first node; linear interpolation.
template <class At>
double support_edge(std::size_t n, double h, double limit, At t_at) {
    for (std::size_t i = 1; i < n; ++i) {
        const double t1 = t_at(i);
        if (!(t1 > 0.0)) {
            const double t0 = t_at(i - 1);
            if (!(t0 > 0.0))
                return static_cast<double>(i - 1) * h;
            return std::min(limit, (static_cast<double>(i - 1) + t0 / (t0 - t1)) * h);
        }
    }
    return std::min(limit, static_cast<double>(n - 1) * h);
}

BranchPoint make_point(DensityField rho, const PotentialField& u, const PotentialField& phi, double alpha,
                       const ScfProblem& problem, double residual, int iterations) {
    const AxisymGrid& g = rho.grid;
    BranchPoint p;
    p.kappa = problem.kappa;
    p.alpha = alpha;
    p.mass = total_mass(rho);
    p.rho_max = max_value(rho.values);
    p.residual = residual;
    p.margin = -(alpha + problem.centrifugal_sup);
    p.weighted_norm = weighted_norm(rho, 4.0);
    double decay = 0.0;
    for (std::size_t i = 0; i < g.nr(); ++i)
        for (std::size_t k = 0; k < g.nz(); ++k)
            decay = std::max(decay, std::hypot(g.r(i), g.zeta(k)) * u.at(i, k));
    p.potential_decay = decay;
    p.r_eq = support_edge(g.nr(), g.dr(), problem.mask_radius, [&](std::size_t i) { return phi.at(i, 0) + alpha; });
    p.r_pole =
        support_edge(g.nz(), g.dz(), problem.mask_radius, [&](std::size_t k) { return phi.at(0, k) + alpha; });
    p.iterations = iterations;
    p.rho = std::move(rho);
    return p;
}

} // namespace

std::vector<double> centrifugal_term(const AxisymGrid& grid, double kappa, const RotationProfile& profile) {
    std::vector<double> c(grid.nr());
    for (std::size_t i = 0; i < grid.nr(); ++i)
        c[i] = kappa == 0.0 ? 0.0 : kappa * kappa * profile.j(grid.r(i));
    return c;
}

PotentialField effective_potential(const DensityField& rho, const std::vector<double>& centrifugal, int order,
                                   PotentialForm form) {
    return shifted(potential(rho, order), centrifugal, form);
}

PotentialField effective_potential(const DensityField& rho, double kappa, const RotationProfile& profile, int order) {
    return effective_potential(rho, centrifugal_term(rho.grid, kappa, profile), order);
}

double mass_for_alpha(const PotentialField& phi, double alpha, const EquationOfState& eos, double mask_radius) {
    return mass_sum(phi, alpha, eos, node_mask(phi.grid, mask_radius));
}

double alpha_for_mass(const PotentialField& phi, double mass, const EquationOfState& eos, double rel_tol,
                      bool allow_positive, double mask_radius) {
    return solve_alpha(phi, mass, eos, rel_tol, allow_positive, node_mask(phi.grid, mask_radius));
}

ScfResult scf_solve(const DensityField& initial, const ScfProblem& problem, const ScfConfig& cfg,
                    const SweepObserver& observer) {
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
        throw DomainError("scf: damping must lie in (0, 1]");
    if (!(cfg.residual_tol > 0.0) || !(cfg.mass_tol > 0.0) || cfg.max_iter < 1)
        throw DomainError("scf: tolerances and max_iter must be positive");
    if (!(problem.mass > 0.0))
        throw DomainError("scf: target mass must be positive");
    const AxisymGrid& g = initial.grid;
    const std::vector<char> mask = node_mask(g, problem.mask_radius);
    if (!problem.target_shift.empty() && problem.target_shift.size() != g.size())
        throw DomainError("scf: target shift does not match the grid");

    DensityField rho = initial;
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        if (rho.values[i] < 0.0)
            throw DomainError("scf: initial density is negative");
        if (!mask[i])
            rho.values[i] = 0.0;
    }
    const double m0 = total_mass(rho);
    if (!(std::abs(m0 - problem.mass) <= 0.5 * problem.mass))
        throw DomainError("scf: initial mass must lie within 50% of the target");

    ScfResult result;
    double theta = cfg.damping;
    double prev = std::numeric_limits<double>::infinity();
    int calm = 0;
    DensityField target(g);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const PotentialField u = potential(rho, cfg.order);
        const PotentialField phi = shifted(u, problem.centrifugal, problem.form);
        const double alpha =
            solve_alpha(phi, problem.mass, problem.eos, cfg.mass_tol, problem.allow_positive_alpha, mask);
        const double margin = -(alpha + problem.centrifugal_sup);
        if (cfg.guard_n > 0.0 && !(margin > 1.0 / cfg.guard_n))
            throw GuardViolation("O_N guard violated: margin " + std::to_string(margin) + " <= 1/N = " +
                                 std::to_string(1.0 / cfg.guard_n));

        double diff = 0.0;
        const bool shift = !problem.target_shift.empty();
        for (std::size_t i = 0; i < g.size(); ++i) {
            target.values[i] = mask[i] ? problem.eos.density_from_enthalpy(phi.values[i] + alpha) : 0.0;
            if (shift)
                target.values[i] += problem.target_shift[i];
            diff = std::max(diff, std::abs(rho.values[i] - target.values[i]));
        }
        const double res = diff / max_value(target.values);
        result.history.push_back(res);

        // Every target has the exact mass, so the iterate's mass error shrinks
        // by (1 - theta) per sweep; wait for it as well.
        const double mass_err = std::abs(total_mass(rho) - problem.mass) / problem.mass;
        if (res <= cfg.residual_tol && mass_err <= cfg.mass_constraint_tol) {
            result.point = make_point(std::move(rho), u, phi, alpha, problem, res, it);
            return result;
        }
        if (res > prev) {
            theta = std::max(0.5 * theta, cfg.min_damping);
            calm = 0;
        } else if (++calm >= cfg.recovery_sweeps) {
            // A transient rise (typical on the first sweep after a warm start)
            // should not slow the whole solve down.
            theta = std::min(2.0 * theta, cfg.damping);
            calm = 0;
        }
        prev = res;
        for (std::size_t i = 0; i < g.size(); ++i)
            rho.values[i] = (1.0 - theta) * rho.values[i] + theta * target.values[i];
        if (observer)
            observer(rho);
        if (it == cfg.max_iter)
            throw NoConvergence("scf: no convergence after " + std::to_string(it) + " sweeps, residual " +
                                    std::to_string(res),
                                make_point(std::move(rho), u, phi, alpha, problem, res, it), result.history);
    }
    throw NoConvergence("scf: no sweeps", BranchPoint{}, result.history);
}

std::vector<double> sweep_defect(const DensityField& rho, const ScfProblem& problem, int order) {
    const AxisymGrid& g = rho.grid;
    const std::vector<char> mask = node_mask(g, problem.mask_radius);
    const PotentialField phi = shifted(potential(rho, order), problem.centrifugal, problem.form);
    const double alpha = solve_alpha(phi, total_mass(rho), problem.eos, 1e-13, problem.allow_positive_alpha, mask);
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        d[i] = rho.values[i] - (mask[i] ? problem.eos.density_from_enthalpy(phi.values[i] + alpha) : 0.0);
    return d;
}

DensityField discretize_radial(const RadialSolution& sol, const AxisymGrid& grid) {
    DensityField rho(grid);
    for (std::size_t i = 0; i < grid.nr(); ++i)
        for (std::size_t k = 0; k < grid.nz(); ++k) {
            const double s = std::hypot(grid.r(i), grid.zeta(k));
            rho.at(i, k) = s < sol.R() ? sol.density_at(s) : 0.0;
        }
    return rho;
}

AxisymGrid grid_for_radius(double support_radius, std::size_t nodes, double factor) {
    if (!(support_radius > 0.0) || !(factor > 1.0))
        throw DomainError("grid_for_radius: need a positive radius and factor > 1");
    return AxisymGrid(nodes, nodes, factor * support_radius, factor * support_radius);
}

std::string to_string(Termination t) {
    switch (t) {
    case Termination::ScheduleExhausted:
        return "ScheduleExhausted";
    case Termination::DensityGrowth:
        return "DensityGrowth";
    case Termination::SupportGrowth:
        return "SupportGrowth";
    case Termination::GuardViolation:
        return "GuardViolation";
    case Termination::StepUnderflow:
        return "StepUnderflow";
    }
    return "Unknown";
}

double support_radius(const DensityField& rho) {
    const AxisymGrid& g = rho.grid;
    double r = 0.0;
    for (std::size_t i = 0; i < g.nr(); ++i)
        for (std::size_t k = 0; k < g.nz(); ++k)
            if (rho.at(i, k) > 0.0)
                r = std::max(r, std::hypot(g.r(i), g.zeta(k)));
    return r;
}

BranchPoint radial_start(double a, const BranchConfig& cfg, std::size_t nodes) {
    const RadialSolution sol = solve_radial(a);
    const AxisymGrid grid = grid_for_radius(sol.R(), nodes, 2.0);
    ScfProblem problem;
    problem.mass = sol.M();
    problem.centrifugal.assign(grid.nr(), 0.0);
    ScfConfig sc = cfg.scf;
    sc.guard_n = 0.0;
    return scf_solve(discretize_radial(sol, grid), problem, sc).point;
}

namespace {

ScfProblem branch_problem(const AxisymGrid& grid, double kappa, const RotationProfile& profile, double mass) {
    ScfProblem p;
    p.mass = mass;
    p.kappa = kappa;
    p.centrifugal = centrifugal_term(grid, kappa, profile);
    p.centrifugal_sup = kappa * kappa * profile.sup_j();
    return p;
}

AxisymGrid enlarged(const AxisymGrid& g, double factor) {
    const auto grow = [factor](std::size_t n) {
        return static_cast<std::size_t>(std::lround(static_cast<double>(n - 1) * factor)) + 1;
    };
    const std::size_t nr = grow(g.nr());
    const std::size_t nz = grow(g.nz());
    return AxisymGrid(nr, nz, g.dr() * static_cast<double>(nr - 1), g.dz() * static_cast<double>(nz - 1));
}

} // namespace

BranchReport continue_branch(const BranchPoint& start, const std::vector<double>& kappa_schedule,
                             const RotationProfile& profile, const BranchConfig& cfg, double guard_n) {
    const double sup = profile.sup_j();
    if (!std::isfinite(sup))
        throw DomainError("continue_branch: rotation profile has unbounded j");
    for (std::size_t i = 0; i < kappa_schedule.size(); ++i) {
        if (kappa_schedule[i] < start.kappa || (i > 0 && !(kappa_schedule[i] > kappa_schedule[i - 1])))
            throw DomainError("continue_branch: kappa schedule must increase from the start value");
    }
    if (!(start.margin > 0.0))
        throw GuardViolation("continue_branch: start point is outside O_N");

    BranchReport rep;
    rep.guard_n = guard_n > 0.0 ? guard_n : 10.0 / start.margin;
    rep.c0 = cfg.c0_headroom * start.potential_decay / start.weighted_norm;
    rep.points.push_back(start);

    ScfConfig sc = cfg.scf;
    sc.guard_n = rep.guard_n;
    const double mass = start.mass;
    const double rho_limit = cfg.density_growth * start.rho_max;
    AxisymGrid grid = start.rho.grid;
    BranchPoint current = start;

    auto stop = [&rep](Termination t, std::string msg) {
        rep.reason = t;
        rep.message = std::move(msg);
    };
    auto enlarge = [&]() {
        grid = enlarged(grid, cfg.enlarge_factor);
        current.rho = resample(current.rho, grid);
        ++rep.enlargements;
    };

    bool done = false;
    for (double target : kappa_schedule) {
        if (done)
            break;
        if (target <= current.kappa)
            continue;
        double attempt = target;
        int consecutive = 0;
        while (!done && current.kappa < target) {
            try {
                const ScfProblem problem = branch_problem(grid, attempt, profile, mass);
                BranchPoint p = scf_solve(current.rho, problem, sc).point;
                rep.points.push_back(p);
                current = std::move(p);
                consecutive = 0;
                attempt = target;
                if (current.rho_max > rho_limit) {
                    stop(Termination::DensityGrowth, "rho_max exceeded the growth threshold");
                    done = true;
                } else if (current.r_eq > cfg.support_fraction * grid.r_dom()) {
                    if (rep.enlargements < cfg.max_enlargements) {
                        enlarge();
                    } else {
                        stop(Termination::SupportGrowth, "equatorial radius reached the enlarged domain edge");
                        done = true;
                    }
                }
            } catch (const DomainOverflow&) {
                if (rep.enlargements < cfg.max_enlargements) {
                    enlarge();
                } else {
                    stop(Termination::SupportGrowth, "support overflowed the domain after all enlargements");
                    done = true;
                }
            } catch (const GuardViolation& e) {
                stop(Termination::GuardViolation, e.what());
                done = true;
            } catch (const NumericsError& e) {
                // NoConvergence or an unreachable mass: retry with half the step.
                ++rep.halvings;
                if (++consecutive > cfg.max_halvings) {
                    stop(Termination::StepUnderflow, std::string("step underflow: ") + e.what());
                    done = true;
                } else {
                    attempt = 0.5 * (current.kappa + attempt);
                }
            }
        }
    }
    if (!done)
        stop(Termination::ScheduleExhausted, "all scheduled kappa values reached");

    for (const BranchPoint& p : rep.points) {
        const double bound = rep.c0 * rep.guard_n * p.weighted_norm;
        if (support_radius(p.rho) > bound || p.potential_decay > rep.c0 * p.weighted_norm)
            rep.support_audit_passed = false;
    }
    return rep;
}

} // namespace rotstar
