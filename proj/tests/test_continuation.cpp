#include "rotstar/continuation.hpp"
#include "rotstar/diagnostics.hpp"
#include "rotstar/gravity.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rotstar;

namespace {

struct Fixture {
    RadialSolution star = solve_radial(1.0);
    AxisymGrid grid = grid_for_radius(star.R(), 96);
    DensityField rho = discretize_radial(star, grid);
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

ScfProblem rotating(const AxisymGrid& g, double mass, double kappa, const RotationProfile& p) {
    ScfProblem pr;
    pr.mass = mass;
    pr.kappa = kappa;
    pr.centrifugal = centrifugal_term(g, kappa, p);
    pr.centrifugal_sup = kappa * kappa * p.sup_j();
    return pr;
}

double sup_diff(const DensityField& a, const DensityField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

} // namespace

TEST_SUITE("continuation") {

TEST_CASE("effective potential") {
    const auto& f = fixture();
    const auto prof = RotationProfile::inverse_square();
    const PotentialField u = effective_potential(f.rho, 0.0, prof);
    const PotentialField plain = potential(f.rho);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        REQUIRE(u.values[i] == plain.values[i]);

    const PotentialField only_rot = effective_potential(DensityField(f.grid), 1.0, prof);
    for (std::size_t i = 0; i < f.grid.nr(); ++i)
        CHECK(only_rot.at(i, 3) == doctest::Approx(prof.j(f.grid.r(i))).epsilon(1e-15));

    const double kappa = 0.7;
    const PotentialField k = effective_potential(f.rho, kappa, prof);
    for (std::size_t i = 0; i < f.grid.nr(); ++i)
        for (std::size_t z = 0; z < f.grid.nz(); z += 7)
            CHECK(k.at(i, z) - u.at(i, z) == doctest::Approx(kappa * kappa * prof.j(f.grid.r(i))).epsilon(1e-12));
}

TEST_CASE("mass as a function of alpha is monotone") {
    const AxisymGrid g(33, 33, 2.0, 2.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        PotentialField phi(g);
        for (double& v : phi.values)
            v = u(rng);
        double prev = 0.0;
        for (double a = -1.2; a <= 0.2; a += 0.05) {
            const double m = mass_for_alpha(phi, a, EquationOfState::white_dwarf());
            CHECK(m >= prev);
            prev = m;
        }
        CHECK(mass_for_alpha(phi, -1.0001, EquationOfState::white_dwarf()) == 0.0);
    }
}

TEST_CASE("alpha from the radial potential matches -M/R") {
    const auto& f = fixture();
    PotentialField u = potential(f.rho);
    const double alpha = alpha_for_mass(u, total_mass(f.rho), EquationOfState::white_dwarf());
    CHECK(alpha == doctest::Approx(alpha_radial(f.star)).epsilon(2e-3));
    CHECK(mass_for_alpha(u, alpha, EquationOfState::white_dwarf()) ==
          doctest::Approx(total_mass(f.rho)).epsilon(1e-10));
    CHECK_THROWS_AS(alpha_for_mass(u, 1e3, EquationOfState::white_dwarf()), MassUnreachable);
}

TEST_CASE("scf at kappa = 0 reproduces the radial star") {
    const auto& f = fixture();
    ScfProblem p;
    p.mass = f.star.M();
    p.centrifugal.assign(f.grid.nr(), 0.0);
    const ScfResult r = scf_solve(f.rho, p);
    const double rho_max = max_value(f.rho.values);
    CHECK(sup_diff(r.point.rho, f.rho) <= 2e-3 * rho_max);
    CHECK(r.point.residual <= 1e-7);
    CHECK(r.point.mass == doctest::Approx(p.mass).epsilon(1e-10));
    CHECK(r.point.alpha == doctest::Approx(alpha_radial(f.star)).epsilon(1e-3));
    CHECK(r.point.r_eq == doctest::Approx(r.point.r_pole).epsilon(1e-3));
    CHECK(r.history.back() <= 1e-7);
    for (double v : r.point.rho.values)
        REQUIRE(v >= 0.0);

    // Basin: a perturbed start reaches the same fixed point.
    DensityField start = f.rho;
    for (std::size_t i = 0; i < start.values.size(); ++i)
        start.values[i] *= 1.0 + 0.1 * std::cos(0.3 * static_cast<double>(i));
    const ScfResult q = scf_solve(start, p);
    CHECK(sup_diff(q.point.rho, r.point.rho) <= 1e-5 * rho_max);
}

TEST_CASE("scf input validation") {
    const auto& f = fixture();
    ScfProblem p;
    p.mass = 2.0 * f.star.M();
    p.centrifugal.assign(f.grid.nr(), 0.0);
    CHECK_THROWS_AS(scf_solve(f.rho, p), DomainError);
    p.mass = f.star.M();
    ScfConfig c;
    c.damping = 0.0;
    CHECK_THROWS_AS(scf_solve(f.rho, p, c), DomainError);
    c = ScfConfig{};
    c.max_iter = 3;
    try {
        scf_solve(f.rho, p, c);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        CHECK(e.history().size() == 3);
        CHECK(e.last().iterations == 3);
    }
    c = ScfConfig{};
    c.guard_n = 1.0;  // margin must exceed 1, impossible for this star
    CHECK_THROWS_AS(scf_solve(f.rho, p, c), GuardViolation);
    DensityField neg = f.rho;
    neg.values[5] = -1.0;
    CHECK_THROWS_AS(scf_solve(neg, p), DomainError);
}

TEST_CASE("small rotation flattens the star") {
    const auto& f = fixture();
    const auto prof = RotationProfile::inverse_square();
    ScfProblem p0;
    p0.mass = f.star.M();
    p0.centrifugal.assign(f.grid.nr(), 0.0);
    const BranchPoint base = scf_solve(f.rho, p0).point;
    const double kappa = std::sqrt(0.05 * std::abs(base.alpha) / prof.sup_j());
    const ScfResult r = scf_solve(base.rho, rotating(f.grid, base.mass, kappa, prof));
    CHECK(r.point.r_eq > r.point.r_pole);
    CHECK(r.point.margin > 0.0);
    CHECK(r.point.margin == doctest::Approx(-(r.point.alpha + kappa * kappa * 0.5)));
}

TEST_CASE("sweep defect turns a density into an exact fixed point") {
    const auto& f = fixture();
    ScfProblem p;
    p.mass = total_mass(f.rho);
    p.centrifugal.assign(f.grid.nr(), 0.0);
    p.target_shift = sweep_defect(f.rho, p);
    CHECK(integrate(f.grid, p.target_shift) == doctest::Approx(0.0).epsilon(1e-9).scale(p.mass));
    const ScfResult r = scf_solve(f.rho, p);
    CHECK(r.point.iterations == 1);
}

TEST_CASE("branch: trivial schedule and invariants") {
    BranchConfig cfg;
    const BranchPoint start = radial_start(1.0, cfg, 64);
    const auto prof = RotationProfile::inverse_square();
    const BranchReport single = continue_branch(start, {0.0}, prof, cfg);
    REQUIRE(single.points.size() == 1);
    CHECK(single.points[0].kappa == 0.0);
    CHECK(sup_diff(single.points[0].rho, start.rho) == 0.0);
    CHECK(single.reason == Termination::ScheduleExhausted);

    const double k2max = 0.3 * std::abs(start.alpha) / prof.sup_j();
    std::vector<double> sched;
    for (int i = 1; i <= 6; ++i)
        sched.push_back(std::sqrt(k2max * i / 6.0));
    const BranchReport rep = continue_branch(start, sched, prof, cfg);
    REQUIRE(rep.points.size() == 7);
    CHECK(rep.reason == Termination::ScheduleExhausted);
    CHECK(rep.guard_n == doctest::Approx(10.0 / start.margin));
    CHECK(rep.support_audit_passed);
    double prev = 0.0;
    for (const auto& p : rep.points) {
        CHECK(p.mass == doctest::Approx(start.mass).epsilon(1e-8));
        CHECK(p.residual <= 1e-5);
        CHECK(p.margin > 0.0);
        CHECK(p.r_eq >= p.r_pole);
        CHECK(p.r_eq / p.r_pole >= prev);
        prev = p.r_eq / p.r_pole;
    }
}

TEST_CASE("branch continuity: halving the step at least roughly halves the jump") {
    BranchConfig cfg;
    const BranchPoint start = radial_start(1.0, cfg, 64);
    const auto prof = RotationProfile::inverse_square();
    const double k2max = 0.2 * std::abs(start.alpha) / prof.sup_j();
    auto max_jump = [&](int steps) {
        std::vector<double> sched;
        for (int i = 1; i <= steps; ++i)
            sched.push_back(std::sqrt(k2max * i / steps));
        const BranchReport rep = continue_branch(start, sched, prof, cfg);
        double j = 0.0;
        for (std::size_t i = 1; i < rep.points.size(); ++i)
            j = std::max(j, sup_diff(rep.points[i].rho, rep.points[i - 1].rho));
        return j;
    };
    const double coarse = max_jump(3), fine = max_jump(6);
    CHECK(fine <= 0.55 * coarse);
}

TEST_CASE("branch: the guard ends the branch") {
    BranchConfig cfg;
    const BranchPoint start = radial_start(1.0, cfg, 64);
    const auto prof = RotationProfile::inverse_square();
    // A strict guard: 1/N is just below the start margin.
    const double n = 1.0 / (0.95 * start.margin);
    const double k2 = 0.6 * std::abs(start.alpha) / prof.sup_j();
    const BranchReport rep = continue_branch(start, {std::sqrt(0.5 * k2), std::sqrt(k2)}, prof, cfg, n);
    CHECK(rep.reason == Termination::GuardViolation);
    for (const auto& p : rep.points)
        CHECK(p.margin > 1.0 / n);
}

TEST_CASE("termination names") {
    CHECK(to_string(Termination::ScheduleExhausted) == "ScheduleExhausted");
    CHECK(to_string(Termination::DensityGrowth) == "DensityGrowth");
    CHECK(to_string(Termination::SupportGrowth) == "SupportGrowth");
    CHECK(to_string(Termination::GuardViolation) == "GuardViolation");
    CHECK(to_string(Termination::StepUnderflow) == "StepUnderflow");
}

TEST_CASE("support radius") {
    const AxisymGrid g(11, 11, 1.0, 1.0);
    DensityField f(g);
    CHECK(support_radius(f) == 0.0);
    f.at(3, 4) = 1e-3;
    CHECK(support_radius(f) == doctest::Approx(0.5));
}

}
