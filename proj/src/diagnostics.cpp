#include "rotstar/diagnostics.hpp"

#include "rotstar/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rotstar {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
using Gauss = boost::math::quadrature::gauss<double, 10>;

} // namespace

EnergyReport energy_radial(const RadialSolution& sol) {
    EnergyReport rep;
    if (sol.empty())
        return rep;
    const EquationOfState& eos = sol.eos();
    const auto& samples = sol.samples();
    const double R = sol.R();

    rep.Hint = kFourPi * sol.integrate([&](double r) { return eos.pressure_potential(sol.density_at(r)) * r * r; });
    rep.virial_rhs = kFourPi * sol.integrate([&](double r) {
        const double rho = sol.density_at(r);
        return (4.0 * eos.pressure_potential(rho) - 3.0 * rho * eos.enthalpy(rho)) * r * r;
    });
    rep.pressure_virial_lhs = 3.0 * kFourPi * sol.integrate([&](double r) { return eos.pressure(sol.density_at(r)) * r * r; });

    // U(r) = m(r)/r + 4 pi int_r^R rho s ds, with both pieces accumulated by
    // nested Gauss quadrature; D = (1/2) int rho U dx.
    auto mass_density = [&](double s) { return kFourPi * sol.density_at(s) * s * s; };
    auto shell_density = [&](double s) { return kFourPi * sol.density_at(s) * s; };
    const double shell_total = sol.integrate(shell_density);

    double m_left = 0.0;
    double q_left = 0.0;
    double half_D = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double lo = samples[i].r;
        const double hi = std::min(samples[i + 1].r, R);
        if (!(hi > lo))
            continue;
        auto integrand = [&](double r) {
            const double m = m_left + (r > lo ? Gauss::integrate(mass_density, lo, r) : 0.0);
            const double q = q_left + (r > lo ? Gauss::integrate(shell_density, lo, r) : 0.0);
            const double U = (r > 0.0 ? m / r : 0.0) + (shell_total - q);
            return sol.density_at(r) * U * r * r;
        };
        half_D += Gauss::integrate(integrand, lo, hi);
        m_left += Gauss::integrate(mass_density, lo, hi);
        q_left += Gauss::integrate(shell_density, lo, hi);
    }
    rep.D = 0.5 * kFourPi * half_D;

    rep.E = rep.Hint - rep.D;
    rep.virial_residual = std::abs(rep.E - rep.virial_rhs);
    rep.pressure_residual = std::abs(rep.pressure_virial_lhs - rep.D);
    if (!std::isfinite(rep.E) || !std::isfinite(rep.virial_rhs))
        throw NumericsError("energy_radial: non-finite quadrature result");
    return rep;
}

EnergyDerivativeCheck dE_da_check(double a, double delta, const RadialConfig& cfg) {
    if (!(a > 0.0))
        throw DomainError("dE_da_check: a must be positive");
    if (!(delta > 0.0 && delta < 0.5))
        throw DomainError("dE_da_check: delta must lie in (0, 0.5)");
    const double E_plus = energy_radial(solve_radial(a * (1.0 + delta), cfg)).E;
    const double E_minus = energy_radial(solve_radial(a * (1.0 - delta), cfg)).E;
    const RadialSolution base = solve_radial(a, cfg);
    const VariationalSolution var = solve_variational(base);

    EnergyDerivativeCheck out;
    out.alpha = alpha_radial(base);
    out.lhs = (E_plus - E_minus) / (2.0 * a * delta);
    out.rhs = out.alpha * var.mass_derivative_integral;
    out.rel_err = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
    return out;
}

double weighted_norm(const DensityField& f, double s) {
    if (!(s > 3.0))
        throw DomainError("weighted_norm: exponent must exceed 3");
    const AxisymGrid& g = f.grid;
    double best = 0.0;
    for (std::size_t i = 0; i < g.nr(); ++i) {
        for (std::size_t k = 0; k < g.nz(); ++k) {
            const double v = std::abs(f.at(i, k));
            if (v == 0.0)
                continue;
            const double x2 = g.r(i) * g.r(i) + g.zeta(k) * g.zeta(k);
            best = std::max(best, std::pow(1.0 + x2, 0.5 * s) * v);
        }
    }
    return best;
}

} // namespace rotstar
