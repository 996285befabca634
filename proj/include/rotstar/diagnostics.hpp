#pragma once

#include "rotstar/grid.hpp"
#include "rotstar/radial.hpp"

namespace rotstar {

/// Energy bookkeeping of one radial star.
///
/// E = Hint - D with Hint = int H(rho) dx and D = (1/2) int int rho rho / |x - y|.
/// For an equilibrium the virial identity gives E = int (4H - 3 rho h) dx and
/// 3 int p dx = D; the two residuals measure how well a profile satisfies them.
struct EnergyReport {
    double E = 0.0;
    double Hint = 0.0;
    double D = 0.0;
    double virial_rhs = 0.0;
    double pressure_virial_lhs = 0.0;
    double virial_residual = 0.0;   ///< |E - virial_rhs|
    double pressure_residual = 0.0; ///< |3 int p - D|
};

/// An empty (default constructed) solution stands for rho = 0 and yields all zeros.
EnergyReport energy_radial(const RadialSolution& sol);

/// alpha(a) = -M(a)/R(a): the constant in h(rho) = U + alpha inside a static star.
inline double alpha_radial(const RadialSolution& sol) { return -sol.M() / sol.R(); }

struct EnergyDerivativeCheck {
    double lhs = 0.0;   ///< centered difference of E over a(1 +/- delta)
    double rhs = 0.0;   ///< alpha(a) M'(a)
    double rel_err = 0.0;
    double alpha = 0.0;
};

/// dE/da against alpha M'(a).
EnergyDerivativeCheck dE_da_check(double a, double delta, const RadialConfig& cfg = {});

/// sup over grid nodes of (1 + |x|^2)^{s/2} |f(x)|, s > 3.
double weighted_norm(const DensityField& f, double s = 4.0);

} // namespace rotstar
