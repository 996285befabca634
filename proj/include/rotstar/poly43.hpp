#pragma once

// The pure 4/3 polytrope written with u = rho^{1/3}: the ball solution u0 of
// Delta u0 + 4 pi u0^3 = 0 on the unit ball, its equal-mass scaling family,
// the kernel function v = u0 + r u0', and a fixed-mass SCF probe under uniform
// rotation.

#include "rotstar/continuation.hpp"
#include "rotstar/grid.hpp"
#include "rotstar/radial.hpp"

#include <vector>

namespace rotstar {

struct BallSolution {
    RadialSolution radial;   ///< w = r u0 on [0, 1]
    double center = 0.0;     ///< u0(0), also the alpha of the unscaled member
    double surface_slope = 0.0;  ///< u0'(1)
    double mass = 0.0;       ///< int_{B_1} u0^3 dx = -u0'(1)
    /// max_r |w'(r) - w'(0) + int_0^r 4 pi s u0^3 ds| / u0(0): the integrated
    /// form of the structure equation checked on the stored samples.
    double residual = 0.0;
};

/// Secant shooting on the central value until the first zero sits at r = 1.
BallSolution solve_u0(double tol = 1e-10);

/// rho^alpha(x) = (alpha/alpha0)^3 rho0((alpha/alpha0) x) at spherical radius s.
double scaled_density(const BallSolution& base, double alpha, double s);
/// rho^alpha on a grid.
DensityField scaling_family(double alpha, const BallSolution& base, const AxisymGrid& grid);
/// int rho^alpha dx by adaptive quadrature over its support [0, alpha0 / alpha].
double scaled_mass(double alpha, const BallSolution& base);
/// d rho^alpha / d alpha at alpha0, i.e. 3 u0^2 v / alpha0, on a grid.
DensityField scaling_mode(const BallSolution& base, const AxisymGrid& grid);

struct KernelReport {
    std::vector<double> r;
    std::vector<double> v;          ///< v = u0 + r u0' = w'
    double v_center = 0.0;
    double v_surface = 0.0;
    /// |v'(1)| = 4 pi u0(1)^3 at the located surface.
    double dv_surface = 0.0;
    /// max |v - u0(0) z / r| / u0(0) with z solving the linearized equation independently.
    double linearized_residual = 0.0;
    double moment0 = 0.0;           ///< int_{B_1} u0^2 v dx
    double moment0_abs = 0.0;       ///< int_{B_1} u0^2 |v| dx
    double moment2 = 0.0;           ///< int_{B_1} u0^2 v |x|^2 dx
    double moment2_identity = 0.0;  ///< -(8 pi / 3) int_0^1 r^4 u0^3 dr
    int sign_changes = 0;
};

KernelReport kernel_checks(const BallSolution& base);

struct ProbeConfig {
    ScfConfig scf;
    std::size_t nodes = 96;
    /// Domain [0, domain]^2 in units of the star radius, masked to the ball of that radius.
    double domain = 2.0;
    /// Central value of the white-dwarf control star.
    double control_a = 1.0;
    /// Shift every sweep target by the kappa = 0 defect of the start density,
    /// so that the discretized start is an exact fixed point without rotation and
    /// only the rotation term can keep the iteration from converging.
    bool defect_correction = true;
    ProbeConfig() {
        scf.max_iter = 400;
        scf.residual_tol = 1e-7;
    }
};

struct ProbeRun {
    bool converged = false;
    double final_residual = 0.0;
    double alpha = 0.0;
    int iterations = 0;
    std::vector<double> history;
};

struct ProbeReport {
    double kappa = 0.0;
    ProbeRun poly;
    ProbeRun control;
    /// Shift along the scaling family, <rho_end - rho_start, m> / <m, m> with m = d rho^alpha / d alpha.
    double alpha_drift = 0.0;
    /// Projections of the successive iterate increments on the normalized mode.
    std::vector<double> drift_history;
    /// Residual stuck above 10 x the tolerance.
    bool plateau = false;
    double residual_tol = 0.0;
    bool defect_correction = false;
    /// The same 4/3 run at kappa = 0 without defect correction: the level set by
    /// discretization alone.
    ProbeRun uncorrected_baseline;
};

/// Fixed-mass SCF with the 4/3 polytrope, the potential anchored at the origin
/// and a uniform rotation term kappa r^2, started from rho0 on the ball of radius
/// 2; the same run with the white-dwarf EOS serves as control.  The target mass
/// is the grid mass of the start density.
ProbeReport degeneracy_probe(double kappa, const ProbeConfig& cfg = {});

} // namespace rotstar
