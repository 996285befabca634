#pragma once

// Non-rotating (spherical) stars.  With u = h(rho) the structure equation is
// Delta u + 4 pi h^{-1}(u) = 0; in the variable w = r u it becomes
//
//     w'' = -g(w, r),   g(w, r) = 4 pi r h^{-1}(w_+ / r),   w(0) = 0, w'(0) = a,
//
// and the surface R(a) is the first zero of w.  The mass is M = -R w'(R).

#include "rotstar/eos.hpp"
#include "rotstar/ode.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/interpolators/quintic_hermite.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rotstar {

struct RadialConfig {
    ode::Tolerances tol{};
    /// Integration starts at r = start_fraction * L, L the central length scale.
    double start_fraction = 1e-8;
    /// Give up looking for the surface beyond r = r_max_factor * L.
    double r_max_factor = 1e3;
    /// The surface is polished until |w(R)| <= surface_tol * a.
    double surface_tol = 1e-12;
};

/// g(w, r) = 4 pi r h^{-1}(w_+/r) for r > 0.
double g_rhs(double w, double r, const EquationOfState& eos);
/// dg/dw at fixed r.
double g_w(double w, double r, const EquationOfState& eos);
/// dg/dr at fixed w.
double g_r(double w, double r, const EquationOfState& eos);

struct RadialSample {
    double r;
    double w;
    double dw;
};

/// One solved non-rotating star.
class RadialSolution {
public:
    RadialSolution() = default;
    RadialSolution(double a, double R, EquationOfState eos, std::vector<RadialSample> samples,
                   RadialConfig cfg);

    double a() const noexcept { return a_; }
    double R() const noexcept { return R_; }
    /// M = -R w'(R).
    double M() const noexcept { return M_; }
    const EquationOfState& eos() const noexcept { return eos_; }
    const RadialConfig& config() const noexcept { return cfg_; }
    const std::vector<RadialSample>& samples() const noexcept { return samples_; }
    bool empty() const noexcept { return samples_.empty(); }

    /// Quintic Hermite interpolation of w through the stored samples (w, w', w'' = -g).
    /// Continued beyond R as the exterior solution M (1 - r / R).
    double w_at(double r) const;
    double dw_at(double r) const;
    /// u = h(rho) = w / r (limit a at r = 0); negative outside, continued harmonically.
    double u_at(double r) const;
    double density_at(double r) const;

    /// Largest |quintic - cubic| Hermite discrepancy at interval midpoints, relative to max w.
    double interpolation_error_estimate() const;

    /// M by direct quadrature, 4 pi int_0^R rho r^2 dr.
    double mass_by_quadrature() const;

    /// int_0^R f(r) dr, by Gauss-Legendre on every sample interval.
    double integrate(const std::function<double(double)>& f) const;

private:
    double a_ = 0.0;
    double R_ = 0.0;
    double M_ = 0.0;
    EquationOfState eos_ = EquationOfState::white_dwarf();
    RadialConfig cfg_{};
    std::vector<RadialSample> samples_;
    std::optional<boost::math::interpolators::quintic_hermite<std::vector<double>>> quintic_;
    std::optional<boost::math::interpolators::cubic_hermite<std::vector<double>>> cubic_;
};

/// Central length scale sqrt(a / (4 pi h^{-1}(a))).
double central_length_scale(double a, const EquationOfState& eos);

RadialSolution solve_radial(double a, const RadialConfig& cfg = {},
                            const EquationOfState& eos = EquationOfState::white_dwarf());

struct MassCurvePoint {
    double a = 0.0;
    double R = 0.0;
    double M = 0.0;
    double Mprime = 0.0;
    double E = 0.0;
    bool ok = false;
    std::string error;
};

/// Solves every grid point (in parallel); failed points are marked, not thrown.
std::vector<MassCurvePoint> mass_curve(const std::vector<double>& a_grid, const RadialConfig& cfg = {});

/// True when M is strictly increasing across the successful points.
bool is_mass_monotone(const std::vector<MassCurvePoint>& curve);

struct VariationalSample {
    double r;
    double z;
    double dz;
};

/// z = dw/da along a solved star; z'' + g_w(w, r) z = 0, z(0) = 0, z'(0) = 1.
struct VariationalSolution {
    std::vector<VariationalSample> samples;
    /// Every interior zero of z on (0, R), in increasing order.
    std::vector<double> sign_changes;
    /// First sign change (NaN when z never vanishes).
    double r0 = 0.0;
    /// x(r0) z'(r0) with x = r w'.
    double wronskian_lhs = 0.0;
    /// int_0^{r0} z (r g_r + 2 g) dr.
    double wronskian_rhs = 0.0;
    /// 4 pi int_0^R r z (h^{-1})'(u) dr  ( = M'(a) ).
    double mass_derivative_integral = 0.0;
    double z_surface = 0.0;
    double dz_surface = 0.0;
};

VariationalSolution solve_variational(const RadialSolution& base);

struct MassDerivative {
    /// Variational route, 4 pi int r z (h^{-1})'(u) dr.
    double value = 0.0;
    /// Surface-flux route, z(R) - R z'(R).
    double flux = 0.0;
    /// Centered difference of M over a(1 +/- delta), Richardson-extrapolated.
    double finite_difference = 0.0;
    double delta = 0.0;
    double rel_diff = 0.0;
    /// False when solver noise dominates the finite difference at any usable delta.
    bool fd_resolved = true;
};

struct MassDerivativeConfig {
    RadialConfig radial{};
    double delta = 1e-3;
    double agreement_tol = 1e-3;
};

/// M'(a) two ways; throws ConsistencyError on disagreement beyond 10x agreement_tol.
MassDerivative mass_derivative(double a, const MassDerivativeConfig& cfg = {});

struct RescaledSample {
    double x;
    double v;
    double dv;
};

/// v solves Delta v + 4 pi (2 v_+ + a v_+^2)^{3/2} = 0, v(0) = 1, v'(0) = 0.
struct RescaledSolution {
    double a = 0.0;
    double zero = 0.0;
    double dv_zero = 0.0;
    std::vector<RescaledSample> samples;
    /// max |v(x) - u(a^{-1/4} x)/a| / v(0) over samples; NaN for a = 0.
    double identity_error = 0.0;
};

RescaledSolution solve_rescaled(double a, const RadialConfig& cfg = {});

struct LaneEmdenResult {
    double n = 0.0;
    double xi1 = 0.0;
    /// xi1^2 |theta'(xi1)|
    double m1 = 0.0;
    double dtheta1 = 0.0;
};

/// theta'' + 2 theta'/xi + theta_+^n = 0, theta(0) = 1, theta'(0) = 0; n in (0, 5).
LaneEmdenResult lane_emden(double n, double rel_tol = 1e-13);

/// Theta(xi) along the Lane-Emden solution, for xi in [0, xi1].
double lane_emden_theta(double n, double xi, double rel_tol = 1e-13);

/// Chandrasekhar mass in code units, xi1^2 |theta'|_{n=3} / sqrt(4 pi).
double chandrasekhar_mass();

} // namespace rotstar
