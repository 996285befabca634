#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library: the white-dwarf pressure and pressure
// potential come from adaptive quadrature of their defining integrals, and the
// Lane-Emden constants from a fixed-step classical RK4 integration.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <numbers>

namespace oracle {

inline constexpr double kFourPi = 4.0 * std::numbers::pi;

template <class F>
double quad(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-15);
}

/// p(s) = int_0^{s^{1/3}} t^4 / sqrt(1 + t^2) dt.
inline double wd_pressure(double s) {
    return quad([](double t) { return t * t * t * t / std::sqrt(1.0 + t * t); }, 0.0, std::cbrt(s));
}

/// h(s) = sqrt(1 + s^{2/3}) - 1 written without cancellation.
inline double wd_enthalpy(double s) {
    const double q = std::cbrt(s) * std::cbrt(s);
    return q / (std::sqrt(1.0 + q) + 1.0);
}

/// H(s) = int_0^s h.
/// Tanh-sinh copes with the s^{2/3} behaviour at the origin over long ranges.
inline double wd_pressure_potential(double s) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([](double x) { return wd_enthalpy(x); }, 0.0, s);
}

struct LaneEmden {
    double xi1 = 0.0;
    double m1 = 0.0;  ///< xi1^2 |theta'(xi1)|
};

/// theta'' + 2 theta' / xi + theta^n = 0 by classical RK4 with step h, started
/// from the series theta = 1 - xi^2/6 + n xi^4/120 at xi = h.  The zero is
/// located by cubic Hermite interpolation on the last step.
inline LaneEmden lane_emden(double n, double h = 2e-5) {
    using S = std::array<double, 2>;
    auto f = [n](double x, const S& y) -> S {
        const double th = std::max(y[0], 0.0);
        return {y[1], -std::pow(th, n) - 2.0 * y[1] / x};
    };
    double x = h;
    S y{1.0 - x * x / 6.0 + n * std::pow(x, 4) / 120.0, -x / 3.0 + n * std::pow(x, 3) / 30.0};
    for (;;) {
        const S k1 = f(x, y);
        const S y2{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
        const S k2 = f(x + 0.5 * h, y2);
        const S y3{y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
        const S k3 = f(x + 0.5 * h, y3);
        const S y4{y[0] + h * k3[0], y[1] + h * k3[1]};
        const S k4 = f(x + h, y4);
        const S yn{y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                   y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
        if (yn[0] <= 0.0) {
            // Hermite cubic through (x, y0, y1) and (x + h, yn0, yn1), solved by bisection.
            auto p = [&](double t) {
                const double t2 = t * t, t3 = t2 * t;
                return (2 * t3 - 3 * t2 + 1) * y[0] + (t3 - 2 * t2 + t) * h * y[1] + (-2 * t3 + 3 * t2) * yn[0] +
                       (t3 - t2) * h * yn[1];
            };
            double lo = 0.0, hi = 1.0;
            for (int i = 0; i < 100; ++i) {
                const double mid = 0.5 * (lo + hi);
                (p(mid) > 0.0 ? lo : hi) = mid;
            }
            const double t = 0.5 * (lo + hi);
            const double xi1 = x + t * h;
            const double dth = y[1] + t * (yn[1] - y[1]);  // linear in the step is enough for 1e-9
            LaneEmden r;
            r.xi1 = xi1;
            r.m1 = xi1 * xi1 * std::abs(dth);
            return r;
        }
        y = yn;
        x += h;
    }
}

/// Chandrasekhar mass in code units from the n = 3 constants.
inline double chandrasekhar_mass() {
    const LaneEmden le = lane_emden(3.0);
    return le.m1 / std::sqrt(kFourPi);
}

/// Small-a mass prefactor: M(a) ~ C a^{3/4} with C = 2^{-3/4} m1(3/2) / sqrt(4 pi).
inline double small_a_prefactor() { return std::pow(2.0, -0.75) * lane_emden(1.5).m1 / std::sqrt(kFourPi); }

/// Zero of the a -> 0 rescaled problem: xi1(3/2) / (2^{3/4} sqrt(4 pi)).
inline double small_a_radius() { return lane_emden(1.5).xi1 / (std::pow(2.0, 0.75) * std::sqrt(kFourPi)); }

} // namespace oracle
