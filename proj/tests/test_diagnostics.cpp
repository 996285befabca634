#include "rotstar/diagnostics.hpp"
#include "rotstar/gravity.hpp"

#include <doctest.h>

#include <cmath>

using namespace rotstar;

TEST_SUITE("diagnostics") {

TEST_CASE("virial identities on a range of stars") {
    for (double a : {0.01, 0.5, 1.0, 2.0, 5.0, 100.0}) {
        CAPTURE(a);
        const EnergyReport r = energy_radial(solve_radial(a));
        CHECK(r.E == doctest::Approx(r.Hint - r.D).epsilon(1e-14));
        CHECK(r.virial_residual <= 1e-6 * std::abs(r.E));
        CHECK(r.pressure_residual <= 1e-6 * r.D);
        CHECK(r.D > 0.0);
        CHECK(r.Hint > 0.0);
    }
}

TEST_CASE("empty solution gives zero energies") {
    const EnergyReport r = energy_radial(RadialSolution{});
    CHECK(r.E == 0.0);
    CHECK(r.D == 0.0);
    CHECK(r.Hint == 0.0);
}

TEST_CASE("D against an independent shell quadrature") {
    // D = (1/2) int rho U dx with U(r) = M(r)/r + 4 pi int_r^R rho s ds.
    const RadialSolution s = solve_radial(1.0);
    const int n = 20000;
    const double h = s.R() / n;
    std::vector<double> mass(n + 1, 0.0), outer(n + 1, 0.0);
    auto rho = [&](int i) { return s.density_at(i * h); };
    for (int i = 1; i <= n; ++i)
        mass[i] = mass[i - 1] + 2.0 * M_PI * h * (rho(i - 1) * (i - 1) * (i - 1) + rho(i) * i * i) * h * h;
    for (int i = n - 1; i >= 0; --i)
        outer[i] = outer[i + 1] + 2.0 * M_PI * h * (rho(i) * i + rho(i + 1) * (i + 1)) * h;
    double d = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double u = mass[i] / (i * h) + outer[i];
        d += 0.5 * 4.0 * M_PI * rho(i) * u * (i * h) * (i * h) * h * (i == n ? 0.5 : 1.0);
    }
    CHECK(energy_radial(s).D == doctest::Approx(d).epsilon(1e-6));
}

TEST_CASE("energy derivative equals alpha times the mass derivative") {
    for (double a : {0.5, 1.0, 2.0}) {
        const EnergyDerivativeCheck c = dE_da_check(a, 1e-3);
        CHECK(c.rel_err <= 1e-3);
        CHECK(c.alpha < 0.0);
        CHECK((c.lhs > 0.0) == (c.rhs > 0.0));
    }
    const RadialSolution s = solve_radial(3.0);
    CHECK(alpha_radial(s) == doctest::Approx(-s.M() / s.R()));
}

TEST_CASE("weighted norm") {
    const AxisymGrid g(9, 9, 2.0, 2.0);
    DensityField f(g);
    CHECK(weighted_norm(f) == 0.0);
    f.at(0, 0) = 1.0;
    CHECK(weighted_norm(f) == doctest::Approx(1.0));
    f.at(4, 4) = 0.5;  // |x|^2 = 2
    CHECK(weighted_norm(f) == doctest::Approx(0.5 * 9.0));
    CHECK(weighted_norm(f, 6.0) == doctest::Approx(0.5 * 27.0));
    DensityField g2 = f;
    for (double& v : g2.values)
        v *= -3.0;
    CHECK(weighted_norm(g2) == doctest::Approx(3.0 * weighted_norm(f)));
    CHECK_THROWS(weighted_norm(f, 3.0));
}

}
