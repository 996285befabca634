#include "rotstar/errors.hpp"
#include "rotstar/gravity.hpp"

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <random>

using namespace rotstar;

namespace {

double max_rel(const PotentialField& a, const PotentialField& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        e = std::max(e, std::abs(a.values[i] - b.values[i]) / std::abs(b.values[i]));
    return e;
}

DensityField blob(const AxisymGrid& g, double cr, double cz, double w) {
    DensityField f(g);
    for (std::size_t i = 0; i < g.nr(); ++i)
        for (std::size_t k = 0; k < g.nz(); ++k) {
            const double q = ((g.r(i) - cr) * (g.r(i) - cr) + (g.zeta(k) - cz) * (g.zeta(k) - cz)) / (w * w);
            f.at(i, k) = q < 1.0 ? (1.0 - q) * (1.0 - q) : 0.0;
        }
    return f;
}

} // namespace

TEST_SUITE("gravity") {

TEST_CASE("uniform ball: centre and exterior") {
    const AxisymGrid g(129, 129, 2.0, 2.0);
    const DensityField ball = uniform_ball(g, 1.0);
    const PotentialField u = potential(ball);
    const double m = total_mass(ball);
    CHECK(m == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-3));
    CHECK(u.at(0, 0) == doctest::Approx(1.5 * m).epsilon(3e-3));
    CHECK(u.at(128, 0) == doctest::Approx(m / 2.0).epsilon(1e-3));
    CHECK(potential_at(ball, 5.0, 0.0) * 5.0 == doctest::Approx(m).epsilon(1e-3));
    CHECK(potential_at(ball, 3.0, 4.0) * 5.0 == doctest::Approx(m).epsilon(1e-3));
}

TEST_CASE("analytic uniform-ball potential") {
    CHECK(uniform_ball_potential(0.0, 2.0, 3.0) == doctest::Approx(1.5 * 3.0 / 2.0));
    CHECK(uniform_ball_potential(4.0, 2.0, 3.0) == doctest::Approx(0.75));
    CHECK(uniform_ball_potential(2.0, 2.0, 3.0) == doctest::Approx(1.5));
}

TEST_CASE("sphere test targets") {
    const SphereTestReport lo = sphere_test(64, 8);
    CHECK(lo.max_rel_err < 5e-3);
    const SphereTestReport hi = sphere_test(128, 16);
    CHECK(hi.max_rel_err < 1e-3);
    CHECK(hi.observed_order >= 1.8);
}

TEST_CASE("zero density") {
    const AxisymGrid g(17, 17, 1.0, 1.0);
    const PotentialField u = potential(DensityField(g));
    for (double v : u.values)
        CHECK(v == 0.0);
}

TEST_CASE("linearity and positivity") {
    const AxisymGrid g(65, 65, 2.0, 2.0);
    const DensityField a = blob(g, 0.3, 0.0, 0.6), b = blob(g, 0.0, 0.7, 0.4);
    DensityField s(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        s.values[i] = a.values[i] + b.values[i];
    const PotentialField ua = potential(a), ub = potential(b), us = potential(s);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(us.values[i] == doctest::Approx(ua.values[i] + ub.values[i]).epsilon(1e-12));
        CHECK(us.values[i] > 0.0);
    }
}

TEST_CASE("far-field monopole") {
    const AxisymGrid g(65, 65, 2.0, 2.0);
    const DensityField a = blob(g, 0.4, 0.3, 0.5);
    const double m = total_mass(a);
    const double support = std::hypot(0.9, 0.8);
    for (double ang : {0.0, 0.6, 1.2, 1.5}) {
        const double s = 5.0 * support;
        CHECK(potential_at(a, s * std::cos(ang), s * std::sin(ang)) * s == doctest::Approx(m).epsilon(1e-3));
    }
}

TEST_CASE("parallel kernel equals the serial reference and is thread-count independent") {
    const AxisymGrid g(41, 33, 2.0, 1.6);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DensityField f(g);
    for (std::size_t i = 0; i + 1 < g.nr(); ++i)
        for (std::size_t k = 0; k + 1 < g.nz(); ++k)
            f.at(i, k) = u(rng);
    const PotentialField ref = potential_reference(f, 12);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const PotentialField one = potential(f, 12);
    omp_set_num_threads(4);
    const PotentialField four = potential(f, 12);
    omp_set_num_threads(saved);
    CHECK(max_rel(one, ref) <= 1e-13);
    for (std::size_t i = 0; i < g.size(); ++i)
        REQUIRE(one.values[i] == four.values[i]);
}

TEST_CASE("errors") {
    const AxisymGrid g(17, 17, 1.0, 1.0);
    DensityField f(g);
    f.at(16, 3) = 1.0;
    CHECK_THROWS_AS(potential(f), DomainOverflow);
    DensityField h(g);
    h.at(3, 16) = 1.0;
    CHECK_THROWS_AS(potential(h), DomainOverflow);
    CHECK_THROWS_AS(potential(DensityField(g), 3), DomainError);
    CHECK_THROWS_AS(potential(DensityField(g), -2), DomainError);
}

}
