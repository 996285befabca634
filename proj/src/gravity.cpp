#include "rotstar/gravity.hpp"

#include "rotstar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace rotstar {

namespace {

void check_order(int order) {
    if (order < 0 || order % 2 != 0)
        throw DomainError("multipole order must be even and non-negative");
}

void check_support(const DensityField& rho) {
    const AxisymGrid& g = rho.grid;
    for (std::size_t k = 0; k < g.nz(); ++k)
        if (rho.at(g.nr() - 1, k) > 0.0)
            throw DomainOverflow("density reaches the outer r boundary");
    for (std::size_t i = 0; i < g.nr(); ++i)
        if (rho.at(i, g.nz() - 1) > 0.0)
            throw DomainOverflow("density reaches the outer zeta boundary");
}

// P_0, P_2, ..., P_order at x, written to out[0..order/2].
void even_legendre(int order, double x, double* out) {
    double p_prev = 1.0;  // P_{n-1}
    double p = x;         // P_n
    out[0] = 1.0;
    for (int n = 1; n < order; ++n) {
        const double next = ((2.0 * n + 1.0) * x * p - n * p_prev) / (n + 1.0);
        p_prev = p;
        p = next;
        if ((n + 1) % 2 == 0)
            out[(n + 1) / 2] = p;
    }
}

// Even degrees kept at spherical radius s on a grid of spacing h: l <= s / h.
// Higher degrees are not resolved by the nodes on that shell and only add
// noise, while the true degree-l potential vanishes like s^l at the centre.
int degrees_resolved(int order, double s, double h) {
    const double lmax = std::min(static_cast<double>(order), std::floor(s / h));
    return static_cast<int>(lmax) / 2 + 1;
}

// The node sum of w rho / s over the grid misses a term c dr dz rho(0) from the
// 1/s singularity at the origin.  c depends only on dz/dr; it is measured with
// a Gaussian whose exact integral is known.
double origin_correction(double dr, double dz) {
    const double sigma = 16.0 * std::max(dr, dz);
    const auto nr = static_cast<std::size_t>(std::ceil(6.0 * sigma / dr)) + 1;
    const auto nz = static_cast<std::size_t>(std::ceil(6.0 * sigma / dz)) + 1;
    const AxisymGrid g(nr, nz, dr * static_cast<double>(nr - 1), dz * static_cast<double>(nz - 1));
    double sum = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
        double row = 0.0;
        for (std::size_t k = 0; k < nz; ++k) {
            const double s = std::hypot(g.r(i), g.zeta(k));
            if (s > 0.0)
                row += g.weight(i, k) * std::exp(-s * s / (sigma * sigma)) / s;
        }
        sum += row;
    }
    const double exact = 2.0 * std::numbers::pi * sigma * sigma;
    return (exact - sum) / (dr * dz);
}

struct Source {
    double s;
    double mu;
    double mass;  // weight * rho
};

std::vector<Source> collect_sources(const DensityField& rho) {
    const AxisymGrid& g = rho.grid;
    std::vector<Source> src;
    for (std::size_t i = 0; i < g.nr(); ++i)
        for (std::size_t k = 0; k < g.nz(); ++k) {
            const double m = g.weight(i, k) * rho.at(i, k);
            if (m == 0.0)
                continue;
            const double r = g.r(i);
            const double z = g.zeta(k);
            const double s = std::hypot(r, z);
            src.push_back({s, s > 0.0 ? z / s : 0.0, m});
        }
    std::stable_sort(src.begin(), src.end(), [](const Source& a, const Source& b) { return a.s < b.s; });
    return src;
}

// Kernel sum_l P_l(mu) P_l(mu') s_<^l / s_>^{l+1}; a source at equal radius
// counts as interior.
double pair_kernel(int order, int nl, double s, const double* pt, const Source& q, double* pq) {
    even_legendre(order, q.mu, pq);
    double acc = 0.0;
    if (q.s <= s) {
        const double ratio = q.s / s;
        const double r2 = ratio * ratio;
        double f = 1.0 / s;
        for (int l = 0; l < nl; ++l) {
            acc += pt[l] * pq[l] * f;
            f *= r2;
        }
    } else {
        const double ratio = s / q.s;
        const double r2 = ratio * ratio;
        double f = 1.0 / q.s;
        for (int l = 0; l < nl; ++l) {
            acc += pt[l] * pq[l] * f;
            f *= r2;
        }
    }
    return acc;
}

double direct_sum(const std::vector<Source>& src, int order, double h, double r, double zeta) {
    const int nl = order / 2 + 1;
    std::vector<double> pt(nl), pq(nl);
    const double s = std::hypot(r, zeta);
    if (s == 0.0) {
        double u = 0.0;
        for (const Source& q : src)
            if (q.s > 0.0)
                u += q.mass / q.s;
        return u;
    }
    even_legendre(order, zeta / s, pt.data());
    const int nlt = degrees_resolved(order, s, h);
    double u = 0.0;
    for (const Source& q : src)
        u += q.mass * pair_kernel(order, nlt, s, pt.data(), q, pq.data());
    return u;
}

double grid_spacing(const AxisymGrid& g) { return std::max(g.dr(), g.dz()); }

} // namespace

PotentialField potential(const DensityField& rho, int order) {
    check_order(order);
    check_support(rho);
    const AxisymGrid& g = rho.grid;
    PotentialField out(g);
    const std::vector<Source> src = collect_sources(rho);
    if (src.empty())
        return out;

    const int nl = order / 2 + 1;
    const std::size_t ns = src.size();
    // inner[j*nl + l] = sum_{i<j} m_i s_i^l P_l(mu_i)
    // outer[j*nl + l] = sum_{i>=j} m_i s_i^{-(l+1)} P_l(mu_i)
    std::vector<double> legendre(ns * nl);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < ns; ++i)
        even_legendre(order, src[i].mu, &legendre[i * nl]);

    std::vector<double> inner((ns + 1) * nl, 0.0);
    std::vector<double> outer((ns + 1) * nl, 0.0);
    for (std::size_t i = 0; i < ns; ++i) {
        const double s2 = src[i].s * src[i].s;
        double f = src[i].mass;
        for (int l = 0; l < nl; ++l) {
            inner[(i + 1) * nl + l] = inner[i * nl + l] + f * legendre[i * nl + l];
            f *= s2;
        }
    }
    for (std::size_t i = ns; i-- > 0;) {
        if (src[i].s == 0.0) {
            for (int l = 0; l < nl; ++l)
                outer[i * nl + l] = outer[(i + 1) * nl + l];
            continue;
        }
        const double inv2 = 1.0 / (src[i].s * src[i].s);
        double f = src[i].mass / src[i].s;
        for (int l = 0; l < nl; ++l) {
            outer[i * nl + l] = outer[(i + 1) * nl + l] + f * legendre[i * nl + l];
            f *= inv2;
        }
    }

    std::vector<double> radii(ns);
    for (std::size_t i = 0; i < ns; ++i)
        radii[i] = src[i].s;

    const std::size_t n = g.size();
    const double h = grid_spacing(g);
    const double origin_term = origin_correction(g.dr(), g.dz()) * g.dr() * g.dz() * rho.at(0, 0);
#pragma omp parallel
    {
        std::vector<double> pt(nl);
#pragma omp for schedule(static)
        for (std::size_t idx = 0; idx < n; ++idx) {
            const std::size_t i = idx / g.nz();
            const std::size_t k = idx % g.nz();
            const double r = g.r(i);
            const double z = g.zeta(k);
            const double s = std::hypot(r, z);
            // Sources with radius <= s are interior.
            const std::size_t j =
                static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), s) - radii.begin());
            if (s == 0.0) {
                out.values[idx] = outer[j * nl] + origin_term;
                continue;
            }
            even_legendre(order, z / s, pt.data());
            const int nlt = degrees_resolved(order, s, h);
            const double s2 = s * s;
            const double inv2 = 1.0 / s2;
            double fin = 1.0 / s;  // s^{-(l+1)}
            double fout = 1.0;     // s^l
            double u = 0.0;
            for (int l = 0; l < nlt; ++l) {
                u += pt[l] * (fin * inner[j * nl + l] + fout * outer[j * nl + l]);
                fin *= inv2;
                fout *= s2;
            }
            out.values[idx] = u;
        }
    }
    return out;
}

PotentialField potential_reference(const DensityField& rho, int order) {
    check_order(order);
    check_support(rho);
    const AxisymGrid& g = rho.grid;
    PotentialField out(g);
    const std::vector<Source> src = collect_sources(rho);
    const double h = grid_spacing(g);
    for (std::size_t i = 0; i < g.nr(); ++i)
        for (std::size_t k = 0; k < g.nz(); ++k)
            out.at(i, k) = direct_sum(src, order, h, g.r(i), g.zeta(k));
    out.at(0, 0) += origin_correction(g.dr(), g.dz()) * g.dr() * g.dz() * rho.at(0, 0);
    return out;
}

double potential_at(const DensityField& rho, double r, double zeta, int order) {
    check_order(order);
    if (!(r >= 0.0) || !std::isfinite(zeta))
        throw DomainError("potential_at: invalid point");
    const AxisymGrid& g = rho.grid;
    double u = direct_sum(collect_sources(rho), order, grid_spacing(g), r, std::abs(zeta));
    if (r == 0.0 && zeta == 0.0)
        u += origin_correction(g.dr(), g.dz()) * g.dr() * g.dz() * rho.at(0, 0);
    return u;
}

DensityField uniform_ball(const AxisymGrid& grid, double radius, double density, int subsamples) {
    if (!(radius > 0.0) || !(density >= 0.0) || subsamples < 1)
        throw DomainError("uniform_ball: invalid arguments");
    DensityField rho(grid);
    const double hr = 0.5 * grid.dr();
    const double hz = 0.5 * grid.dz();
    for (std::size_t i = 0; i < grid.nr(); ++i) {
        const double r0 = std::max(grid.r(i) - hr, 0.0);
        const double r1 = std::min(grid.r(i) + hr, grid.r_dom());
        for (std::size_t k = 0; k < grid.nz(); ++k) {
            const double z0 = std::max(grid.zeta(k) - hz, 0.0);
            const double z1 = std::min(grid.zeta(k) + hz, grid.z_dom());
            if (std::hypot(r1, z1) <= radius) {
                rho.at(i, k) = density;
                continue;
            }
            if (std::hypot(r0, z0) >= radius)
                continue;
            // Cylindrical volume fraction by midpoint subsampling.
            double inside = 0.0, total = 0.0;
            for (int a = 0; a < subsamples; ++a) {
                const double r = r0 + (a + 0.5) * (r1 - r0) / subsamples;
                for (int b = 0; b < subsamples; ++b) {
                    const double z = z0 + (b + 0.5) * (z1 - z0) / subsamples;
                    total += r;
                    if (r * r + z * z < radius * radius)
                        inside += r;
                }
            }
            rho.at(i, k) = density * inside / total;
        }
    }
    return rho;
}

double uniform_ball_potential(double s, double radius, double mass) {
    if (s >= radius)
        return mass / s;
    return mass * (3.0 * radius * radius - s * s) / (2.0 * radius * radius * radius);
}

namespace {

struct BallError {
    double max_rel = 0.0;
    double center = 0.0;
    double exterior = 0.0;
    double mass = 0.0;
};

BallError ball_error(std::size_t resolution, int order) {
    const double radius = 1.0;
    const AxisymGrid grid(resolution, resolution, 2.0 * radius, 2.0 * radius);
    const DensityField rho = uniform_ball(grid, radius);
    const double mass = 4.0 * std::numbers::pi / 3.0 * radius * radius * radius;
    const PotentialField u = potential(rho, order);
    BallError e;
    e.mass = total_mass(rho);
    for (std::size_t i = 0; i < grid.nr(); ++i)
        for (std::size_t k = 0; k < grid.nz(); ++k) {
            const double exact = uniform_ball_potential(std::hypot(grid.r(i), grid.zeta(k)), radius, mass);
            e.max_rel = std::max(e.max_rel, std::abs(u.at(i, k) - exact) / exact);
        }
    const double c_exact = uniform_ball_potential(0.0, radius, mass);
    e.center = std::abs(u.at(0, 0) - c_exact) / c_exact;
    const double x_exact = uniform_ball_potential(2.0 * radius, radius, mass);
    e.exterior = std::abs(potential_at(rho, 2.0 * radius, 0.0, order) - x_exact) / x_exact;
    return e;
}

} // namespace

SphereTestReport sphere_test(std::size_t resolution, int order) {
    if (resolution < 8)
        throw DomainError("sphere_test: resolution must be at least 8");
    SphereTestReport rep;
    rep.resolution = resolution;
    rep.order = order;
    const BallError fine = ball_error(resolution, order);
    const std::size_t coarse_res = resolution / 2;
    const BallError coarse = ball_error(coarse_res, order);
    rep.max_rel_err = fine.max_rel;
    rep.coarse_max_rel_err = coarse.max_rel;
    rep.center_rel_err = fine.center;
    rep.exterior_rel_err = fine.exterior;
    rep.mass = fine.mass;
    const double h_fine = 2.0 / static_cast<double>(resolution - 1);
    const double h_coarse = 2.0 / static_cast<double>(coarse_res - 1);
    rep.observed_order = std::log(coarse.max_rel / fine.max_rel) / std::log(h_coarse / h_fine);
    return rep;
}

} // namespace rotstar
