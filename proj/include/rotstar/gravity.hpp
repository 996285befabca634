#pragma once

#include "rotstar/grid.hpp"

#include <cstddef>

namespace rotstar {

/// U(x) = int rho(y) / |x - y| dy for an axisymmetric, equatorially symmetric
/// density, via the Legendre expansion of the Green function truncated at
/// degree `order` (even degrees only).  Sources are sorted by spherical radius
/// and the interior/exterior moments are prefix/suffix sums, so each target
/// costs O(order) and the result is bitwise independent of the thread count.
/// Throws DomainOverflow if rho > 0 on the outer edge of the grid.
PotentialField potential(const DensityField& rho, int order = 16);

/// Same expansion evaluated as a direct double sum over (target, source)
/// pairs on one thread.  O(N^2 order); kept as a reference for tests and
/// benchmarks.
PotentialField potential_reference(const DensityField& rho, int order = 16);

/// Potential at an arbitrary point (cylindrical radius r, height zeta), which may
/// lie outside the grid.
double potential_at(const DensityField& rho, double r, double zeta, int order = 16);

/// Fills a ball of the given radius centred at the origin with constant density.
/// Nodes whose control volume straddles the surface get the volume fraction
/// estimated on a subsamples x subsamples lattice.
DensityField uniform_ball(const AxisymGrid& grid, double radius, double density = 1.0, int subsamples = 64);

/// Exact potential of a uniform ball of the given radius and mass at spherical radius s.
double uniform_ball_potential(double s, double radius, double mass);

struct SphereTestReport {
    std::size_t resolution = 0;
    int order = 0;
    double max_rel_err = 0.0;
    /// Same error on the half-resolution grid.
    double coarse_max_rel_err = 0.0;
    double observed_order = 0.0;
    /// Relative errors at the centre and at |x| = 2 * radius on the equator.
    double center_rel_err = 0.0;
    double exterior_rel_err = 0.0;
    double mass = 0.0;
};

/// Unit ball on [0, 2]^2 at resolution x resolution nodes, compared against the
/// analytic potential at every node; also run at resolution / 2 to estimate the
/// convergence order.
SphereTestReport sphere_test(std::size_t resolution = 128, int order = 16);

} // namespace rotstar
