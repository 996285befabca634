#pragma once

// Axisymmetric, equatorially symmetric fields sampled on a uniform (r, zeta)
// grid covering the quarter plane [0, R_dom] x [0, Z_dom].  The mirror half
// zeta < 0 is implied.  Integrals use the trapezoidal rule in both directions
// with the cylindrical measure 2 pi r dr dzeta, doubled for the mirror half.
// The axis column gets weight dr^2/12 instead of zero, which keeps the rule
// second order for fields that do not vanish on the axis.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace rotstar {

class AxisymGrid {
public:
    AxisymGrid() = default;
    AxisymGrid(std::size_t nr, std::size_t nz, double r_dom, double z_dom);

    std::size_t nr() const noexcept { return nr_; }
    std::size_t nz() const noexcept { return nz_; }
    std::size_t size() const noexcept { return nr_ * nz_; }
    double r_dom() const noexcept { return r_dom_; }
    double z_dom() const noexcept { return z_dom_; }
    double dr() const noexcept { return dr_; }
    double dz() const noexcept { return dz_; }

    double r(std::size_t i) const noexcept { return static_cast<double>(i) * dr_; }
    double zeta(std::size_t k) const noexcept { return static_cast<double>(k) * dz_; }
    std::size_t index(std::size_t i, std::size_t k) const noexcept { return i * nz_ + k; }

    /// Quadrature weight of node (i, k) for integrals over all of R^3.
    double weight(std::size_t i, std::size_t k) const noexcept;
    const std::vector<double>& weights() const noexcept { return weights_; }

    bool operator==(const AxisymGrid& other) const noexcept {
        return nr_ == other.nr_ && nz_ == other.nz_ && r_dom_ == other.r_dom_ && z_dom_ == other.z_dom_;
    }

private:
    std::size_t nr_ = 0;
    std::size_t nz_ = 0;
    double r_dom_ = 0.0;
    double z_dom_ = 0.0;
    double dr_ = 0.0;
    double dz_ = 0.0;
    std::vector<double> weights_;
};

/// A scalar field on an AxisymGrid.  The tag keeps densities and potentials apart.
template <class Tag>
struct AxisymField {
    AxisymGrid grid;
    std::vector<double> values;

    AxisymField() = default;
    explicit AxisymField(AxisymGrid g) : grid(std::move(g)), values(grid.size(), 0.0) {}
    AxisymField(AxisymGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {}

    double& at(std::size_t i, std::size_t k) { return values[grid.index(i, k)]; }
    double at(std::size_t i, std::size_t k) const { return values[grid.index(i, k)]; }
};

struct DensityTag {};
struct PotentialTag {};
using DensityField = AxisymField<DensityTag>;
using PotentialField = AxisymField<PotentialTag>;

/// sum_nodes weight * value, accumulated row by row in a fixed order.
double integrate(const AxisymGrid& grid, const std::vector<double>& values);
inline double total_mass(const DensityField& rho) { return integrate(rho.grid, rho.values); }
double max_value(const std::vector<double>& values);

/// Bilinear resampling onto another grid; points outside the source grid get zero.
DensityField resample(const DensityField& rho, const AxisymGrid& target);

/// Snapshot CSV: '#' header lines with nr, nz, R_dom, Z_dom, then rows r,zeta,value.
void write_snapshot(std::ostream& out, const AxisymGrid& grid, const std::vector<double>& values,
                    const std::string& quantity);
template <class Tag>
void write_snapshot(std::ostream& out, const AxisymField<Tag>& f, const std::string& quantity) {
    write_snapshot(out, f.grid, f.values, quantity);
}
DensityField read_density_snapshot(std::istream& in);

} // namespace rotstar
