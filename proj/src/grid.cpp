#include "rotstar/grid.hpp"

#include "rotstar/errors.hpp"
#include "rotstar/io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace rotstar {

AxisymGrid::AxisymGrid(std::size_t nr, std::size_t nz, double r_dom, double z_dom)
    : nr_(nr), nz_(nz), r_dom_(r_dom), z_dom_(z_dom) {
    if (nr < 3 || nz < 3)
        throw DomainError("AxisymGrid: need at least 3 nodes per direction");
    if (!(r_dom > 0.0) || !(z_dom > 0.0))
        throw DomainError("AxisymGrid: domain extents must be positive");
    dr_ = r_dom / static_cast<double>(nr - 1);
    dz_ = z_dom / static_cast<double>(nz - 1);

    weights_.resize(size());
    for (std::size_t i = 0; i < nr_; ++i) {
        // Trapezoid in r for the integrand r f(r); on the axis the end
        // correction -h^2/12 (r f)'(0) = -h^2/12 f(0) becomes a weight.
        double wr = i == 0 ? dr_ * dr_ / 12.0 : r(i) * dr_;
        if (i == nr_ - 1)
            wr *= 0.5;
        for (std::size_t k = 0; k < nz_; ++k) {
            double wz = dz_;
            if (k == 0 || k == nz_ - 1)
                wz *= 0.5;
            // 2 pi from the azimuth, 2 from the mirrored half-space
            weights_[index(i, k)] = 4.0 * std::numbers::pi * wr * wz;
        }
    }
}

double AxisymGrid::weight(std::size_t i, std::size_t k) const noexcept { return weights_[index(i, k)]; }

double integrate(const AxisymGrid& grid, const std::vector<double>& values) {
    const auto& w = grid.weights();
    double total = 0.0;
    for (std::size_t i = 0; i < grid.nr(); ++i) {
        double row = 0.0;
        for (std::size_t k = 0; k < grid.nz(); ++k) {
            const std::size_t idx = grid.index(i, k);
            row += w[idx] * values[idx];
        }
        total += row;
    }
    return total;
}

double max_value(const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values)
        m = std::max(m, v);
    return m;
}

DensityField resample(const DensityField& rho, const AxisymGrid& target) {
    const AxisymGrid& src = rho.grid;
    DensityField out(target);
    for (std::size_t i = 0; i < target.nr(); ++i) {
        const double r = target.r(i);
        if (r > src.r_dom())
            continue;
        const double fi = std::min(r / src.dr(), static_cast<double>(src.nr() - 1));
        const std::size_t i0 = std::min(static_cast<std::size_t>(fi), src.nr() - 2);
        const double tr = fi - static_cast<double>(i0);
        for (std::size_t k = 0; k < target.nz(); ++k) {
            const double z = target.zeta(k);
            if (z > src.z_dom())
                continue;
            const double fk = std::min(z / src.dz(), static_cast<double>(src.nz() - 1));
            const std::size_t k0 = std::min(static_cast<std::size_t>(fk), src.nz() - 2);
            const double tz = fk - static_cast<double>(k0);
            out.at(i, k) = (1.0 - tr) * (1.0 - tz) * rho.at(i0, k0) + tr * (1.0 - tz) * rho.at(i0 + 1, k0) +
                           (1.0 - tr) * tz * rho.at(i0, k0 + 1) + tr * tz * rho.at(i0 + 1, k0 + 1);
        }
    }
    return out;
}

void write_snapshot(std::ostream& out, const AxisymGrid& grid, const std::vector<double>& values,
                    const std::string& quantity) {
    out << "# quantity = " << quantity << '\n';
    out << "# nr = " << grid.nr() << '\n';
    out << "# nz = " << grid.nz() << '\n';
    out << "# R_dom = " << format_double(grid.r_dom()) << '\n';
    out << "# Z_dom = " << format_double(grid.z_dom()) << '\n';
    out << "r,zeta," << quantity << '\n';
    for (std::size_t i = 0; i < grid.nr(); ++i)
        for (std::size_t k = 0; k < grid.nz(); ++k)
            out << format_double(grid.r(i)) << ',' << format_double(grid.zeta(k)) << ','
                << format_double(values[grid.index(i, k)]) << '\n';
}

DensityField read_density_snapshot(std::istream& in) {
    std::map<std::string, std::string> meta;
    std::string line;
    std::vector<double> values;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t#");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            meta[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 3)
            throw NumericsError("snapshot: expected 3 columns, got '" + line + "'");
        values.push_back(std::stod(cells[2]));
    }
    for (const char* key : {"nr", "nz", "R_dom", "Z_dom"})
        if (!meta.count(key))
            throw NumericsError(std::string("snapshot: missing header field ") + key);
    const AxisymGrid grid(std::stoul(meta["nr"]), std::stoul(meta["nz"]), std::stod(meta["R_dom"]),
                          std::stod(meta["Z_dom"]));
    if (values.size() != grid.size())
        throw NumericsError("snapshot: row count does not match nr*nz");
    return DensityField(grid, std::move(values));
}

} // namespace rotstar
