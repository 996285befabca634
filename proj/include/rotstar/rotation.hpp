#pragma once

#include <cmath>

// Boost 1.74's pchip calls unqualified isnan.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rotstar {

/// Angular velocity profile omega(s) about the x3 axis (the rotation is kappa * omega)
/// together with its cumulative centrifugal potential j(r) = int_0^r s omega(s)^2 ds.
class RotationProfile {
public:
    enum class Kind { InverseSquare, Uniform, Table, Expression };

    /// omega = (1 + s^2)^{-1}
    static RotationProfile inverse_square();
    /// omega = 1
    static RotationProfile uniform();
    /// Named built-ins: "inverse-square", "uniform", "step" (indicator of [0,1]),
    /// "gaussian" (omega = exp(-s^2/2)).
    static RotationProfile from_name(const std::string& name);
    /// Monotone-cubic (PCHIP) interpolation of tabulated (s, omega), at least 4 rows,
    /// s strictly increasing and omega >= 0.  Beyond the table a power law fitted
    /// over the last decade is used.
    static RotationProfile from_table(std::vector<double> s, std::vector<double> omega);
    /// Two-column CSV "s,omega"; '#' comments and a non-numeric header line are skipped.
    static RotationProfile from_csv(std::istream& in);
    static RotationProfile from_csv_file(const std::string& path);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    double omega(double s) const;
    /// log(omega(s)^2), -inf where omega vanishes; stays finite where omega^2 underflows.
    double log_omega2(double s) const;
    double j(double r) const;
    /// sup_r j(r), +inf when s omega^2 is not integrable.
    double sup_j() const;
    /// sup_j - j(r) evaluated without cancellation; +inf when sup_j is infinite.
    double j_tail(double r) const;
    /// True when values beyond the tabulated range come from the fitted tail.
    bool extrapolates_beyond(double r) const;

private:
    enum class Builtin { InverseSquare, Uniform, Step, Gaussian, None };

    struct Table {
        std::vector<double> s;
        std::vector<double> omega;
        std::vector<double> j_knots;
        std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline;
        bool zero_tail = false;
        double tail_coeff = 0.0;  ///< omega ~ tail_coeff * s^tail_power beyond s.back()
        double tail_power = 0.0;
    };

    RotationProfile(Kind kind, Builtin builtin, std::string name) : kind_(kind), builtin_(builtin), name_(std::move(name)) {}

    double table_omega(double s) const;
    double table_j(double r) const;
    double table_tail_integral(double from, double to) const;

    Kind kind_;
    Builtin builtin_;
    std::string name_;
    std::optional<Table> table_;
};

/// Verdict on the three conditions a profile must satisfy for the continuation
/// theory: s omega^2 in L^1, omega^2 not compactly supported, and
/// r (sup j - j(r)) -> 0.
struct AdmissibilityVerdict {
    bool integrable = false;
    bool not_compactly_supported = false;
    bool tail_decays = false;
    bool admissible = false;
    bool inconclusive = false;
    bool extrapolated = false;
    /// Local power-law exponent q of s omega^2 ~ s^q at r_max.
    double tail_exponent = 0.0;
    double sup_j_estimate = 0.0;
    /// r (sup j - j(r)) at r = 10, 100, 1000.
    std::vector<double> decay_samples;
    std::vector<std::string> reasons;
};

AdmissibilityVerdict check_admissible(const RotationProfile& profile, double r_max = 1e3);

} // namespace rotstar
