#include "rotstar/rotation.hpp"

#include "rotstar/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rotstar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// s * omega^2 is a degree-7 polynomial on every PCHIP interval; four Gauss
// points integrate it exactly.
using Gauss4 = boost::math::quadrature::gauss<double, 4>;

} // namespace

RotationProfile RotationProfile::inverse_square() {
    return RotationProfile(Kind::InverseSquare, Builtin::InverseSquare, "inverse-square");
}

RotationProfile RotationProfile::uniform() { return RotationProfile(Kind::Uniform, Builtin::Uniform, "uniform"); }

RotationProfile RotationProfile::from_name(const std::string& name) {
    if (name == "inverse-square")
        return inverse_square();
    if (name == "uniform")
        return uniform();
    if (name == "step")
        return RotationProfile(Kind::Expression, Builtin::Step, "step");
    if (name == "gaussian")
        return RotationProfile(Kind::Expression, Builtin::Gaussian, "gaussian");
    throw DomainError("unknown rotation profile '" + name + "'");
}

RotationProfile RotationProfile::from_table(std::vector<double> s, std::vector<double> omega) {
    if (s.size() != omega.size())
        throw DomainError("rotation table: column lengths differ");
    if (s.size() < 4)
        throw DomainError("rotation table: need at least 4 rows");
    if (!(s.front() >= 0.0))
        throw DomainError("rotation table: s must be non-negative");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(omega[i] >= 0.0) || !std::isfinite(omega[i]))
            throw DomainError("rotation table: omega must be finite and non-negative");
        if (i > 0 && !(s[i] > s[i - 1]))
            throw DomainError("rotation table: s must be strictly increasing");
    }

    Table t;
    t.s = s;
    t.omega = omega;
    t.spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(s), std::move(omega));

    // Power-law tail from the last decade of positive samples.
    const double s_end = t.s.back();
    if (t.omega.back() == 0.0) {
        t.zero_tail = true;
    } else {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 0; i < t.s.size(); ++i) {
            if (t.s[i] >= 0.1 * s_end && t.s[i] > 0.0 && t.omega[i] > 0.0) {
                const double x = std::log(t.s[i]);
                const double y = std::log(t.omega[i]);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++n;
            }
        }
        if (n >= 2 && sxx * n - sx * sx > 0.0) {
            t.tail_power = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            t.tail_coeff = std::exp((sy - t.tail_power * sx) / n);
        } else {
            t.tail_power = 0.0;
            t.tail_coeff = t.omega.back();
        }
        // Anchor the fit at the last sample so omega stays continuous.
        t.tail_coeff = t.omega.back() / std::pow(s_end, t.tail_power);
    }

    RotationProfile p(Kind::Table, Builtin::None, "table");
    p.table_ = std::move(t);
    Table& tab = *p.table_;
    tab.j_knots.resize(tab.s.size());
    tab.j_knots[0] = 0.5 * tab.omega[0] * tab.omega[0] * tab.s[0] * tab.s[0];
    auto integrand = [&tab](double x) {
        const double w = (*tab.spline)(x);
        return x * w * w;
    };
    for (std::size_t i = 1; i < tab.s.size(); ++i)
        tab.j_knots[i] = tab.j_knots[i - 1] + Gauss4::integrate(integrand, tab.s[i - 1], tab.s[i]);
    return p;
}

RotationProfile RotationProfile::from_csv(std::istream& in) {
    std::vector<double> s, omega;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double a = 0, b = 0;
        if (!(row >> a >> b)) {
            if (s.empty())
                continue;  // header
            throw DomainError("rotation table: malformed row '" + line + "'");
        }
        s.push_back(a);
        omega.push_back(b);
    }
    return from_table(std::move(s), std::move(omega));
}

RotationProfile RotationProfile::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DomainError("cannot open rotation table '" + path + "'");
    RotationProfile p = from_csv(in);
    p.name_ = path;
    return p;
}

double RotationProfile::table_omega(double s) const {
    const Table& t = *table_;
    if (s <= t.s.front())
        return t.omega.front();
    if (s <= t.s.back())
        return (*t.spline)(s);
    if (t.zero_tail)
        return 0.0;
    return t.tail_coeff * std::pow(s, t.tail_power);
}

double RotationProfile::table_tail_integral(double from, double to) const {
    const Table& t = *table_;
    if (t.zero_tail || to <= from)
        return 0.0;
    const double e = 2.0 * t.tail_power + 2.0;
    const double c2 = t.tail_coeff * t.tail_coeff;
    if (std::abs(e) < 1e-12)
        return c2 * std::log(to / from);
    return c2 * (std::pow(to, e) - std::pow(from, e)) / e;
}

double RotationProfile::table_j(double r) const {
    const Table& t = *table_;
    if (r <= t.s.front())
        return 0.5 * t.omega.front() * t.omega.front() * r * r;
    if (r >= t.s.back())
        return t.j_knots.back() + table_tail_integral(t.s.back(), r);
    const auto it = std::upper_bound(t.s.begin(), t.s.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - t.s.begin()) - 1;
    auto integrand = [&t](double x) {
        const double w = (*t.spline)(x);
        return x * w * w;
    };
    return t.j_knots[i] + Gauss4::integrate(integrand, t.s[i], r);
}

double RotationProfile::omega(double s) const {
    if (!(s >= 0.0))
        throw DomainError("omega: s must be non-negative");
    switch (builtin_) {
    case Builtin::InverseSquare:
        return 1.0 / (1.0 + s * s);
    case Builtin::Uniform:
        return 1.0;
    case Builtin::Step:
        return s <= 1.0 ? 1.0 : 0.0;
    case Builtin::Gaussian:
        return std::exp(-0.5 * s * s);
    case Builtin::None:
        break;
    }
    return table_omega(s);
}

double RotationProfile::log_omega2(double s) const {
    switch (builtin_) {
    case Builtin::InverseSquare:
        return -2.0 * std::log1p(s * s);
    case Builtin::Uniform:
        return 0.0;
    case Builtin::Step:
        return s <= 1.0 ? 0.0 : -kInf;
    case Builtin::Gaussian:
        return -s * s;
    case Builtin::None:
        break;
    }
    const Table& t = *table_;
    if (s > t.s.back()) {
        if (t.zero_tail)
            return -kInf;
        return 2.0 * std::log(t.tail_coeff) + 2.0 * t.tail_power * std::log(s);
    }
    const double w = table_omega(s);
    return w > 0.0 ? 2.0 * std::log(w) : -kInf;
}

double RotationProfile::j(double r) const {
    if (!(r >= 0.0))
        throw DomainError("j: r must be non-negative");
    switch (builtin_) {
    case Builtin::InverseSquare:
        return 0.5 * r * r / (1.0 + r * r);
    case Builtin::Uniform:
        return 0.5 * r * r;
    case Builtin::Step: {
        const double c = std::min(r, 1.0);
        return 0.5 * c * c;
    }
    case Builtin::Gaussian:
        return -0.5 * std::expm1(-r * r);
    case Builtin::None:
        break;
    }
    return table_j(r);
}

double RotationProfile::sup_j() const {
    switch (builtin_) {
    case Builtin::InverseSquare:
    case Builtin::Step:
    case Builtin::Gaussian:
        return 0.5;
    case Builtin::Uniform:
        return kInf;
    case Builtin::None:
        break;
    }
    const Table& t = *table_;
    if (t.zero_tail)
        return t.j_knots.back();
    const double e = 2.0 * t.tail_power + 2.0;
    if (e >= 0.0)
        return kInf;
    return t.j_knots.back() - t.tail_coeff * t.tail_coeff * std::pow(t.s.back(), e) / e;
}

double RotationProfile::j_tail(double r) const {
    if (!(r >= 0.0))
        throw DomainError("j_tail: r must be non-negative");
    switch (builtin_) {
    case Builtin::InverseSquare:
        return 0.5 / (1.0 + r * r);
    case Builtin::Uniform:
        return kInf;
    case Builtin::Step:
        return r >= 1.0 ? 0.0 : 0.5 * (1.0 - r * r);
    case Builtin::Gaussian:
        return 0.5 * std::exp(-r * r);
    case Builtin::None:
        break;
    }
    const double sup = sup_j();
    if (!std::isfinite(sup))
        return kInf;
    const Table& t = *table_;
    if (r >= t.s.back()) {
        if (t.zero_tail)
            return 0.0;
        const double e = 2.0 * t.tail_power + 2.0;
        return t.tail_coeff * t.tail_coeff * std::pow(r, e) / (-e);
    }
    return sup - table_j(r);
}

bool RotationProfile::extrapolates_beyond(double r) const { return table_ && r > table_->s.back(); }

AdmissibilityVerdict check_admissible(const RotationProfile& profile, double r_max) {
    AdmissibilityVerdict v;
    v.extrapolated = profile.extrapolates_beyond(r_max);

    auto log_f = [&profile](double s) { return std::log(s) + profile.log_omega2(s); };

    // omega^2 must stay positive arbitrarily far out.
    v.not_compactly_supported = true;
    for (double s : {r_max, 10.0 * r_max, 100.0 * r_max})
        if (!(profile.log_omega2(s) > -kInf))
            v.not_compactly_supported = false;

    const double lf_hi = log_f(r_max);
    const double lf_lo = log_f(0.1 * r_max);
    if (lf_hi > -kInf && lf_lo > -kInf)
        v.tail_exponent = (lf_hi - lf_lo) / std::log(10.0);
    else
        v.tail_exponent = -kInf;

    const double q = v.tail_exponent;
    const double j_max = profile.j(r_max);
    v.integrable = std::isfinite(j_max) && q < -1.0;
    if (v.integrable)
        v.sup_j_estimate = j_max + (q > -kInf ? std::exp(lf_hi) * r_max / (-q - 1.0) : 0.0);
    else
        v.sup_j_estimate = kInf;
    if (std::abs(q + 1.0) < 0.05)
        v.inconclusive = true;

    bool decreasing = true;
    double prev = kInf;
    for (double r : {10.0, 100.0, 1000.0}) {
        const double d = r * profile.j_tail(r);
        v.decay_samples.push_back(d);
        if (!(d < prev || d == 0.0))
            decreasing = false;
        prev = d;
    }
    v.tail_decays = v.integrable && q < -2.0 && decreasing;
    if (std::abs(q + 2.0) < 0.05)
        v.inconclusive = true;

    if (!v.integrable)
        v.reasons.emplace_back("sω² not integrable");
    if (!v.not_compactly_supported)
        v.reasons.emplace_back("ω²(s) is compactly supported");
    if (!v.tail_decays)
        v.reasons.emplace_back("r(sup j - j(r)) does not tend to 0");
    v.admissible = v.integrable && v.not_compactly_supported && v.tail_decays;
    return v;
}

} // namespace rotstar
