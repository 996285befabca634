#include "rotstar/eos.hpp"

#include "rotstar/errors.hpp"

#include <cmath>
#include <sstream>

namespace rotstar {

namespace {

// Below this Fermi momentum the closed forms lose digits to cancellation and
// the binomial series is used instead.
constexpr double kSeriesCutoff = 0.25;
constexpr int kSeriesTerms = 18;

void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0)) {
        std::ostringstream msg;
        msg << what << ": argument must be non-negative, got " << v;
        throw DomainError(msg.str());
    }
}

// int_0^x t^4 (1+t^2)^{-1/2} dt = sum_k binom(-1/2,k) x^{5+2k} / (5+2k)
double wd_pressure_series(double x) {
    const double x2 = x * x;
    double coeff = 1.0;
    double power = x2 * x2 * x;
    double sum = 0.0;
    for (int k = 0; k < kSeriesTerms; ++k) {
        sum += coeff * power / (5.0 + 2.0 * k);
        coeff *= (-0.5 - k) / (k + 1.0);
        power *= x2;
    }
    return sum;
}

// 3 int_0^x t^2 (sqrt(1+t^2) - 1) dt = 3 sum_{k>=1} binom(1/2,k) x^{2k+3} / (2k+3)
double wd_potential_series(double x) {
    const double x2 = x * x;
    double coeff = 0.5;
    double power = x2 * x2 * x;
    double sum = 0.0;
    for (int k = 1; k <= kSeriesTerms; ++k) {
        sum += coeff * power / (2.0 * k + 3.0);
        coeff *= (0.5 - k) / (k + 1.0);
        power *= x2;
    }
    return 3.0 * sum;
}

} // namespace

EquationOfState EquationOfState::polytrope(double gamma, double K) {
    if (!(gamma > 1.0))
        throw DomainError("polytrope: gamma must exceed 1");
    if (!(K > 0.0))
        throw DomainError("polytrope: K must be positive");
    return EquationOfState(Kind::Polytrope, gamma, K);
}

std::string EquationOfState::name() const {
    if (kind_ == Kind::WhiteDwarf)
        return "white-dwarf";
    std::ostringstream out;
    out << "polytrope(gamma=" << gamma_ << ",K=" << K_ << ")";
    return out.str();
}

double EquationOfState::pressure(double s) const {
    require_nonnegative(s, "pressure");
    if (kind_ == Kind::Polytrope)
        return K_ * std::pow(s, gamma_);
    const double x = std::cbrt(s);
    if (x < kSeriesCutoff)
        return wd_pressure_series(x);
    const double root = std::sqrt(1.0 + x * x);
    return (x * (2.0 * x * x - 3.0) * root + 3.0 * std::asinh(x)) / 8.0;
}

double EquationOfState::pressure_prime(double s) const {
    require_nonnegative(s, "pressure_prime");
    if (kind_ == Kind::Polytrope)
        return s == 0.0 ? 0.0 : K_ * gamma_ * std::pow(s, gamma_ - 1.0);
    const double y = std::cbrt(s * s);
    return y / (3.0 * std::sqrt(1.0 + y));
}

double EquationOfState::enthalpy(double s) const {
    require_nonnegative(s, "enthalpy");
    if (kind_ == Kind::Polytrope)
        return K_ * gamma_ / (gamma_ - 1.0) * std::pow(s, gamma_ - 1.0);
    const double y = std::cbrt(s * s);
    return y / (std::sqrt(1.0 + y) + 1.0);
}

double EquationOfState::enthalpy_prime(double s) const {
    require_nonnegative(s, "enthalpy_prime");
    if (s == 0.0)
        throw DomainError("enthalpy_prime: singular at s = 0");
    if (kind_ == Kind::Polytrope)
        return K_ * gamma_ * std::pow(s, gamma_ - 2.0);
    const double x = std::cbrt(s);
    return 1.0 / (3.0 * x * std::sqrt(1.0 + x * x));
}

double EquationOfState::enthalpy_inv(double t) const {
    require_nonnegative(t, "enthalpy_inv");
    return density_from_enthalpy(t);
}

double EquationOfState::enthalpy_inv_prime(double t) const {
    require_nonnegative(t, "enthalpy_inv_prime");
    return density_from_enthalpy_prime(t);
}

double EquationOfState::pressure_potential(double s) const {
    require_nonnegative(s, "pressure_potential");
    if (kind_ == Kind::Polytrope)
        return K_ * std::pow(s, gamma_) / (gamma_ - 1.0);
    const double x = std::cbrt(s);
    if (x < kSeriesCutoff)
        return wd_potential_series(x);
    const double root = std::sqrt(1.0 + x * x);
    return 0.375 * (x * (2.0 * x * x + 1.0) * root - std::asinh(x)) - x * x * x;
}

double EquationOfState::density_from_enthalpy(double t) const noexcept {
    if (!(t > 0.0))
        return 0.0;
    if (kind_ == Kind::WhiteDwarf) {
        const double q = t * (2.0 + t);
        return q * std::sqrt(q);
    }
    return std::pow(t * (gamma_ - 1.0) / (K_ * gamma_), 1.0 / (gamma_ - 1.0));
}

double EquationOfState::density_from_enthalpy_prime(double t) const noexcept {
    if (!(t > 0.0))
        return 0.0;
    if (kind_ == Kind::WhiteDwarf)
        return 3.0 * (1.0 + t) * std::sqrt(t * (2.0 + t));
    const double n = 1.0 / (gamma_ - 1.0);
    const double scale = (gamma_ - 1.0) / (K_ * gamma_);
    return n * scale * std::pow(t * scale, n - 1.0);
}

} // namespace rotstar
