#pragma once

#include <string>

namespace rotstar {

/// Barotropic equation of state in code units (A = m = G = 1).
///
/// Besides the pressure p(s) it exposes the enthalpy h with h' = p'/s, h(0) = 0,
/// its inverse, and the pressure potential H(s) = int_0^s h, which is the integrand
/// of the internal-energy part of the total energy.  Two families are supported:
///
///  - WhiteDwarf: p(s) = int_0^{s^{1/3}} t^4 / sqrt(1 + t^2) dt, for which
///    h(s) = sqrt(1 + s^{2/3}) - 1 and h^{-1}(t) = (2t + t^2)^{3/2}.
///  - Polytrope: p(s) = K s^gamma.  With gamma = 4/3 and K = 1/4 one gets
///    h(s) = s^{1/3} and h^{-1}(t) = t^3 (see poly43_normalized()).
///
/// All evaluators are pure and reject negative arguments with DomainError.
class EquationOfState {
public:
    enum class Kind { WhiteDwarf, Polytrope };

    static EquationOfState white_dwarf() { return EquationOfState(Kind::WhiteDwarf, 0.0, 0.0); }
    static EquationOfState polytrope(double gamma, double K = 1.0);
    /// p = s^{4/3} / 4, normalized so that h^{-1}(t) = t^3.
    static EquationOfState poly43_normalized() { return polytrope(4.0 / 3.0, 0.25); }

    Kind kind() const noexcept { return kind_; }
    double gamma() const noexcept { return gamma_; }
    double K() const noexcept { return K_; }
    std::string name() const;

    double pressure(double s) const;
    double pressure_prime(double s) const;
    double enthalpy(double s) const;
    double enthalpy_prime(double s) const;
    double enthalpy_inv(double t) const;
    double enthalpy_inv_prime(double t) const;
    double pressure_potential(double s) const;

    /// h^{-1}(max(t, 0)); the form used inside [.]_+ expressions.
    double density_from_enthalpy(double t) const noexcept;
    /// (h^{-1})'(max(t, 0)).
    double density_from_enthalpy_prime(double t) const noexcept;

private:
    EquationOfState(Kind kind, double gamma, double K) : kind_(kind), gamma_(gamma), K_(K) {}

    Kind kind_;
    double gamma_;
    double K_;
};

} // namespace rotstar
