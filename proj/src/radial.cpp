#include "rotstar/radial.hpp"

#include "rotstar/diagnostics.hpp"
#include "rotstar/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace rotstar {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Interpolation accuracy demanded of a base profile before z is integrated on it.
constexpr double kResolutionTol = 1e-7;

} // namespace

double g_rhs(double w, double r, const EquationOfState& eos) {
    if (!(r > 0.0))
        throw DomainError("g_rhs: r must be positive");
    return kFourPi * r * eos.density_from_enthalpy(w / r);
}

double g_w(double w, double r, const EquationOfState& eos) {
    if (!(r > 0.0))
        throw DomainError("g_w: r must be positive");
    return kFourPi * eos.density_from_enthalpy_prime(w / r);
}

double g_r(double w, double r, const EquationOfState& eos) {
    if (!(r > 0.0))
        throw DomainError("g_r: r must be positive");
    const double t = w / r;
    return kFourPi * (eos.density_from_enthalpy(t) - t * eos.density_from_enthalpy_prime(t));
}

double central_length_scale(double a, const EquationOfState& eos) {
    return std::sqrt(a / (kFourPi * eos.enthalpy_inv(a)));
}

// ---------------------------------------------------------------------------
// RadialSolution

RadialSolution::RadialSolution(double a, double R, EquationOfState eos, std::vector<RadialSample> samples,
                               RadialConfig cfg)
    : a_(a), R_(R), eos_(eos), cfg_(cfg), samples_(std::move(samples)) {
    if (samples_.size() < 2)
        throw NumericsError("RadialSolution: need at least two samples");
    M_ = -R_ * samples_.back().dw;

    std::vector<double> r, w, dw, d2w;
    r.reserve(samples_.size());
    for (const auto& s : samples_) {
        r.push_back(s.r);
        w.push_back(s.w);
        dw.push_back(s.dw);
        d2w.push_back(s.r > 0.0 ? -g_rhs(s.w, s.r, eos_) : 0.0);
    }
    auto r2 = r;
    auto w2 = w;
    auto dw2 = dw;
    quintic_.emplace(std::move(r), std::move(w), std::move(dw), std::move(d2w));
    cubic_.emplace(std::move(r2), std::move(w2), std::move(dw2));
}

double RadialSolution::w_at(double r) const {
    if (empty())
        return 0.0;
    if (r >= R_)
        return M_ * (1.0 - r / R_);
    return (*quintic_)(std::max(r, 0.0));
}

double RadialSolution::dw_at(double r) const {
    if (empty())
        return 0.0;
    if (r >= R_)
        return -M_ / R_;
    return quintic_->prime(std::max(r, 0.0));
}

double RadialSolution::u_at(double r) const {
    if (empty())
        return 0.0;
    if (r <= 0.0)
        return a_;
    return w_at(r) / r;
}

double RadialSolution::density_at(double r) const {
    if (empty() || r >= R_)
        return 0.0;
    return eos_.density_from_enthalpy(u_at(r));
}

double RadialSolution::interpolation_error_estimate() const {
    if (samples_.size() < 2)
        return std::numeric_limits<double>::infinity();
    double wmax = 0.0;
    for (const auto& s : samples_)
        wmax = std::max(wmax, std::abs(s.w));
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
        const double mid = 0.5 * (samples_[i].r + samples_[i + 1].r);
        err = std::max(err, std::abs((*quintic_)(mid) - (*cubic_)(mid)));
    }
    return wmax > 0.0 ? err / wmax : err;
}

double RadialSolution::integrate(const std::function<double(double)>& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
        const double lo = samples_[i].r;
        const double hi = std::min(samples_[i + 1].r, R_);
        if (hi > lo)
            sum += boost::math::quadrature::gauss<double, 10>::integrate(f, lo, hi);
    }
    return sum;
}

double RadialSolution::mass_by_quadrature() const {
    return kFourPi * integrate([this](double r) { return density_at(r) * r * r; });
}

// ---------------------------------------------------------------------------

RadialSolution solve_radial(double a, const RadialConfig& cfg, const EquationOfState& eos) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("solve_radial: central enthalpy a must be positive and finite");
    if (!(cfg.tol.rel > 0.0) || !(cfg.tol.abs > 0.0) || !(cfg.start_fraction > 0.0) ||
        !(cfg.surface_tol > 0.0) || !(cfg.r_max_factor > 0.0))
        throw DomainError("solve_radial: tolerances must be positive");

    const double L = central_length_scale(a, eos);
    const double eps = cfg.start_fraction * L;
    // w = a r - c3 r^3 + c5 r^5 + O(r^7)
    const double c3 = kFourPi * eos.enthalpy_inv(a) / 6.0;
    const double c5 = kFourPi * eos.enthalpy_inv_prime(a) * c3 / 20.0;
    const double e2 = eps * eps;
    ode::State<2> y0{a * eps - c3 * eps * e2 + c5 * eps * e2 * e2, a - 3.0 * c3 * e2 + 5.0 * c5 * e2 * e2};

    ode::Tolerances tol = cfg.tol;
    tol.abs = cfg.tol.abs * a;
    auto rhs = [&eos](double r, const ode::State<2>& y, ode::State<2>& dy) {
        dy[0] = y[1];
        dy[1] = -kFourPi * r * eos.density_from_enthalpy(y[0] / r);
    };
    auto event = [](double, const ode::State<2>& y) { return y[0]; };

    const double r_max = cfg.r_max_factor * L;
    std::vector<ode::Sample<2>> trail;
    const auto res = ode::integrate_until<2>(rhs, eps, y0, r_max, event, cfg.surface_tol * a, tol, 1e-3 * L, &trail);
    if (!res.event_found) {
        std::ostringstream msg;
        msg << "a=" << a << ", w(r_max)=" << res.y_end[0];
        throw SurfaceNotFound(r_max, msg.str());
    }

    std::vector<RadialSample> samples;
    samples.reserve(trail.size() + 1);
    samples.push_back({0.0, 0.0, a});
    for (const auto& s : trail)
        samples.push_back({s.r, s.y[0], s.y[1]});
    return RadialSolution(a, res.r_end, eos, std::move(samples), cfg);
}

std::vector<MassCurvePoint> mass_curve(const std::vector<double>& a_grid, const RadialConfig& cfg) {
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
        if (!(a_grid[i] > 0.0))
            throw DomainError("mass_curve: grid values must be positive");
        if (i > 0 && !(a_grid[i] > a_grid[i - 1]))
            throw DomainError("mass_curve: grid must be strictly increasing");
    }
    std::vector<MassCurvePoint> out(a_grid.size());
    const long n = static_cast<long>(a_grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        MassCurvePoint& p = out[static_cast<std::size_t>(i)];
        p.a = a_grid[static_cast<std::size_t>(i)];
        try {
            const RadialSolution sol = solve_radial(p.a, cfg);
            p.R = sol.R();
            p.M = sol.M();
            p.E = energy_radial(sol).E;
            p.Mprime = solve_variational(sol).mass_derivative_integral;
            p.ok = true;
        } catch (const std::exception& e) {
            p.ok = false;
            p.R = p.M = p.E = p.Mprime = kNaN;
            p.error = e.what();
        }
    }
    return out;
}

bool is_mass_monotone(const std::vector<MassCurvePoint>& curve) {
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& p : curve) {
        if (!p.ok)
            continue;
        if (!(p.M > prev))
            return false;
        prev = p.M;
    }
    return true;
}

// ---------------------------------------------------------------------------

VariationalSolution solve_variational(const RadialSolution& base) {
    if (base.empty())
        throw DomainError("solve_variational: base solution is empty");
    const auto& samples = base.samples();
    if (samples.size() < 4)
        throw ResolutionError("solve_variational: base profile has fewer than 4 samples");
    const double interp_err = base.interpolation_error_estimate();
    if (!(interp_err <= kResolutionTol)) {
        std::ostringstream msg;
        msg << "solve_variational: base profile interpolation error " << interp_err << " exceeds "
            << kResolutionTol;
        throw ResolutionError(msg.str());
    }

    const EquationOfState& eos = base.eos();
    const double a = base.a();
    const double R = base.R();
    const double eps = samples[1].r;
    const double cz = kFourPi * eos.enthalpy_inv_prime(a) / 6.0;

    // y = (z, z', int z (r g_r + 2 g), 4 pi int r z (h^-1)'(u))
    auto rhs = [&base, &eos](double r, const ode::State<4>& y, ode::State<4>& dy) {
        const double w = base.w_at(r);
        const double t = std::max(w, 0.0) / r;
        const double hinv = eos.density_from_enthalpy(t);
        const double hinv_p = eos.density_from_enthalpy_prime(t);
        dy[0] = y[1];
        dy[1] = -kFourPi * hinv_p * y[0];
        dy[2] = y[0] * kFourPi * r * (3.0 * hinv - t * hinv_p);
        dy[3] = kFourPi * r * y[0] * hinv_p;
    };

    ode::Tolerances tol = base.config().tol;
    tol.abs = base.config().tol.abs * std::max(R, 1e-300);

    VariationalSolution out;
    out.r0 = kNaN;
    ode::State<4> y{eps - cz * eps * eps * eps, 1.0 - 3.0 * cz * eps * eps, 0.0, 0.0};
    double r = eps;
    double sign = 1.0;
    std::vector<ode::Sample<4>> trail;
    for (int crossings = 0; crossings < 64; ++crossings) {
        auto event = [sign](double, const ode::State<4>& s) { return sign * s[0]; };
        const double first_step = std::max(1e-3 * (R - r), 1e-12 * R);
        const auto res = ode::integrate_until<4>(rhs, r, y, R, event, 1e-14 * R, tol, first_step, &trail);
        if (!trail.empty())
            trail.pop_back();  // re-added as the start of the next leg, or below
        r = res.r_end;
        y = res.y_end;
        if (!res.event_found || r >= R)
            break;
        out.sign_changes.push_back(r);
        if (out.sign_changes.size() == 1) {
            out.r0 = r;
            out.wronskian_lhs = r * base.dw_at(r) * y[1];
            out.wronskian_rhs = y[2];
        }
        sign = -sign;
    }
    trail.push_back({r, y});

    out.samples.reserve(trail.size() + 1);
    out.samples.push_back({0.0, 0.0, 1.0});
    for (const auto& s : trail)
        out.samples.push_back({s.r, s.y[0], s.y[1]});
    out.mass_derivative_integral = y[3];
    out.z_surface = y[0];
    out.dz_surface = y[1];
    return out;
}

MassDerivative mass_derivative(double a, const MassDerivativeConfig& cfg) {
    if (!(a > 0.0))
        throw DomainError("mass_derivative: a must be positive");
    if (!(cfg.delta > 0.0 && cfg.delta < 0.5) || !(cfg.agreement_tol > 0.0))
        throw DomainError("mass_derivative: delta must lie in (0, 0.5) and agreement_tol be positive");

    const RadialSolution base = solve_radial(a, cfg.radial);
    const VariationalSolution var = solve_variational(base);

    MassDerivative out;
    out.value = var.mass_derivative_integral;
    out.flux = var.z_surface - base.R() * var.dz_surface;

    auto mass_at = [&cfg](double aa) { return solve_radial(aa, cfg.radial).M(); };
    auto centered = [&](double d) { return (mass_at(a * (1.0 + d)) - mass_at(a * (1.0 - d))) / (2.0 * a * d); };

    // Widen delta until the mass difference clears the solver noise floor.
    const double noise = 10.0 * cfg.radial.tol.rel * base.M();
    double delta = cfg.delta;
    auto noise_ratio = [&](double d) { return noise / (a * d * std::max(std::abs(out.value), 1e-300)); };
    while (noise_ratio(delta) > 1e-4 && delta < 0.05)
        delta *= 4.0;
    out.delta = delta;
    out.fd_resolved = noise_ratio(delta) <= 1e-3;

    const double d1 = centered(delta);
    const double d2 = centered(0.5 * delta);
    out.finite_difference = (4.0 * d2 - d1) / 3.0;
    out.rel_diff = std::abs(out.finite_difference - out.value) / std::abs(out.value);

    if (out.fd_resolved && out.rel_diff > 10.0 * cfg.agreement_tol) {
        std::ostringstream msg;
        msg << "mass_derivative: variational M'=" << out.value << " and finite difference "
            << out.finite_difference << " disagree (rel " << out.rel_diff << ") at a=" << a;
        throw ConsistencyError(msg.str());
    }
    return out;
}

// ---------------------------------------------------------------------------

RescaledSolution solve_rescaled(double a, const RadialConfig& cfg) {
    if (!(a >= 0.0) || !std::isfinite(a))
        throw DomainError("solve_rescaled: a must be non-negative and finite");

    // W = x v,  W'' = -4 pi x (2 t + a t^2)^{3/2},  t = W_+/x
    auto source = [a](double t) {
        if (!(t > 0.0))
            return 0.0;
        const double q = t * (2.0 + a * t);
        return q * std::sqrt(q);
    };
    auto rhs = [&source](double x, const ode::State<2>& y, ode::State<2>& dy) {
        dy[0] = y[1];
        dy[1] = -kFourPi * x * source(y[0] / x);
    };
    const double eps = cfg.start_fraction;
    const double c3 = kFourPi * source(1.0) / 6.0;
    ode::State<2> y0{eps - c3 * eps * eps * eps, 1.0 - 3.0 * c3 * eps * eps};
    auto event = [](double, const ode::State<2>& y) { return y[0]; };

    std::vector<ode::Sample<2>> trail;
    const auto res = ode::integrate_until<2>(rhs, eps, y0, cfg.r_max_factor, event, cfg.surface_tol, cfg.tol,
                                             1e-3, &trail);
    if (!res.event_found)
        throw SurfaceNotFound(cfg.r_max_factor, "rescaled profile did not vanish");

    RescaledSolution out;
    out.a = a;
    out.zero = res.r_end;
    out.dv_zero = res.y_end[1] / res.r_end;
    out.samples.push_back({0.0, 1.0, 0.0});
    for (const auto& s : trail) {
        const double x = s.r;
        out.samples.push_back({x, s.y[0] / x, (s.y[1] * x - s.y[0]) / (x * x)});
    }

    out.identity_error = kNaN;
    if (a > 0.0) {
        const RadialSolution star = solve_radial(a, cfg);
        const double stretch = std::pow(a, -0.25);
        double err = 0.0;
        for (const auto& s : out.samples)
            err = std::max(err, std::abs(s.v - star.u_at(stretch * s.x) / a));
        out.identity_error = err;
        if (err > 1e-4) {
            std::ostringstream msg;
            msg << "solve_rescaled: v(x) and u(a^{-1/4} x)/a differ by " << err << " at a=" << a;
            throw ConsistencyError(msg.str());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct LaneEmdenSystem {
    double n;
    void operator()(double xi, const ode::State<2>& y, ode::State<2>& dy) const {
        dy[0] = y[1];
        dy[1] = -std::pow(std::max(y[0], 0.0), n) - 2.0 * y[1] / xi;
    }
};

ode::State<2> lane_emden_series(double n, double xi) {
    const double x2 = xi * xi;
    return {1.0 - x2 / 6.0 + n * x2 * x2 / 120.0, -xi / 3.0 + n * x2 * xi / 30.0};
}

constexpr double kLaneEmdenStart = 1e-4;

} // namespace

LaneEmdenResult lane_emden(double n, double rel_tol) {
    if (!(n > 0.0 && n < 5.0))
        throw DomainError("lane_emden: index must lie in (0, 5)");
    ode::Tolerances tol;
    tol.rel = rel_tol;
    tol.abs = 1e-2 * rel_tol;
    auto event = [](double, const ode::State<2>& y) { return y[0]; };
    const auto res = ode::integrate_until<2>(LaneEmdenSystem{n}, kLaneEmdenStart,
                                             lane_emden_series(n, kLaneEmdenStart), 100.0, event, 1e-15, tol,
                                             1e-3, nullptr);
    if (!res.event_found)
        throw NumericsError("lane_emden: no zero found");
    LaneEmdenResult out;
    out.n = n;
    out.xi1 = res.r_end;
    out.dtheta1 = res.y_end[1];
    out.m1 = out.xi1 * out.xi1 * std::abs(out.dtheta1);
    return out;
}

double lane_emden_theta(double n, double xi, double rel_tol) {
    if (!(n > 0.0 && n < 5.0))
        throw DomainError("lane_emden_theta: index must lie in (0, 5)");
    if (!(xi >= 0.0))
        throw DomainError("lane_emden_theta: xi must be non-negative");
    if (xi <= kLaneEmdenStart)
        return lane_emden_series(n, xi)[0];
    ode::Tolerances tol;
    tol.rel = rel_tol;
    tol.abs = 1e-2 * rel_tol;
    return ode::integrate_to<2>(LaneEmdenSystem{n}, kLaneEmdenStart, lane_emden_series(n, kLaneEmdenStart), xi,
                                tol, 1e-3, nullptr)
        .y_end[0];
}

double chandrasekhar_mass() {
    static const double m = lane_emden(3.0).m1 / std::sqrt(kFourPi);
    return m;
}

} // namespace rotstar
