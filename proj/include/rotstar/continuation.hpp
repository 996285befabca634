#pragma once

// Fixed-mass self-consistent-field solver for rotating stars and the
// continuation of the solution branch in the rotation intensity kappa.
//
// A solution satisfies rho = h^{-1}([Phi + alpha]_+) with Phi = U + c, where
// U is the Newtonian potential of rho and c(r) is a centrifugal term (kappa^2 j(r)
// for a rotation profile), and int rho = M.  alpha is re-solved every sweep so
// the mass constraint holds exactly along the iteration.

#include "rotstar/eos.hpp"
#include "rotstar/errors.hpp"
#include "rotstar/grid.hpp"
#include "rotstar/radial.hpp"
#include "rotstar/rotation.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace rotstar {

/// Whether the potential is used as is, or shifted so that it vanishes at the origin.
enum class PotentialForm { Full, Anchored };

struct ScfConfig {
    double damping = 0.5;         ///< initial theta in (0, 1]; halved when the residual grows
    double min_damping = 1.0 / 64.0;
    /// After this many consecutive decreasing sweeps theta doubles again (up to damping).
    int recovery_sweeps = 8;
    int max_iter = 3000;
    double residual_tol = 1e-7;   ///< on ||F1||_inf / rho_max
    double mass_tol = 1e-12;      ///< relative, for the alpha root
    double mass_constraint_tol = 1e-10;  ///< relative mass error of the accepted iterate
    int order = 16;
    /// O_N guard: every sweep must keep -(alpha + sup c) > 1/guard_n.  0 disables it.
    double guard_n = 0.0;
};

/// What a sweep needs besides the density: EOS, target mass and the centrifugal term.
struct ScfProblem {
    EquationOfState eos = EquationOfState::white_dwarf();
    double mass = 0.0;
    /// c(r_i) on the r nodes of the grid.
    std::vector<double> centrifugal;
    /// sup over all of R^3 of c (kappa^2 sup j); used by the guard.
    double centrifugal_sup = 0.0;
    double kappa = 0.0;
    PotentialForm form = PotentialForm::Full;
    /// alpha is searched in [.., 0) unless this is set.
    bool allow_positive_alpha = false;
    /// Nodes with spherical radius above this are held at zero density.
    double mask_radius = std::numeric_limits<double>::infinity();
    /// Optional field added to every target h^{-1}([Phi + alpha]_+) (defect correction).
    /// It must integrate to zero so the mass constraint is unaffected.
    std::vector<double> target_shift;
};

/// kappa^2 j(r) sampled on the r nodes of `grid`.
std::vector<double> centrifugal_term(const AxisymGrid& grid, double kappa, const RotationProfile& profile);

/// Phi = U + c on the grid.
PotentialField effective_potential(const DensityField& rho, const std::vector<double>& centrifugal, int order = 16,
                                   PotentialForm form = PotentialForm::Full);
PotentialField effective_potential(const DensityField& rho, double kappa, const RotationProfile& profile,
                                   int order = 16);

/// G(alpha) = int h^{-1}([Phi + alpha]_+) dx, summed row by row.
double mass_for_alpha(const PotentialField& phi, double alpha, const EquationOfState& eos,
                      double mask_radius = std::numeric_limits<double>::infinity());

/// Root of G(alpha) = M.  Without allow_positive the root must lie below 0,
/// otherwise MassUnreachable is thrown.
double alpha_for_mass(const PotentialField& phi, double mass, const EquationOfState& eos, double rel_tol = 1e-12,
                      bool allow_positive = false,
                      double mask_radius = std::numeric_limits<double>::infinity());

struct BranchPoint {
    DensityField rho;
    double kappa = 0.0;
    double alpha = 0.0;
    double mass = 0.0;
    double rho_max = 0.0;
    double r_eq = 0.0;
    double r_pole = 0.0;
    double residual = 0.0;   ///< ||F1||_inf / rho_max
    double margin = 0.0;     ///< -(alpha + kappa^2 sup j)
    double weighted_norm = 0.0;
    /// max over grid nodes of |x| U(x), the potential decay constant.
    double potential_decay = 0.0;
    int iterations = 0;
};

/// Max-norm iteration failure.  Carries the last iterate and the residual history.
class NoConvergence : public NumericsError {
public:
    NoConvergence(const std::string& what, BranchPoint last, std::vector<double> history)
        : NumericsError(what), last_(std::move(last)), history_(std::move(history)) {}
    const BranchPoint& last() const noexcept { return last_; }
    const std::vector<double>& history() const noexcept { return history_; }

private:
    BranchPoint last_;
    std::vector<double> history_;
};

struct ScfResult {
    BranchPoint point;
    std::vector<double> history;
};

/// Called with each new iterate.
using SweepObserver = std::function<void(const DensityField&)>;

/// Damped fixed-point iteration rho <- (1 - theta) rho + theta h^{-1}([Phi + alpha]_+).
/// The initial mass must be within 50% of the target.
ScfResult scf_solve(const DensityField& initial, const ScfProblem& problem, const ScfConfig& cfg = {},
                    const SweepObserver& observer = {});

/// rho - h^{-1}([Phi(rho) + alpha]_+) for the given density, alpha fitted to its own mass.
/// Used as a target shift this makes rho an exact fixed point of the sweep.
std::vector<double> sweep_defect(const DensityField& rho, const ScfProblem& problem, int order = 16);

/// The radial solution sampled onto the grid (rho(|x|)).
DensityField discretize_radial(const RadialSolution& sol, const AxisymGrid& grid);

/// Grid with nr = nz = nodes over [0, factor R]^2.
AxisymGrid grid_for_radius(double support_radius, std::size_t nodes = 128, double factor = 2.0);

enum class Termination { ScheduleExhausted, DensityGrowth, SupportGrowth, GuardViolation, StepUnderflow };
std::string to_string(Termination t);

struct BranchConfig {
    ScfConfig scf;
    /// DensityGrowth once rho_max exceeds this multiple of the start value.
    double density_growth = 1e3;
    /// SupportGrowth once r_eq exceeds this fraction of the domain after all enlargements.
    double support_fraction = 0.9;
    int max_enlargements = 2;
    double enlarge_factor = 1.5;
    int max_halvings = 6;
    /// Headroom applied to the measured potential decay constant when calibrating C0.
    double c0_headroom = 2.0;
};

struct BranchReport {
    std::vector<BranchPoint> points;
    Termination reason = Termination::ScheduleExhausted;
    std::string message;
    double guard_n = 0.0;
    /// Support-bound constant: support radius <= C0 N ||rho||_s.
    double c0 = 0.0;
    bool support_audit_passed = true;
    int enlargements = 0;
    int halvings = 0;
};

/// Starting point of a branch: the radial star of central value a on a 128^2 grid
/// over twice its radius, polished by scf_solve at kappa = 0.
BranchPoint radial_start(double a, const BranchConfig& cfg = {}, std::size_t nodes = 128);

/// Warm-started continuation along kappa_schedule (increasing from start.kappa).
/// guard_n <= 0 picks N so that the start margin equals 10 / N.
BranchReport continue_branch(const BranchPoint& start, const std::vector<double>& kappa_schedule,
                             const RotationProfile& profile, const BranchConfig& cfg = {}, double guard_n = 0.0);

/// Support radius: largest |x| over nodes with rho > 0.
double support_radius(const DensityField& rho);

} // namespace rotstar
