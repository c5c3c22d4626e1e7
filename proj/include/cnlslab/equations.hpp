// Stationary cubic nonlinear Schrodinger boundary-value problems:
// dimensionless free-particle equations in N = 1, 2, 3 radial dimensions,
// their constant (intrinsic) solutions, and the nonlinear restoring
// coefficient used by the oscillation criterion.

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

namespace cnlslab {

enum class Interaction { Repulsive, Attractive };

/// fl(sqrt(2)), the factor used throughout the nonlinear coefficient.
inline constexpr double kSqrt2 = 0x1.6a09e667f3bcdp+0;

/// The positive nonzero constant solution, pinned to the unique double for
/// which kSqrt2 * psi rounds to exactly 1, so the restoring coefficient
/// below evaluates to exactly zero there. One ulp below fl(sqrt(0.5)).
inline constexpr double kPsiPlus = 0x1.6a09e667f3bccp-1;

/// Restoring coefficient of the free equation, computed in the factored
/// form (1 - sqrt(2) psi)(1 + sqrt(2) psi) = 1 - 2 psi^2 so that the stored
/// constant solutions annihilate it exactly. Templated so the same formula
/// drives higher-precision instantiations of the integrator core.
template <class Real>
Real free_restoring_coefficient(Interaction interaction, const Real& psi) {
    using std::sqrt;
    static const Real root2 = sqrt(Real(2));
    const Real r = root2 * psi;
    if (interaction == Interaction::Repulsive)
        return (Real(1) - r) * (Real(1) + r);
    return (r - Real(1)) * (Real(1) + r);
}

/// Free-particle first-order system in N radial dimensions:
/// psi'' = -(N-1)/x psi' - c(psi) psi.
template <class Real>
std::array<Real, 2> free_rhs(Interaction interaction, int dimension, const Real& x,
                             const std::array<Real, 2>& state) {
    const Real c = free_restoring_coefficient(interaction, state[0]);
    const Real inertial = Real(dimension - 1) / x * state[1];
    return {state[1], -inertial - c * state[0]};
}

/// Which stationary CNLS problem to integrate. Immutable after construction.
class EquationSpec {
  public:
    EquationSpec(int dimension, Interaction interaction,
                 std::function<double(double)> potential = {},
                 std::optional<double> nonlinearity_scale = std::nullopt)
        : dimension_(dimension),
          interaction_(interaction),
          potential_(std::move(potential)),
          nonlinearity_scale_(nonlinearity_scale) {
        if (dimension < 1 || dimension > 3)
            throw std::invalid_argument("EquationSpec: dimension must be 1, 2 or 3");
    }

    int dimension() const { return dimension_; }
    Interaction interaction() const { return interaction_; }
    bool has_potential() const { return static_cast<bool>(potential_); }
    double potential(double x) const;

    /// g-scale metadata only: the boundary value absorbs the nonlinear
    /// amplitude (psi(0) ~ 1/sqrt|g|); it never enters the ODE.
    std::optional<double> nonlinearity_scale() const { return nonlinearity_scale_; }

  private:
    int dimension_;
    Interaction interaction_;
    std::function<double(double)> potential_;
    std::optional<double> nonlinearity_scale_;
};

/// Cauchy data at the origin.
struct BoundaryCondition {
    double psi0 = 0.0;
    double dpsi0 = 0.0;

    BoundaryCondition(double psi0_, double dpsi0_ = 0.0) : psi0(psi0_), dpsi0(dpsi0_) {
        if (!std::isfinite(psi0) || !std::isfinite(dpsi0))
            throw std::invalid_argument("BoundaryCondition: values must be finite");
    }
};

/// Throws if the boundary condition is incompatible with the spec: the
/// inertial term (N-1) psi'/x is singular at x = 0 unless psi'(0) = 0.
void check_compatible(const EquationSpec& spec, const BoundaryCondition& bc);

/// Coefficient of the psi-term when the ODE is read as y'' + b y' + c y = 0,
/// including the optional potential hook.
double effective_coefficient(const EquationSpec& spec, double psi, double x);

/// The three constant solutions {0, +psi_plus, -psi_plus} of the free
/// equation. Each returned value annihilates effective_coefficient(...)*psi
/// exactly. Unsupported once a potential is attached.
std::array<double, 3> trivial_solutions(const EquationSpec& spec);

/// The pointwise oscillation criterion specialized to the free equations:
/// repulsive psi^2 < 1/2, attractive psi^2 > 1/2. Identical to
/// effective_coefficient(spec, psi, .) > 0.
bool predicts_oscillation(const EquationSpec& spec, double psi);

/// First-order system (psi', psi''). x must be positive; start integrations
/// at the origin through taylor_start instead.
std::array<double, 2> rhs(const EquationSpec& spec, double x, const std::array<double, 2>& state);

struct StartState {
    double x;
    double psi;
    double dpsi;
};

/// Second-order Taylor step across the coordinate singularity:
/// psi''(0) = -c(psi(0)) psi(0) / N from the x->0 limit of the ODE.
StartState taylor_start(const EquationSpec& spec, const BoundaryCondition& bc, double epsilon);

/// Conserved energy of the free N=1 equation:
/// E = psi'^2/2 + psi^2/2 - psi^4/2 (repulsive), sign-flipped potential term
/// for the attractive case. Throws unless N = 1 and the spec is free.
double first_integral(const EquationSpec& spec, double psi, double dpsi);

}  // namespace cnlslab
