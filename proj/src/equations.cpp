#include "cnlslab/equations.hpp"

#include <cmath>
#include <string>

namespace cnlslab {

double EquationSpec::potential(double x) const {
    if (!potential_) return 0.0;
    const double v = potential_(x);
    if (!std::isfinite(v))
        throw std::domain_error("potential not evaluable at x = " + std::to_string(x));
    return v;
}

void check_compatible(const EquationSpec& spec, const BoundaryCondition& bc) {
    if (spec.dimension() >= 2 && bc.dpsi0 != 0.0)
        throw std::invalid_argument(
            "boundary condition: psi'(0) must be 0 for dimension >= 2 "
            "(inertial term singular at the origin)");
}

double effective_coefficient(const EquationSpec& spec, double psi, double x) {
    double c = free_restoring_coefficient(spec.interaction(), psi);
    if (spec.has_potential()) c += spec.potential(x);
    return c;
}

std::array<double, 3> trivial_solutions(const EquationSpec& spec) {
    if (spec.has_potential())
        throw std::logic_error(
            "trivial_solutions: constant solutions are only intrinsic to the "
            "free-particle equation");
    return {0.0, kPsiPlus, -kPsiPlus};
}

bool predicts_oscillation(const EquationSpec& spec, double psi) {
    if (spec.has_potential())
        throw std::logic_error("predicts_oscillation: free-particle case only");
    return free_restoring_coefficient(spec.interaction(), psi) > 0.0;
}

std::array<double, 2> rhs(const EquationSpec& spec, double x, const std::array<double, 2>& state) {
    if (!(x > 0.0))
        throw std::domain_error("rhs: x must be positive (use taylor_start at the origin)");
    const double c = effective_coefficient(spec, state[0], x);
    const double inertial = static_cast<double>(spec.dimension() - 1) / x * state[1];
    return {state[1], -inertial - c * state[0]};
}

StartState taylor_start(const EquationSpec& spec, const BoundaryCondition& bc, double epsilon) {
    if (!(epsilon > 0.0)) throw std::domain_error("taylor_start: epsilon must be positive");
    check_compatible(spec, bc);
    const double c0 = effective_coefficient(spec, bc.psi0, 0.0);
    // L'Hopital limit of the ODE at x = 0; reduces to the plain equation
    // for N = 1 where a nonzero slope is admissible.
    const double ddpsi0 = -c0 * bc.psi0 / static_cast<double>(spec.dimension());
    StartState s;
    s.x = epsilon;
    s.psi = bc.psi0 + bc.dpsi0 * epsilon + 0.5 * ddpsi0 * epsilon * epsilon;
    s.dpsi = bc.dpsi0 + ddpsi0 * epsilon;
    return s;
}

double first_integral(const EquationSpec& spec, double psi, double dpsi) {
    if (spec.dimension() != 1 || spec.has_potential())
        throw std::logic_error("first_integral: defined for the free N=1 equation only");
    const double p2 = psi * psi;
    const double well = 0.5 * (p2 - p2 * p2);  // psi^2/2 - psi^4/2
    const double sign = spec.interaction() == Interaction::Repulsive ? 1.0 : -1.0;
    return 0.5 * dpsi * dpsi + sign * well;
}

}  // namespace cnlslab
