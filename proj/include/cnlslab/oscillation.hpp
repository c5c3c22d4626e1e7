// Oscillation-criterion toolkit for second-order linear ODEs
// y'' + b(x) y' + c(x) y = 0: canonical-form coefficient q(x), the Euler
// change of variable, and interval extraction for the shifted criterion
// q(x) > 1/(4 (x - c1)^2).

#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace cnlslab::oscillation {

/// Damping and restoring coefficients of y'' + b y' + c y = 0. If b_prime
/// is left empty, it is produced by central differences with step
/// h = max(1e-6, 1e-6 |x|).
struct CoefficientPair {
    std::function<double(double)> b;
    std::function<double(double)> c;
    std::function<double(double)> b_prime;  // optional analytic derivative

    double derivative_step(double x) const;
    double eval_b(double x) const;
    double eval_c(double x) const;
    double eval_b_prime(double x) const;
};

/// Canonical-form coefficient q = -(b^2 + 2 b' - 4 c)/4 of u'' + q u = 0.
double canonical_q(const CoefficientPair& coeffs, double x);

/// Shifted interval criterion: true iff q > 1/(4 (x - shift_c1)^2).
/// With shift_c1 = 0 this is the origin-singular form q > 1/(4 x^2).
bool criterion_holds(double q_value, double x, double shift_c1);

/// Open intervals of x where the criterion holds, disjoint and ascending.
struct CriterionRegion {
    std::vector<std::pair<double, double>> intervals;
    double shift_c1 = 0.0;

    bool empty() const { return intervals.empty(); }
};

/// Maximal sub-intervals of [domain_lo, domain_hi] on which the sampled
/// criterion holds, each boundary refined by bisection to refine_tol in x.
/// A domain containing shift_c1 is split around it (the bound diverges
/// there), so no returned interval straddles the shift point.
CriterionRegion criterion_region(const CoefficientPair& coeffs, double domain_lo,
                                 double domain_hi, double shift_c1, int resolution,
                                 double refine_tol = 1e-10);

/// Overload with the default sampling density of 4096 points per decade
/// (linear fallback when the domain is not strictly positive).
CriterionRegion criterion_region(const CoefficientPair& coeffs, double domain_lo,
                                 double domain_hi, double shift_c1 = 0.0);

/// Classical Euler transformation x = exp(t) and its inverse; maps
/// t in (-inf, inf) onto the criterion's natural domain x in (0, inf).
double euler_map(double t);
double euler_unmap(double x);

}  // namespace cnlslab::oscillation
