#include "cnlslab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cnlslab::oscillation {

namespace {

double eval_checked(const std::function<double(double)>& f, double x, const char* name) {
    if (!f) throw std::logic_error(std::string("coefficient ") + name + " is not set");
    const double v = f(x);
    if (!std::isfinite(v))
        throw std::domain_error(std::string("coefficient ") + name +
                                " not evaluable at x = " + std::to_string(x));
    return v;
}

}  // namespace

double CoefficientPair::derivative_step(double x) const {
    return std::max(1e-6, 1e-6 * std::abs(x));
}

double CoefficientPair::eval_b(double x) const { return eval_checked(b, x, "b"); }
double CoefficientPair::eval_c(double x) const { return eval_checked(c, x, "c"); }

double CoefficientPair::eval_b_prime(double x) const {
    if (b_prime) return eval_checked(b_prime, x, "b'");
    const double h = derivative_step(x);
    const double hi = eval_checked(b, x + h, "b'");
    const double lo = eval_checked(b, x - h, "b'");
    return (hi - lo) / (2.0 * h);
}

double canonical_q(const CoefficientPair& coeffs, double x) {
    const double b = coeffs.eval_b(x);
    const double bp = coeffs.eval_b_prime(x);
    const double c = coeffs.eval_c(x);
    return -0.25 * (b * b + 2.0 * bp - 4.0 * c);
}

bool criterion_holds(double q_value, double x, double shift_c1) {
    const double d = x - shift_c1;
    if (d == 0.0)
        throw std::domain_error("criterion_holds: singular at x = shift_c1 = " +
                                std::to_string(shift_c1));
    return q_value > 0.25 / (d * d);
}

namespace {

bool holds_at(const CoefficientPair& coeffs, double x, double c1) {
    return criterion_holds(canonical_q(coeffs, x), x, c1);
}

// Locate the predicate flip inside (a, b] where holds(a) != holds(b).
double refine_boundary(const CoefficientPair& coeffs, double a, double b, bool at_a, double c1,
                       double tol) {
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        if (holds_at(coeffs, mid, c1) == at_a)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

void scan_subdomain(const CoefficientPair& coeffs, double lo, double hi, double c1,
                    int resolution, double tol, std::vector<std::pair<double, double>>& out) {
    if (!(lo < hi)) return;
    std::vector<double> xs(static_cast<size_t>(resolution));
    for (int i = 0; i < resolution; ++i)
        xs[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) /
                                              static_cast<double>(resolution - 1);
    xs.front() = lo;
    xs.back() = hi;

    bool prev = holds_at(coeffs, xs[0], c1);
    bool open = prev;
    double open_at = lo;
    for (size_t i = 1; i < xs.size(); ++i) {
        const bool cur = holds_at(coeffs, xs[i], c1);
        if (cur != prev) {
            const double edge = refine_boundary(coeffs, xs[i - 1], xs[i], prev, c1, tol);
            if (cur) {
                open = true;
                open_at = edge;
            } else {
                out.emplace_back(open_at, edge);
                open = false;
            }
        }
        prev = cur;
    }
    if (open) out.emplace_back(open_at, hi);
}

}  // namespace

CriterionRegion criterion_region(const CoefficientPair& coeffs, double domain_lo,
                                 double domain_hi, double shift_c1, int resolution,
                                 double refine_tol) {
    if (!(domain_lo < domain_hi))
        throw std::invalid_argument("criterion_region: domain must satisfy lo < hi");
    if (resolution < 2) throw std::invalid_argument("criterion_region: resolution must be >= 2");
    if (!(refine_tol > 0.0))
        throw std::invalid_argument("criterion_region: refine_tol must be positive");

    CriterionRegion region;
    region.shift_c1 = shift_c1;
    if (shift_c1 > domain_lo && shift_c1 < domain_hi) {
        // Split around the singular shift point.
        const double left = std::nextafter(shift_c1, domain_lo);
        const double right = std::nextafter(shift_c1, domain_hi);
        scan_subdomain(coeffs, domain_lo, left, shift_c1, resolution, refine_tol,
                       region.intervals);
        scan_subdomain(coeffs, right, domain_hi, shift_c1, resolution, refine_tol,
                       region.intervals);
    } else {
        const double lo = domain_lo == shift_c1 ? std::nextafter(domain_lo, domain_hi) : domain_lo;
        const double hi = domain_hi == shift_c1 ? std::nextafter(domain_hi, domain_lo) : domain_hi;
        scan_subdomain(coeffs, lo, hi, shift_c1, resolution, refine_tol, region.intervals);
    }
    std::sort(region.intervals.begin(), region.intervals.end());
    return region;
}

CriterionRegion criterion_region(const CoefficientPair& coeffs, double domain_lo,
                                 double domain_hi, double shift_c1) {
    int resolution = 4096;
    if (domain_lo > 0.0 && domain_hi > domain_lo) {
        const double decades = std::log10(domain_hi / domain_lo);
        resolution = static_cast<int>(
            std::clamp(std::ceil(4096.0 * std::max(1.0, decades)), 4096.0, 1048576.0));
    }
    return criterion_region(coeffs, domain_lo, domain_hi, shift_c1, resolution);
}

double euler_map(double t) { return std::exp(t); }

double euler_unmap(double x) {
    if (!(x > 0.0)) throw std::domain_error("euler_unmap: x must be positive");
    return std::log(x);
}

}  // namespace cnlslab::oscillation
