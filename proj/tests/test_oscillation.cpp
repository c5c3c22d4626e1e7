#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cnlslab/oscillation.hpp"

using namespace cnlslab::oscillation;

namespace {

// Cauchy-Euler closed form: y'' + y'/x + k y/x^2 = 0 has solutions
// cos(sqrt(k) ln x) for k > 0 and x^(+-sqrt(-k)) (or 1, ln x) for k <= 0.
// Independent oracle: count sign changes of the closed form on a fine grid.
bool euler_equation_oscillates_brute_force(double k, double lo, double hi) {
    const auto y = [&](double x) -> double {
        if (k > 0.0) return std::cos(std::sqrt(k) * std::log(x));
        if (k == 0.0) return 1.0 + std::log(x);
        const double m = std::sqrt(-k);
        return std::pow(x, m) + std::pow(x, -m);
    };
    int changes = 0;
    const int n = 200000;
    double prev = y(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo * std::pow(hi / lo, static_cast<double>(i) / n);
        const double cur = y(x);
        if ((prev < 0 && cur > 0) || (prev > 0 && cur < 0)) ++changes;
        prev = cur;
    }
    return changes >= 2;
}

}  // namespace

TEST_CASE("canonical_q on constant coefficients drops the derivative terms") {
    CoefficientPair coeffs{[](double) { return 0.0; }, [](double) { return 1.0; },
                           [](double) { return 0.0; }};
    CHECK(canonical_q(coeffs, 0.3) == 1.0);
    CHECK(canonical_q(coeffs, 7.0) == 1.0);
}

TEST_CASE("canonical_q: b = 2/x cancels against its own derivative") {
    CoefficientPair analytic{[](double x) { return 2.0 / x; }, [](double) { return 1.0; },
                             [](double x) { return -2.0 / (x * x); }};
    CHECK(canonical_q(analytic, 3.0) == doctest::Approx(1.0).epsilon(1e-15));

    CoefficientPair numeric{[](double x) { return 2.0 / x; }, [](double) { return 1.0; }, {}};
    CHECK(canonical_q(numeric, 3.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("canonical_q: Cauchy-Euler pair gives (1+4k)/(4x^2)") {
    const double k = 1.0;
    CoefficientPair coeffs{[](double x) { return 1.0 / x; },
                           [k](double x) { return k / (x * x); },
                           [](double x) { return -1.0 / (x * x); }};
    CHECK(canonical_q(coeffs, 2.0) == doctest::Approx(5.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("canonical_q numeric b' agrees with analytic to O(h^2) on smooth coefficients") {
    CoefficientPair analytic{[](double x) { return std::sin(x); }, [](double) { return 0.5; },
                             [](double x) { return std::cos(x); }};
    CoefficientPair numeric = analytic;
    numeric.b_prime = nullptr;
    for (double x : {0.2, 1.0, 2.5, 7.0, 19.0})
        CHECK(std::abs(canonical_q(analytic, x) - canonical_q(numeric, x)) <= 1e-8);
}

TEST_CASE("canonical_q identifies the failing coefficient") {
    CoefficientPair coeffs{[](double) { return 0.0; },
                           [](double x) { return std::sqrt(x); },  // NaN for x < 0
                           [](double) { return 0.0; }};
    CHECK_THROWS_WITH_AS(canonical_q(coeffs, -1.0),
                         doctest::Contains("coefficient c"), std::domain_error);
}

TEST_CASE("criterion_holds thresholds") {
    CHECK(criterion_holds(1.0, 1.0, 0.0));         // 1 > 1/4
    CHECK_FALSE(criterion_holds(1.0, 0.4, 0.0));   // 1 < 1/0.64
    CHECK(criterion_holds(5.0 / 16.0, 2.0, 0.0));  // Euler equation with k = 1
    CHECK_THROWS_AS(criterion_holds(1.0, 0.7, 0.7), std::domain_error);
}

TEST_CASE("criterion_holds approaches the sign test for x >> 1") {
    for (double q : {1e-5, 1e-7})
        CHECK(criterion_holds(q, 1e6, 0.0) == (q > 0.0));
    CHECK_FALSE(criterion_holds(-1e-12, 1e8, 0.0));
}

TEST_CASE("criterion_region: constant coefficients") {
    CoefficientPair coeffs{[](double) { return 0.0; }, [](double) { return 1.0; },
                           [](double) { return 0.0; }};
    const auto region = criterion_region(coeffs, 0.1, 10.0, 0.0, 4096);
    REQUIRE(region.intervals.size() == 1);
    CHECK(region.intervals[0].first == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(region.intervals[0].second == 10.0);
}

TEST_CASE("criterion_region: q = -3/(4x^2) never satisfies the bound") {
    CoefficientPair coeffs{[](double x) { return 1.0 / x; },
                           [](double x) { return -1.0 / (x * x); },
                           [](double x) { return -1.0 / (x * x); }};
    CHECK(criterion_region(coeffs, 0.1, 10.0, 0.0, 4096).empty());
}

TEST_CASE("criterion_region: b = 2/x with c = 1") {
    CoefficientPair coeffs{[](double x) { return 2.0 / x; }, [](double) { return 1.0; },
                           [](double x) { return -2.0 / (x * x); }};
    const auto region = criterion_region(coeffs, 0.1, 20.0, 0.0, 8192);
    REQUIRE(region.intervals.size() == 1);
    CHECK(region.intervals[0].first == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(region.intervals[0].second == 20.0);
}

TEST_CASE("criterion_region matches the closed form for constant pairs") {
    for (double b0 : {0.0, 0.5, 1.0, 2.2}) {
        for (double c0 : {-0.5, 0.05, 0.3, 1.0, 2.0}) {
            CoefficientPair coeffs{[b0](double) { return b0; }, [c0](double) { return c0; },
                                   [](double) { return 0.0; }};
            const double q = (4.0 * c0 - b0 * b0) / 4.0;
            const auto region = criterion_region(coeffs, 1e-3, 50.0, 0.0, 16384);
            if (q <= 0.0) {
                CHECK(region.empty());
            } else {
                const double edge = 0.5 / std::sqrt(q);
                REQUIRE(region.intervals.size() == 1);
                if (edge > 1e-3) {
                    CHECK(region.intervals[0].first == doctest::Approx(edge).epsilon(1e-7));
                } else {
                    CHECK(region.intervals[0].first == 1e-3);
                }
                CHECK(region.intervals[0].second == 50.0);
            }
        }
    }
}

TEST_CASE("criterion_region vs brute-forced Cauchy-Euler solutions") {
    for (double k : {-1.0, -0.1, 0.0, 0.1, 1.0}) {
        CoefficientPair coeffs{[](double x) { return 1.0 / x; },
                               [k](double x) { return k / (x * x); },
                               [](double x) { return -1.0 / (x * x); }};
        // Wide enough window for the slow k = 0.1 oscillation (period in
        // ln x is 2 pi / sqrt(k)).
        const double lo = 0.1;
        const double hi = k > 0.0 ? lo * std::exp(3.0 * std::numbers::pi / std::sqrt(k)) : 10.0;
        const bool oscillates = euler_equation_oscillates_brute_force(k, lo, hi);
        CHECK(oscillates == (k > 0.0));
        // k = 0 puts q exactly on the strict criterion boundary, where the
        // comparison is decided by rounding dust; skip the region check there.
        if (k != 0.0) {
            const bool criterion_nonempty = !criterion_region(coeffs, lo, hi, 0.0, 8192).empty();
            CHECK(criterion_nonempty == (k > 0.0));
        }
    }
}

TEST_CASE("criterion_region splits a domain containing the shift point") {
    // q = 1 everywhere; bound diverges at c1 = 1: region must exclude a
    // neighborhood of the shift and never straddle it.
    CoefficientPair coeffs{[](double) { return 0.0; }, [](double) { return 1.0; },
                           [](double) { return 0.0; }};
    const auto region = criterion_region(coeffs, 0.1, 10.0, 1.0, 8192);
    REQUIRE(region.intervals.size() == 2);
    CHECK(region.intervals[0].second == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(region.intervals[1].first == doctest::Approx(1.5).epsilon(1e-8));
    for (const auto& [lo, hi] : region.intervals) CHECK((hi <= 1.0 || lo >= 1.0));
}

TEST_CASE("euler transformation round trip") {
    CHECK(euler_map(0.0) == 1.0);
    CHECK(euler_unmap(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
    // The composition carries a |ln x| * eps relative error.
    CHECK(euler_map(euler_unmap(0.37)) == doctest::Approx(0.37).epsilon(1e-15));
    for (double x : {1.0, 2.5, 1e-6, 1e8})
        CHECK(euler_map(euler_unmap(x)) == doctest::Approx(x).epsilon(1e-14));
    for (double t : {-30.0, -1.0, 0.0, 1.0, 20.0})
        CHECK(std::abs(euler_unmap(euler_map(t)) - t) <= 1e-13);
    CHECK_THROWS_AS(euler_unmap(0.0), std::domain_error);
    CHECK_THROWS_AS(euler_unmap(-2.0), std::domain_error);
}
