// Embedded Dormand-Prince 5(4) pair for two-component systems, with the
// classical 4th-order continuous extension. Templated on the scalar type so
// qualification tests can instantiate the same core at extended precision.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>

namespace cnlslab::rk {

template <class Real>
using State = std::array<Real, 2>;

template <class Real>
bool finite_value(const Real& v) {
    if constexpr (std::is_floating_point_v<Real>) {
        return std::isfinite(v);
    } else {
        using std::abs;
        return v == v && abs(v) < std::numeric_limits<Real>::max();
    }
}

/// One accepted step with its dense-output coefficients. The interpolant is
/// P(theta) = r0 + theta (r1 + theta1 (r2 + theta (r3 + theta1 r4))) with
/// theta = (x - x0)/h, theta1 = 1 - theta; exact at both endpoints.
template <class Real>
struct DenseSegment {
    Real x0{};
    Real h{};
    std::array<std::array<Real, 5>, 2> rcont{};

    Real x1() const { return x0 + h; }

    Real eval(std::size_t comp, const Real& x) const {
        const Real theta = (x - x0) / h;
        const Real theta1 = Real(1) - theta;
        const auto& r = rcont[comp];
        return r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])));
    }

    Real eval_derivative(std::size_t comp, const Real& x) const {
        const Real theta = (x - x0) / h;
        const Real theta1 = Real(1) - theta;
        const auto& r = rcont[comp];
        const Real dp_dtheta = r[1] + r[2] * (Real(1) - Real(2) * theta) +
                               r[3] * theta * (Real(2) - Real(3) * theta) +
                               r[4] * Real(2) * theta * theta1 * (Real(1) - Real(2) * theta);
        return dp_dtheta / h;
    }
};

enum class RunStatus { ReachedEnd, StoppedByCallback, StepSizeUnderflow, MaxStepsExceeded };

template <class Real, class RHS>
class Dopri5 {
  public:
    Dopri5(RHS rhs, Real rel_tol, Real abs_tol)
        : rhs_(std::move(rhs)), rtol_(rel_tol), atol_(abs_tol) {}

    /// Adaptive integration of y' = f(x, y) from x0 to x_end. After every
    /// accepted step, on_step(segment, x1, y1, f1) is invoked; returning
    /// false stops the run.
    template <class OnStep>
    RunStatus run(Real x0, State<Real> y0, Real x_end, long max_steps, OnStep&& on_step) {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;

        Real x = x0;
        State<Real> y = y0;
        State<Real> f = rhs_(x, y);
        Real h = initial_step(x, y, f, x_end);
        bool last_rejected = false;

        const Real end_slack = Real(4) * std::numeric_limits<Real>::epsilon() *
                               max(Real(1), abs(x_end));
        for (long step = 0; step < max_steps; ++step) {
            if (x_end - x <= end_slack) return RunStatus::ReachedEnd;
            h = min(h, x_end - x);
            if (h <= step_floor(x)) return RunStatus::StepSizeUnderflow;

            State<Real> y1;
            State<Real> f1;
            std::array<State<Real>, 7> k;
            const Real err = attempt(x, y, f, h, y1, f1, k);

            if (!(err <= Real(1))) {  // rejected (covers non-finite err)
                Real fac = Real(1) / Real(2);
                if (finite_value(err) && err > Real(0))
                    fac = max(Real(1) / Real(5), Real(9) / Real(10) * pow(err, Real(-0.2)));
                h *= min(fac, Real(1));
                last_rejected = true;
                continue;
            }

            DenseSegment<Real> seg = make_segment(x, y, f, h, y1, f1, k);
            const Real x1 = x + h;
            x = x1;
            y = y1;
            f = f1;  // FSAL
            if (!on_step(static_cast<const DenseSegment<Real>&>(seg), x, y, f))
                return RunStatus::StoppedByCallback;

            Real fac = Real(10);
            if (err > Real(0)) fac = Real(9) / Real(10) * pow(err, Real(-0.2));
            fac = min(Real(10), max(Real(1) / Real(5), fac));
            if (last_rejected) fac = min(fac, Real(1));
            h *= fac;
            last_rejected = false;
        }
        return RunStatus::MaxStepsExceeded;
    }

    /// Fixed-step mode (no error control), for convergence-order checks.
    State<Real> run_fixed(Real x0, State<Real> y0, Real x_end, long n_steps) const {
        const Real h = (x_end - x0) / Real(n_steps);
        State<Real> y = y0;
        Real x = x0;
        State<Real> f = rhs_(x, y);
        for (long i = 0; i < n_steps; ++i) {
            State<Real> y1, f1;
            std::array<State<Real>, 7> k;
            attempt(x, y, f, h, y1, f1, k);
            x = x0 + h * Real(i + 1);
            y = y1;
            f = f1;
        }
        return y;
    }

  private:
    static Real rat(long num, long den) { return Real(num) / Real(den); }

    static Real step_floor(const Real& x) {
        using std::abs;
        using std::max;
        return Real(16) * std::numeric_limits<Real>::epsilon() * max(Real(1), abs(x));
    }

    // Stages, 5th-order solution and scaled error norm for one trial step.
    Real attempt(const Real& x, const State<Real>& y, const State<Real>& k1, const Real& h,
                 State<Real>& y1, State<Real>& f1, std::array<State<Real>, 7>& k) const {
        using std::abs;
        using std::max;
        using std::sqrt;

        static const Real c2 = rat(1, 5), c3 = rat(3, 10), c4 = rat(4, 5), c5 = rat(8, 9);
        static const Real a21 = rat(1, 5);
        static const Real a31 = rat(3, 40), a32 = rat(9, 40);
        static const Real a41 = rat(44, 45), a42 = rat(-56, 15), a43 = rat(32, 9);
        static const Real a51 = rat(19372, 6561), a52 = rat(-25360, 2187),
                          a53 = rat(64448, 6561), a54 = rat(-212, 729);
        static const Real a61 = rat(9017, 3168), a62 = rat(-355, 33), a63 = rat(46732, 5247),
                          a64 = rat(49, 176), a65 = rat(-5103, 18656);
        static const Real a71 = rat(35, 384), a73 = rat(500, 1113), a74 = rat(125, 192),
                          a75 = rat(-2187, 6784), a76 = rat(11, 84);
        static const Real e1 = rat(71, 57600), e3 = rat(-71, 16695), e4 = rat(71, 1920),
                          e5 = rat(-17253, 339200), e6 = rat(22, 525), e7 = rat(-1, 40);

        k[0] = k1;
        State<Real> yt;
        for (std::size_t i = 0; i < 2; ++i) yt[i] = y[i] + h * (a21 * k[0][i]);
        k[1] = rhs_(x + c2 * h, yt);
        for (std::size_t i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
        k[2] = rhs_(x + c3 * h, yt);
        for (std::size_t i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
        k[3] = rhs_(x + c4 * h, yt);
        for (std::size_t i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
        k[4] = rhs_(x + c5 * h, yt);
        for (std::size_t i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                                a65 * k[4][i]);
        k[5] = rhs_(x + h, yt);
        for (std::size_t i = 0; i < 2; ++i)
            y1[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                                a76 * k[5][i]);
        k[6] = rhs_(x + h, y1);
        f1 = k[6];

        Real err_sq = Real(0);
        for (std::size_t i = 0; i < 2; ++i) {
            const Real e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                                e6 * k[5][i] + e7 * k[6][i]);
            if (!finite_value(e) || !finite_value(y1[i]))
                return std::numeric_limits<Real>::infinity();
            const Real sc = atol_ + rtol_ * max(abs(y[i]), abs(y1[i]));
            err_sq += (e / sc) * (e / sc);
        }
        return sqrt(err_sq / Real(2));
    }

    DenseSegment<Real> make_segment(const Real& x, const State<Real>& y, const State<Real>& k1,
                                    const Real& h, const State<Real>& y1, const State<Real>& f1,
                                    const std::array<State<Real>, 7>& k) const {
        static const Real d1 = rat(-12715105075L, 11282082432L);
        static const Real d3 = rat(87487479700L, 32700410799L);
        static const Real d4 = rat(-10690763975L, 1880347072L);
        static const Real d5 = rat(701980252875L, 199316789632L);
        static const Real d6 = rat(-1453857185L, 822651844L);
        static const Real d7 = rat(69997945L, 29380423L);

        DenseSegment<Real> seg;
        seg.x0 = x;
        seg.h = h;
        for (std::size_t i = 0; i < 2; ++i) {
            const Real dy = y1[i] - y[i];
            const Real bspl = h * k1[i] - dy;
            seg.rcont[i][0] = y[i];
            seg.rcont[i][1] = dy;
            seg.rcont[i][2] = bspl;
            seg.rcont[i][3] = dy - h * f1[i] - bspl;
            seg.rcont[i][4] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                                   d6 * k[5][i] + d7 * k[6][i]);
        }
        return seg;
    }

    Real initial_step(const Real& x, const State<Real>& y, const State<Real>& f,
                      const Real& x_end) const {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;
        using std::sqrt;

        State<Real> sc;
        for (std::size_t i = 0; i < 2; ++i) sc[i] = atol_ + rtol_ * abs(y[i]);
        Real d0 = Real(0), d1 = Real(0);
        for (std::size_t i = 0; i < 2; ++i) {
            d0 += (y[i] / sc[i]) * (y[i] / sc[i]);
            d1 += (f[i] / sc[i]) * (f[i] / sc[i]);
        }
        d0 = sqrt(d0 / Real(2));
        d1 = sqrt(d1 / Real(2));

        Real h0;
        if (d0 < Real(1e-5) || d1 < Real(1e-5))
            h0 = Real(1e-6);
        else
            h0 = Real(1) / Real(100) * (d0 / d1);
        h0 = min(h0, x_end - x);

        State<Real> y1;
        for (std::size_t i = 0; i < 2; ++i) y1[i] = y[i] + h0 * f[i];
        const State<Real> f1 = rhs_(x + h0, y1);
        Real d2 = Real(0);
        for (std::size_t i = 0; i < 2; ++i)
            d2 += ((f1[i] - f[i]) / sc[i]) * ((f1[i] - f[i]) / sc[i]);
        d2 = sqrt(d2 / Real(2)) / h0;

        Real h1;
        const Real d12 = max(d1, d2);
        if (d12 <= Real(1e-15))
            h1 = max(Real(1e-6), h0 * Real(1e-3));
        else
            h1 = pow(Real(1) / Real(100) / d12, Real(1) / Real(5));
        return min(min(Real(100) * h0, h1), x_end - x);
    }

    RHS rhs_;
    Real rtol_;
    Real atol_;
};

}  // namespace cnlslab::rk
