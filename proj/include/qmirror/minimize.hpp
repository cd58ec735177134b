#ifndef QMIRROR_MINIMIZE_HPP
#define QMIRROR_MINIMIZE_HPP

#include <cmath>
#include <functional>

#include "qmirror/errors.hpp"

namespace qmirror {

struct MinimizeResult {
    double x = 0.0;
    double f = 0.0;
    int evaluations = 0;
};

/// Golden-section search with a parabolic polish. The golden phase shrinks
/// the bracket to a modest relative width; successive parabolic
/// interpolation then recovers the minimizer far below the sqrt(eps)
/// floor a pure comparison search is limited to (the objective is smooth
/// near its minimum in every use here).
inline MinimizeResult minimize_scalar(const std::function<double(double)>& f,
                                      double a, double b,
                                      double rel_tol = 1e-10,
                                      int max_iter = 400) {
    if (!(a < b)) throw BracketFailure("empty bracket");
    const double a0 = a, b0 = b;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int evals = 2;

    const double coarse = 1e-4;  // hand off to parabolic refinement here
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (x1 + x2);
        if ((b - a) <= coarse * std::abs(mid) + 1e-300) break;
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }

    // A monotone objective drives the bracket into an endpoint; that is
    // a caller error (no interior optimum), not a convergence result.
    if (f1 < f2 && a == a0)
        throw BracketFailure("objective monotone increasing on bracket");
    if (f2 <= f1 && b == b0)
        throw BracketFailure("objective monotone decreasing on bracket");

    // Parabolic refinement on three points straddling the minimum.
    double xm = f1 < f2 ? x1 : x2;
    double fm = std::min(f1, f2);
    double xl = a, xr = b;
    double fl = f(xl), fr = f(xr);
    evals += 2;
    for (int i = 0; i < 60; ++i) {
        const double d1 = xm - xl, d2 = xm - xr;
        const double g1 = fm - fl, g2 = fm - fr;
        const double num = d1 * d1 * g2 - d2 * d2 * g1;
        const double den = d1 * g2 - d2 * g1;
        if (den == 0.0) break;
        const double xn = xm - 0.5 * num / den;
        if (!(xn > xl && xn < xr) || xn == xm) break;
        const double fn = f(xn);
        ++evals;
        if (fn <= fm) {
            if (xn < xm) { xr = xm; fr = fm; }
            else         { xl = xm; fl = fm; }
            if (std::abs(xn - xm) <= rel_tol * std::abs(xn)) {
                xm = xn; fm = fn;
                break;
            }
            xm = xn; fm = fn;
        } else {
            if (xn < xm) { xl = xn; fl = fn; }
            else         { xr = xn; fr = fn; }
            if ((xr - xl) <= rel_tol * std::abs(xm)) break;
        }
    }
    // Fixed-spacing vertex polish. Comparison-based refinement stalls at
    // sqrt(eps)|x| because f differences drown in rounding there; a
    // parabola fitted through points far enough apart to see real f
    // differences localizes the vertex one order deeper.
    for (int pass = 0; pass < 2; ++pass) {
        const double h = std::abs(xm) * std::sqrt(rel_tol);
        if (h == 0.0 || xm - h <= a0 || xm + h >= b0) break;
        const double fl2 = f(xm - h), fr2 = f(xm + h);
        const double den = fl2 - 2.0 * fm + fr2;
        evals += 2;
        if (!(den > 0.0)) break;
        const double xn = xm + 0.5 * h * (fl2 - fr2) / den;
        const double fn = f(xn);
        ++evals;
        xm = xn;
        fm = std::min(fm, fn);
    }
    return {xm, fm, evals};
}

/// Maximize by minimizing the negation.
inline MinimizeResult maximize_scalar(const std::function<double(double)>& f,
                                      double a, double b,
                                      double rel_tol = 1e-10) {
    auto r = minimize_scalar([&](double x) { return -f(x); }, a, b, rel_tol);
    r.f = -r.f;
    return r;
}

}  // namespace qmirror

#endif
