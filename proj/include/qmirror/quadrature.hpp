#ifndef QMIRROR_QUADRATURE_HPP
#define QMIRROR_QUADRATURE_HPP

#include <cmath>
#include <cstdint>
#include <functional>

#include "qmirror/errors.hpp"

namespace qmirror {

/// Composite Simpson on [a, b] with n panels (2n+1 evaluations).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, std::int64_t panels) {
    if (panels < 1) panels = 1;
    const double h = (b - a) / (2.0 * double(panels));
    double odd = 0.0, even = 0.0, codd = 0.0, ceven = 0.0;
    // Kahan accumulation: the sums span up to ~1e6 oscillatory terms.
    auto acc = [](double& s, double& c, double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    };
    for (std::int64_t i = 1; i <= 2 * panels - 1; i += 2)
        acc(odd, codd, f(a + h * double(i)));
    for (std::int64_t i = 2; i <= 2 * panels - 2; i += 2)
        acc(even, ceven, f(a + h * double(i)));
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

/// Simpson with one halving step. Throws if the two refinements disagree
/// beyond rel_tol (Richardson error estimate on the finer grid).
inline double simpson_checked(const std::function<double(double)>& f,
                              double a, double b, std::int64_t panels,
                              double rel_tol, double abs_floor = 0.0) {
    const double coarse = simpson(f, a, b, panels);
    const double fine = simpson(f, a, b, 2 * panels);
    const double err = std::abs(fine - coarse) / 15.0;
    const double scale = std::max(std::abs(fine), abs_floor);
    if (scale > 0.0 && err > rel_tol * scale)
        throw QuadratureNonConverged("Simpson refinement error " +
                                     std::to_string(err / scale) +
                                     " exceeds tolerance");
    return fine + (fine - coarse) / 15.0;
}

/// Two-point Richardson extrapolation to zero of a regulator: given
/// g(eps) = g0 + c*eps + O(eps^2), returns g0 from eps and eps/2.
inline double richardson_to_zero(const std::function<double(double)>& g,
                                 double eps) {
    const double g1 = g(eps);
    const double g2 = g(eps / 2.0);
    return 2.0 * g2 - g1;
}

}  // namespace qmirror

#endif
