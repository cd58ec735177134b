#ifndef QMIRROR_BAND_HPP
#define QMIRROR_BAND_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "qmirror/params.hpp"
#include "qmirror/quadrature.hpp"

namespace qmirror {

enum class BandShape { top_hat, gaussian };

struct BandSpec {
    double center = 1.0;     // band center frequency
    double half_width = 0.1; // sigma0
    BandShape shape = BandShape::top_hat;
    int points = 2001;       // base quadrature resolution (odd, >= 3)
};

struct BandBudget {
    double sn_bar = 0.0;
    double rp_bar = 0.0;
    double mf_plus_cor_bar = 0.0;
    double total_bar = 0.0;
    double p_opt_bar = 0.0;
    double min_bar = 0.0;
};

inline void check_band_regime(const SystemParams& p, double sigma0) {
    if (!(sigma0 > 0.0))
        throw BandRegimeInvalid("band half-width must be positive");
    if (!(sigma0 * p.thresholds.bandwidth_separation <= p.omega_bar))
        throw BandRegimeInvalid("band not narrow against the carrier");
    if (!(sigma0 * p.l_minus_z0 >= p.thresholds.band_resolution))
        throw BandRegimeInvalid(
            "band too narrow to wash out the fringe phase");
}

/// Fast-phase averages: over many fringe oscillations sin^4 -> 3/8,
/// sin^2 cos^2 -> 1/8, sin^3 cos -> 0, sin^2(2u) -> 1/2. The correlated
/// terms then cancel identically against the modified-field term, leaving
/// a fringe-free two-term budget.
inline BandBudget band_budget_closed_form(const SystemParams& p, double t) {
    const double sigma0 = p.sigma0 ? *p.sigma0 : 0.0;
    check_band_regime(p, sigma0);
    if (!(t > 0.0)) throw InvalidParam("t", "time must be positive");
    const double pf = power_flux(p);
    if (!(pf > 0.0)) throw PowerZero("averaged shot noise diverges");
    BandBudget b;
    b.sn_bar = 0.75 / (pf * p.omega_bar * t);
    b.rp_bar = pf * p.omega_bar * t * t * t / (p.mass * p.mass);
    b.mf_plus_cor_bar = 0.0;
    b.total_bar = b.sn_bar + b.rp_bar + b.mf_plus_cor_bar;
    b.p_opt_bar = 0.5 * std::sqrt(3.0) * p.mass / (p.omega_bar * t * t);
    b.min_bar = std::sqrt(3.0) * t / p.mass;
    return b;
}

inline std::pair<double, double> band_optimum(const SystemParams& p,
                                              double t) {
    const BandBudget b = band_budget_closed_form(p, t);
    return {b.p_opt_bar, b.min_bar};
}

/// Weighted average of g(omega) over the band, the weight clipped to
/// omega > 0. Resolution is raised automatically so every fringe
/// oscillation across the band gets at least 20 points.
inline double band_average_of(const std::function<double(double)>& g,
                              const BandSpec& band, double fringe_length) {
    const double w = band.shape == BandShape::gaussian ? 5.0 * band.half_width
                                                       : band.half_width;
    const double lo = std::max(band.center - w, 1e-12 * band.center);
    const double hi = band.center + w;
    auto weight = [&](double om) {
        if (band.shape == BandShape::top_hat) return 1.0;
        const double x = (om - band.center) / band.half_width;
        return std::exp(-0.5 * x * x);
    };
    const double oscillations =
        (hi - lo) * fringe_length / std::numbers::pi;
    std::int64_t pts = std::max<std::int64_t>(band.points,
                                              std::int64_t(20.0 * oscillations));
    std::int64_t panels = std::max<std::int64_t>(pts / 2, 8);
    auto num = [&](double om) { return weight(om) * g(om); };
    auto den = [&](double om) { return weight(om); };
    const double norm = simpson(den, lo, hi, panels);
    // Convergence is judged against the integral of |g|, so a term that
    // averages to zero by cancellation is not flagged spuriously.
    const double floor =
        simpson([&](double om) { return std::abs(num(om)); }, lo, hi, panels);
    const double val = simpson_checked(num, lo, hi, panels, 1e-6, floor);
    return val / norm;
}

enum class BandTerm { sn, rp, mf, cor_linear, cor_quadratic, mf_plus_cor,
                      total };

/// Direct quadrature of one budget term over the band. The fringe phase
/// omega (L - z0) is kept exact; the slowly varying flux factor rides
/// along at omega. Numerator and the squared-slope normalization are
/// averaged separately, as the closed forms require.
inline double numeric_band_average(const SystemParams& p, double t,
                                   const BandSpec& band, BandTerm which) {
    check_band_regime(p, band.half_width);
    const double d = p.l_minus_z0;
    const double m = p.mass;
    auto flux = [&](double om) {
        return p.area * p.alpha_sq * om / two_pi_cubed;
    };
    auto numerator = [&](double om) {
        const double s = std::sin(om * d), c = std::cos(om * d);
        const double s2 = s * s, c2 = c * c;
        const double cubic = flux(om) * om * t * t * t / (m * m);
        double v = 0.0;
        switch (which) {
            case BandTerm::sn:
                v = s2 * s2 / (flux(om) * om * t);
                break;
            case BandTerm::rp:
            case BandTerm::mf:
                v = 4.0 * s2 * c2 * cubic;
                break;
            case BandTerm::cor_linear:
                v = 4.0 * s2 * s * c * 2.0 * t / m;
                break;
            case BandTerm::cor_quadratic:
                v = (14.0 * s2 * c2 - 6.0 * s2 * s2) * cubic;
                break;
            case BandTerm::mf_plus_cor:
                v = 4.0 * s2 * c2 * cubic +
                    4.0 * s2 * s * c * 2.0 * t / m +
                    (14.0 * s2 * c2 - 6.0 * s2 * s2) * cubic;
                break;
            case BandTerm::total:
                v = s2 * s2 / (flux(om) * om * t) +
                    2.0 * 4.0 * s2 * c2 * cubic +
                    4.0 * s2 * s * c * 2.0 * t / m +
                    (14.0 * s2 * c2 - 6.0 * s2 * s2) * cubic;
                break;
        }
        return v;
    };
    auto denominator = [&](double om) {
        const double x = std::sin(2.0 * om * d);
        return x * x;
    };
    const double num = band_average_of(numerator, band, d);
    const double den = band_average_of(denominator, band, d);
    return num / den;
}

}  // namespace qmirror

#endif
