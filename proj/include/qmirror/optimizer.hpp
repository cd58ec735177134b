#ifndef QMIRROR_OPTIMIZER_HPP
#define QMIRROR_OPTIMIZER_HPP

#include <cmath>
#include <string>
#include <vector>

#include "qmirror/budget.hpp"
#include "qmirror/minimize.hpp"
#include "qmirror/params.hpp"

namespace qmirror {

struct OptimumReport {
    double zeta = 0.0;
    double p_opt = 0.0;      // energy^2
    double min_dz2 = 0.0;    // length^2
    int branch_sign = 0;     // +1 for zeta > 0, -1 for zeta < 0
    double sql_ratio = 0.0;  // min_dz2 / (t/m)
    bool admissible = false;
};

// total(P) at fixed zeta, in the closed late-time form. Exposed because
// the numeric minimizer and the sweeps both need it directly.
inline double total_at(double zeta, double p_power, double mass,
                       double omega_bar, double t) {
    const double pw_t = p_power * omega_bar * t;
    const double cubic = p_power * omega_bar * t * t * t / (mass * mass);
    return zeta * zeta / (4.0 * pw_t) + 2.0 * zeta * t / mass +
           cubic * (5.5 - 1.5 * zeta * zeta);
}

inline OptimumReport optimal_power(double zeta, double mass, double omega_bar,
                                   double t) {
    if (zeta == 0.0) throw ZetaZero("no finite optimum at zeta = 0");
    const double disc = 22.0 - 6.0 * zeta * zeta;
    if (!(disc > 0.0))
        throw DiscriminantNonpositive("zeta^2 >= 11/3: no power optimum");
    if (!(t > 0.0)) throw InvalidParam("t", "time must be positive");
    OptimumReport r;
    r.zeta = zeta;
    r.branch_sign = zeta > 0.0 ? +1 : -1;
    r.p_opt = std::abs(zeta) / std::sqrt(disc) * mass / (omega_bar * t * t);
    const double root = std::sqrt(5.5 - 1.5 * zeta * zeta);
    r.min_dz2 = zeta * (2.0 + r.branch_sign * root) * t / mass;
    r.sql_ratio = r.min_dz2 / (t / mass);
    r.admissible = zeta_in_admissible_range(zeta);
    return r;
}

inline OptimumReport numeric_minimize(double zeta, double mass,
                                      double omega_bar, double t) {
    if (zeta == 0.0) throw ZetaZero("no finite optimum at zeta = 0");
    const double scale = mass / (omega_bar * t * t);
    auto obj = [&](double p) { return total_at(zeta, p, mass, omega_bar, t); };
    const auto m = minimize_scalar(obj, 1e-6 * scale, 1e2 * scale, 1e-10);
    OptimumReport r;
    r.zeta = zeta;
    r.branch_sign = zeta > 0.0 ? +1 : -1;
    r.p_opt = m.x;
    r.min_dz2 = m.f;
    r.sql_ratio = r.min_dz2 / (t / mass);
    r.admissible = zeta_in_admissible_range(zeta);
    return r;
}

/// Scan the negative admissible branch for the zeta whose optimized
/// uncertainty is largest (worst case still sits below the SQL).
inline std::pair<double, double> worst_negative_zeta(double mass,
                                                     double omega_bar,
                                                     double t) {
    const double lo = -1.0 + 1e-9;
    const double hi = -(std::numbers::sqrt2 - 1.0) - 1e-9;
    auto value = [&](double z) {
        return optimal_power(z, mass, omega_bar, t).min_dz2;
    };
    const auto m = maximize_scalar(value, lo, hi, 1e-12);
    return {m.x, m.f};
}

struct SweepRow {
    double axis_value = 0.0;
    NoiseBudget budget{};
    double sql = 0.0;  // t/m reference
};

struct SweepTable {
    std::string axis;  // "zeta" or "sqrtP_t"
    std::vector<SweepRow> rows;
};

/// axis == "zeta": vary the geometry factor at fixed (P, t); axis value
/// is zeta itself.
/// axis == "sqrtP_t": vary observation time at fixed P; axis value is
/// sqrt(P) * t, the abscissa the log-log uncertainty plots use.
inline SweepTable sweep(const SystemParams& params, const std::string& axis,
                        double lo, double hi, int steps, double t = 0.0,
                        bool zeta_at_optimal_power = false) {
    if (steps < 2) throw InvalidParam("steps", "need at least 2");
    if (!(lo < hi)) throw InvalidParam("range", "lo must be below hi");
    SweepTable table;
    table.axis = axis;
    table.rows.resize(steps);
    const double p_flux = power_flux(params);
    if (axis == "zeta") {
        if (!(t > 0.0)) throw InvalidParam("t", "zeta sweep needs t > 0");
        for (int i = 0; i < steps; ++i) {
            const double z = lo + (hi - lo) * i / (steps - 1);
            SweepRow& r = table.rows[i];
            r.axis_value = z;
            double p_here = p_flux;
            if (zeta_at_optimal_power && z != 0.0 && z * z < 11.0 / 3.0)
                p_here = optimal_power(z, params.mass, params.omega_bar, t)
                             .p_opt;
            const double pw_t = p_here * params.omega_bar * t;
            const double cubic = p_here * params.omega_bar * t * t * t /
                                 (params.mass * params.mass);
            r.budget.sn = z * z / (4.0 * pw_t);
            r.budget.rp = cubic;
            r.budget.mf = cubic;
            r.budget.cor_linear = 2.0 * z * t / params.mass;
            r.budget.cor_quadratic = cubic * (3.5 - 1.5 * z * z);
            r.budget.total = r.budget.sn + r.budget.rp + r.budget.mf +
                             r.budget.cor_linear + r.budget.cor_quadratic;
            r.sql = t / params.mass;
        }
    } else if (axis == "sqrtP_t") {
        // log-spaced in t; lo/hi are sqrt(P)*t endpoints
        const double sp = std::sqrt(p_flux);
        for (int i = 0; i < steps; ++i) {
            const double x =
                lo * std::pow(hi / lo, double(i) / (steps - 1));
            const double ti = x / sp;
            SweepRow& r = table.rows[i];
            r.axis_value = x;
            r.budget = noise_budget(params, ti);
            r.sql = ti / params.mass;
        }
    } else {
        throw InvalidParam("axis", "expected zeta or sqrtP_t");
    }
    return table;
}

}  // namespace qmirror

#endif
