#ifndef QMIRROR_BUDGET_HPP
#define QMIRROR_BUDGET_HPP

#include <cmath>

#include "qmirror/params.hpp"

namespace qmirror {

// All entries carry length^2 (natural units: 1/m^2).
struct NoiseBudget {
    double sn = 0.0;             // shot noise, zeta^2 / (4 P omega t)
    double rp = 0.0;             // radiation-pressure fluctuations
    double mf = 0.0;             // modified-field fluctuations
    double cor_linear = 0.0;     // O(q) correlation pair, odd in zeta
    double cor_quadratic = 0.0;  // O(q^2) correlation group
    double total = 0.0;
};

struct MeanObservables {
    double mean_i = 0.0;          // accumulated read-out
    double mean_q = 0.0;          // mean displacement P t^2 / m
    double d_mean_i_dl = 0.0;     // first derivative w.r.t. mirror position
    double d2_mean_i_dl2 = 0.0;   // second derivative
};

inline MeanObservables mean_signal(const SystemParams& p, double t) {
    const double u = p.omega_bar * p.l_minus_z0;
    const double c = p.area * p.alpha_sq / two_pi_cubed;
    const double s = std::sin(u);
    MeanObservables m;
    m.mean_i = c * (2.0 / p.omega_bar) * s * s * t;
    m.d_mean_i_dl = c * 2.0 * std::sin(2.0 * u) * t;
    m.d2_mean_i_dl2 = c * 4.0 * p.omega_bar * std::cos(2.0 * u) * t;
    m.mean_q = power_flux(p) * t * t / p.mass;
    return m;
}

inline NoiseBudget noise_budget(const SystemParams& p, double t) {
    const DerivedScales d = derive_scales(p, t);
    if (!(d.power > 0.0))
        throw PowerZero("shot noise diverges at zero power");
    if (!(t > 0.0)) throw InvalidParam("t", "time must be positive");
    const double z = d.zeta;
    const double pw_t = d.power * p.omega_bar * t;
    const double cubic = d.power * p.omega_bar * t * t * t / (p.mass * p.mass);
    NoiseBudget b;
    b.sn = z * z / (4.0 * pw_t);
    b.rp = cubic;
    b.mf = cubic;
    b.cor_linear = 2.0 * z * t / p.mass;
    b.cor_quadratic = cubic * (3.5 - 1.5 * z * z);
    b.total = b.sn + b.rp + b.mf + b.cor_linear + b.cor_quadratic;
    return b;
}

inline double shot_noise_alone(const SystemParams& p, double t) {
    const DerivedScales d = derive_scales(p, t);
    if (!(d.power > 0.0))
        throw PowerZero("shot noise diverges at zero power");
    return 0.25 * d.zeta * d.zeta / (d.power * p.omega_bar * t);
}

struct ParticleNumberView {
    double mean_n = 0.0;
    double i_from_n = 0.0;
};

inline ParticleNumberView particle_number_view(const SystemParams& p,
                                               double t) {
    ParticleNumberView v;
    v.mean_n = p.area * p.alpha_sq / two_pi_cubed * t;
    const double s = std::sin(p.omega_bar * p.l_minus_z0);
    v.i_from_n = (2.0 / p.omega_bar) * s * s * v.mean_n;
    return v;
}

}  // namespace qmirror

#endif
