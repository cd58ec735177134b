#ifndef QMIRROR_LANGEVIN_HPP
#define QMIRROR_LANGEVIN_HPP

#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <thread>
#include <vector>

#include "qmirror/params.hpp"

namespace qmirror {

struct BackreactionCoefficients {
    double mean_force = 0.0;     // F-bar(t), never negative
    double d_force_dq = 0.0;     // local variation of the force in q
    double c_q = 0.0;            // stiffness-like back-reaction coefficient
    double c_v = 0.0;            // damping-like coefficient, never negative
    double theta = 0.0;          // retarded carrier phase
};

inline BackreactionCoefficients backreaction_coefficients(
    const SystemParams& p, double t) {
    BackreactionCoefficients c;
    const double pf = power_flux(p);
    c.theta = p.omega_bar * (t - p.mirror_position) - p.phase;
    const double s = std::sin(c.theta);
    // amplitudes rewritten through the flux: |alpha|^2 omega A/(2 pi^3) = 4P
    c.mean_force = 2.0 * pf * (1.0 - std::cos(2.0 * c.theta));
    c.d_force_dq = -4.0 * pf * p.omega_bar * std::sin(2.0 * c.theta);
    c.c_q = 2.0 * pf * p.omega_bar * std::sin(2.0 * c.theta);
    c.c_v = 4.0 * pf * s * s;
    return c;
}

enum class NoiseMode { off, white, dense };

/// Spectral strength of the white force noise calibrated so a free mass
/// doubly integrating it reproduces the cubic displacement variance
/// growth: var q = S_F t^3 / (3 m^2).
inline double white_noise_intensity(const SystemParams& p) {
    return 3.0 * power_flux(p) * p.omega_bar;
}

/// The regulated dense kernel integrates to this strength; it differs
/// from the white calibration by design and is surfaced, not hidden.
inline double dense_noise_intensity(const SystemParams& p) {
    return 4.0 * power_flux(p) * p.omega_bar;
}

namespace detail {

// splitmix64: decorrelates (seed, path) pairs so ensembles are
// independent of how paths are distributed over threads
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t path) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (path + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// White-in-time Gaussian force samples on a uniform grid (step dt), or
/// a dense-covariance draw from the regulated stationary kernel
/// K(tau) = (S/pi) eta / (eta^2 + tau^2) with eta tied to the grid step.
inline std::vector<double> synthesize_force_noise(
    const SystemParams& p, std::int64_t nsteps, double dt,
    std::uint64_t seed, NoiseMode mode = NoiseMode::white,
    std::uint64_t path_index = 0) {
    std::vector<double> xi(nsteps, 0.0);
    if (mode == NoiseMode::off || power_flux(p) == 0.0) return xi;
    if (!(dt > 0.0)) throw InvalidParam("dt", "step must be positive");
    if (dt > 2.0 * std::numbers::pi / p.omega_bar / 40.0)
        throw StepTooCoarse("need at least 40 steps per carrier period");
    std::mt19937_64 rng(detail::mix_seed(seed, path_index));
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (mode == NoiseMode::white) {
        const double amp = std::sqrt(white_noise_intensity(p) / dt);
        for (auto& x : xi) x = amp * gauss(rng);
        return xi;
    }
    // dense covariance: O(n^3) factorization, intended for short grids
    if (nsteps > 4096)
        throw InvalidParam("nsteps",
                           "dense covariance mode limited to 4096 steps");
    const double s_eff = dense_noise_intensity(p);
    const double eta = 2.0 * dt;
    const std::int64_t n = nsteps;
    std::vector<double> cov(std::size_t(n) * n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j <= i; ++j) {
            const double tau = double(i - j) * dt;
            const double k =
                s_eff / std::numbers::pi * eta / (eta * eta + tau * tau);
            cov[i * n + j] = k;
            cov[j * n + i] = k;
        }
    // in-place lower Cholesky with a small diagonal jitter budget
    const double jitter = 1e-10 * cov[0];
    std::vector<double> chol(cov);
    for (std::int64_t j = 0; j < n; ++j) {
        double d = chol[j * n + j] + jitter;
        for (std::int64_t k = 0; k < j; ++k)
            d -= chol[j * n + k] * chol[j * n + k];
        if (!(d > 0.0))
            throw CovarianceNotPSD(
                "regulated noise kernel lost positive definiteness at row " +
                std::to_string(j));
        const double dj = std::sqrt(d);
        chol[j * n + j] = dj;
        for (std::int64_t i = j + 1; i < n; ++i) {
            double v = chol[i * n + j];
            for (std::int64_t k = 0; k < j; ++k)
                v -= chol[i * n + k] * chol[j * n + k];
            chol[i * n + j] = v / dj;
        }
    }
    std::vector<double> z(n);
    for (auto& x : z) x = gauss(rng);
    for (std::int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::int64_t k = 0; k <= i; ++k) acc += chol[i * n + k] * z[k];
        xi[i] = acc;
    }
    return xi;
}

struct Trajectory {
    std::vector<double> time;
    std::vector<double> q;
    std::vector<double> v;
    std::uint64_t seed = 0;
    double dt = 0.0;
    bool relativistic_flagged = false;
};

namespace detail {

struct DriveTables {
    std::vector<double> f_mid;    // mean force at interval midpoints
    std::vector<double> stiff;    // (dF/dq - c_q) at grid points
    std::vector<double> damp;     // c_v at grid points
};

inline DriveTables make_drive_tables(const SystemParams& p,
                                     std::int64_t nsteps, double dt,
                                     bool backreaction) {
    DriveTables tb;
    tb.f_mid.resize(nsteps);
    tb.stiff.assign(nsteps + 1, 0.0);
    tb.damp.assign(nsteps + 1, 0.0);
    for (std::int64_t i = 0; i < nsteps; ++i) {
        tb.f_mid[i] =
            backreaction_coefficients(p, (double(i) + 0.5) * dt).mean_force;
    }
    if (backreaction) {
        for (std::int64_t i = 0; i <= nsteps; ++i) {
            const auto c = backreaction_coefficients(p, double(i) * dt);
            tb.stiff[i] = c.d_force_dq - c.c_q;
            tb.damp[i] = c.c_v;
        }
    }
    return tb;
}

// One leapfrog-style step with the drive at the interval midpoint and the
// damping handled semi-implicitly; the noise enters as a plain impulse.
inline void advance(double& q, double& v, std::int64_t i,
                    const DriveTables& tb, double dt, double mass,
                    double xi) {
    const double inv_m = 1.0 / mass;
    const double a0 =
        (tb.f_mid[i] + tb.stiff[i] * q - tb.damp[i] * v) * inv_m;
    const double v_half = v + 0.5 * dt * a0;
    q += dt * v_half;
    const double rhs =
        v_half + 0.5 * dt * (tb.f_mid[i] + tb.stiff[i + 1] * q) * inv_m;
    v = rhs / (1.0 + 0.5 * dt * tb.damp[i + 1] * inv_m);
    v += xi * dt * inv_m;
}

}  // namespace detail

inline Trajectory integrate_trajectory(const SystemParams& p, double t_end,
                                       double dt, std::uint64_t seed,
                                       bool include_backreaction = true,
                                       NoiseMode noise = NoiseMode::white,
                                       std::uint64_t path_index = 0) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw InvalidParam("dt", "need positive step and horizon");
    if (dt > 2.0 * std::numbers::pi / p.omega_bar / 40.0)
        throw StepTooCoarse("need at least 40 steps per carrier period");
    const std::int64_t nsteps = std::int64_t(std::ceil(t_end / dt - 1e-9));
    const auto tb = detail::make_drive_tables(p, nsteps, dt,
                                              include_backreaction);
    const auto xi = synthesize_force_noise(p, nsteps, dt, seed, noise,
                                           path_index);
    Trajectory tr;
    tr.seed = seed;
    tr.dt = dt;
    tr.time.resize(nsteps + 1);
    tr.q.assign(nsteps + 1, 0.0);
    tr.v.assign(nsteps + 1, 0.0);
    double q = 0.0, v = 0.0;
    for (std::int64_t i = 0; i < nsteps; ++i) {
        tr.time[i] = double(i) * dt;
        detail::advance(q, v, i, tb, dt, p.mass, xi[i]);
        if (std::abs(v) >= 0.1)
            throw RelativisticVelocity(
                "mirror velocity breached the slow-motion bound");
        tr.q[i + 1] = q;
        tr.v[i + 1] = v;
    }
    tr.time[nsteps] = double(nsteps) * dt;
    return tr;
}

struct EnsembleStats {
    std::int64_t paths = 0;
    std::vector<double> time;
    std::vector<double> mean_q;
    std::vector<double> var_q;
    std::vector<double> se_mean;
    std::vector<double> se_var;
};

/// Ensemble of independent sample paths. Paths are keyed by
/// (seed, path-index), so the result is independent of the thread count;
/// the moment accumulations are compensated sums.
inline EnsembleStats run_ensemble(const SystemParams& p, double t_end,
                                  double dt, std::int64_t paths,
                                  std::uint64_t seed,
                                  bool include_backreaction = true,
                                  NoiseMode noise = NoiseMode::white,
                                  int threads = 0,
                                  std::int64_t record_stride = 0) {
    if (paths < 1) throw InvalidParam("paths", "need at least one path");
    if (dt > 2.0 * std::numbers::pi / p.omega_bar / 40.0)
        throw StepTooCoarse("need at least 40 steps per carrier period");
    const std::int64_t nsteps = std::int64_t(std::ceil(t_end / dt - 1e-9));
    if (record_stride < 1)
        record_stride = std::max<std::int64_t>(nsteps / 256, 1);
    const std::int64_t nrec = nsteps / record_stride + 1;
    const auto tb = detail::make_drive_tables(p, nsteps, dt,
                                              include_backreaction);
    if (threads <= 0)
        threads = int(std::max(1u, std::thread::hardware_concurrency()));
    threads = int(std::min<std::int64_t>(threads, paths));

    struct Accum {
        std::vector<double> s1, c1, s2, c2;
        bool relativistic = false;
    };
    auto worker = [&](std::int64_t lo, std::int64_t hi) {
        Accum a;
        a.s1.assign(nrec, 0.0);
        a.c1.assign(nrec, 0.0);
        a.s2.assign(nrec, 0.0);
        a.c2.assign(nrec, 0.0);
        auto kahan = [](std::vector<double>& s, std::vector<double>& c,
                        std::int64_t k, double x) {
            const double y = x - c[k];
            const double t = s[k] + y;
            c[k] = (t - s[k]) - y;
            s[k] = t;
        };
        std::mt19937_64 rng;
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double amp = noise == NoiseMode::white
                               ? std::sqrt(white_noise_intensity(p) / dt)
                               : 0.0;
        for (std::int64_t path = lo; path < hi; ++path) {
            double q = 0.0, v = 0.0;
            std::int64_t rec = 0;
            kahan(a.s1, a.c1, 0, 0.0);
            std::vector<double> dense;
            if (noise == NoiseMode::dense)
                dense = synthesize_force_noise(p, nsteps, dt, seed, noise,
                                               std::uint64_t(path));
            else if (noise == NoiseMode::white)
                rng.seed(detail::mix_seed(seed, std::uint64_t(path)));
            for (std::int64_t i = 0; i < nsteps; ++i) {
                double xi = 0.0;
                if (noise == NoiseMode::white) xi = amp * gauss(rng);
                else if (noise == NoiseMode::dense) xi = dense[i];
                detail::advance(q, v, i, tb, dt, p.mass, xi);
                if (std::abs(v) >= 0.1) a.relativistic = true;
                if ((i + 1) % record_stride == 0) {
                    ++rec;
                    kahan(a.s1, a.c1, rec, q);
                    kahan(a.s2, a.c2, rec, q * q);
                }
            }
        }
        return a;
    };

    std::vector<std::future<Accum>> jobs;
    const std::int64_t chunk = (paths + threads - 1) / threads;
    for (std::int64_t lo = 0; lo < paths; lo += chunk)
        jobs.push_back(std::async(std::launch::async, worker, lo,
                                  std::min(lo + chunk, paths)));
    std::vector<double> s1(nrec, 0.0), s2(nrec, 0.0);
    for (auto& j : jobs) {
        const Accum a = j.get();
        if (a.relativistic)
            throw RelativisticVelocity(
                "an ensemble path breached the slow-motion bound");
        for (std::int64_t k = 0; k < nrec; ++k) {
            s1[k] += a.s1[k];
            s2[k] += a.s2[k];
        }
    }
    EnsembleStats st;
    st.paths = paths;
    st.time.resize(nrec);
    st.mean_q.resize(nrec);
    st.var_q.resize(nrec);
    st.se_mean.resize(nrec);
    st.se_var.resize(nrec);
    const double n = double(paths);
    for (std::int64_t k = 0; k < nrec; ++k) {
        st.time[k] = double(k * record_stride) * dt;
        const double m1 = s1[k] / n;
        const double var = paths > 1 ? (s2[k] - n * m1 * m1) / (n - 1.0)
                                     : 0.0;
        st.mean_q[k] = m1;
        st.var_q[k] = std::max(var, 0.0);
        st.se_mean[k] = std::sqrt(st.var_q[k] / n);
        // gaussian fourth-moment approximation for the variance error
        st.se_var[k] = st.var_q[k] * std::sqrt(2.0 / std::max(n - 1.0, 1.0));
    }
    return st;
}

/// Period-averaged size of the back-reaction terms evaluated on the mean
/// trajectory, relative to the mean force; the smallness knob is
/// P omega t^2 / m.
inline double backreaction_ratio(const SystemParams& p, double t) {
    const double pf = power_flux(p);
    if (pf == 0.0 || t <= 0.0) return 0.0;
    const double q_bar = pf * t * t / p.mass;
    const double v_bar = 2.0 * pf * t / p.mass;
    const int n = 256;
    const double period = 2.0 * std::numbers::pi / p.omega_bar;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ti = t + period * (double(i) + 0.5) / n;
        const auto c = backreaction_coefficients(p, ti);
        num += std::abs((c.d_force_dq - c.c_q) * q_bar) +
               std::abs(c.c_v * v_bar);
        den += c.mean_force;
    }
    return num / den;
}

}  // namespace qmirror

#endif
