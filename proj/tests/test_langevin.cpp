#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qmirror/langevin.hpp"

using namespace qmirror;

namespace {
SystemParams make(double flux, double omega_bar = 1.0) {
    SystemParams p;
    p.omega_bar = omega_bar;
    p.area = 1.0;
    p.alpha_sq = flux * two_pi_cubed / omega_bar;
    p.l_minus_z0 = (std::atan(1.0) + std::numbers::pi) / omega_bar;
    return p;
}
}  // namespace

TEST_CASE("mean force averages to twice the flux over a period") {
    const auto p = make(1e-4);
    const double period = 2.0 * std::numbers::pi / p.omega_bar;
    const int n = 4096;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += backreaction_coefficients(p, 10.0 + period * (i + 0.5) / n)
                   .mean_force;
    acc /= n;
    CHECK(acc == doctest::Approx(2.0 * power_flux(p)).epsilon(1e-6));
}

TEST_CASE("damping coefficient never negative; mean force never pulls") {
    const auto p = make(1e-3, 0.37);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1e4);
    for (int i = 0; i < 10000; ++i) {
        const auto c = backreaction_coefficients(p, u(rng));
        CHECK(c.c_v >= 0.0);
        CHECK(c.mean_force >= 0.0);
    }
}

TEST_CASE("mean force vanishes at its instantaneous node") {
    auto p = make(1e-4);
    p.phase = 0.0;
    p.mirror_position = 0.0;
    // theta = 0 at t = 0: {1 - cos 0} = 0
    CHECK(backreaction_coefficients(p, 0.0).mean_force ==
          doctest::Approx(0.0).scale(1e-15));
}

TEST_CASE("white noise calibration") {
    const auto p = make(1e-4);
    CHECK(white_noise_intensity(p) ==
          doctest::Approx(3.0 * power_flux(p) * p.omega_bar)
              .epsilon(1e-15));
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    const auto xi = synthesize_force_noise(p, 1'000'000, dt, 99);
    double mean = 0.0, var = 0.0;
    for (double x : xi) mean += x;
    mean /= double(xi.size());
    for (double x : xi) var += (x - mean) * (x - mean);
    var /= double(xi.size() - 1);
    const double se = std::sqrt(var / double(xi.size()));
    CHECK(std::abs(mean) <= 4.0 * se);
    CHECK(var == doctest::Approx(white_noise_intensity(p) / dt)
                     .epsilon(0.01));
}

TEST_CASE("zero power gives identically zero noise and motion") {
    auto p = make(0.0);
    p.alpha_sq = 0.0;
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    const auto xi = synthesize_force_noise(p, 1000, dt, 1);
    for (double x : xi) CHECK(x == 0.0);
    const auto tr = integrate_trajectory(p, 100.0, dt, 1, true,
                                         NoiseMode::white);
    for (double q : tr.q) CHECK(q == 0.0);
}

TEST_CASE("coarse steps are refused") {
    const auto p = make(1e-4);
    const double coarse = 2.0 * std::numbers::pi / p.omega_bar / 10.0;
    CHECK_THROWS_AS(integrate_trajectory(p, 10.0, coarse, 1),
                    StepTooCoarse);
    CHECK_THROWS_AS(synthesize_force_noise(p, 100, coarse, 1),
                    StepTooCoarse);
}

TEST_CASE("trajectories are deterministic in the seed") {
    const auto p = make(1e-6);
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    const auto a = integrate_trajectory(p, 200.0, dt, 42);
    const auto b = integrate_trajectory(p, 200.0, dt, 42);
    REQUIRE(a.q.size() == b.q.size());
    for (std::size_t i = 0; i < a.q.size(); ++i) CHECK(a.q[i] == b.q[i]);
    const auto c = integrate_trajectory(p, 200.0, dt, 43);
    CHECK(a.q.back() != c.q.back());
}

TEST_CASE("noise-free trajectory tracks the doubly integrated mean "
          "force") {
    const auto p = make(1e-8);
    const double t = 1e3;
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    const auto tr = integrate_trajectory(p, t, dt, 0, false,
                                         NoiseMode::off);
    // period average at the end against P t^2 / m
    const double period = 2.0 * std::numbers::pi / p.omega_bar;
    const std::int64_t per_steps = std::int64_t(period / dt) + 1;
    double acc = 0.0, tacc = 0.0;
    for (std::int64_t i = 0; i < per_steps; ++i) {
        acc += tr.q[tr.q.size() - 1 - i];
        tacc += tr.time[tr.time.size() - 1 - i];
    }
    acc /= double(per_steps);
    tacc /= double(per_steps);
    const double expect = power_flux(p) * tacc * tacc / p.mass;
    CHECK(acc == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("noise-free integrator converges at second order") {
    const auto p = make(1e-5);
    const double dt0 = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    // horizon an exact multiple of every step so all three runs end at
    // the same time and the comparison sees only truncation error
    const double t = 1024.0 * dt0;
    auto endpoint = [&](double dt) {
        return integrate_trajectory(p, t, dt, 0, true, NoiseMode::off)
            .q.back();
    };
    const double q1 = endpoint(dt0);
    const double q2 = endpoint(dt0 / 2.0);
    const double q4 = endpoint(dt0 / 4.0);
    const double order = std::log2(std::abs(q1 - q2) / std::abs(q2 - q4));
    CHECK(order >= 1.9);
}

TEST_CASE("ensemble variance reproduces the cubic growth law") {
    const auto p = make(1e-8);
    const double t = 1e3;
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    const auto st = run_ensemble(p, t, dt, 2000, 7, false,
                                 NoiseMode::white, 1);
    const double expect =
        power_flux(p) * p.omega_bar * t * t * t / (p.mass * p.mass);
    CHECK(st.var_q.back() == doctest::Approx(expect).epsilon(0.10));
    // standard errors shrink like the square root of the path count
    const auto st2 = run_ensemble(p, t, dt, 500, 7, false,
                                  NoiseMode::white, 1);
    CHECK(st2.se_mean.back() / st.se_mean.back() ==
          doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("ensemble statistics independent of the thread split") {
    const auto p = make(1e-8);
    const double t = 100.0;
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    const auto a = run_ensemble(p, t, dt, 64, 11, true,
                                NoiseMode::white, 1);
    const auto b = run_ensemble(p, t, dt, 64, 11, true,
                                NoiseMode::white, 3);
    REQUIRE(a.mean_q.size() == b.mean_q.size());
    for (std::size_t i = 0; i < a.mean_q.size(); ++i) {
        CHECK(a.mean_q[i] == doctest::Approx(b.mean_q[i]).epsilon(1e-12));
        CHECK(a.var_q[i] == doctest::Approx(b.var_q[i]).epsilon(1e-12));
    }
}

TEST_CASE("back-reaction shifts the mean by less than its budget") {
    const auto p = make(1e-8);
    const double t = 1e3;  // theta_sm = 1e-2
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    const auto on = integrate_trajectory(p, t, dt, 0, true, NoiseMode::off);
    const auto off = integrate_trajectory(p, t, dt, 0, false,
                                          NoiseMode::off);
    const double mean_q = power_flux(p) * t * t / p.mass;
    const double ratio = backreaction_ratio(p, t);
    CHECK(std::abs(on.q.back() - off.q.back()) <= ratio * mean_q);
}

TEST_CASE("back-reaction ratio scaling") {
    const auto p = make(1e-8);
    CHECK(backreaction_ratio(p, 1e3) <= 0.1);  // theta_sm = 1e-2 regime
    CHECK(backreaction_ratio(p, 1e-9) <=
          backreaction_ratio(p, 1.0));
    const double r1 = backreaction_ratio(p, 200.0);
    const double r2 = backreaction_ratio(p, 400.0);
    const double r4 = backreaction_ratio(p, 800.0);
    CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(r4 / r2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("runaway power breaches the slow-motion guard") {
    const auto p = make(10.0);
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    CHECK_THROWS_AS(integrate_trajectory(p, 1e3, dt, 0, false,
                                         NoiseMode::off),
                    RelativisticVelocity);
}

TEST_CASE("dense covariance draw has the advertised integrated "
          "strength") {
    const auto p = make(1e-4);
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    const std::int64_t n = 256;
    const int draws = 400;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < draws; ++k) {
        const auto xi = synthesize_force_noise(p, n, dt, 1234,
                                               NoiseMode::dense,
                                               std::uint64_t(k));
        double impulse = 0.0;
        for (double x : xi) impulse += x * dt;
        sum += impulse;
        sum2 += impulse * impulse;
    }
    const double var = (sum2 - sum * sum / draws) / (draws - 1);
    const double expect = dense_noise_intensity(p) * double(n) * dt;
    CHECK(var == doctest::Approx(expect).epsilon(0.30));
}

TEST_CASE("dense mode grid bound enforced") {
    const auto p = make(1e-4);
    const double dt = 2.0 * std::numbers::pi / p.omega_bar / 64.0;
    CHECK_THROWS_AS(synthesize_force_noise(p, 5000, dt, 1,
                                           NoiseMode::dense),
                    InvalidParam);
}
