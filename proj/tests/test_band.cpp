#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmirror/band.hpp"
#include "qmirror/minimize.hpp"

using namespace qmirror;

namespace {
// unit mass, unit carrier; band parameters sized so sigma0 * d is large
SystemParams make(double flux, double sigma_over_omega = 0.02,
                  double sigma_d = 100.0) {
    SystemParams p;
    p.omega_bar = 1.0;
    p.area = 1.0;
    p.alpha_sq = flux * two_pi_cubed / p.omega_bar;
    const double sigma0 = sigma_over_omega * p.omega_bar;
    p.l_minus_z0 = sigma_d / sigma0;
    p.sigma0 = sigma0;
    return p;
}

BandSpec spec_of(const SystemParams& p) {
    BandSpec s;
    s.center = p.omega_bar;
    s.half_width = *p.sigma0;
    return s;
}
}  // namespace

TEST_CASE("averaged optimum in closed form") {
    const double t = 100.0;
    const double p_opt = 0.5 * std::sqrt(3.0) / (t * t);
    const auto p = make(p_opt);
    const auto b = band_budget_closed_form(p, t);
    CHECK(b.total_bar == doctest::Approx(std::sqrt(3.0) * t).epsilon(1e-12));
    CHECK(b.p_opt_bar == doctest::Approx(p_opt).epsilon(1e-12));
    CHECK(b.min_bar == doctest::Approx(std::sqrt(3.0) * t).epsilon(1e-12));
    CHECK(b.min_bar > t);  // the averaged case cannot beat t/m
    CHECK(b.sn_bar * p_opt * t == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(b.mf_plus_cor_bar == 0.0);
    CHECK(b.total_bar ==
          doctest::Approx(b.sn_bar + b.rp_bar + b.mf_plus_cor_bar)
              .epsilon(1e-14));
}

TEST_CASE("averaged budget does not depend on the separation") {
    const double t = 50.0;
    auto p1 = make(1e-4);
    auto p2 = make(1e-4);
    p2.l_minus_z0 += 17.3;
    CHECK(band_budget_closed_form(p1, t).total_bar ==
          band_budget_closed_form(p2, t).total_bar);
}

TEST_CASE("numeric one-dimensional minimizer confirms the averaged "
          "optimum") {
    const double t = 100.0;
    auto total_bar = [&](double flux) {
        return 0.75 / (flux * t) + flux * t * t * t;
    };
    const auto r = minimize_scalar(total_bar, 1e-8, 1e2, 1e-12);
    CHECK(r.x == doctest::Approx(0.5 * std::sqrt(3.0) / (t * t))
                     .epsilon(1e-8));
    CHECK(r.f == doctest::Approx(std::sqrt(3.0) * t).epsilon(1e-8));
    const auto [p_opt, min_bar] = band_optimum(make(1e-4), t);
    CHECK(p_opt == doctest::Approx(r.x).epsilon(1e-8));
    CHECK(min_bar == doctest::Approx(r.f).epsilon(1e-8));
}

TEST_CASE("band regime violations rejected") {
    auto p = make(1e-4);
    p.sigma0.reset();
    CHECK_THROWS_AS(band_budget_closed_form(p, 10.0), BandRegimeInvalid);
    auto q = make(1e-4, 0.5);  // half the carrier: not narrow
    CHECK_THROWS_AS(band_budget_closed_form(q, 10.0), BandRegimeInvalid);
    auto r = make(1e-4, 0.02, 1.0);  // band does not resolve the fringe
    CHECK_THROWS_AS(band_budget_closed_form(r, 10.0), BandRegimeInvalid);
}

TEST_CASE("fast-phase averages of the fringe powers") {
    const auto p = make(1e-4, 0.02, 50.0);
    const auto band = spec_of(p);
    const double d = p.l_minus_z0;
    const double s4 = band_average_of(
        [&](double om) { return std::pow(std::sin(om * d), 4.0); }, band, d);
    CHECK(s4 == doctest::Approx(0.375).epsilon(0.03));
    const double s2c2 = band_average_of(
        [&](double om) {
            const double s = std::sin(om * d), c = std::cos(om * d);
            return s * s * c * c;
        },
        band, d);
    CHECK(s2c2 == doctest::Approx(0.125).epsilon(0.04));
}

TEST_CASE("correlation group cancels against the modified-field term") {
    const auto p = make(1e-4);
    const double t = 100.0;
    auto band = spec_of(p);
    // smooth band profile: the sharp-edged one leaks O(1/(sigma0 d))
    // boundary ripple into the oscillatory harmonics
    band.shape = BandShape::gaussian;
    const double rp_bar = band_budget_closed_form(p, t).rp_bar;
    const double residual =
        numeric_band_average(p, t, band, BandTerm::mf_plus_cor);
    CHECK(std::abs(residual) <= 1e-2 * rp_bar);
}

TEST_CASE("numeric averages converge to the closed forms") {
    const double t = 100.0;
    const auto p = make(1e-4);
    auto band = spec_of(p);
    band.shape = BandShape::gaussian;
    const auto closed = band_budget_closed_form(p, t);
    const double sn_num = numeric_band_average(p, t, band, BandTerm::sn);
    CHECK(sn_num == doctest::Approx(closed.sn_bar).epsilon(0.01));
    const double rp_num = numeric_band_average(p, t, band, BandTerm::rp);
    CHECK(rp_num == doctest::Approx(closed.rp_bar).epsilon(0.01));
    const double total_num =
        numeric_band_average(p, t, band, BandTerm::total);
    CHECK(total_num == doctest::Approx(closed.total_bar).epsilon(0.01));
}

TEST_CASE("empirical convergence rate in the band-fringe product") {
    // residual fringe bias decays roughly like 1/(sigma0 d)
    const double t = 100.0;
    double dev[2];
    int k = 0;
    for (double sd : {50.0, 200.0}) {
        const auto p = make(1e-4, 0.02, sd);
        const auto band = spec_of(p);
        const auto closed = band_budget_closed_form(p, t);
        const double sn_num = numeric_band_average(p, t, band, BandTerm::sn);
        dev[k++] = std::abs(sn_num - closed.sn_bar) / closed.sn_bar;
    }
    CHECK(dev[1] < dev[0]);
}

TEST_CASE("averages invariant under a fringe-phase shift of the "
          "separation") {
    const double t = 100.0;
    auto p1 = make(1e-4);
    auto p2 = make(1e-4);
    p2.l_minus_z0 += std::numbers::pi / p2.omega_bar;
    const auto b1 = spec_of(p1);
    const auto b2 = spec_of(p2);
    const double a1 = numeric_band_average(p1, t, b1, BandTerm::sn);
    const double a2 = numeric_band_average(p2, t, b2, BandTerm::sn);
    CHECK(a2 == doctest::Approx(a1).epsilon(0.02));
}

TEST_CASE("gaussian band shape gives the same fast-phase averages") {
    auto p = make(1e-4, 0.02, 100.0);
    auto band = spec_of(p);
    band.shape = BandShape::gaussian;
    const double d = p.l_minus_z0;
    const double s4 = band_average_of(
        [&](double om) { return std::pow(std::sin(om * d), 4.0); }, band, d);
    CHECK(s4 == doctest::Approx(0.375).epsilon(0.03));
}
