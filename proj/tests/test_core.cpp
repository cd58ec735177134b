#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qmirror/params.hpp"

using namespace qmirror;

namespace {
SystemParams base() {
    SystemParams p;
    p.mass = 1.0;
    p.omega_bar = 0.01;
    p.l_minus_z0 = 78.54;
    p.area = 1.0;
    p.alpha_sq = 1.0;
    return p;
}
}  // namespace

TEST_CASE("valid parameters pass through unchanged") {
    const auto p = validate_params(base());
    CHECK(p.l_minus_z0 == 78.54);
}

TEST_CASE("detector must sit left of mirror") {
    auto p = base();
    p.l_minus_z0 = 0.0;
    CHECK_THROWS_AS(validate_params(p), InvalidParam);
    try {
        validate_params(p);
    } catch (const InvalidParam& e) {
        CHECK(e.param == "z0");
    }
}

TEST_CASE("bandwidth must be narrow and fringe-resolving") {
    auto p = base();
    p.sigma0 = p.omega_bar;  // equal to the carrier: not narrow
    CHECK_THROWS_AS(validate_params(p), BandwidthInconsistent);
    p.sigma0 = 1e-3 * p.omega_bar;  // sigma0 * d = 7.8e-5: unresolved
    CHECK_THROWS_AS(validate_params(p), BandwidthInconsistent);
}

TEST_CASE("negative or zero scales rejected") {
    auto p = base();
    p.mass = 0.0;
    CHECK_THROWS_AS(validate_params(p), InvalidParam);
    p = base();
    p.omega_bar = -1.0;
    CHECK_THROWS_AS(validate_params(p), InvalidParam);
    p = base();
    p.area = 0.0;
    CHECK_THROWS_AS(validate_params(p), InvalidParam);
    p = base();
    p.alpha_sq = -1.0;
    CHECK_THROWS_AS(validate_params(p), InvalidParam);
}

TEST_CASE("flux definition is an identity through the constants") {
    SystemParams p = base();
    p.alpha_sq = 1.0;
    p.area = two_pi_cubed;
    p.omega_bar = 2.0;
    p.l_minus_z0 = 1.0;
    const auto d = derive_scales(p, 1.0);
    CHECK(d.power == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("fringe factor at the quarter fringe") {
    auto p = base();
    p.omega_bar = 1.0;
    p.l_minus_z0 = std::numbers::pi / 4.0;
    CHECK(derive_scales(p, 1.0).zeta == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tan pole rejected") {
    auto p = base();
    p.omega_bar = 1.0;
    p.l_minus_z0 = std::numbers::pi / 2.0;
    CHECK_THROWS_AS(derive_scales(p, 1.0), ZetaSingular);
}

TEST_CASE("slow-motion report by direct substitution") {
    // omega/m = 1e-2, P/m^2 = 1e-4, t*m = 100 -> theta = 1e-2
    SystemParams p = base();
    p.omega_bar = 1e-2;
    p.area = 1.0;
    p.alpha_sq = 1e-4 * two_pi_cubed / p.omega_bar;
    const auto r = regime_report(p, 100.0);
    CHECK(r.theta_sm == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(r.slow_motion);
}

TEST_CASE("admissible fringe window") {
    CHECK(zeta_in_admissible_range(0.5));
    CHECK_FALSE(zeta_in_admissible_range(0.2));
    CHECK(zeta_in_admissible_range(-0.588));
    CHECK_FALSE(zeta_in_admissible_range(1.0));
    CHECK_FALSE(zeta_in_admissible_range(-1.3));
}

TEST_CASE("derived scales are pure: identical inputs, identical bits") {
    const auto p = base();
    const auto a = derive_scales(p, 123.25);
    const auto b = derive_scales(p, 123.25);
    CHECK(a.power == b.power);
    CHECK(a.zeta == b.zeta);
    CHECK(a.theta_sm == b.theta_sm);
}

TEST_CASE("fringe factor is periodic in the separation") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
        auto p = base();
        p.omega_bar = u(rng);
        p.l_minus_z0 = u(rng);
        const double period = std::numbers::pi / p.omega_bar;
        double z1, z2;
        try {
            z1 = derive_scales(p, 1.0).zeta;
            auto q = p;
            q.l_minus_z0 += period;
            z2 = derive_scales(q, 1.0).zeta;
        } catch (const ZetaSingular&) {
            continue;
        }
        if (std::abs(z1) > 1e3) continue;  // near-pole: tan is ill-conditioned
        CHECK(z2 == doctest::Approx(z1).epsilon(1e-9));
    }
}

TEST_CASE("flux scales linearly in each factor") {
    const auto p = base();
    const double p0 = power_flux(p);
    for (double k : {2.0, 5.0, 11.0}) {
        auto q = p;
        q.alpha_sq *= k;
        CHECK(power_flux(q) == doctest::Approx(k * p0).epsilon(1e-14));
        q = p;
        q.omega_bar *= k;
        CHECK(power_flux(q) == doctest::Approx(k * p0).epsilon(1e-14));
        q = p;
        q.area *= k;
        CHECK(power_flux(q) == doctest::Approx(k * p0).epsilon(1e-14));
    }
}

TEST_CASE("config parser round trip") {
    std::istringstream in(
        "m = 2.0\n"
        "omega_bar = 0.5   # carrier\n"
        "L_minus_z0 = 3.0\n"
        "area = 4.0\n"
        "alpha_sq = 5.0\n"
        "phase = 0.25\n"
        "sigma0 = 0.01\n"
        "thresholds.band_resolution = 0.01\n"
        "\n");
    const auto p = params_from_config(parse_config(in));
    CHECK(p.mass == 2.0);
    CHECK(p.omega_bar == 0.5);
    CHECK(p.l_minus_z0 == 3.0);
    CHECK(p.area == 4.0);
    CHECK(p.alpha_sq == 5.0);
    CHECK(p.phase == 0.25);
    REQUIRE(p.sigma0.has_value());
    CHECK(*p.sigma0 == 0.01);
    CHECK(p.thresholds.band_resolution == 0.01);
}

TEST_CASE("config parser rejects malformed lines") {
    std::istringstream in("m 2.0\n");
    CHECK_THROWS_AS(parse_config(in), InvalidParam);
    std::istringstream in2("= 3\n");
    CHECK_THROWS_AS(parse_config(in2), InvalidParam);
}
