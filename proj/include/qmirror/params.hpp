#ifndef QMIRROR_PARAMS_HPP
#define QMIRROR_PARAMS_HPP

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "qmirror/errors.hpp"

namespace qmirror {

// Natural units, hbar = c = 1. Lengths and times carry units of 1/m
// (inverse mass); energies carry units of m.

/// Validation thresholds. The inequalities they guard are strict
/// separations of scale, so the defaults are deliberately loose.
struct Thresholds {
    double bandwidth_separation = 10.0;  // sigma0 * this <= omega_bar
    double band_resolution = 10.0;       // sigma0 * (L - z0) >= this
    double slow_motion = 0.1;            // theta_sm below this
    double long_time = 100.0;            // omega_bar * t above this
    double displacement_small = 0.1;     // omega_bar * <q> below this
    double tan_pole_tol = 1e-9;          // radians from pi/2 + n*pi
};

struct SystemParams {
    double mass = 1.0;            // mirror mass m
    double omega_bar = 1.0;       // carrier frequency
    double l_minus_z0 = 1.0;      // detector-mirror separation L - z0
    double area = 1.0;            // cross-sectional area A_parallel
    double alpha_sq = 1.0;        // coherent particle density |alpha|^2
    double phase = 0.0;           // coherent phase phi
    std::optional<double> sigma0; // half-bandwidth, if band-averaged
    std::optional<double> detector_gap;  // E2 - E1, informational only
    double mirror_position = 0.0;  // absolute rest position L; only the
                                   // retarded phase omega_bar(t - L) uses it
    Thresholds thresholds{};
};

struct DerivedScales {
    double power = 0.0;          // energy flux P
    double zeta = 0.0;           // tan[omega_bar (L - z0)]
    double theta_sm = 0.0;       // P omega_bar t^2 / m
    double phase_advance = 0.0;  // omega_bar (L - z0)
    std::optional<double> detector_gap;
};

struct RegimeReport {
    double theta_sm = 0.0;
    bool slow_motion = false;
    bool displacement_small = false;
    bool zeta_admissible = false;
    bool long_time = false;
};

constexpr double two_pi_cubed =
    8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;

inline double power_flux(const SystemParams& p) {
    const double c = 2.0 * std::numbers::pi;
    return p.area * p.alpha_sq * p.omega_bar / (c * c * c);
}

inline bool zeta_in_admissible_range(double zeta) {
    const double az = std::abs(zeta);
    return az > std::numbers::sqrt2 - 1.0 && az < 1.0;
}

inline SystemParams validate_params(const SystemParams& raw) {
    if (!(raw.mass > 0.0)) throw InvalidParam("m", "mass must be positive");
    if (!(raw.omega_bar > 0.0))
        throw InvalidParam("omega_bar", "carrier frequency must be positive");
    if (!(raw.l_minus_z0 > 0.0))
        throw InvalidParam("z0", "detector must sit left of mirror");
    if (!(raw.area > 0.0))
        throw InvalidParam("area", "cross-sectional area must be positive");
    if (!(raw.alpha_sq >= 0.0))
        throw InvalidParam("alpha_sq", "particle density must be nonnegative");
    if (!std::isfinite(raw.phase))
        throw InvalidParam("phase", "phase must be finite");
    if (raw.sigma0) {
        const double s0 = *raw.sigma0;
        if (!(s0 > 0.0))
            throw BandwidthInconsistent("sigma0 must be positive");
        if (!(s0 * raw.thresholds.bandwidth_separation <= raw.omega_bar))
            throw BandwidthInconsistent("sigma0 not small against omega_bar");
        if (!(s0 * raw.l_minus_z0 >= raw.thresholds.band_resolution))
            throw BandwidthInconsistent(
                "sigma0 * (L - z0) too small to resolve the band");
    }
    return raw;
}

inline DerivedScales derive_scales(const SystemParams& p, double t) {
    const double u = p.omega_bar * p.l_minus_z0;
    const double half_pi = 0.5 * std::numbers::pi;
    const double off = std::remainder(u - half_pi, std::numbers::pi);
    if (std::abs(off) < p.thresholds.tan_pole_tol)
        throw ZetaSingular("omega_bar (L - z0) within tolerance of a tan pole");
    DerivedScales d;
    d.power = power_flux(p);
    d.zeta = std::tan(u);
    d.phase_advance = u;
    d.theta_sm = d.power * p.omega_bar * t * t / p.mass;
    d.detector_gap = p.detector_gap;
    return d;
}

inline RegimeReport regime_report(const SystemParams& p, double t) {
    RegimeReport r;
    const double P = power_flux(p);
    r.theta_sm = P * p.omega_bar * t * t / p.mass;
    r.slow_motion = r.theta_sm < p.thresholds.slow_motion;
    const double mean_q = P * t * t / p.mass;
    r.displacement_small =
        p.omega_bar * mean_q < p.thresholds.displacement_small;
    r.zeta_admissible =
        zeta_in_admissible_range(std::tan(p.omega_bar * p.l_minus_z0));
    r.long_time = p.omega_bar * t > p.thresholds.long_time && t > p.l_minus_z0;
    return r;
}

// --- flat key = value config ---------------------------------------------

inline std::map<std::string, double> parse_config(std::istream& in) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw InvalidParam("config",
                                   "line " + std::to_string(lineno) +
                                       ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{}
                                          : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw InvalidParam("config", "line " + std::to_string(lineno) +
                                             ": empty key or value");
        kv[key] = std::stod(val);
    }
    return kv;
}

inline SystemParams params_from_config(
    const std::map<std::string, double>& kv) {
    SystemParams p;
    auto get = [&](const char* k, double& target) {
        if (auto it = kv.find(k); it != kv.end()) target = it->second;
    };
    get("m", p.mass);
    get("omega_bar", p.omega_bar);
    get("L_minus_z0", p.l_minus_z0);
    get("area", p.area);
    get("alpha_sq", p.alpha_sq);
    get("phase", p.phase);
    get("mirror_position", p.mirror_position);
    if (auto it = kv.find("sigma0"); it != kv.end()) p.sigma0 = it->second;
    if (auto it = kv.find("detector_gap"); it != kv.end())
        p.detector_gap = it->second;
    get("thresholds.bandwidth_separation",
        p.thresholds.bandwidth_separation);
    get("thresholds.band_resolution", p.thresholds.band_resolution);
    get("thresholds.slow_motion", p.thresholds.slow_motion);
    get("thresholds.long_time", p.thresholds.long_time);
    get("thresholds.displacement_small", p.thresholds.displacement_small);
    get("thresholds.tan_pole_tol", p.thresholds.tan_pole_tol);
    return p;
}

inline SystemParams params_from_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return params_from_config(parse_config(in));
}

}  // namespace qmirror

#endif
