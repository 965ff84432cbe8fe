#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "shearflow/field.hpp"

namespace shearflow {

/// Effective-scale count (the form normative for verdicts):
///   n_ef(t) = inf{ n : t <= R_{n+1}^2 (gamma_{n-1}/gamma_{n+1})^2 2^{-3} K1^{-2} (1 - gamma_max/rho_min)^2 }
/// with gamma_{-1} := gamma_0/gamma_min. Requires at least two scales; throws
/// "field truncation too small" past the last threshold.
inline double n_ef_threshold(const MultiscaleField& field, int n) {
    const ScaleLadder& lad = field.ladder;
    if (n < 0 || n + 1 > field.top_scale()) throw std::out_of_range("n_ef threshold index out of range");
    const double g_lo = (n == 0) ? lad.gamma_before_first() : lad.gamma(n - 1);
    const double g_hi = lad.gamma(n + 1);
    const double gratio = g_lo / g_hi;
    const double sep = 1.0 - lad.gamma_max / lad.rho_min;
    const double R = lad.radius_d(n + 1);
    return R * R * gratio * gratio / 8.0 / (field.k1 * field.k1) * sep * sep;
}

inline int n_ef(const MultiscaleField& field, double t) {
    if (field.top_scale() < 1) throw std::invalid_argument("n_ef requires a field with at least two scales");
    if (!(t > 0.0)) throw std::invalid_argument("n_ef requires t > 0");
    for (int n = 0; n + 1 <= field.top_scale(); ++n)
        if (t <= n_ef_threshold(field, n)) return n;
    throw std::runtime_error("field truncation too small: t exceeds the n_ef threshold at n=P-1");
}

/// The simplified count of homogenized scales from the main-results section:
/// inf{ n : t <= R_n^2 }; emitted as an auxiliary column.
inline int n_ef_simple(const MultiscaleField& field, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("n_ef_simple requires t > 0");
    for (int n = 0; n <= field.top_scale(); ++n) {
        const double R = field.ladder.radius_d(n);
        if (t <= R * R) return n;
    }
    throw std::runtime_error("field truncation too small: t exceeds R_P^2");
}

/// Scale index of the Hypothesis-2 window (and its predicted exponent):
///   p(t) = sup{ n : 16 (1 + K0^2) (1 - (gamma_min-1)^{-1})^{-2} R_n^2 < t }
///   nu(t) = ln gamma_{p(t)} / ln R_{p(t)}
/// Returns nothing when t is below the first threshold ("below first scale");
/// nu is absent for p = 0 (ln R_0 = 0).
struct ScalePrediction {
    int p = 0;
    std::optional<double> nu;
};

inline double p_of_t_constant(const MultiscaleField& field) {
    const double gm = field.ladder.gamma_min;
    if (!(gm > 2.0)) throw std::invalid_argument("p_of_t requires gamma_min > 2");
    const double d = 1.0 - 1.0 / (gm - 1.0);
    return 16.0 * (1.0 + field.k0 * field.k0) / (d * d);
}

inline std::optional<ScalePrediction> p_of_t(const MultiscaleField& field, double t) {
    if (field.top_scale() < 1)
        throw std::invalid_argument("p_of_t requires a field with at least two scales");
    const double C = p_of_t_constant(field);
    std::optional<int> p;
    for (int n = 0; n <= field.top_scale(); ++n) {
        const double R = field.ladder.radius_d(n);
        if (C * R * R < t) p = n;
    }
    if (!p) return std::nullopt;  // below first scale
    ScalePrediction sp;
    sp.p = *p;
    if (*p >= 1)
        sp.nu = std::log(field.ladder.gamma(*p)) / std::log(field.ladder.radius_d(*p));
    return sp;
}

/// Exponent windows. The ratio window ln gamma_min/ln rho_max <= nu(t) <=
/// ln gamma_max/ln rho_min always contains the predicted exponent; the
/// leading-order window widens both ends by the gamma spread,
///   ln gamma_min/(ln rho_max + ln(gamma_max/gamma_min)) .. ln gamma_max/(ln rho_min + ln(gamma_min/gamma_max)).
struct NuWindow {
    double lo;
    double hi;
};

inline NuWindow nu_window_ratio(const ScaleLadder& lad) {
    if (lad.top_scale() < 1) throw std::invalid_argument("nu window requires at least two scales");
    return {std::log(lad.gamma_min) / std::log(lad.rho_max),
            std::log(lad.gamma_max) / std::log(lad.rho_min)};
}

inline NuWindow nu_window_leading(const ScaleLadder& lad) {
    if (lad.top_scale() < 1) throw std::invalid_argument("nu window requires at least two scales");
    const double cross = std::log(lad.gamma_max / lad.gamma_min);
    return {std::log(lad.gamma_min) / (std::log(lad.rho_max) + cross),
            std::log(lad.gamma_max) / (std::log(lad.rho_min) - cross)};
}

/// Scale bookkeeping for one checkpoint time.
struct ScaleCount {
    double t;
    int n_ef;
    int n_ef_simple;
    std::optional<ScalePrediction> p_of_t;  ///< absent below the first H2 scale or when gamma_min <= 2
    NuWindow window_leading;
};

}  // namespace shearflow
