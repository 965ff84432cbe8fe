#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace shearflow {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// One periodic profile h_n: a finite trigonometric polynomial of period 1,
///   h(u) = constant + sum_j cos_coeffs[j-1]*cos(2*pi*j*u) + sin_coeffs[j-1]*sin(2*pi*j*u).
///
/// Profiles produced by normalize_profile() satisfy h(0) = 0 and Var(h) = 1
/// (variance over one period). Raw profiles (custom families) only guarantee
/// h(0) = 0 via the constant term.
struct FourierProfile {
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    double constant = 0.0;

    int max_frequency() const {
        return static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
    }

    double cos_coeff(int j) const {
        return (j >= 1 && j <= static_cast<int>(cos_coeffs.size())) ? cos_coeffs[j - 1] : 0.0;
    }
    double sin_coeff(int j) const {
        return (j >= 1 && j <= static_cast<int>(sin_coeffs.size())) ? sin_coeffs[j - 1] : 0.0;
    }

    /// Variance over one period, exact by Parseval: (1/2) * sum_j (a_j^2 + b_j^2).
    double variance() const {
        double s = 0.0;
        for (double a : cos_coeffs) s += a * a;
        for (double b : sin_coeffs) s += b * b;
        return 0.5 * s;
    }

    /// Mean over one period (the constant term).
    double mean() const { return constant; }

    bool is_zero() const {
        for (double a : cos_coeffs)
            if (a != 0.0) return false;
        for (double b : sin_coeffs)
            if (b != 0.0) return false;
        return true;
    }

    /// Evaluate the order-th derivative at u.
    /// d/du cos(2*pi*j*u) cycles with period 4 in the derivative order.
    double eval(double u, int order = 0) const {
        if (order < 0) throw std::invalid_argument("profile derivative order must be >= 0");
        double s = (order == 0) ? constant : 0.0;
        const int kmax = max_frequency();
        for (int j = 1; j <= kmax; ++j) {
            const double a = cos_coeff(j);
            const double b = sin_coeff(j);
            if (a == 0.0 && b == 0.0) continue;
            const double w = two_pi * j;
            const double arg = w * u;
            const double c = std::cos(arg);
            const double sn = std::sin(arg);
            double pw = 1.0;
            for (int o = 0; o < order; ++o) pw *= w;
            switch (order & 3) {
                case 0: s += pw * (a * c + b * sn); break;
                case 1: s += pw * (-a * sn + b * c); break;
                case 2: s += pw * (-a * c - b * sn); break;
                case 3: s += pw * (a * sn - b * c); break;
            }
        }
        return s;
    }
};

/// Scale the raw coefficients so the period-1 variance is exactly 1 and shift
/// the constant so the value at 0 is 0. Frequencies are preserved.
/// Throws on an all-zero input ("degenerate profile").
inline FourierProfile normalize_profile(const std::vector<double>& raw_cos,
                                        const std::vector<double>& raw_sin) {
    double s = 0.0;
    for (double a : raw_cos) s += a * a;
    for (double b : raw_sin) s += b * b;
    if (s == 0.0) throw std::invalid_argument("degenerate profile: all coefficients are zero");
    const double scale = 1.0 / std::sqrt(0.5 * s);
    FourierProfile p;
    p.cos_coeffs = raw_cos;
    p.sin_coeffs = raw_sin;
    for (double& a : p.cos_coeffs) a *= scale;
    for (double& b : p.sin_coeffs) b *= scale;
    double at0 = 0.0;
    for (double a : p.cos_coeffs) at0 += a;
    p.constant = -at0;
    return p;
}

/// Raw profile used as given (no variance normalization); the constant is
/// still chosen so h(0) = 0, which the model requires and which leaves the
/// drift, variance and oscillation unchanged.
inline FourierProfile raw_profile(const std::vector<double>& raw_cos,
                                  const std::vector<double>& raw_sin) {
    FourierProfile p;
    p.cos_coeffs = raw_cos;
    p.sin_coeffs = raw_sin;
    double at0 = 0.0;
    for (double a : p.cos_coeffs) at0 += a;
    p.constant = -at0;
    return p;
}

/// sqrt(2)*sin(2*pi*u): the normalized single-mode profile.
inline FourierProfile sine_profile() { return normalize_profile({}, {1.0}); }

/// sqrt(2)*(1 - cos(2*pi*u)): normalized, h(0) = 0 and h'(0) = 0 (Hypothesis 2 shape).
inline FourierProfile cosine_valley_profile() { return normalize_profile({-1.0}, {}); }

struct ProfileConstants {
    double osc;     ///< sup h - inf h over one period
    double sup_d1;  ///< sup |h'|
    double sup_d2;  ///< sup |h''|
};

namespace detail {

// Derivatives 0..3 at u from one sin/cos per mode.
inline std::array<double, 4> eval_d0123(const FourierProfile& p, double u) {
    std::array<double, 4> d{p.constant, 0.0, 0.0, 0.0};
    const int kmax = p.max_frequency();
    for (int j = 1; j <= kmax; ++j) {
        const double a = p.cos_coeff(j);
        const double b = p.sin_coeff(j);
        if (a == 0.0 && b == 0.0) continue;
        const double w = two_pi * j;
        const double c = std::cos(w * u);
        const double sn = std::sin(w * u);
        d[0] += a * c + b * sn;
        d[1] += w * (-a * sn + b * c);
        d[2] += w * w * (-a * c - b * sn);
        d[3] += w * w * w * (a * sn - b * c);
    }
    return d;
}

// One guarded Newton step for a root of p^(order) starting from x0 on a grid
// of spacing dx. Falls back to x0 when the step is unstable or too long.
inline double newton_refine(const FourierProfile& p, int order, double x0, double dx) {
    const double g = p.eval(x0, order);
    const double dg = p.eval(x0, order + 1);
    if (dg == 0.0) return x0;
    const double step = g / dg;
    if (!(std::abs(step) < dx)) return x0;
    return x0 - step;
}

}  // namespace detail

/// Oscillation and derivative sup-norms of a profile. Dense grid (>= 4096*K
/// points) tightened by one Newton step per local extremum, then nudged
/// upward; the result is an upper-biased estimate within 1e-9 of the true
/// sup for trigonometric polynomials.
inline ProfileConstants profile_constants(const FourierProfile& p) {
    const int kmax = std::max(1, p.max_frequency());
    const int n = 4096 * kmax;
    const double dx = 1.0 / n;
    auto d_prev = detail::eval_d0123(p, 0.0);
    double min0 = d_prev[0], max0 = d_prev[0];
    double max1 = std::abs(d_prev[1]), max2 = std::abs(d_prev[2]);
    for (int i = 1; i <= n; ++i) {
        const double x = i * dx;
        const auto d = detail::eval_d0123(p, x);
        min0 = std::min(min0, d[0]);
        max0 = std::max(max0, d[0]);
        max1 = std::max(max1, std::abs(d[1]));
        max2 = std::max(max2, std::abs(d[2]));
        // one Newton correction per local extremum of f, f' and f''
        const double xm = x - 0.5 * dx;
        if (d_prev[1] == 0.0 || (d_prev[1] < 0.0) != (d[1] < 0.0)) {
            const double v = p.eval(detail::newton_refine(p, 1, xm, dx), 0);
            min0 = std::min(min0, v);
            max0 = std::max(max0, v);
        }
        if (d_prev[2] == 0.0 || (d_prev[2] < 0.0) != (d[2] < 0.0))
            max1 = std::max(max1, std::abs(p.eval(detail::newton_refine(p, 2, xm, dx), 1)));
        if (d_prev[3] == 0.0 || (d_prev[3] < 0.0) != (d[3] < 0.0))
            max2 = std::max(max2, std::abs(p.eval(detail::newton_refine(p, 3, xm, dx), 2)));
        d_prev = d;
    }
    auto upper = [](double v) { return v + 1e-12 * (1.0 + std::abs(v)); };
    return {upper(max0 - min0), upper(max1), upper(max2)};
}

}  // namespace shearflow
