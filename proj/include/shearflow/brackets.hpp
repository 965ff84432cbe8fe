#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "shearflow/spectrum.hpp"

namespace shearflow {

/// A named deterministic prediction interval with an explicit precondition
/// check. lower <= upper whenever preconditions_ok.
struct TheoremBracket {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    bool preconditions_ok = false;
    std::string precondition_report;
};

/// Effective-diffusivity bracket:
///   1 + 4(1 - eps) sum_{k<=p} gamma_k^2  <=  d22  <=  1 + 4(1 + eps) sum gamma_k^2
/// with eps = 4 K1 / (rho_min (gamma_min - 1)). Valid when eps < 1.
inline TheoremBracket thm_diffusivity_bracket(const MultiscaleField& field, int p) {
    field.check_range(0, p);
    const HypothesisReport rep = validate_hypotheses(field);
    double sum_g2 = 0.0;
    for (int n = 0; n <= p; ++n) sum_g2 += field.ladder.gamma(n) * field.ladder.gamma(n);
    TheoremBracket b;
    b.name = "thm32_diffusivity";
    b.lower = 1.0 + 4.0 * (1.0 - rep.epsilon) * sum_g2;
    b.upper = 1.0 + 4.0 * (1.0 + rep.epsilon) * sum_g2;
    b.preconditions_ok = rep.epsilon < 1.0;
    b.precondition_report = "epsilon=" + std::to_string(rep.epsilon) +
                            (b.preconditions_ok ? " < 1" : " >= 1 (bracket not applicable)") +
                            (rep.h1_holds ? "" : "; hypothesis 1 fails");
    return b;
}

/// Exponential growth bracket of the multiscale variance:
///   gamma_p^2 (1 - (gamma_min-1)^{-1})^2 <= Var(H^p) <= gamma_p^2 (1 - gamma_min^{-1})^{-2}
/// valid for gamma_min > 2.
inline TheoremBracket variance_bracket_lemma(const MultiscaleField& field, int p) {
    field.check_range(0, p);
    const double gm = field.ladder.gamma_min;
    const double gp2 = field.ladder.gamma(p) * field.ladder.gamma(p);
    TheoremBracket b;
    b.name = "lemma52_variance";
    const double lo = 1.0 - 1.0 / (gm - 1.0);
    const double hi = 1.0 - 1.0 / gm;
    b.lower = gp2 * lo * lo;
    b.upper = gp2 / (hi * hi);
    b.preconditions_ok = gm > 2.0;
    b.precondition_report =
        "gamma_min=" + std::to_string(gm) + (b.preconditions_ok ? " > 2" : " <= 2 (bracket not applicable)");
    return b;
}

struct DefectBound {
    double defect;
    double bound;
};

/// Variance recursion control:
///   |Var(H^p) - Var(H^{p-1}) - gamma_p^2 Var(h_p)|  <=  2 gamma_p K1 r_p^{-1} sqrt(Var(H^{p-1}))
/// Both sides exact (left via lattice spectra, right via field constants).
/// For normalized profiles Var(h_p) = 1 and the expected increment is the
/// paper's literal gamma_p^2.
inline DefectBound variance_recursion_defect(const MultiscaleField& field, int p) {
    if (p < 1) throw std::invalid_argument("variance_recursion_defect needs p >= 1");
    field.check_range(0, p);
    const double var_p = variance(field, 0, p).variance;
    const double var_pm1 = variance(field, 0, p - 1).variance;
    const double g = field.ladder.gamma(p);
    const double inc = g * g * field.profiles[p].variance();
    const double defect = std::abs(var_p - var_pm1 - inc);
    const double bound =
        2.0 * g * field.k1 / static_cast<double>(field.ladder.ratios[p]) * std::sqrt(var_pm1);
    return {defect, bound};
}

namespace detail {

// Adaptive Simpson on [a,b] with relative tolerance; used only for the |f|
// quadrature of the mixing lemma bound.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double rel_tol = 1e-8) {
    // coarse pass fixes the magnitude for the relative tolerance; the initial
    // three-point Simpson estimate can hit only zeros of the integrand
    double coarse = 0.0;
    const int n0 = 128;
    for (int i = 0; i < n0; ++i) coarse += f(a + (b - a) * (i + 0.5) / n0);
    coarse = std::abs(coarse) * (b - a) / n0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max({std::abs(whole), coarse, 1e-12});
    return detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, rel_tol * scale, 30);
}

struct MixingDefect {
    double lhs;    ///< int g S_R f - int g int f, exact via spectra
    double bound;  ///< (sup|g'| / R) int_0^1 |f|
};

/// The functional mixing lemma for period-1 trig polynomials g, f and an
/// integer scaling R: |int g(x) f(Rx) dx - int g int f| <= (||g'||_inf / R) int |f|.
/// lhs exactly: int_0^1 g(x) f(Rx) dx = sum_k g_{-kR} f_k, so the centered
/// value is the sum over k != 0. The bound's |f| integral uses adaptive
/// Simpson at 1e-8 relative tolerance.
inline MixingDefect scale_mixing_defect(const FourierProfile& g, const FourierProfile& f,
                                        std::int64_t R) {
    if (R < 1) throw std::invalid_argument("scale_mixing_defect needs R >= 1");
    auto coeff = [](const FourierProfile& p, std::int64_t m) -> std::complex<double> {
        if (m == 0) return {p.mean(), 0.0};
        const int j = static_cast<int>(m > 0 ? m : -m);
        const double a = p.cos_coeff(j), b = p.sin_coeff(j);
        return m > 0 ? std::complex<double>(0.5 * a, -0.5 * b) : std::complex<double>(0.5 * a, 0.5 * b);
    };
    std::complex<double> s{0.0, 0.0};
    const int kmax = f.max_frequency();
    for (int k = -kmax; k <= kmax; ++k) {
        if (k == 0) continue;
        const std::int64_t gk = -static_cast<std::int64_t>(k) * R;
        if (std::abs(gk) > g.max_frequency()) continue;
        s += coeff(g, gk) * coeff(f, k);
    }
    const double sup_g1 = profile_constants(g).sup_d1;
    const double int_abs_f = integrate_adaptive([&f](double x) { return std::abs(f.eval(x)); }, 0.0, 1.0);
    return {s.real(), sup_g1 / static_cast<double>(R) * int_abs_f};
}

}  // namespace shearflow
