#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include "shearflow/profile.hpp"
#include "shearflow/rng.hpp"

namespace shearflow {

/// Time integral of the joint characteristic function of (b_s, b_t):
///   J_{k,m} = int_0^t E[e^{i k r 2pi b_s} e^{i m 2pi b_t}] ds
///           = e^{-(2pi)^2 m^2 t/2} (1 - e^{-(2pi)^2 ((kr)^2/2 + krm) t}) / ((2pi)^2 ((kr)^2/2 + krm))
/// real-valued. When the denominator vanishes the limit value t e^{-(2pi)^2 m^2 t/2}
/// is used; the near-degenerate band goes through an expm1-style series so no
/// cancellation occurs. `wavenumber` generalizes the 2*pi factor to period-R
/// lattices (wavenumber = 2*pi/R).
inline double jkm_general(double k, double m, double r, double t, double wavenumber) {
    if (t <= 0.0) return 0.0;
    const double w2 = wavenumber * wavenumber;
    const double kr = k * r;
    const double x = w2 * (0.5 * kr * kr + kr * m);
    const double e1 = std::exp(-0.5 * w2 * m * m * t);
    const double xt = x * t;
    if (std::abs(xt) < 1e-8) {
        // (1 - e^{-xt})/x = t (1 - xt/2 + (xt)^2/6 - ...)
        return e1 * t * (1.0 - 0.5 * xt + xt * xt / 6.0);
    }
    // e1 * e^{-xt} = exp(-w2 (kr+m)^2 t / 2): both exponents are <= 0.
    const double e2 = std::exp(-0.5 * w2 * (kr + m) * (kr + m) * t);
    return (e1 - e2) / x;
}

/// J_{k,m} on the unit period.
inline double jkm(double k, double m, double r, double t) { return jkm_general(k, m, r, t, two_pi); }

/// The mixing stochastic functional I = E[G(b_t) int_0^t d/dx f(r b_s) ds] for
/// mean-zero f, G of period R (stored as period-1 profile shapes evaluated at
/// x/R). r and R are positive reals; t > 0.
struct MixingProblem {
    FourierProfile f;
    FourierProfile g;
    double r = 1.0;
    double t = 1.0;
    double period = 1.0;

    void validate() const {
        if (!(r > 0.0)) throw std::invalid_argument("mixing: r must be > 0");
        if (!(t > 0.0)) throw std::invalid_argument("mixing: t must be > 0");
        if (!(period > 0.0)) throw std::invalid_argument("mixing: R must be > 0");
        if (f.mean() != 0.0 || g.mean() != 0.0)
            throw std::invalid_argument("mixing: f and G must have zero mean");
    }

    double f_of_x(double x) const { return f.eval(x / period); }
    double g_of_x(double x) const { return g.eval(x / period); }
    double df_of_x(double x) const { return f.eval(x / period, 1) / period; }
};

struct MixingResult {
    double value = 0.0;
    double bound = 0.0;             ///< ||f||_{L2(T_R)} ||G'||_{L2(T_R)} * 2/r
    double truncation_error = 0.0;  ///< 0: the double sum over finite spectra is exact
};

namespace detail {

inline std::complex<double> profile_mode(const FourierProfile& p, int m) {
    if (m == 0) return {p.mean(), 0.0};
    const int j = m > 0 ? m : -m;
    const double a = p.cos_coeff(j), b = p.sin_coeff(j);
    return m > 0 ? std::complex<double>(0.5 * a, -0.5 * b) : std::complex<double>(0.5 * a, 0.5 * b);
}

// Exact unit-period sum I = sum_{k,m} J_{k,m} i k 2pi f_k G_m over the finite
// supports.
inline double mixing_sum_unit(const FourierProfile& f, const FourierProfile& g, double r, double t) {
    std::complex<double> acc{0.0, 0.0};
    const int kf = f.max_frequency();
    const int kg = g.max_frequency();
    for (int k = -kf; k <= kf; ++k) {
        if (k == 0) continue;
        const std::complex<double> fk = profile_mode(f, k);
        if (fk == std::complex<double>(0.0, 0.0)) continue;
        for (int m = -kg; m <= kg; ++m) {
            if (m == 0) continue;
            const std::complex<double> gm = profile_mode(g, m);
            if (gm == std::complex<double>(0.0, 0.0)) continue;
            const double J = jkm(k, m, r, t);
            acc += std::complex<double>(0.0, two_pi * k) * J * fk * gm;
        }
    }
    return acc.real();
}

}  // namespace detail

/// Exact evaluation of the mixing functional. General periods are reduced to
/// the unit period by the Brownian scaling law: I_R(t) = R * I_1(t / R^2),
/// with the same r and the same profile shapes. The bound comes from exact
/// Parseval norms and is R-invariant.
inline MixingResult mixing_functional(const MixingProblem& prob) {
    prob.validate();
    MixingResult res;
    const double tu = prob.t / (prob.period * prob.period);
    res.value = prob.period * detail::mixing_sum_unit(prob.f, prob.g, prob.r, tu);
    // ||f||_{L2(T_R)}^2 = R Var(f); ||G'||_{L2(T_R)}^2 = (1/R) sum (2pi j)^2 (a^2+b^2)/2
    double g1 = 0.0;
    for (int j = 1; j <= prob.g.max_frequency(); ++j) {
        const double a = prob.g.cos_coeff(j), b = prob.g.sin_coeff(j);
        g1 += two_pi * j * two_pi * j * 0.5 * (a * a + b * b);
    }
    res.bound = std::sqrt(prob.f.variance() * g1) * 2.0 / prob.r;
    res.truncation_error = 0.0;
    return res;
}

/// Direct general-period summation (no scaling reduction): the second
/// algebraic route used by the scaling-identity check.
inline double mixing_functional_direct(const MixingProblem& prob) {
    prob.validate();
    const double w = two_pi / prob.period;
    std::complex<double> acc{0.0, 0.0};
    const int kf = prob.f.max_frequency();
    const int kg = prob.g.max_frequency();
    for (int k = -kf; k <= kf; ++k) {
        if (k == 0) continue;
        const std::complex<double> fk = detail::profile_mode(prob.f, k);
        if (fk == std::complex<double>(0.0, 0.0)) continue;
        for (int m = -kg; m <= kg; ++m) {
            if (m == 0) continue;
            const std::complex<double> gm = detail::profile_mode(prob.g, m);
            if (gm == std::complex<double>(0.0, 0.0)) continue;
            const double J = jkm_general(k, m, prob.r, prob.t, w);
            acc += std::complex<double>(0.0, w * k) * J * fk * gm;
        }
    }
    return acc.real();
}

struct MonteCarloEstimate {
    double estimate = 0.0;
    double stderror = 0.0;
    std::int64_t n_paths = 0;
};

/// Monte Carlo cross-check of the exact sum: simulates Brownian paths on
/// [0, t], accumulates G(b_t) * trapezoid(f'(r b_s)) and returns the sample
/// mean with its standard error. Deterministic for fixed (seed, n_paths,
/// n_steps) and independent of threading (paths are keyed substreams).
inline MonteCarloEstimate mc_mixing_estimate(const MixingProblem& prob, std::int64_t n_paths,
                                             int n_steps, std::uint64_t seed) {
    prob.validate();
    if (n_paths < 100) throw std::invalid_argument("mc_mixing_estimate: n_paths must be >= 100");
    if (n_steps < 64) throw std::invalid_argument("mc_mixing_estimate: n_steps must be >= 64");
    const double dt = prob.t / n_steps;
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> vals(static_cast<std::size_t>(n_paths));
    for (std::int64_t path = 0; path < n_paths; ++path) {
        GaussianStream gs(seed, static_cast<std::uint64_t>(path), /*stream=*/0);
        double b = 0.0;
        double integral = 0.0;
        double fp_prev = prob.df_of_x(0.0);
        for (int i = 0; i < n_steps; ++i) {
            b += gs.next() * sqrt_dt;
            const double fp = prob.df_of_x(prob.r * b);
            integral += 0.5 * dt * (fp_prev + fp);
            fp_prev = fp;
        }
        vals[static_cast<std::size_t>(path)] = prob.g_of_x(b) * integral;
    }
    MonteCarloEstimate est;
    est.n_paths = n_paths;
    est.estimate = pairwise_mean(vals);
    double var = 0.0;
    {
        std::vector<double> sq(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double d = vals[i] - est.estimate;
            sq[i] = d * d;
        }
        var = pairwise_mean(sq) * static_cast<double>(vals.size()) / static_cast<double>(vals.size() - 1);
    }
    est.stderror = std::sqrt(var / static_cast<double>(n_paths));
    return est;
}

}  // namespace shearflow
