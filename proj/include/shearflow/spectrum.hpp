#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "shearflow/field.hpp"

namespace shearflow {

/// Exact Fourier carrier of H^{k,p} on its common period R_p:
///   H^{k,p}(x) = sum_m coeffs[m] * e^{2*pi*i*m*x/R_p},  m integer lattice frequency.
///
/// Every profile frequency j of scale n lands on the integer lattice
/// frequency j*R_p/R_n (R_n divides R_p), so the representation is exact and
/// collisions between scales — the overlap phenomenon — are accumulated, not
/// approximated. coeffs[-m] = conj(coeffs[m]).
struct LatticeSpectrum {
    std::int64_t period = 1;
    std::map<std::int64_t, std::complex<double>> coeffs;

    std::complex<double> coeff(std::int64_t m) const {
        auto it = coeffs.find(m);
        return it == coeffs.end() ? std::complex<double>(0.0, 0.0) : it->second;
    }

    /// Number of lattice frequencies carrying a nonzero amplitude.
    std::size_t support_size() const {
        std::size_t n = 0;
        for (const auto& [m, c] : coeffs)
            if (c != std::complex<double>(0.0, 0.0)) ++n;
        return n;
    }

    double value(double x) const {
        double s = 0.0;
        const double w = two_pi / static_cast<double>(period);
        for (const auto& [m, c] : coeffs) {
            if (m < 0) continue;
            if (m == 0) {
                s += c.real();
                continue;
            }
            const double arg = w * static_cast<double>(m) * x;
            s += 2.0 * (c.real() * std::cos(arg) - c.imag() * std::sin(arg));
        }
        return s;
    }

    /// Mean over the period (the lattice-zero amplitude).
    double mean() const { return coeff(0).real(); }

    /// Var = sum_{m != 0} |c_m|^2, exact by Parseval. Kahan-compensated so the
    /// result is deterministic and accurate for widely ranging amplitudes.
    double variance_parseval() const {
        double s = 0.0, comp = 0.0;
        for (const auto& [m, c] : coeffs) {
            if (m == 0) continue;
            const double term = std::norm(c);
            const double y = term - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        return s;
    }
};

/// Exact spectrum of H^{k,p}. Aliasing-aware: colliding lattice frequencies
/// across scales are summed.
inline LatticeSpectrum field_spectrum(const MultiscaleField& field, int k, int p) {
    field.check_range(k, p);
    LatticeSpectrum sp;
    sp.period = field.ladder.radius(p);
    for (int n = k; n <= p; ++n) {
        const std::int64_t stride = sp.period / field.ladder.radius(n);
        const double g = field.ladder.gamma(n);
        const FourierProfile& prof = field.profiles[n];
        sp.coeffs[0] += std::complex<double>(g * prof.constant, 0.0);
        for (int j = 1; j <= prof.max_frequency(); ++j) {
            const double a = prof.cos_coeff(j);
            const double b = prof.sin_coeff(j);
            if (a == 0.0 && b == 0.0) continue;
            const std::int64_t m = stride * j;
            // a cos + b sin = (a - i b)/2 e^{i...} + (a + i b)/2 e^{-i...}
            sp.coeffs[m] += std::complex<double>(0.5 * g * a, -0.5 * g * b);
            sp.coeffs[-m] += std::complex<double>(0.5 * g * a, 0.5 * g * b);
        }
    }
    return sp;
}

struct VarianceResult {
    double variance;  ///< Var(H^{k,p}), normalized by 1/R_p over one period
    double kappa;     ///< mean of H^{k,p} over the period
};

/// Exact multiscale variance and mean. The empty range (k > p) is the zero
/// field: Var = 0, kappa = 0.
inline VarianceResult variance(const MultiscaleField& field, int k, int p) {
    if (k > p) return {0.0, 0.0};
    const LatticeSpectrum sp = field_spectrum(field, k, p);
    return {sp.variance_parseval(), sp.mean()};
}

/// Effective diffusivity of the homogenized operator over scales 0..p:
/// diagonal, d11 = 1, d22 = 1 + 4 Var(H^p). p = -1 means the zero field
/// (identity matrix).
struct EffectiveDiffusivity {
    double d11 = 1.0;
    double d22 = 1.0;
    double variance = 0.0;
};

inline EffectiveDiffusivity effective_diffusivity(const MultiscaleField& field, int p) {
    EffectiveDiffusivity d;
    if (p < 0) return d;
    d.variance = variance(field, 0, p).variance;
    d.d22 = 1.0 + 4.0 * d.variance;
    return d;
}

/// Solution of the shear-flow cell problem for direction l, evaluated through
/// the spectrum's termwise antiderivative:
///   chi_l(x) = -2 l2 * [ int_0^x H - (x/R) int_0^R H ]
/// chi_l(0) = 0 and chi_l is R_p-periodic; only l.e2 enters.
class CellSolution {
  public:
    CellSolution(const LatticeSpectrum& sp, double l2) : spectrum_(sp), l2_(l2) {}

    double operator()(double x) const {
        if (l2_ == 0.0) return 0.0;
        return -2.0 * l2_ * centered_antiderivative(spectrum_, x);
    }

    /// int_0^x (H(y) - mean) dy via termwise integration of the spectrum.
    static double centered_antiderivative(const LatticeSpectrum& sp, double x) {
        const double R = static_cast<double>(sp.period);
        const double w = two_pi / R;
        double s = 0.0;
        for (const auto& [m, c] : sp.coeffs) {
            if (m <= 0) continue;
            // c_m/(i w m) (e^{i w m x} - 1) + conjugate term
            const double arg = w * static_cast<double>(m) * x;
            const double denom = w * static_cast<double>(m);
            s += 2.0 * (c.real() * std::sin(arg) + c.imag() * (std::cos(arg) - 1.0)) / denom;
        }
        return s;
    }

  private:
    LatticeSpectrum spectrum_;
    double l2_;
};

inline CellSolution cell_solution(const MultiscaleField& field, int p, std::array<double, 2> l) {
    return CellSolution(field_spectrum(field, 0, p), l[1]);
}

}  // namespace shearflow
