#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "shearflow/ladder.hpp"
#include "shearflow/profile.hpp"

namespace shearflow {

/// The multiscale stream function H^{k,p}(x) = sum_{n=k}^{p} gamma_n h_n(x/R_n),
/// truncated at the ladder's top scale P. Immutable after construction; safe
/// for concurrent reads.
///
/// K0/K1/K2 are the field-level constants: max over scales of Osc(h_n),
/// sup|h_n'| and sup|h_n''|.
struct MultiscaleField {
    ScaleLadder ladder;
    std::vector<FourierProfile> profiles;
    std::vector<ProfileConstants> constants;  // per scale
    double k0 = 0.0, k1 = 0.0, k2 = 0.0;

    int top_scale() const { return ladder.top_scale(); }

    void check_range(int k, int p) const {
        if (k < 0 || p > top_scale() || k > p)
            throw std::out_of_range("scale range " + std::to_string(k) + ".." + std::to_string(p) +
                                    " out of bounds for field with P=" + std::to_string(top_scale()));
    }

    /// H^{k,p} and its x-derivatives: sum_n gamma_n h_n^{(order)}(x/R_n) R_n^{-order}.
    /// The argument is reduced mod R_n (exact for integer periods) before the
    /// trigonometric evaluation so large |x| loses no precision.
    double eval(double x, int k, int p, int order = 0) const {
        check_range(k, p);
        double s = 0.0;
        for (int n = k; n <= p; ++n) {
            const double R = ladder.radius_d(n);
            const double u = std::fmod(x, R) / R;
            double term = profiles[n].eval(u, order);
            for (int o = 0; o < order; ++o) term /= R;
            s += ladder.gamma(n) * term;
        }
        return s;
    }

    double eval_all(double x, int order = 0) const { return eval(x, 0, top_scale(), order); }
};

inline MultiscaleField make_field(ScaleLadder ladder, std::vector<FourierProfile> profiles) {
    if (profiles.size() != ladder.gammas.size())
        throw std::invalid_argument("field needs one profile per scale");
    MultiscaleField f;
    f.ladder = std::move(ladder);
    f.profiles = std::move(profiles);
    for (const auto& p : f.profiles) {
        f.constants.push_back(profile_constants(p));
        f.k0 = std::max(f.k0, f.constants.back().osc);
        f.k1 = std::max(f.k1, f.constants.back().sup_d1);
        f.k2 = std::max(f.k2, f.constants.back().sup_d2);
    }
    return f;
}

/// Field with the same profile at every scale (the named families).
inline MultiscaleField make_field(ScaleLadder ladder, const FourierProfile& profile) {
    std::vector<FourierProfile> ps(ladder.gammas.size(), profile);
    return make_field(std::move(ladder), std::move(ps));
}

/// Hypothesis check per the model:
///   H1:  rho_min > gamma_max                                  (well-posed C^1 drift)
///   H2:  rho_min > gamma_max^{1/2}, h_n'(0) = 0 for all n, K2 < inf
/// epsilon = 4 K1 (rho_min (gamma_min - 1))^{-1}; the envelope constants are
/// the coefficients of |h(x)| <= bound_h1 * |x| (H1) and |h(x)| <= bound_h2 * x^2,
/// |h'(x)| <= bound_h2 * |x| (H2), reported when the hypothesis holds.
struct HypothesisReport {
    bool h1_holds = false;
    bool h2_holds = false;
    double epsilon = 0.0;
    double bound_h1 = 0.0;
    double bound_h2 = 0.0;
    std::vector<std::string> violations;
};

inline HypothesisReport validate_hypotheses(const MultiscaleField& field) {
    const ScaleLadder& lad = field.ladder;
    HypothesisReport rep;

    rep.h1_holds = lad.rho_min > lad.gamma_max;
    if (!rep.h1_holds)
        rep.violations.push_back("hypothesis 1: rho_min <= gamma_max (" + std::to_string(lad.rho_min) +
                                 " <= " + std::to_string(lad.gamma_max) + ")");

    bool derivs_zero = true;
    for (std::size_t n = 0; n < field.profiles.size(); ++n) {
        const double d0 = field.profiles[n].eval(0.0, 1);
        if (std::abs(d0) > 1e-9 * std::max(1.0, field.constants[n].sup_d1)) {
            derivs_zero = false;
            rep.violations.push_back("hypothesis 2: h_" + std::to_string(n) + "'(0) = " +
                                     std::to_string(d0) + " != 0");
        }
    }
    const bool h2_ratio = lad.rho_min > std::sqrt(lad.gamma_max);
    if (!h2_ratio)
        rep.violations.push_back("hypothesis 2: rho_min <= gamma_max^{1/2}");
    rep.h2_holds = h2_ratio && derivs_zero && std::isfinite(field.k2);

    const double gm1 = lad.gamma_min - 1.0;
    rep.epsilon = std::isinf(lad.rho_min) ? 0.0 : 4.0 * field.k1 / (lad.rho_min * gm1);

    if (rep.h1_holds)
        rep.bound_h1 = field.k1 / (1.0 - lad.gamma_max / lad.rho_min);
    if (rep.h2_holds)
        rep.bound_h2 = field.k2 / (1.0 - lad.gamma_max / (lad.rho_min * lad.rho_min));
    return rep;
}

}  // namespace shearflow
