#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shearflow {

/// The scale sequences gamma_0..gamma_P (amplitudes), r_0..r_P (integer
/// period ratios, r_0 = 1) and R_n = prod_{k<=n} r_k, together with their
/// extremal ratios. gamma values are stored as exact products of the
/// per-step ratios so gamma_min/gamma_max never drift.
///
/// For P = 0 there are no ratios; the inf/sup conventions over the empty set
/// are rho_min = gamma_min = +inf and rho_max = gamma_max = 0, which give the
/// correct single-scale limits downstream (Hypothesis 1 vacuous, epsilon = 0).
struct ScaleLadder {
    std::vector<double> gammas;        // gamma_0 == 1
    std::vector<double> gamma_ratios;  // gamma_{n+1}/gamma_n, size P
    std::vector<std::int64_t> ratios;  // r_0 == 1
    std::vector<std::int64_t> radii;   // R_n, exact integers

    double rho_min = std::numeric_limits<double>::infinity();
    double rho_max = 0.0;
    double gamma_min = std::numeric_limits<double>::infinity();
    double gamma_max = 0.0;
    std::optional<double> fastsep_alpha;  // set when built by the fast-separation rule

    int top_scale() const { return static_cast<int>(gammas.size()) - 1; }

    double gamma(int n) const { return gammas.at(n); }
    std::int64_t radius(int n) const { return radii.at(n); }
    double radius_d(int n) const { return static_cast<double>(radii.at(n)); }

    /// gamma_{-1} := gamma_0 / gamma_min (the convention recorded in manifests).
    double gamma_before_first() const {
        return gammas.front() / gamma_min;
    }
};

/// Ladder construction rule per the model: explicit sequences, self-similar
/// (R_n = rho^n, gamma_n = gamma^n), or fast separation between scales
/// (R_n = R_{n-1} * floor(rho^{n^alpha} / R_{n-1}), gamma_n = gamma^n).
struct LadderRule {
    enum class Kind { explicit_sequences, self_similar, fast_separation } kind;
    // self_similar / fast_separation
    std::int64_t rho = 0;
    double gamma = 0.0;
    double alpha = 0.0;
    int top = 0;
    // explicit_sequences
    std::vector<std::int64_t> ratios;
    std::vector<double> gammas;

    static LadderRule self_similar(std::int64_t rho, double gamma, int top) {
        LadderRule r;
        r.kind = Kind::self_similar;
        r.rho = rho;
        r.gamma = gamma;
        r.top = top;
        return r;
    }
    static LadderRule fast_separation(std::int64_t rho, double alpha, double gamma, int top) {
        LadderRule r;
        r.kind = Kind::fast_separation;
        r.rho = rho;
        r.alpha = alpha;
        r.gamma = gamma;
        r.top = top;
        return r;
    }
    static LadderRule explicit_sequences(std::vector<std::int64_t> ratios, std::vector<double> gammas) {
        LadderRule r;
        r.kind = Kind::explicit_sequences;
        r.ratios = std::move(ratios);
        r.gammas = std::move(gammas);
        return r;
    }
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    if (a != 0 && b > std::numeric_limits<std::int64_t>::max() / a)
        throw std::invalid_argument("ladder radii overflow 64-bit integers; reduce P");
    return a * b;
}

inline ScaleLadder finalize(std::vector<std::int64_t> ratios, std::vector<double> gammas) {
    if (ratios.empty() || gammas.empty() || ratios.size() != gammas.size())
        throw std::invalid_argument("ladder sequences must be non-empty and of equal length");
    if (ratios.front() != 1) throw std::invalid_argument("r_0 must be 1");
    if (gammas.front() != 1.0) throw std::invalid_argument("gamma_0 must be 1");
    ScaleLadder lad;
    lad.ratios = std::move(ratios);
    lad.gammas = std::move(gammas);
    lad.radii.resize(lad.ratios.size());
    lad.radii[0] = 1;
    for (std::size_t n = 1; n < lad.ratios.size(); ++n) {
        if (lad.ratios[n] < 2)
            throw std::invalid_argument("r_" + std::to_string(n) + " must be an integer >= 2");
        lad.radii[n] = checked_mul(lad.radii[n - 1], lad.ratios[n]);
        lad.rho_min = std::min(lad.rho_min, static_cast<double>(lad.ratios[n]));
        lad.rho_max = std::max(lad.rho_max, static_cast<double>(lad.ratios[n]));
    }
    for (std::size_t n = 0; n + 1 < lad.gammas.size(); ++n) {
        const double q = lad.gammas[n + 1] / lad.gammas[n];
        if (!(q > 1.0))
            throw std::invalid_argument("gamma ratio gamma_" + std::to_string(n + 1) + "/gamma_" +
                                        std::to_string(n) + " must be > 1");
        lad.gamma_ratios.push_back(q);
        lad.gamma_min = std::min(lad.gamma_min, q);
        lad.gamma_max = std::max(lad.gamma_max, q);
    }
    return lad;
}

}  // namespace detail

inline ScaleLadder build_ladder(const LadderRule& rule) {
    switch (rule.kind) {
        case LadderRule::Kind::explicit_sequences:
            return detail::finalize(rule.ratios, rule.gammas);
        case LadderRule::Kind::self_similar: {
            if (rule.rho < 2) throw std::invalid_argument("self-similar rho must be an integer >= 2");
            if (!(rule.gamma > 1.0)) throw std::invalid_argument("self-similar gamma must be > 1");
            if (rule.top < 0) throw std::invalid_argument("P must be >= 0");
            std::vector<std::int64_t> r(rule.top + 1, rule.rho);
            r[0] = 1;
            std::vector<double> g(rule.top + 1);
            g[0] = 1.0;
            for (int n = 1; n <= rule.top; ++n) g[n] = g[n - 1] * rule.gamma;
            return detail::finalize(std::move(r), std::move(g));
        }
        case LadderRule::Kind::fast_separation: {
            // fast-separation recursion R_n = R_{n-1} * floor(rho^{n^alpha} / R_{n-1}).
            if (rule.rho < 2) throw std::invalid_argument("fast-separation rho must be an integer >= 2");
            if (!(rule.alpha > 1.0)) throw std::invalid_argument("fast-separation alpha must be > 1");
            if (!(rule.gamma > 1.0)) throw std::invalid_argument("fast-separation gamma must be > 1");
            if (rule.top < 0) throw std::invalid_argument("P must be >= 0");
            std::vector<std::int64_t> r(rule.top + 1, 1);
            std::vector<double> g(rule.top + 1);
            g[0] = 1.0;
            std::int64_t R_prev = 1;
            for (int n = 1; n <= rule.top; ++n) {
                const double target = std::pow(static_cast<double>(rule.rho), std::pow(n, rule.alpha));
                if (!(target / static_cast<double>(R_prev) <
                      static_cast<double>(std::numeric_limits<std::int64_t>::max())))
                    throw std::invalid_argument("fast-separation radii overflow 64-bit integers; reduce P");
                const std::int64_t ratio =
                    static_cast<std::int64_t>(std::floor(target / static_cast<double>(R_prev)));
                if (ratio < 2)
                    throw std::invalid_argument("fast-separation produced r_" + std::to_string(n) + " < 2");
                r[n] = ratio;
                R_prev = detail::checked_mul(R_prev, ratio);
                g[n] = g[n - 1] * rule.gamma;
            }
            ScaleLadder lad = detail::finalize(std::move(r), std::move(g));
            lad.fastsep_alpha = rule.alpha;
            return lad;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace shearflow
