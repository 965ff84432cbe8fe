#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "shearflow/field.hpp"
#include "shearflow/rng.hpp"
#include "shearflow/spectrum.hpp"

namespace shearflow {

enum class Scheme { exact_representation, euler_maruyama_2d };

inline std::string scheme_name(Scheme s) {
    return s == Scheme::exact_representation ? "exact_representation" : "euler_maruyama_2d";
}

/// Monte Carlo run description. scale_k > scale_p means the zero field.
/// The drift integration step must resolve the smallest included spatial
/// period: base_dt <= substep_safety * R_k^2 (default c = 1e-2); a Richardson
/// pilot (run_experiment) checks the choice before full runs.
struct SimConfig {
    std::vector<double> checkpoints;
    double base_dt = 1e-2;
    double substep_safety = 1e-2;
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    int scale_k = 0;
    int scale_p = -1;
    Scheme scheme = Scheme::exact_representation;

    bool zero_field() const { return scale_k > scale_p; }

    void validate(const MultiscaleField* field) const {
        if (checkpoints.empty()) throw std::invalid_argument("sim: checkpoints must be non-empty");
        double prev = 0.0;
        for (double t : checkpoints) {
            if (!(t > prev)) throw std::invalid_argument("sim: checkpoints must be positive and increasing");
            prev = t;
        }
        if (!(base_dt > 0.0)) throw std::invalid_argument("sim: base_dt must be > 0");
        if (n_paths < 1) throw std::invalid_argument("sim: n_paths must be >= 1");
        if (!zero_field()) {
            if (field == nullptr) throw std::invalid_argument("sim: field required for non-empty scale range");
            field->check_range(scale_k, scale_p);
            const double rk = field->ladder.radius_d(scale_k);
            if (base_dt > substep_safety * rk * rk + 1e-15)
                throw std::invalid_argument(
                    "sim: base_dt does not resolve the smallest included scale (needs <= " +
                    std::to_string(substep_safety * rk * rk) + ")");
        }
    }
};

namespace detail {

/// Flattened evaluator of d/dx H^{k,p}(x): per scale one fmod, per mode one
/// sin/cos pair. Scale arguments are reduced mod the integer period first so
/// precision is independent of |x|.
class DriftEvaluator {
  public:
    DriftEvaluator() = default;

    DriftEvaluator(const MultiscaleField& field, int k, int p) {
        field.check_range(k, p);
        for (int n = k; n <= p; ++n) {
            Scale sc;
            sc.period = field.ladder.radius_d(n);
            const FourierProfile& prof = field.profiles[n];
            const double gr = field.ladder.gamma(n) / sc.period;
            for (int j = 1; j <= prof.max_frequency(); ++j) {
                const double a = prof.cos_coeff(j), b = prof.sin_coeff(j);
                if (a == 0.0 && b == 0.0) continue;
                Mode md;
                md.w = two_pi * j / sc.period;
                md.amp_cos = gr * two_pi * j * b;
                md.amp_sin = -gr * two_pi * j * a;
                sc.modes.push_back(md);
            }
            if (!sc.modes.empty()) scales_.push_back(std::move(sc));
        }
    }

    double operator()(double x) const {
        double s = 0.0;
        for (const Scale& sc : scales_) {
            const double xr = std::fmod(x, sc.period);
            for (const Mode& md : sc.modes) {
                const double arg = md.w * xr;
                s += md.amp_cos * std::cos(arg) + md.amp_sin * std::sin(arg);
            }
        }
        return s;
    }

    bool empty() const { return scales_.empty(); }

  private:
    struct Mode {
        double w, amp_cos, amp_sin;
    };
    struct Scale {
        double period;
        std::vector<Mode> modes;
    };
    std::vector<Scale> scales_;
};

struct TimeGrid {
    std::vector<double> times;                  // checkpoint times
    std::vector<std::int64_t> steps;            // substeps per checkpoint interval
    std::vector<double> dt;                     // substep size per interval
};

inline TimeGrid build_grid(const std::vector<double>& checkpoints, double base_dt) {
    TimeGrid g;
    g.times = checkpoints;
    double prev = 0.0;
    for (double t : checkpoints) {
        const double span = t - prev;
        const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / base_dt - 1e-12)));
        g.steps.push_back(n);
        g.dt.push_back(span / static_cast<double>(n));
        prev = t;
    }
    return g;
}

}  // namespace detail

/// Per-path displacement decomposition at each checkpoint:
///   y2 = w2 + drift_integral  (the exact shear representation)
struct PathSample {
    std::vector<double> y2;
    std::vector<double> w2;
    std::vector<double> drift_integral;
};

namespace detail {

// Shared path engine. The e1 Brownian component consumes stream 0 (one draw
// per substep); the e2 component consumes stream 1 (one draw per checkpoint
// interval: it enters additively in both schemes, which keeps the two schemes
// pathwise comparable on the same (seed, path)).
template <bool LeftPoint>
inline PathSample run_path(const DriftEvaluator& drift, const TimeGrid& grid, std::uint64_t seed,
                           std::uint64_t path_id) {
    PathSample out;
    const std::size_t ncp = grid.times.size();
    out.y2.resize(ncp);
    out.w2.resize(ncp);
    out.drift_integral.resize(ncp);
    GaussianStream gs(seed, path_id, 0);
    double b = 0.0;
    double integral = 0.0;
    double w2 = 0.0;
    double f_prev = drift(0.0);
    double t_prev = 0.0;
    for (std::size_t c = 0; c < ncp; ++c) {
        const double dt = grid.dt[c];
        const double sdt = std::sqrt(dt);
        const std::int64_t n = grid.steps[c];
        for (std::int64_t i = 0; i < n; ++i) {
            b += gs.next() * sdt;
            const double f = drift(b);
            if constexpr (LeftPoint)
                integral += dt * f_prev;
            else
                integral += 0.5 * dt * (f_prev + f);
            f_prev = f;
        }
        w2 += gaussian(seed, path_id, 1, static_cast<std::uint64_t>(c)) * std::sqrt(grid.times[c] - t_prev);
        t_prev = grid.times[c];
        out.w2[c] = w2;
        out.drift_integral[c] = integral;
        out.y2[c] = w2 + integral;
    }
    return out;
}

}  // namespace detail

/// Exact shear-flow representation: y_t.e2 = w_t.e2 + int_0^t d1 H^{k,p}(b_s) ds
/// with trapezoidal accumulation of the drift integral on the substepped grid.
inline PathSample sample_displacement(const MultiscaleField* field, const SimConfig& cfg,
                                      std::uint64_t path_id) {
    cfg.validate(field);
    if (cfg.scheme != Scheme::exact_representation)
        throw std::invalid_argument("sample_displacement requires scheme=exact_representation");
    detail::DriftEvaluator drift;
    if (!cfg.zero_field()) drift = detail::DriftEvaluator(*field, cfg.scale_k, cfg.scale_p);
    const auto grid = detail::build_grid(cfg.checkpoints, cfg.base_dt);
    return detail::run_path<false>(drift, grid, cfg.seed, path_id);
}

/// Standard Euler-Maruyama on the 2-d SDE dy = dw - grad Gamma(y) dt, whose
/// drift is (0, +d1 h(y.e1)). Shares the e1 Brownian stream with
/// sample_displacement so the two schemes are pathwise comparable.
/// Returns (y.e1, y.e2) at the checkpoints.
inline std::vector<std::array<double, 2>> euler_maruyama_2d(const MultiscaleField* field,
                                                            const SimConfig& cfg,
                                                            std::uint64_t path_id) {
    cfg.validate(field);
    detail::DriftEvaluator drift;
    if (!cfg.zero_field()) drift = detail::DriftEvaluator(*field, cfg.scale_k, cfg.scale_p);
    const auto grid = detail::build_grid(cfg.checkpoints, cfg.base_dt);
    const PathSample ps = detail::run_path<true>(drift, grid, cfg.seed, path_id);
    // y.e1 is the driving Brownian path itself; reconstruct its checkpoint
    // values from the same stream the engine consumed.
    std::vector<std::array<double, 2>> out(cfg.checkpoints.size());
    GaussianStream gs(cfg.seed, path_id, 0);
    double b = 0.0;
    for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
        const double sdt = std::sqrt(grid.dt[c]);
        for (std::int64_t i = 0; i < grid.steps[c]; ++i) b += gs.next() * sdt;
        out[c] = {b, ps.y2[c]};
    }
    return out;
}

/// Per-checkpoint ensemble moments of y_t.e2.
struct EnsembleStats {
    struct Row {
        double t;
        double msd;        ///< mean of (y_t.e2)^2
        double stderror;   ///< via the sample fourth moment
        double mean;       ///< mean of y_t.e2
        std::int64_t n_paths;
    };
    std::vector<Row> rows;
    Scheme scheme = Scheme::exact_representation;
    std::uint64_t seed = 0;
};

/// Ensemble aggregation: embarrassingly parallel over path ids, then a fixed
/// pairwise reduction in path order — bit-identical for any worker count.
/// Aborts on any non-finite path value (step-size or overflow bug guard).
inline EnsembleStats msd_ensemble(const MultiscaleField* field, const SimConfig& cfg, int threads = 1) {
    cfg.validate(field);
    if (cfg.n_paths < 2) throw std::invalid_argument("msd_ensemble needs n_paths >= 2");
    detail::DriftEvaluator drift;
    if (!cfg.zero_field()) drift = detail::DriftEvaluator(*field, cfg.scale_k, cfg.scale_p);
    const auto grid = detail::build_grid(cfg.checkpoints, cfg.base_dt);
    const std::size_t ncp = cfg.checkpoints.size();
    const std::size_t npaths = static_cast<std::size_t>(cfg.n_paths);

    std::vector<std::vector<double>> y2(ncp, std::vector<double>(npaths));
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t path = begin; path < end; ++path) {
            const PathSample ps =
                cfg.scheme == Scheme::exact_representation
                    ? detail::run_path<false>(drift, grid, cfg.seed, static_cast<std::uint64_t>(path))
                    : detail::run_path<true>(drift, grid, cfg.seed, static_cast<std::uint64_t>(path));
            for (std::size_t c = 0; c < ncp; ++c) y2[c][path] = ps.y2[c];
        }
    };
    if (threads <= 1) {
        worker(0, npaths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (npaths + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const std::size_t begin = std::min(npaths, static_cast<std::size_t>(w) * chunk);
            const std::size_t end = std::min(npaths, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    EnsembleStats stats;
    stats.scheme = cfg.scheme;
    stats.seed = cfg.seed;
    std::vector<double> sq(npaths), dev(npaths);
    for (std::size_t c = 0; c < ncp; ++c) {
        for (std::size_t i = 0; i < npaths; ++i) {
            const double v = y2[c][i];
            if (!std::isfinite(v)) throw std::runtime_error("msd_ensemble: non-finite path value");
            sq[i] = v * v;
        }
        const double msd = pairwise_mean(sq);
        for (std::size_t i = 0; i < npaths; ++i) {
            const double d = sq[i] - msd;
            dev[i] = d * d;
        }
        const double var =
            pairwise_mean(dev) * static_cast<double>(npaths) / static_cast<double>(npaths - 1);
        EnsembleStats::Row row;
        row.t = cfg.checkpoints[c];
        row.msd = msd;
        row.stderror = std::sqrt(var / static_cast<double>(npaths));
        row.mean = pairwise_mean(y2[c]);
        row.n_paths = cfg.n_paths;
        stats.rows.push_back(row);
    }
    return stats;
}

/// Richardson step check with common random numbers: each pilot path is
/// simulated once on the halved grid; the coarse drift integral is read off
/// the even nodes of the same path, so the returned relative change
/// |E[y2_coarse^2] - E[y2_fine^2]| / E[y2_fine^2] measures the discretization
/// gap itself, not Monte Carlo noise. 256 paths resolve changes well below
/// the 0.5% gate.
inline double richardson_relative_change(const MultiscaleField* field, const SimConfig& cfg,
                                         int threads = 1, std::int64_t pilot_paths = 256) {
    cfg.validate(field);
    if (cfg.zero_field()) return 0.0;
    const detail::DriftEvaluator drift(*field, cfg.scale_k, cfg.scale_p);
    const auto coarse = detail::build_grid(cfg.checkpoints, cfg.base_dt);

    const std::size_t npaths = static_cast<std::size_t>(pilot_paths);
    std::vector<double> fine_sq(npaths), diff(npaths);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t path = begin; path < end; ++path) {
            GaussianStream gs(cfg.seed, static_cast<std::uint64_t>(path), 0);
            double b = 0.0, fine_int = 0.0, coarse_int = 0.0, w2 = 0.0, t_prev = 0.0;
            double f_prev_fine = drift(0.0);
            double f_prev_coarse = f_prev_fine;
            double y2f = 0.0, y2c = 0.0;
            for (std::size_t c = 0; c < coarse.times.size(); ++c) {
                const double dt_f = 0.5 * coarse.dt[c];
                const double sdt = std::sqrt(dt_f);
                for (std::int64_t i = 0; i < coarse.steps[c]; ++i) {
                    b += gs.next() * sdt;
                    const double f_mid = drift(b);
                    fine_int += 0.5 * dt_f * (f_prev_fine + f_mid);
                    b += gs.next() * sdt;
                    const double f_even = drift(b);
                    fine_int += 0.5 * dt_f * (f_mid + f_even);
                    coarse_int += 0.5 * coarse.dt[c] * (f_prev_coarse + f_even);
                    f_prev_fine = f_even;
                    f_prev_coarse = f_even;
                }
                w2 += gaussian(cfg.seed, static_cast<std::uint64_t>(path), 1,
                               static_cast<std::uint64_t>(c)) *
                      std::sqrt(coarse.times[c] - t_prev);
                t_prev = coarse.times[c];
                y2f = w2 + fine_int;
                y2c = w2 + coarse_int;
            }
            fine_sq[path] = y2f * y2f;
            diff[path] = y2c * y2c - y2f * y2f;
        }
    };
    if (threads <= 1) {
        worker(0, npaths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (npaths + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const std::size_t begin = std::min(npaths, static_cast<std::size_t>(w) * chunk);
            const std::size_t end = std::min(npaths, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    const double base = pairwise_mean(fine_sq);
    return std::abs(pairwise_mean(diff)) / std::max(base, 1e-300);
}

/// Discretization residual of the Ito identity
///   int_0^t d1 H^{p-1}(b_s) ds = 2 int_0^{b_t} (H^{p-1}-kappa) - 2 int_0^t (H^{p-1}-kappa) db_s
/// computed on one path with left-point stochastic integration. p = 0 means
/// the zero field (residual 0 by convention).
inline double ito_identity_residual(const MultiscaleField& field, int p, std::uint64_t seed,
                                    std::uint64_t path_id, double t, double dt) {
    if (p < 0 || p > field.top_scale() + 1)
        throw std::out_of_range("ito_identity_residual: p out of range");
    if (p == 0) return 0.0;
    const int hi = p - 1;
    const detail::DriftEvaluator drift(field, 0, hi);
    const LatticeSpectrum sp = field_spectrum(field, 0, hi);
    const double kappa = sp.mean();
    const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(t / dt)));
    const double h = t / static_cast<double>(n);
    const double sh = std::sqrt(h);
    GaussianStream gs(seed, path_id, 0);
    double b = 0.0;
    double lhs = 0.0;
    double ito = 0.0;
    double f_prev = drift(0.0);
    double H_prev = sp.value(0.0) - kappa;
    for (std::int64_t i = 0; i < n; ++i) {
        const double db = gs.next() * sh;
        b += db;
        const double f = drift(b);
        lhs += 0.5 * h * (f_prev + f);
        ito += H_prev * db;
        f_prev = f;
        H_prev = sp.value(b) - kappa;
    }
    const double rhs = 2.0 * CellSolution::centered_antiderivative(sp, b) - 2.0 * ito;
    return std::abs(lhs - rhs);
}

}  // namespace shearflow
