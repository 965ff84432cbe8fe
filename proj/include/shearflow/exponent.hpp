#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace shearflow {

/// Super-diffusion exponent extraction from an MSD table, MSD(t) = t^{1+nu}.
///   pointwise: nu(t) = ln MSD / ln t - 1 (undefined at t <= 1)
///   windowed:  least-squares slope of ln MSD vs ln t over a sliding window
///              of >= 4 checkpoints, minus 1
/// Standard errors are propagated from the per-checkpoint MSD errors.
struct ExponentFit {
    struct Row {
        double t;
        std::optional<double> nu_pointwise;
        double nu_pointwise_stderr = 0.0;
        std::optional<double> nu_windowed;  ///< window ends at this checkpoint
        double nu_windowed_stderr = 0.0;
    };
    std::vector<Row> rows;
    int window = 4;

    /// Windowed estimate at the largest checkpoint.
    std::optional<double> final_windowed() const {
        for (auto it = rows.rbegin(); it != rows.rend(); ++it)
            if (it->nu_windowed) return it->nu_windowed;
        return std::nullopt;
    }
    double final_windowed_stderr() const {
        for (auto it = rows.rbegin(); it != rows.rend(); ++it)
            if (it->nu_windowed) return it->nu_windowed_stderr;
        return 0.0;
    }
};

inline ExponentFit fit_exponent(const std::vector<double>& t, const std::vector<double>& msd,
                                const std::vector<double>& msd_stderr, int window = 4) {
    if (t.size() != msd.size() || t.size() != msd_stderr.size())
        throw std::invalid_argument("fit_exponent: mismatched table sizes");
    if (window < 4) throw std::invalid_argument("fit_exponent: window must be >= 4");
    const std::size_t n = t.size();
    ExponentFit fit;
    fit.window = window;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(msd[i] > 0.0)) throw std::invalid_argument("fit_exponent: MSD must be positive");
        ExponentFit::Row row;
        row.t = t[i];
        if (t[i] > 1.0) {
            row.nu_pointwise = std::log(msd[i]) / std::log(t[i]) - 1.0;
            row.nu_pointwise_stderr = msd_stderr[i] / msd[i] / std::log(t[i]);
        }
        if (i + 1 >= static_cast<std::size_t>(window)) {
            const std::size_t b = i + 1 - static_cast<std::size_t>(window);
            double sx = 0.0, sy = 0.0;
            for (std::size_t j = b; j <= i; ++j) {
                sx += std::log(t[j]);
                sy += std::log(msd[j]);
            }
            const double mx = sx / window, my = sy / window;
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t j = b; j <= i; ++j) {
                const double dx = std::log(t[j]) - mx;
                sxx += dx * dx;
                sxy += dx * (std::log(msd[j]) - my);
            }
            const double slope = sxy / sxx;
            double var = 0.0;
            for (std::size_t j = b; j <= i; ++j) {
                const double w = (std::log(t[j]) - mx) / sxx;
                const double sigma = msd_stderr[j] / msd[j];  // stderr of ln MSD
                var += w * w * sigma * sigma;
            }
            row.nu_windowed = slope - 1.0;
            row.nu_windowed_stderr = std::sqrt(var);
        }
        fit.rows.push_back(row);
    }
    return fit;
}

}  // namespace shearflow
