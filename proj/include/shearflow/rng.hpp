#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace shearflow {

/// Philox4x32-10 counter-based generator (Salmon et al.): the output block is
/// a pure function of (key, counter), so any draw can be produced at any time
/// by any worker. This is what makes ensembles bit-reproducible regardless of
/// the worker count.
namespace philox {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, ctr[0], hi0, lo0);
        mulhilo(M1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

}  // namespace philox

namespace detail {

inline double u01(std::uint32_t hi, std::uint32_t lo) {
    // 53-bit mantissa, offset by half an ulp: value lies strictly in (0,1).
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// One Box-Muller pair keyed by (seed, path, stream, pair_index).
inline std::array<double, 2> gaussian_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t stream,
                                           std::uint64_t pair_index) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32),
        static_cast<std::uint32_t>(pair_index),
        static_cast<std::uint32_t>((pair_index >> 32) & 0x00FFFFFFull) | (stream << 24)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto r = philox::block(ctr, key);
    const double u1 = detail::u01(r[0], r[1]);
    const double u2 = detail::u01(r[2], r[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

/// Standard normal draw for (seed, path, stream, index): element index%2 of
/// Box-Muller pair index/2.
inline double gaussian(std::uint64_t seed, std::uint64_t path, std::uint32_t stream,
                       std::uint64_t index) {
    const auto pair = gaussian_pair(seed, path, stream, index >> 1);
    return pair[index & 1];
}

/// Sequential view of the keyed stream: next() yields gaussian(seed, path,
/// stream, 0), gaussian(..., 1), ... without recomputing pairs.
class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, std::uint64_t path, std::uint32_t stream)
        : seed_(seed), path_(path), stream_(stream) {}

    double next() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        const auto pair = gaussian_pair(seed_, path_, stream_, pair_index_++);
        cached_ = pair[1];
        have_ = true;
        return pair[0];
    }

  private:
    std::uint64_t seed_, path_;
    std::uint32_t stream_;
    std::uint64_t pair_index_ = 0;
    double cached_ = 0.0;
    bool have_ = false;
};

/// Exact Brownian increments over a strictly increasing grid starting at 0:
/// increment i has variance t_grid[i+1|0] - previous node. Identical output
/// for identical (seed, path_id) regardless of execution order or workers.
inline std::vector<double> brownian_increments(std::uint64_t seed, std::uint64_t path_id,
                                               std::span<const double> t_grid) {
    if (t_grid.empty()) return {};
    double prev = 0.0;
    for (double t : t_grid) {
        if (!(t > prev)) throw std::invalid_argument("t_grid must be strictly increasing from 0");
        prev = t;
    }
    std::vector<double> inc(t_grid.size());
    GaussianStream gs(seed, path_id, 0);
    prev = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        inc[i] = gs.next() * std::sqrt(t_grid[i] - prev);
        prev = t_grid[i];
    }
    return inc;
}

/// Order-independent pairwise sum: fixed recursive halving, so the result
/// depends only on the element order, never on how work was distributed.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t mid = v.size() / 2;
    return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

inline double pairwise_mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("pairwise_mean of empty range");
    return pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace shearflow
