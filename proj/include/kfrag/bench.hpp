// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kfrag/codec.hpp"
#include "kfrag/error.hpp"

namespace kfrag {

struct BenchRecord {
    std::string direction;  // "fragment" or "defragment"
    unsigned k = 0;
    unsigned n = 0;
    std::uint64_t data_size = 0;
    unsigned threads = 1;
    std::vector<double> runs;  // seconds, warm
    double median = 0.0;
    double throughput = 0.0;  // bytes per second at the median
};

inline double median(std::vector<double> v)
{
    if (v.empty())
        throw Error(Errc::EmptyInput, "median of nothing");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept with coefficient of
/// determination.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error(Errc::LengthMismatch, "line fit needs two or more (x, y) pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0)
        throw Error(Errc::ZeroVariance, "all x values equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
    }
    f.r2 = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
    return f;
}

namespace detail {

template <class Fn>
double time_once(Fn&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
}

inline void finish(BenchRecord& r)
{
    r.median = median(r.runs);
    r.throughput = static_cast<double>(r.data_size) / r.median;
}

}  // namespace detail

/// One untimed warm-up run, then `repetitions` timed runs.
template <RandomSource R>
BenchRecord bench_fragment(std::span<const std::uint8_t> data, const CodecParams& params, unsigned threads,
                           unsigned repetitions, R& rng)
{
    if (repetitions < 3)
        throw Error(Errc::InvalidParams, "at least 3 repetitions are required");
    BenchRecord r{"fragment", params.k, params.n, data.size(), threads, {}, 0, 0};
    (void)fragment(data, params, rng, threads);
    for (unsigned i = 0; i < repetitions; ++i)
        r.runs.push_back(detail::time_once([&] { (void)fragment(data, params, rng, threads); }));
    detail::finish(r);
    return r;
}

inline BenchRecord bench_defragment(std::span<const Fragment> fragments, unsigned threads, unsigned repetitions)
{
    if (repetitions < 3)
        throw Error(Errc::InvalidParams, "at least 3 repetitions are required");
    const auto& h = fragments.front().header;
    BenchRecord r{"defragment", h.k, h.n, h.original_length, threads, {}, 0, 0};
    (void)defragment(fragments, threads);
    for (unsigned i = 0; i < repetitions; ++i)
        r.runs.push_back(detail::time_once([&] { (void)defragment(fragments, threads); }));
    detail::finish(r);
    return r;
}

/// Block size that gives every thread several blocks to work on.
inline std::uint64_t block_chunks_for(std::uint64_t data_size, unsigned k, std::size_t w, unsigned threads)
{
    const std::uint64_t sets = (data_size / w + k - 1) / k;
    return std::max<std::uint64_t>(1, sets / (4ull * std::max(1u, threads)));
}

}  // namespace kfrag
