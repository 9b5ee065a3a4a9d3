// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kfrag/error.hpp"
#include "kfrag/gf.hpp"
#include "kfrag/params.hpp"

// Systematic Reed-Solomon over fragment indices: fragment u is the value at
// field point u of the degree < k polynomial through the k systematic
// fragments (points 1..k), evaluated column by column. Erasure decoding only.

namespace kfrag {

template <class F>
struct Point {
    typename F::value_type position;
    typename F::value_type value;
};

/// Lagrange basis weights l_t(x) for the given distinct positions.
template <class F>
std::vector<typename F::value_type> lagrange_weights(std::span<const typename F::value_type> positions,
                                                     typename F::value_type x)
{
    using V = typename F::value_type;
    const std::size_t k = positions.size();
    std::vector<V> w(k, 0);
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t s = t + 1; s < k; ++s) {
            if (positions[t] == positions[s])
                throw Error(Errc::DuplicatePosition, "interpolation position " + std::to_string(positions[t]) + " repeated");
        }
        if (positions[t] == x) {
            w[t] = 1;
            return w;
        }
    }
    for (std::size_t t = 0; t < k; ++t) {
        V num = 1;
        V den = 1;
        for (std::size_t s = 0; s < k; ++s) {
            if (s == t)
                continue;
            num = F::mul(num, F::add(x, positions[s]));
            den = F::mul(den, F::add(positions[t], positions[s]));
        }
        w[t] = F::div(num, den);
    }
    return w;
}

/// Value at x of the unique polynomial of degree < points.size() through points.
template <class F>
typename F::value_type lagrange_eval(std::span<const Point<F>> points, typename F::value_type x)
{
    using V = typename F::value_type;
    std::vector<V> pos(points.size());
    std::transform(points.begin(), points.end(), pos.begin(), [](const Point<F>& p) { return p.position; });
    const auto w = lagrange_weights<F>(pos, x);
    V acc = 0;
    for (std::size_t t = 0; t < points.size(); ++t)
        acc = F::add(acc, F::mul(w[t], points[t].value));
    return acc;
}

/// A payload tagged with its 1-based fragment index.
struct IndexedPayload {
    unsigned index = 0;
    std::span<const std::uint8_t> payload;
};

namespace detail {

// out[d][c - begin] = sum_t weight(d, t) * src[t][c] for element columns
// covering bytes [begin, end).
template <class F>
void interpolate_columns(std::span<const typename F::value_type> src_pos,
                         std::span<const std::span<const std::uint8_t>> src,
                         std::span<const typename F::value_type> dst_pos,
                         std::span<std::vector<std::uint8_t>> out,
                         std::size_t begin, std::size_t end)
{
    using V = typename F::value_type;
    constexpr std::size_t w = F::width;
    const std::size_t k = src_pos.size();
    for (std::size_t d = 0; d < dst_pos.size(); ++d) {
        const auto weights = lagrange_weights<F>(src_pos, dst_pos[d]);
        auto& dst = out[d];
        dst.assign(end - begin, 0);
        for (std::size_t t = 0; t < k; ++t) {
            const V wt = weights[t];
            if (wt == 0)
                continue;
            const std::uint8_t* s = src[t].data();
            for (std::size_t c = begin; c < end; c += w) {
                const V acc = F::load(dst.data() + (c - begin));
                F::store(dst.data() + (c - begin), F::add(acc, F::mul(wt, F::load(s + c))));
            }
        }
    }
}

inline void check_range(std::size_t length, std::size_t w, std::size_t begin, std::size_t end)
{
    if (length % w != 0)
        throw Error(Errc::LengthMismatch, "payload length " + std::to_string(length) + " is not a multiple of the element width");
    if (begin > end || end > length || begin % w != 0 || end % w != 0)
        throw Error(Errc::RangeOutOfBounds, "column range not aligned to payload elements");
}

}  // namespace detail

/// Redundant payloads for fragments k+1..n (returned in that order).
inline std::vector<std::vector<std::uint8_t>> rs_extend(std::span<const std::span<const std::uint8_t>> systematic,
                                                        unsigned n, const FieldParams& field)
{
    const std::size_t k = systematic.size();
    if (k < 1 || n < k)
        throw Error(Errc::InvalidParams, "rs_extend needs 1 <= k <= n");
    if (n > (std::uint64_t{1} << field.q) - 1)
        throw Error(Errc::InvalidParams, "n exceeds the number of nonzero field points");
    const std::size_t len = systematic[0].size();
    for (const auto& s : systematic) {
        if (s.size() != len)
            throw Error(Errc::LengthMismatch, "systematic payloads differ in length");
    }
    std::vector<std::vector<std::uint8_t>> out(n - k);
    if (out.empty())
        return out;
    with_field(field.q, [&](auto f) {
        using F = decltype(f);
        using V = typename F::value_type;
        detail::check_range(len, F::width, 0, len);
        std::vector<V> src_pos(k), dst_pos(n - k);
        for (std::size_t t = 0; t < k; ++t)
            src_pos[t] = static_cast<V>(t + 1);
        for (std::size_t u = 0; u < n - k; ++u)
            dst_pos[u] = static_cast<V>(k + u + 1);
        detail::interpolate_columns<F>(src_pos, systematic, dst_pos, out, 0, len);
    });
    return out;
}

inline std::vector<std::vector<std::uint8_t>> rs_extend(const std::vector<std::vector<std::uint8_t>>& systematic,
                                                        unsigned n, const FieldParams& field)
{
    std::vector<std::span<const std::uint8_t>> views(systematic.begin(), systematic.end());
    return rs_extend(std::span<const std::span<const std::uint8_t>>(views), n, field);
}

/// Systematic payloads 1..k restricted to bytes [begin, end), recovered from
/// any k of the available fragments. Present systematic fragments are copied.
inline std::vector<std::vector<std::uint8_t>> rs_reconstruct_range(std::span<const IndexedPayload> available,
                                                                    const CodecParams& params,
                                                                    std::size_t begin, std::size_t end)
{
    params.validate();
    std::vector<IndexedPayload> sorted(available.begin(), available.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].index < 1 || sorted[i].index > params.n)
            throw Error(Errc::InvalidParams, "fragment index " + std::to_string(sorted[i].index) + " outside 1..n");
        if (i > 0 && sorted[i].index == sorted[i - 1].index)
            throw Error(Errc::DuplicateIndex, "fragment index " + std::to_string(sorted[i].index) + " supplied twice");
        if (sorted[i].payload.size() != sorted[0].payload.size())
            throw Error(Errc::LengthMismatch, "payload lengths differ between fragments");
    }
    if (sorted.size() < params.k)
        throw Error(Errc::NotEnoughFragments,
                    "need " + std::to_string(params.k) + " fragments, have " + std::to_string(sorted.size()));
    detail::check_range(sorted[0].payload.size(), params.field.w, begin, end);

    // Ascending order puts systematic fragments first, so the first k are
    // the cheapest sources.
    sorted.resize(params.k);
    std::vector<std::vector<std::uint8_t>> result(params.k);
    std::vector<unsigned> missing;
    for (unsigned j = 1; j <= params.k; ++j) {
        auto it = std::find_if(sorted.begin(), sorted.end(), [j](const auto& p) { return p.index == j; });
        if (it != sorted.end())
            result[j - 1].assign(it->payload.begin() + static_cast<std::ptrdiff_t>(begin),
                                 it->payload.begin() + static_cast<std::ptrdiff_t>(end));
        else
            missing.push_back(j);
    }
    if (missing.empty())
        return result;

    with_field(params.field.q, [&](auto f) {
        using F = decltype(f);
        using V = typename F::value_type;
        std::vector<V> src_pos;
        std::vector<std::span<const std::uint8_t>> src;
        for (const auto& p : sorted) {
            src_pos.push_back(static_cast<V>(p.index));
            src.push_back(p.payload);
        }
        std::vector<V> dst_pos;
        for (unsigned j : missing)
            dst_pos.push_back(static_cast<V>(j));
        std::vector<std::vector<std::uint8_t>> recovered(missing.size());
        detail::interpolate_columns<F>(src_pos, src, dst_pos, recovered, begin, end);
        for (std::size_t i = 0; i < missing.size(); ++i)
            result[missing[i] - 1] = std::move(recovered[i]);
    });
    return result;
}

inline std::vector<std::vector<std::uint8_t>> rs_reconstruct(std::span<const IndexedPayload> available,
                                                             const CodecParams& params)
{
    if (available.empty())
        throw Error(Errc::NotEnoughFragments, "no fragments supplied");
    const std::size_t len = available.front().payload.size();
    return rs_reconstruct_range(available, params, 0, len);
}

}  // namespace kfrag
