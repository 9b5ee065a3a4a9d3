// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "kfrag/container.hpp"
#include "kfrag/error.hpp"
#include "kfrag/gf.hpp"
#include "kfrag/params.hpp"
#include "kfrag/random.hpp"
#include "kfrag/redundancy.hpp"

// Chained share encoding.
//
// Input bytes are read as w-byte little-endian chunks and grouped in sets of
// k. Chunk j of set i becomes the constant term of a degree k-1 polynomial
// whose other coefficients are the shares of set i-1 (minus share j, in
// ascending index order) and which is evaluated at x = j ^ share_{i-1}(j),
// with 0 replaced by 1. Set 0 is a fresh random seed. Share j of every set
// lands in fragment j, right after seed value j.

namespace kfrag {

template <class F>
using value_t = typename F::value_type;

/// k freshly drawn field elements, the predecessor of the first chunk set.
template <class F>
struct Seed {
    std::vector<value_t<F>> values;
};

template <class F, RandomSource R>
Seed<F> generate_seed(const CodecParams& params, R& rng)
{
    params.validate();
    std::vector<std::uint8_t> raw(params.set_bytes());
    rng.fill(raw);
    Seed<F> s;
    s.values.resize(params.k);
    for (unsigned j = 0; j < params.k; ++j)
        s.values[j] = F::load(raw.data() + j * F::width);
    return s;
}

/// Evaluation point for chunk j (1-based); never 0.
template <class F>
constexpr value_t<F> derive_point(unsigned j, value_t<F> prev_share) noexcept
{
    const auto x = static_cast<value_t<F>>(static_cast<value_t<F>>(j) ^ prev_share);
    return x == 0 ? value_t<F>{1} : x;
}

/// sum_{t=1..k-1} a_t x^t by Horner's rule, where a_1..a_{k-1} are prev
/// without element j. Costs exactly k-1 multiplications.
template <class F>
value_t<F> share_mask(std::span<const value_t<F>> prev, unsigned j)
{
    const std::size_t k = prev.size();
    const value_t<F> x = derive_point<F>(j, prev[j - 1]);
    // Coefficient of degree t sits at prev index t-1 when t < j, at t when t >= j.
    auto coeff = [&](std::size_t t) { return t < j ? prev[t - 1] : prev[t]; };
    value_t<F> acc = coeff(k - 1);
    for (std::size_t t = k - 1; t-- > 1;)
        acc = F::add(F::mul(acc, x), coeff(t));
    return F::mul(acc, x);
}

template <class F>
value_t<F> encode_share(value_t<F> chunk, std::span<const value_t<F>> prev, unsigned j)
{
    return F::add(chunk, share_mask<F>(prev, j));
}

template <class F>
value_t<F> decode_share(value_t<F> share, std::span<const value_t<F>> prev, unsigned j)
{
    return F::add(share, share_mask<F>(prev, j));
}

namespace detail {

inline void check_index(unsigned j, std::size_t k)
{
    if (j < 1 || j > k)
        throw Error(Errc::InvalidParams, "chunk index " + std::to_string(j) + " outside 1..k");
}

// Encodes one block. `block` holds the block's plaintext bytes (possibly
// short at the end of the input: missing bytes read as zero padding), `seed`
// k values, `out[j]` points to fragment j's slice for this block.
template <class F>
void encode_block(std::span<const std::uint8_t> block, std::uint64_t sets, std::span<const value_t<F>> seed,
                  std::span<std::uint8_t* const> out)
{
    using V = value_t<F>;
    constexpr std::size_t w = F::width;
    const std::size_t k = seed.size();
    std::vector<V> prev(seed.begin(), seed.end());
    std::vector<V> cur(k);
    std::vector<std::uint8_t> set_bytes(k * w);
    for (std::size_t j = 0; j < k; ++j)
        F::store(out[j], prev[j]);
    for (std::uint64_t i = 0; i < sets; ++i) {
        const std::size_t off = static_cast<std::size_t>(i) * k * w;
        const std::size_t avail = off < block.size() ? std::min(k * w, block.size() - off) : 0;
        std::fill(set_bytes.begin(), set_bytes.end(), 0);
        std::memcpy(set_bytes.data(), block.data() + off, avail);
        for (std::size_t j = 0; j < k; ++j) {
            cur[j] = encode_share<F>(F::load(set_bytes.data() + j * w), prev, static_cast<unsigned>(j + 1));
            F::store(out[j] + (i + 1) * w, cur[j]);
        }
        std::swap(prev, cur);
    }
}

// Decodes global sets [first, last) into out (k*w bytes per set). Payload
// spans start at byte `base` of the full systematic payloads.
template <class F>
void decode_sets(std::span<const std::span<const std::uint8_t>> systematic, std::size_t base, const Layout& layout,
                 std::uint64_t first, std::uint64_t last, std::uint8_t* out)
{
    using V = value_t<F>;
    constexpr std::size_t w = F::width;
    const std::size_t k = systematic.size();
    std::vector<V> prev(k);
    for (std::uint64_t g = first; g < last; ++g) {
        const std::uint64_t b = g / layout.sets_per_block;
        const std::uint64_t i = g % layout.sets_per_block;
        // Element position of this set's share inside each payload.
        const std::size_t pos = static_cast<std::size_t>(layout.block_payload_offset(b) + (i + 1) * w) - base;
        for (std::size_t j = 0; j < k; ++j)
            prev[j] = F::load(systematic[j].data() + pos - w);
        for (std::size_t j = 0; j < k; ++j) {
            const V share = F::load(systematic[j].data() + pos);
            F::store(out + ((g - first) * k + j) * w, decode_share<F>(share, prev, static_cast<unsigned>(j + 1)));
        }
    }
}

template <class Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn)
{
    threads = std::max(1u, threads);
    if (threads == 1 || count <= 1) {
        if (count > 0)
            fn(std::uint64_t{0}, count);
        return;
    }
    const std::uint64_t workers = std::min<std::uint64_t>(threads, count);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t t = 0; t < workers; ++t) {
        const std::uint64_t lo = count * t / workers;
        const std::uint64_t hi = count * (t + 1) / workers;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
}

// Systematic payload views, restoring missing ones over [begin, end) if needed.
struct SystematicView {
    std::vector<std::vector<std::uint8_t>> owned;
    std::vector<std::span<const std::uint8_t>> views;
};

inline SystematicView systematic_view(std::span<const Fragment> fragments, const CodecParams& params,
                                      std::size_t begin, std::size_t end)
{
    SystematicView v;
    v.views.resize(params.k);
    std::vector<bool> present(params.k, false);
    for (const auto& f : fragments) {
        if (f.header.frag_index <= params.k) {
            v.views[f.header.frag_index - 1] = std::span<const std::uint8_t>(f.payload).subspan(begin, end - begin);
            present[f.header.frag_index - 1] = true;
        }
    }
    if (std::all_of(present.begin(), present.end(), [](bool b) { return b; }))
        return v;
    std::vector<IndexedPayload> avail;
    for (const auto& f : fragments)
        avail.push_back({f.header.frag_index, f.payload});
    v.owned = rs_reconstruct_range(avail, params, begin, end);
    for (unsigned j = 0; j < params.k; ++j)
        v.views[j] = v.owned[j];
    return v;
}

}  // namespace detail

/// Fragments `data` with the given per-block seed material (blocks * k * w
/// bytes, block-major, little-endian elements). Deterministic; `fragment`
/// is the entry point that draws fresh seeds.
inline std::vector<Fragment> fragment_seeded(std::span<const std::uint8_t> data, const CodecParams& params,
                                             std::span<const std::uint8_t> seed_bytes, const RunId& run_id,
                                             unsigned threads = 1)
{
    params.validate();
    const Layout layout = make_layout(params, data.size());
    const std::size_t k = params.k;
    const std::size_t w = params.field.w;
    if (seed_bytes.size() != layout.blocks * k * w)
        throw Error(Errc::InvalidParams, "seed material must be blocks*k*w = " + std::to_string(layout.blocks * k * w) +
                                             " bytes, got " + std::to_string(seed_bytes.size()));

    const std::size_t payload_len = static_cast<std::size_t>(layout.payload_length());
    std::vector<std::vector<std::uint8_t>> systematic(k, std::vector<std::uint8_t>(payload_len));

    with_field(params.field.q, [&](auto f) {
        using F = decltype(f);
        detail::parallel_for(layout.blocks, threads, [&](std::uint64_t lo, std::uint64_t hi) {
            std::vector<value_t<F>> seed(k);
            std::vector<std::uint8_t*> out(k);
            for (std::uint64_t b = lo; b < hi; ++b) {
                for (std::size_t j = 0; j < k; ++j) {
                    seed[j] = F::load(seed_bytes.data() + (b * k + j) * w);
                    out[j] = systematic[j].data() + layout.block_payload_offset(b);
                }
                const std::size_t start = static_cast<std::size_t>(layout.block_first_set(b) * k * w);
                const auto block = start < data.size() ? data.subspan(start) : std::span<const std::uint8_t>{};
                const auto sets = layout.block_sets(b);
                detail::encode_block<F>(block.first(std::min<std::size_t>(block.size(), sets * k * w)), sets, seed,
                                        out);
            }
        });
    });

    auto redundant = rs_extend(systematic, params.n, params.field);

    FragmentHeader h;
    h.q = static_cast<std::uint8_t>(params.field.q);
    h.flags = params.block_chunks != 0 ? kFlagBlockMode : 0;
    h.k = static_cast<std::uint16_t>(params.k);
    h.n = static_cast<std::uint16_t>(params.n);
    h.run_id = run_id;
    h.original_length = data.size();
    h.block_chunks = params.block_chunks;
    h.payload_length = payload_len;

    std::vector<Fragment> fragments;
    fragments.reserve(params.n);
    for (unsigned idx = 1; idx <= params.n; ++idx) {
        h.frag_index = static_cast<std::uint16_t>(idx);
        fragments.push_back({h, idx <= k ? std::move(systematic[idx - 1]) : std::move(redundant[idx - k - 1])});
    }
    return fragments;
}

/// Splits data into n fragments, any k of which recover it. A fresh seed is
/// drawn for every block and a fresh run identifier for the whole run.
template <RandomSource R>
std::vector<Fragment> fragment(std::span<const std::uint8_t> data, const CodecParams& params, R& rng,
                               unsigned threads = 1)
{
    params.validate();
    const Layout layout = make_layout(params, data.size());
    RunId run_id;
    rng.fill(run_id);
    std::vector<std::uint8_t> seeds;
    seeds.reserve(layout.blocks * params.set_bytes());
    with_field(params.field.q, [&](auto f) {
        using F = decltype(f);
        std::uint8_t buf[2];
        for (std::uint64_t b = 0; b < layout.blocks; ++b) {
            for (auto v : generate_seed<F>(params, rng).values) {
                F::store(buf, v);
                seeds.insert(seeds.end(), buf, buf + F::width);
            }
        }
    });
    return fragment_seeded(data, params, seeds, run_id, threads);
}

/// Inverse of fragment: any k consistent fragments of one run.
inline std::vector<std::uint8_t> defragment(std::span<const Fragment> fragments, unsigned threads = 1)
{
    const CodecParams params = validate_set(fragments);
    const FragmentHeader& h = fragments.front().header;
    const Layout layout = make_layout(params, h.original_length);
    const auto sys = detail::systematic_view(fragments, params, 0, static_cast<std::size_t>(h.payload_length));
    std::vector<std::uint8_t> out(static_cast<std::size_t>(layout.sets * params.set_bytes()));
    with_field(params.field.q, [&](auto f) {
        using F = decltype(f);
        detail::parallel_for(layout.sets, threads, [&](std::uint64_t lo, std::uint64_t hi) {
            detail::decode_sets<F>(sys.views, 0, layout, lo, hi, out.data() + lo * params.set_bytes());
        });
    });
    out.resize(static_cast<std::size_t>(h.original_length));
    return out;
}

/// Bytes [offset, offset+length) of the original data, decoding only the
/// chunk sets that cover the range (and restoring only those columns when
/// systematic fragments are missing).
inline std::vector<std::uint8_t> decode_range(std::span<const Fragment> fragments, std::uint64_t offset,
                                              std::uint64_t length)
{
    const CodecParams params = validate_set(fragments);
    const FragmentHeader& h = fragments.front().header;
    if (offset > h.original_length || length > h.original_length - offset)
        throw Error(Errc::RangeOutOfBounds, "range [" + std::to_string(offset) + ", +" + std::to_string(length) +
                                                ") exceeds data length " + std::to_string(h.original_length));
    if (length == 0)
        return {};
    const Layout layout = make_layout(params, h.original_length);
    const std::size_t set_bytes = params.set_bytes();
    const std::uint64_t g0 = offset / set_bytes;
    const std::uint64_t g1 = (offset + length - 1) / set_bytes + 1;
    const std::size_t w = params.field.w;
    // Payload element span: predecessor of the first set through the last set.
    auto share_pos = [&](std::uint64_t g) {
        const std::uint64_t b = g / layout.sets_per_block;
        return static_cast<std::size_t>(layout.block_payload_offset(b) + (g % layout.sets_per_block + 1) * w);
    };
    const std::size_t begin = share_pos(g0) - w;
    const std::size_t end = share_pos(g1 - 1) + w;
    const auto sys = detail::systematic_view(fragments, params, begin, end);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>((g1 - g0) * set_bytes));
    with_field(params.field.q, [&](auto f) {
        using F = decltype(f);
        detail::decode_sets<F>(sys.views, begin, layout, g0, g1, buf.data());
    });
    const auto skip = static_cast<std::ptrdiff_t>(offset - g0 * set_bytes);
    return {buf.begin() + skip, buf.begin() + skip + static_cast<std::ptrdiff_t>(length)};
}

}  // namespace kfrag
