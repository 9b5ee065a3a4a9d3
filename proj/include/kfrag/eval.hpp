// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kfrag/codec.hpp"
#include "kfrag/error.hpp"
#include "kfrag/gf.hpp"
#include "kfrag/params.hpp"
#include "kfrag/random.hpp"

namespace kfrag {

/// Critical value of chi-squared with 255 degrees of freedom at alpha = 0.05.
inline constexpr double kChiSquaredThreshold = 293.0;
/// Expected count >= 5 in every one of the 256 cells.
inline constexpr std::size_t kChiSquaredMinSample = 5 * 256;

using ByteHistogram = std::array<double, 256>;

inline std::array<std::uint64_t, 256> byte_counts(std::span<const std::uint8_t> data) noexcept
{
    std::array<std::uint64_t, 256> c{};
    for (auto b : data)
        ++c[b];
    return c;
}

/// Bits per byte, from observed byte frequencies.
inline double shannon_entropy(std::span<const std::uint8_t> data)
{
    if (data.empty())
        throw Error(Errc::EmptyInput, "entropy of an empty sequence");
    const auto counts = byte_counts(data);
    const double n = static_cast<double>(data.size());
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0)
            continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return std::max(0.0, h);
}

inline ByteHistogram pdf_histogram(std::span<const std::uint8_t> data)
{
    if (data.empty())
        throw Error(Errc::EmptyInput, "histogram of an empty sequence");
    const auto counts = byte_counts(data);
    ByteHistogram h{};
    const double n = static_cast<double>(data.size());
    for (std::size_t v = 0; v < 256; ++v)
        h[v] = static_cast<double>(counts[v]) / n;
    return h;
}

struct ChiSquared {
    double statistic = 0.0;
    bool pass = false;
};

/// Pearson goodness of fit against 256 equiprobable byte values, without
/// the sample size rule. Use chi_squared_uniform for actual testing.
inline double chi_squared_statistic(std::span<const std::uint8_t> data)
{
    if (data.empty())
        throw Error(Errc::EmptyInput, "chi-squared of an empty sequence");
    const auto counts = byte_counts(data);
    const double expected = static_cast<double>(data.size()) / 256.0;
    double chi = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi += d * d / expected;
    }
    return chi;
}

inline ChiSquared chi_squared_uniform(std::span<const std::uint8_t> data)
{
    if (data.size() < kChiSquaredMinSample)
        throw Error(Errc::SampleTooSmall, "chi-squared test needs at least " + std::to_string(kChiSquaredMinSample) +
                                              " bytes, got " + std::to_string(data.size()));
    const double s = chi_squared_statistic(data);
    return {s, s <= kChiSquaredThreshold};
}

inline double pearson_correlation(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    if (a.size() != b.size())
        throw Error(Errc::LengthMismatch, "correlation of sequences with different lengths");
    if (a.size() < 2)
        throw Error(Errc::LengthMismatch, "correlation needs at least two samples");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw Error(Errc::ZeroVariance, "correlation with a constant sequence is undefined");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Fraction of differing bits.
inline double bit_difference(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    if (a.size() != b.size())
        throw Error(Errc::LengthMismatch, "bit difference of sequences with different lengths");
    if (a.empty())
        return 0.0;
    std::uint64_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        diff += static_cast<unsigned>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
    return static_cast<double>(diff) / (8.0 * static_cast<double>(a.size()));
}

using RecurrencePair = std::pair<std::uint8_t, std::uint8_t>;

/// (data[i], data[i+delay]) for every i, in order.
inline std::vector<RecurrencePair> recurrence_points(std::span<const std::uint8_t> data, std::size_t delay)
{
    if (delay < 1 || data.size() <= delay)
        throw Error(Errc::DelayTooLarge, "delay " + std::to_string(delay) + " needs more than " + std::to_string(delay) +
                                             " bytes, got " + std::to_string(data.size()));
    std::vector<RecurrencePair> out;
    out.reserve(data.size() - delay);
    for (std::size_t i = 0; i + delay < data.size(); ++i)
        out.emplace_back(data[i], data[i + delay]);
    return out;
}

/// Share stream of a fragment payload with the seed share of every block
/// removed.
inline std::vector<std::uint8_t> share_stream(const Fragment& f)
{
    const CodecParams p = f.header.params();
    const Layout l = make_layout(p, f.header.original_length);
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(l.sets * l.w));
    for (std::uint64_t b = 0; b < l.blocks; ++b) {
        const auto off = static_cast<std::ptrdiff_t>(l.block_payload_offset(b) + l.w);
        const auto len = static_cast<std::ptrdiff_t>(l.block_sets(b) * l.w);
        out.insert(out.end(), f.payload.begin() + off, f.payload.begin() + off + len);
    }
    return out;
}

/// The plaintext bytes encoded into fragment j (1-based): chunks j, j+k,
/// j+2k, ... of the zero-padded input. Same length as share_stream.
inline std::vector<std::uint8_t> aligned_original(std::span<const std::uint8_t> data, const CodecParams& p, unsigned j)
{
    const Layout l = make_layout(p, data.size());
    std::vector<std::uint8_t> out(static_cast<std::size_t>(l.sets * l.w), 0);
    for (std::uint64_t i = 0; i < l.sets; ++i) {
        const std::size_t src = static_cast<std::size_t>((i * p.k + (j - 1)) * l.w);
        for (std::size_t b = 0; b < l.w && src + b < data.size(); ++b)
            out[static_cast<std::size_t>(i * l.w) + b] = data[src + b];
    }
    return out;
}

inline std::vector<std::uint8_t> concat_share_streams(std::span<const Fragment> fragments, unsigned k)
{
    std::vector<std::uint8_t> all;
    for (const auto& f : fragments) {
        if (f.header.frag_index > k)
            continue;
        const auto s = share_stream(f);
        all.insert(all.end(), s.begin(), s.end());
    }
    return all;
}

struct SeedSensitivity {
    double bit_difference = 0.0;
    double correlation = 0.0;
    std::size_t flipped_bit = 0;
};

/// Fragments data with seed material `seed` and again with bit `flip_bit`
/// of it inverted (no inversion when flip_bit is empty) and compares the
/// concatenated systematic share streams.
inline SeedSensitivity seed_sensitivity(std::span<const std::uint8_t> data, const CodecParams& params,
                                        std::span<const std::uint8_t> seed, std::optional<std::size_t> flip_bit,
                                        const RunId& run_id = {})
{
    std::vector<std::uint8_t> seed2(seed.begin(), seed.end());
    if (flip_bit) {
        if (*flip_bit >= seed2.size() * 8)
            throw Error(Errc::InvalidParams, "flip bit outside the seed");
        seed2[*flip_bit / 8] ^= static_cast<std::uint8_t>(1u << (*flip_bit % 8));
    }
    const auto a = concat_share_streams(fragment_seeded(data, params, seed, run_id), params.k);
    const auto b = concat_share_streams(fragment_seeded(data, params, seed2, run_id), params.k);
    SeedSensitivity r;
    r.bit_difference = bit_difference(a, b);
    r.correlation = flip_bit ? pearson_correlation(a, b) : 1.0;
    r.flipped_bit = flip_bit.value_or(0);
    return r;
}

template <RandomSource R>
SeedSensitivity seed_sensitivity_report(std::span<const std::uint8_t> data, const CodecParams& params, R& rng)
{
    if (data.size() < 1000)
        throw Error(Errc::SampleTooSmall, "seed sensitivity needs at least 1000 bytes");
    params.validate();
    const Layout l = make_layout(params, data.size());
    std::vector<std::uint8_t> seed(static_cast<std::size_t>(l.blocks * params.set_bytes()));
    rng.fill(seed);
    std::array<std::uint8_t, 8> pick{};
    rng.fill(pick);
    std::uint64_t r = 0;
    for (auto b : pick)
        r = (r << 8) | b;
    return seed_sensitivity(data, params, seed, static_cast<std::size_t>(r % (seed.size() * 8)));
}

// ---------------------------------------------------------------------------
// Matrix dispersal baseline (Rabin IDA). Comparison only.

/// k x n generator matrix over GF(2^q), row-major.
struct IdaMatrix {
    unsigned k = 0;
    unsigned n = 0;
    FieldParams field{};
    std::vector<std::uint32_t> entries;

    std::uint32_t at(unsigned r, unsigned c) const { return entries[static_cast<std::size_t>(r) * n + c]; }

    /// entry (r, c) = (c+1)^r.
    static IdaMatrix vandermonde(unsigned k, unsigned n, unsigned q = 8);
    /// Vandermonde matrix brought to systematic form: first k columns are
    /// the identity.
    static IdaMatrix identity_extended(unsigned k, unsigned n, unsigned q = 8);

    void validate(std::size_t max_minors = 20000) const;
};

namespace detail {

// Gauss-Jordan inverse of a square matrix over F; empty result if singular.
template <class F>
std::vector<value_t<F>> gf_inverse(std::vector<value_t<F>> a, std::size_t dim)
{
    using V = value_t<F>;
    std::vector<V> inv(dim * dim, 0);
    for (std::size_t i = 0; i < dim; ++i)
        inv[i * dim + i] = 1;
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t piv = col;
        while (piv < dim && a[piv * dim + col] == 0)
            ++piv;
        if (piv == dim)
            return {};
        for (std::size_t c = 0; c < dim; ++c) {
            std::swap(a[piv * dim + c], a[col * dim + c]);
            std::swap(inv[piv * dim + c], inv[col * dim + c]);
        }
        const V s = F::inv(a[col * dim + col]);
        for (std::size_t c = 0; c < dim; ++c) {
            a[col * dim + c] = F::mul(a[col * dim + c], s);
            inv[col * dim + c] = F::mul(inv[col * dim + c], s);
        }
        for (std::size_t r = 0; r < dim; ++r) {
            if (r == col || a[r * dim + col] == 0)
                continue;
            const V f = a[r * dim + col];
            for (std::size_t c = 0; c < dim; ++c) {
                a[r * dim + c] = F::add(a[r * dim + c], F::mul(f, a[col * dim + c]));
                inv[r * dim + c] = F::add(inv[r * dim + c], F::mul(f, inv[col * dim + c]));
            }
        }
    }
    return inv;
}

inline bool next_combination(std::vector<unsigned>& c, unsigned n)
{
    const std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j)
                c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline IdaMatrix IdaMatrix::vandermonde(unsigned k, unsigned n, unsigned q)
{
    IdaMatrix m{k, n, FieldParams::for_bits(q), {}};
    if (k < 1 || n < k || n > (1u << q) - 1)
        throw Error(Errc::InvalidMatrix, "need 1 <= k <= n < 2^q");
    m.entries.resize(static_cast<std::size_t>(k) * n);
    with_field(q, [&](auto f) {
        using F = decltype(f);
        for (unsigned r = 0; r < k; ++r)
            for (unsigned c = 0; c < n; ++c)
                m.entries[static_cast<std::size_t>(r) * n + c] = F::pow(static_cast<value_t<F>>(c + 1), r);
    });
    return m;
}

inline IdaMatrix IdaMatrix::identity_extended(unsigned k, unsigned n, unsigned q)
{
    IdaMatrix v = vandermonde(k, n, q);
    IdaMatrix m = v;
    with_field(q, [&](auto f) {
        using F = decltype(f);
        using V = value_t<F>;
        std::vector<V> head(static_cast<std::size_t>(k) * k);
        for (unsigned r = 0; r < k; ++r)
            for (unsigned c = 0; c < k; ++c)
                head[static_cast<std::size_t>(r) * k + c] = static_cast<V>(v.at(r, c));
        const auto inv = detail::gf_inverse<F>(head, k);
        if (inv.empty())
            throw Error(Errc::InvalidMatrix, "leading Vandermonde block is singular");
        for (unsigned r = 0; r < k; ++r)
            for (unsigned c = 0; c < n; ++c) {
                V acc = 0;
                for (unsigned t = 0; t < k; ++t)
                    acc = F::add(acc, F::mul(inv[static_cast<std::size_t>(r) * k + t], static_cast<V>(v.at(t, c))));
                m.entries[static_cast<std::size_t>(r) * n + c] = acc;
            }
    });
    return m;
}

/// Shape and range checks; every k-column minor is checked for
/// nonsingularity when there are at most `max_minors` of them.
inline void IdaMatrix::validate(std::size_t max_minors) const
{
    if (k < 1 || n < k || entries.size() != static_cast<std::size_t>(k) * n)
        throw Error(Errc::InvalidMatrix, "matrix shape does not match k x n");
    const std::uint64_t limit = std::uint64_t{1} << field.q;
    for (auto e : entries)
        if (e >= limit)
            throw Error(Errc::InvalidMatrix, "matrix entry outside the field");
    double combos = 1.0;
    for (unsigned i = 0; i < k; ++i)
        combos = combos * (n - i) / (i + 1);
    if (combos > static_cast<double>(max_minors))
        return;
    with_field(field.q, [&](auto f) {
        using F = decltype(f);
        using V = value_t<F>;
        std::vector<unsigned> cols(k);
        for (unsigned i = 0; i < k; ++i)
            cols[i] = i;
        do {
            std::vector<V> sub(static_cast<std::size_t>(k) * k);
            for (unsigned r = 0; r < k; ++r)
                for (unsigned c = 0; c < k; ++c)
                    sub[static_cast<std::size_t>(r) * k + c] = static_cast<V>(at(r, cols[c]));
            if (detail::gf_inverse<F>(sub, k).empty())
                throw Error(Errc::InvalidMatrix, "singular k x k submatrix");
        } while (detail::next_combination(cols, n));
    });
}

/// Each group of k input chunks (a row vector) times the matrix; fragment c
/// collects output column c. Input is zero-padded to whole groups.
inline std::vector<std::vector<std::uint8_t>> ida_fragment(std::span<const std::uint8_t> data, const IdaMatrix& m)
{
    m.validate(0);
    const std::size_t w = m.field.w;
    const std::size_t group = static_cast<std::size_t>(m.k) * w;
    const std::size_t groups = (data.size() + group - 1) / group;
    std::vector<std::vector<std::uint8_t>> out(m.n, std::vector<std::uint8_t>(groups * w));
    with_field(m.field.q, [&](auto f) {
        using F = decltype(f);
        using V = value_t<F>;
        std::vector<std::uint8_t> buf(group);
        for (std::size_t g = 0; g < groups; ++g) {
            std::fill(buf.begin(), buf.end(), 0);
            const std::size_t off = g * group;
            std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(off), std::min(group, data.size() - off), buf.begin());
            for (unsigned c = 0; c < m.n; ++c) {
                V acc = 0;
                for (unsigned r = 0; r < m.k; ++r)
                    acc = F::add(acc, F::mul(F::load(buf.data() + r * w), static_cast<V>(m.at(r, c))));
                F::store(out[c].data() + g * w, acc);
            }
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Full evaluation across k.

struct EvalConfig {
    std::vector<unsigned> k_values;
    unsigned trials = 10;
    std::size_t fragment_size = 1000;  // share bytes per fragment and trial
    unsigned q = 8;
    std::size_t recurrence_delay = 1;
    std::size_t seed_sample_size = 4000;
};

struct KEvaluation {
    unsigned k = 0;
    unsigned trials = 0;
    // Entropy of individual fragments, averaged over trials, per index.
    std::vector<double> fragment_entropy;
    double mean_fragment_entropy = 0.0;
    double min_fragment_entropy = 0.0;
    // Entropy of the whole fragmentation result (all k share streams).
    double result_entropy = 0.0;
    double ida_result_entropy = 0.0;
    double original_sample_entropy = 0.0;
    std::size_t chi2_fragment_size = 0;
    std::vector<double> chi2_statistics;
    double chi2_pass_rate = 0.0;
    ByteHistogram fragment_pdf{};
    // Means over trials; NaN when the original sample is constant.
    std::vector<double> corr_original_fragment;
    std::vector<std::vector<double>> corr_fragments;
    double mean_corr_original = 0.0;
    double mean_corr_inter = 0.0;
    std::vector<double> bit_difference;
    double mean_bit_difference = 0.0;
    std::vector<RecurrencePair> recurrence_original;
    std::vector<RecurrencePair> recurrence_fragment;
};

struct EvalReport {
    EvalConfig config;
    std::size_t input_size = 0;
    double original_entropy = 0.0;
    ByteHistogram original_pdf{};
    std::vector<KEvaluation> per_k;
    std::optional<SeedSensitivity> seed;
    std::vector<std::string> recurrence_paths;
    std::string pairing = "fragment j vs original chunks j, j+k, j+2k, ... (seed shares excluded)";
};

namespace detail {

// Cyclic window of `len` bytes starting at `offset`.
inline std::vector<std::uint8_t> window(std::span<const std::uint8_t> data, std::size_t offset, std::size_t len)
{
    std::vector<std::uint8_t> out(len);
    for (std::size_t i = 0; i < len; ++i)
        out[i] = data[(offset + i) % data.size()];
    return out;
}

inline double mean_of(std::span<const double> v)
{
    double s = 0.0;
    std::size_t n = 0;
    for (double x : v) {
        if (std::isnan(x))
            continue;
        s += x;
        ++n;
    }
    return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

template <RandomSource R>
EvalReport evaluate_full(std::span<const std::uint8_t> data, const EvalConfig& config, R& rng)
{
    if (config.trials == 0)
        throw Error(Errc::InvalidParams, "at least one trial is required");
    if (config.k_values.empty())
        throw Error(Errc::InvalidParams, "empty k range");
    if (config.fragment_size < 2 || config.fragment_size % (config.q / 8) != 0)
        throw Error(Errc::InvalidParams, "fragment size must be a positive multiple of the element width");
    const unsigned k_max = *std::max_element(config.k_values.begin(), config.k_values.end());
    if (data.size() < 1000 * static_cast<std::size_t>(k_max))
        throw Error(Errc::SampleTooSmall, "input must hold at least 1000*max(k) = " + std::to_string(1000 * k_max) +
                                              " bytes, got " + std::to_string(data.size()));
    const double nan = std::numeric_limits<double>::quiet_NaN();

    EvalReport rep;
    rep.config = config;
    rep.input_size = data.size();
    rep.original_entropy = shannon_entropy(data);
    rep.original_pdf = pdf_histogram(data);

    for (unsigned k : config.k_values) {
        const CodecParams params = CodecParams::make(k, k, config.q);
        KEvaluation ke;
        ke.k = k;
        ke.trials = config.trials;
        ke.fragment_entropy.assign(k, 0.0);
        ke.corr_original_fragment.assign(k, 0.0);
        ke.corr_fragments.assign(k, std::vector<double>(k, 0.0));
        ke.bit_difference.assign(k, 0.0);
        ke.min_fragment_entropy = 8.0;
        std::vector<std::uint64_t> pdf_counts(256, 0);
        std::uint64_t pdf_total = 0;
        std::vector<std::size_t> corr_n(k, 0);
        std::vector<std::vector<std::size_t>> inter_n(k, std::vector<std::size_t>(k, 0));
        std::size_t chi_pass = 0;
        ke.chi2_fragment_size = std::max(config.fragment_size, kChiSquaredMinSample);
        const std::size_t win = static_cast<std::size_t>(k) * config.fragment_size;
        const std::size_t chi_win = static_cast<std::size_t>(k) * ke.chi2_fragment_size;
        const IdaMatrix ida = IdaMatrix::vandermonde(k, k, config.q);
        double orig_entropy_sum = 0.0;

        for (unsigned t = 0; t < config.trials; ++t) {
            const auto sample = detail::window(data, (static_cast<std::size_t>(t) * win) % data.size(), win);
            orig_entropy_sum += shannon_entropy(sample);
            const auto frags = fragment(sample, params, rng);
            std::vector<std::vector<std::uint8_t>> streams;
            for (const auto& f : frags)
                streams.push_back(share_stream(f));

            std::vector<std::uint8_t> all;
            for (unsigned j = 0; j < k; ++j) {
                const double h = shannon_entropy(streams[j]);
                ke.fragment_entropy[j] += h / config.trials;
                ke.min_fragment_entropy = std::min(ke.min_fragment_entropy, h);
                for (auto b : streams[j])
                    ++pdf_counts[b];
                pdf_total += streams[j].size();
                all.insert(all.end(), streams[j].begin(), streams[j].end());

                const auto orig = aligned_original(sample, params, j + 1);
                ke.bit_difference[j] += bit_difference(orig, streams[j]) / config.trials;
                try {
                    ke.corr_original_fragment[j] += pearson_correlation(orig, streams[j]);
                    ++corr_n[j];
                } catch (const Error& e) {
                    if (e.code() != Errc::ZeroVariance)
                        throw;
                }
                for (unsigned i = j + 1; i < k; ++i) {
                    try {
                        ke.corr_fragments[j][i] += pearson_correlation(streams[j], streams[i]);
                        ++inter_n[j][i];
                    } catch (const Error& e) {
                        if (e.code() != Errc::ZeroVariance)
                            throw;
                    }
                }
            }
            ke.result_entropy += shannon_entropy(all) / config.trials;

            std::vector<std::uint8_t> ida_all;
            for (const auto& fr : ida_fragment(sample, ida))
                ida_all.insert(ida_all.end(), fr.begin(), fr.end());
            ke.ida_result_entropy += shannon_entropy(ida_all) / config.trials;

            if (t == 0) {
                ke.recurrence_original = recurrence_points(sample, config.recurrence_delay);
                ke.recurrence_fragment = recurrence_points(streams[0], config.recurrence_delay);
            }

            // Separate, larger windows so each fragment satisfies the
            // expected-count rule of the chi-squared test.
            const auto chi_sample = detail::window(data, (static_cast<std::size_t>(t) * chi_win) % data.size(), chi_win);
            for (const auto& f : fragment(chi_sample, params, rng)) {
                const auto r = chi_squared_uniform(share_stream(f));
                ke.chi2_statistics.push_back(r.statistic);
                chi_pass += r.pass ? 1 : 0;
            }
        }

        ke.original_sample_entropy = orig_entropy_sum / config.trials;
        ke.mean_fragment_entropy = detail::mean_of(ke.fragment_entropy);
        for (std::size_t v = 0; v < 256; ++v)
            ke.fragment_pdf[v] = static_cast<double>(pdf_counts[v]) / static_cast<double>(pdf_total);
        ke.chi2_pass_rate = static_cast<double>(chi_pass) / static_cast<double>(ke.chi2_statistics.size());
        std::vector<double> inter;
        for (unsigned j = 0; j < k; ++j) {
            ke.corr_original_fragment[j] = corr_n[j] ? ke.corr_original_fragment[j] / corr_n[j] : nan;
            ke.corr_fragments[j][j] = 1.0;
            for (unsigned i = j + 1; i < k; ++i) {
                const double c = inter_n[j][i] ? ke.corr_fragments[j][i] / inter_n[j][i] : nan;
                ke.corr_fragments[j][i] = ke.corr_fragments[i][j] = c;
                inter.push_back(c);
            }
        }
        ke.mean_corr_original = detail::mean_of(ke.corr_original_fragment);
        ke.mean_corr_inter = detail::mean_of(inter);
        ke.mean_bit_difference = detail::mean_of(ke.bit_difference);
        rep.per_k.push_back(std::move(ke));
    }

    const std::size_t seed_len = std::min(data.size(), std::max<std::size_t>(config.seed_sample_size, 1000));
    rep.seed = seed_sensitivity_report(data.first(seed_len), CodecParams::make(config.k_values.front(),
                                                                               config.k_values.front(), config.q),
                                       rng);
    return rep;
}

// ---------------------------------------------------------------------------
// Verdicts against the acceptance bands.

inline constexpr double kChiSquaredMinPassRate = 0.90;
inline constexpr double kMaxAbsCorrelation = 0.05;
inline constexpr double kBitDifferenceTarget = 0.50;
inline constexpr double kBitDifferenceTolerance = 0.02;

struct MetricVerdict {
    std::string metric;
    bool pass = false;
    std::string detail;
};

inline std::vector<MetricVerdict> summarize(const EvalReport& r)
{
    std::vector<MetricVerdict> out;
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", v);
        return std::string(buf);
    };
    {
        bool ok = true;
        std::string d = "original=" + fmt(r.original_entropy);
        for (const auto& ke : r.per_k) {
            ok = ok && ke.result_entropy > ke.original_sample_entropy;
            d += " k" + std::to_string(ke.k) + "=" + fmt(ke.result_entropy);
        }
        if (r.per_k.size() >= 2) {
            auto lo = std::min_element(r.per_k.begin(), r.per_k.end(), [](auto& a, auto& b) { return a.k < b.k; });
            auto hi = std::max_element(r.per_k.begin(), r.per_k.end(), [](auto& a, auto& b) { return a.k < b.k; });
            ok = ok && hi->result_entropy > lo->result_entropy;
        }
        out.push_back({"entropy", ok, d});
    }
    {
        bool ok = true;
        std::string d;
        for (const auto& ke : r.per_k) {
            ok = ok && ke.chi2_pass_rate >= kChiSquaredMinPassRate;
            d += " k" + std::to_string(ke.k) + "=" + fmt(ke.chi2_pass_rate);
        }
        out.push_back({"chi2", ok, d.empty() ? d : d.substr(1)});
    }
    {
        bool ok = true;
        std::string d;
        for (const auto& ke : r.per_k) {
            const bool orig_ok = std::isnan(ke.mean_corr_original) || std::abs(ke.mean_corr_original) <= kMaxAbsCorrelation;
            const bool inter_ok = std::isnan(ke.mean_corr_inter) || std::abs(ke.mean_corr_inter) <= kMaxAbsCorrelation;
            ok = ok && orig_ok && inter_ok;
            d += " k" + std::to_string(ke.k) + "_original=" + fmt(ke.mean_corr_original) + " k" + std::to_string(ke.k) +
                 "_inter=" + fmt(ke.mean_corr_inter);
        }
        out.push_back({"correlation", ok, d.empty() ? d : d.substr(1)});
    }
    {
        bool ok = true;
        std::string d;
        for (const auto& ke : r.per_k) {
            ok = ok && std::abs(ke.mean_bit_difference - kBitDifferenceTarget) <= kBitDifferenceTolerance;
            d += " k" + std::to_string(ke.k) + "=" + fmt(ke.mean_bit_difference);
        }
        out.push_back({"bit_difference", ok, d.empty() ? d : d.substr(1)});
    }
    if (r.seed) {
        const bool ok = std::abs(r.seed->bit_difference - kBitDifferenceTarget) <= kBitDifferenceTolerance &&
                        std::abs(r.seed->correlation) <= kMaxAbsCorrelation;
        out.push_back({"seed_sensitivity", ok,
                       "bit_difference=" + fmt(r.seed->bit_difference) + " correlation=" + fmt(r.seed->correlation)});
    }
    return out;
}

}  // namespace kfrag
