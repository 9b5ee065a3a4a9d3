// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "kfrag/error.hpp"

namespace kfrag {

template <unsigned Q>
struct FieldTraits;

// x^8 + x^4 + x^3 + x + 1
template <>
struct FieldTraits<8> {
    using value_type = std::uint8_t;
    static constexpr std::uint32_t reduction_poly = 0x11B;
};

// x^16 + x^12 + x^3 + x + 1
template <>
struct FieldTraits<16> {
    using value_type = std::uint16_t;
    static constexpr std::uint32_t reduction_poly = 0x1100B;
};

/// Runtime description of a supported field, as stored in fragment headers.
struct FieldParams {
    unsigned q = 8;
    std::size_t w = 1;
    std::uint32_t reduction_poly = FieldTraits<8>::reduction_poly;

    static FieldParams for_bits(unsigned q)
    {
        switch (q) {
        case 8: return {8, 1, FieldTraits<8>::reduction_poly};
        case 16: return {16, 2, FieldTraits<16>::reduction_poly};
        default: throw Error(Errc::InvalidParams, "field width must be 8 or 16 bits, got " + std::to_string(q));
        }
    }

    friend bool operator==(const FieldParams&, const FieldParams&) = default;
};

namespace detail {

// Shift-and-add multiply with interleaved reduction. Only used to seed the
// log tables; the hot path never calls it.
constexpr std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b, unsigned q, std::uint32_t poly) noexcept
{
    std::uint32_t r = 0;
    const std::uint32_t top = 1u << q;
    while (b != 0) {
        if (b & 1u)
            r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top)
            a ^= poly;
    }
    return r;
}

}  // namespace detail

/// GF(2^Q) with log/antilog tables. Elements are plain unsigned integers of
/// width Q; the tables are built on first use and shared read-only.
template <unsigned Q>
class GaloisField {
public:
    using value_type = typename FieldTraits<Q>::value_type;

    static constexpr unsigned bits = Q;
    static constexpr std::size_t width = Q / 8;
    static constexpr std::uint32_t size = 1u << Q;
    static constexpr std::uint32_t reduction_poly = FieldTraits<Q>::reduction_poly;

    static FieldParams params() { return FieldParams::for_bits(Q); }

    static constexpr value_type add(value_type a, value_type b) noexcept
    {
        return static_cast<value_type>(a ^ b);
    }

    static value_type mul(value_type a, value_type b) noexcept
    {
        if (a == 0 || b == 0)
            return 0;
        const auto& t = tables();
        return t.exp[t.log[a] + t.log[b]];
    }

    static value_type inv(value_type a)
    {
        if (a == 0)
            throw Error(Errc::ZeroInverse, "zero has no multiplicative inverse");
        const auto& t = tables();
        return t.exp[(size - 1 - t.log[a]) % (size - 1)];
    }

    static value_type div(value_type a, value_type b)
    {
        if (b == 0)
            throw Error(Errc::ZeroInverse, "division by zero");
        if (a == 0)
            return 0;
        const auto& t = tables();
        return t.exp[t.log[a] + (size - 1) - t.log[b]];
    }

    /// pow(a, 0) == 1 for every a, including 0.
    static value_type pow(value_type a, std::uint64_t e) noexcept
    {
        if (e == 0)
            return 1;
        if (a == 0)
            return 0;
        const auto& t = tables();
        return t.exp[(static_cast<std::uint64_t>(t.log[a]) * (e % (size - 1))) % (size - 1)];
    }

    /// Primitive element the tables are generated from.
    static value_type generator() noexcept { return tables().generator; }

    /// Little-endian element load/store from a byte buffer.
    static value_type load(const std::uint8_t* p) noexcept
    {
        if constexpr (width == 1) {
            return p[0];
        } else {
            return static_cast<value_type>(p[0] | (p[1] << 8));
        }
    }

    static void store(std::uint8_t* p, value_type v) noexcept
    {
        p[0] = static_cast<std::uint8_t>(v);
        if constexpr (width == 2)
            p[1] = static_cast<std::uint8_t>(v >> 8);
    }

private:
    struct Tables {
        std::vector<std::uint32_t> log;
        std::vector<value_type> exp;  // doubled, so exp[log a + log b] needs no modulo
        value_type generator = 0;
    };

    static Tables build()
    {
        Tables t;
        const std::uint32_t order = size - 1;
        for (std::uint32_t g = 2; g < size; ++g) {
            std::uint32_t x = 1;
            std::uint32_t period = 0;
            do {
                x = detail::slow_mul(x, g, Q, reduction_poly);
                ++period;
            } while (x != 1 && period <= order);
            if (period == order) {
                t.generator = static_cast<value_type>(g);
                break;
            }
        }
        t.log.assign(size, 0);
        t.exp.assign(2 * static_cast<std::size_t>(order), 0);
        std::uint32_t x = 1;
        for (std::uint32_t i = 0; i < order; ++i) {
            t.exp[i] = static_cast<value_type>(x);
            t.exp[i + order] = static_cast<value_type>(x);
            t.log[x] = i;
            x = detail::slow_mul(x, t.generator, Q, reduction_poly);
        }
        return t;
    }

    static const Tables& tables()
    {
        static const Tables t = build();
        return t;
    }
};

using GF8 = GaloisField<8>;
using GF16 = GaloisField<16>;

/// Calls fn with a GaloisField instance matching the runtime width q.
template <class Fn>
decltype(auto) with_field(unsigned q, Fn&& fn)
{
    switch (q) {
    case 8: return std::forward<Fn>(fn)(GF8{});
    case 16: return std::forward<Fn>(fn)(GF16{});
    default: throw Error(Errc::InvalidParams, "field width must be 8 or 16 bits, got " + std::to_string(q));
    }
}

}  // namespace kfrag
