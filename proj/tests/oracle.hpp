// SPDX-License-Identifier: Apache-2.0

#pragma once

// Reference arithmetic for tests. Deliberately shares nothing with the
// library: full carry-less product followed by polynomial long division,
// inverses by exhaustive search, linear systems by Gaussian elimination.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

inline std::uint64_t clmul(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r = 0;
    for (unsigned i = 0; i < 32; ++i)
        if ((b >> i) & 1u)
            r ^= a << i;
    return r;
}

inline std::uint32_t reduce(std::uint64_t x, unsigned q, std::uint32_t poly)
{
    for (int i = 63; i >= static_cast<int>(q); --i)
        if ((x >> i) & 1u)
            x ^= static_cast<std::uint64_t>(poly) << (i - static_cast<int>(q));
    return static_cast<std::uint32_t>(x);
}

struct Field {
    unsigned q;
    std::uint32_t poly;

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return reduce(clmul(a, b), q, poly); }

    std::uint32_t pow(std::uint32_t a, unsigned e) const
    {
        std::uint32_t r = 1;
        for (unsigned i = 0; i < e; ++i)
            r = mul(r, a);
        return r;
    }

    // Exhaustive; fine for q = 8, slow but usable for q = 16.
    std::optional<std::uint32_t> inv(std::uint32_t a) const
    {
        for (std::uint32_t b = 1; b < (1u << q); ++b)
            if (mul(a, b) == 1)
                return b;
        return std::nullopt;
    }
};

inline const Field gf8{8, 0x11B};
inline const Field gf16{16, 0x1100B};

// Inverse via a^(2^q - 2), only for q = 16 where exhaustive search is slow.
inline std::uint32_t inv_by_pow(const Field& f, std::uint32_t a)
{
    std::uint32_t r = 1, base = a;
    std::uint32_t e = (1u << f.q) - 2;
    while (e) {
        if (e & 1)
            r = f.mul(r, base);
        base = f.mul(base, base);
        e >>= 1;
    }
    return r;
}

/// Solves A c = y (dim x dim) by Gaussian elimination; nullopt if singular.
inline std::optional<std::vector<std::uint32_t>> solve(const Field& f, std::vector<std::vector<std::uint32_t>> a,
                                                       std::vector<std::uint32_t> y)
{
    const std::size_t n = y.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0)
            ++piv;
        if (piv == n)
            return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(y[piv], y[col]);
        const std::uint32_t s = f.q == 8 ? *f.inv(a[col][col]) : inv_by_pow(f, a[col][col]);
        for (auto& v : a[col])
            v = f.mul(v, s);
        y[col] = f.mul(y[col], s);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0)
                continue;
            const std::uint32_t m = a[r][col];
            for (std::size_t c = 0; c < n; ++c)
                a[r][c] ^= f.mul(m, a[col][c]);
            y[r] ^= f.mul(m, y[col]);
        }
    }
    return y;
}

/// Coefficients c_0..c_{k-1} of the polynomial through (xs, ys), from the
/// Vandermonde system.
inline std::vector<std::uint32_t> interpolate(const Field& f, const std::vector<std::uint32_t>& xs,
                                              const std::vector<std::uint32_t>& ys)
{
    std::vector<std::vector<std::uint32_t>> a(xs.size(), std::vector<std::uint32_t>(xs.size()));
    for (std::size_t r = 0; r < xs.size(); ++r)
        for (std::size_t c = 0; c < xs.size(); ++c)
            a[r][c] = f.pow(xs[r], static_cast<unsigned>(c));
    return solve(f, a, ys).value();
}

inline std::uint32_t poly_eval(const Field& f, const std::vector<std::uint32_t>& coeffs, std::uint32_t x)
{
    std::uint32_t acc = 0;
    for (std::size_t t = 0; t < coeffs.size(); ++t)
        acc ^= f.mul(coeffs[t], f.pow(x, static_cast<unsigned>(t)));
    return acc;
}

inline std::uint32_t vandermonde_eval(const Field& f, const std::vector<std::uint32_t>& xs,
                                      const std::vector<std::uint32_t>& ys, std::uint32_t x)
{
    return poly_eval(f, interpolate(f, xs, ys), x);
}

}  // namespace oracle

namespace testdata {

inline std::vector<std::uint8_t> read_all(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// All bundled corpus files concatenated in a fixed order.
inline const std::vector<std::uint8_t>& corpus()
{
    static const std::vector<std::uint8_t> text = [] {
        std::vector<std::uint8_t> all;
        for (const char* name : {"1861_abraham_lincoln_r.txt", "1862_abraham_lincoln_r.txt", "1863_abraham_lincoln_r.txt",
                                 "1864_abraham_lincoln_r.txt", "1901_theodore_roosevelt_r.txt",
                                 "1910_william_h_taft_r.txt"}) {
            auto part = read_all(std::string(KFRAG_CORPUS_DIR) + "/" + name);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }();
    return text;
}

}  // namespace testdata
