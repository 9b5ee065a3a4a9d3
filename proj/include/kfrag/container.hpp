// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "kfrag/error.hpp"
#include "kfrag/params.hpp"

// Fragment file layout (all integers little-endian), see docs/format.md:
//
//   off  size  field
//     0     4  magic "KFRG"
//     4     2  version (1)
//     6     1  q (8 or 16)
//     7     1  flags (bit 0: block mode)
//     8     2  k
//    10     2  n
//    12     2  frag_index (1..n)
//    14     2  reserved, zero
//    16    16  run_id
//    32     8  original_length
//    40     8  block_chunks
//    48     8  payload_length
//    56     4  header_crc (CRC-32 of bytes 0..55)
//    60     -  payload

namespace kfrag {

inline constexpr std::array<std::uint8_t, 4> kMagic{'K', 'F', 'R', 'G'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 60;
inline constexpr std::uint8_t kFlagBlockMode = 0x01;

using RunId = std::array<std::uint8_t, 16>;

struct FragmentHeader {
    std::uint16_t version = kFormatVersion;
    std::uint8_t q = 8;
    std::uint8_t flags = 0;
    std::uint16_t k = 0;
    std::uint16_t n = 0;
    std::uint16_t frag_index = 0;
    RunId run_id{};
    std::uint64_t original_length = 0;
    std::uint64_t block_chunks = 0;
    std::uint64_t payload_length = 0;

    CodecParams params() const
    {
        CodecParams p{k, n, FieldParams::for_bits(q), block_chunks};
        p.validate();
        return p;
    }

    bool same_run(const FragmentHeader& o) const noexcept
    {
        return run_id == o.run_id && version == o.version && q == o.q && flags == o.flags && k == o.k && n == o.n &&
               original_length == o.original_length && block_chunks == o.block_chunks &&
               payload_length == o.payload_length;
    }

    friend bool operator==(const FragmentHeader&, const FragmentHeader&) = default;
};

struct Fragment {
    FragmentHeader header;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const Fragment&, const Fragment&) = default;
};

inline std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept
{
    return static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

namespace detail {

template <class T>
void put_le(std::uint8_t* p, T v) noexcept
{
    for (std::size_t i = 0; i < sizeof(T); ++i)
        p[i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i));
}

template <class T>
T get_le(const std::uint8_t* p) noexcept
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return static_cast<T>(v);
}

// Semantic checks shared by writer and parser.
inline void check_header(const FragmentHeader& h, Errc code)
{
    CodecParams p;
    try {
        p = h.params();
    } catch (const Error& e) {
        throw Error(code, e.what());
    }
    if (h.frag_index < 1 || h.frag_index > h.n)
        throw Error(code, "frag_index " + std::to_string(h.frag_index) + " outside 1..n");
    if (h.flags & ~kFlagBlockMode)
        throw Error(code, "unknown flag bits set");
    if (((h.flags & kFlagBlockMode) != 0) != (h.block_chunks != 0))
        throw Error(code, "block-mode flag disagrees with block_chunks");
    if (h.payload_length != make_layout(p, h.original_length).payload_length())
        throw Error(code, "payload_length does not match original_length for these parameters");
}

}  // namespace detail

inline std::array<std::uint8_t, kHeaderSize> encode_header(const FragmentHeader& h)
{
    std::array<std::uint8_t, kHeaderSize> out{};
    std::uint8_t* p = out.data();
    std::memcpy(p, kMagic.data(), kMagic.size());
    detail::put_le<std::uint16_t>(p + 4, h.version);
    p[6] = h.q;
    p[7] = h.flags;
    detail::put_le<std::uint16_t>(p + 8, h.k);
    detail::put_le<std::uint16_t>(p + 10, h.n);
    detail::put_le<std::uint16_t>(p + 12, h.frag_index);
    detail::put_le<std::uint16_t>(p + 14, 0);
    std::memcpy(p + 16, h.run_id.data(), h.run_id.size());
    detail::put_le<std::uint64_t>(p + 32, h.original_length);
    detail::put_le<std::uint64_t>(p + 40, h.block_chunks);
    detail::put_le<std::uint64_t>(p + 48, h.payload_length);
    detail::put_le<std::uint32_t>(p + 56, crc32({p, 56}));
    return out;
}

inline std::vector<std::uint8_t> write_fragment(const FragmentHeader& header, std::span<const std::uint8_t> payload)
{
    if (header.version != kFormatVersion)
        throw Error(Errc::InvalidHeader, "only format version 1 can be written");
    detail::check_header(header, Errc::InvalidHeader);
    if (payload.size() != header.payload_length)
        throw Error(Errc::InvalidHeader, "payload size " + std::to_string(payload.size()) + " != header payload_length " +
                                             std::to_string(header.payload_length));
    const auto head = encode_header(header);
    std::vector<std::uint8_t> out(kHeaderSize + payload.size());
    std::copy(head.begin(), head.end(), out.begin());
    std::copy(payload.begin(), payload.end(), out.begin() + kHeaderSize);
    return out;
}

inline std::vector<std::uint8_t> write_fragment(const Fragment& f) { return write_fragment(f.header, f.payload); }

/// Decodes and validates the fixed header only.
inline FragmentHeader parse_header(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kMagic.size())
        throw Error(Errc::TruncatedInput, "input shorter than the magic number");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw Error(Errc::BadMagic, "not a fragment file");
    if (bytes.size() < kHeaderSize)
        throw Error(Errc::TruncatedInput, "header truncated at " + std::to_string(bytes.size()) + " bytes");
    const std::uint8_t* p = bytes.data();
    FragmentHeader h;
    h.version = detail::get_le<std::uint16_t>(p + 4);
    if (h.version != kFormatVersion)
        throw Error(Errc::UnsupportedVersion, "format version " + std::to_string(h.version));
    if (detail::get_le<std::uint32_t>(p + 56) != crc32({p, 56}))
        throw Error(Errc::CrcMismatch, "header checksum mismatch");
    h.q = p[6];
    h.flags = p[7];
    h.k = detail::get_le<std::uint16_t>(p + 8);
    h.n = detail::get_le<std::uint16_t>(p + 10);
    h.frag_index = detail::get_le<std::uint16_t>(p + 12);
    if (detail::get_le<std::uint16_t>(p + 14) != 0)
        throw Error(Errc::InvalidHeader, "reserved header bytes are not zero");
    std::memcpy(h.run_id.data(), p + 16, h.run_id.size());
    h.original_length = detail::get_le<std::uint64_t>(p + 32);
    h.block_chunks = detail::get_le<std::uint64_t>(p + 40);
    h.payload_length = detail::get_le<std::uint64_t>(p + 48);
    detail::check_header(h, Errc::InvalidHeader);
    return h;
}

inline Fragment parse_fragment(std::span<const std::uint8_t> bytes)
{
    Fragment f;
    f.header = parse_header(bytes);
    const std::size_t body = bytes.size() - kHeaderSize;
    if (body < f.header.payload_length)
        throw Error(Errc::TruncatedInput, "payload has " + std::to_string(body) + " of " +
                                              std::to_string(f.header.payload_length) + " bytes");
    if (body > f.header.payload_length)
        throw Error(Errc::CorruptFragment, "trailing bytes after payload");
    f.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
    return f;
}

/// Checks that fragments belong to one run, carry distinct indices and are
/// at least k in number. Returns the run's parameters.
inline CodecParams validate_set(std::span<const Fragment> fragments)
{
    if (fragments.empty())
        throw Error(Errc::NotEnoughFragments, "no fragments supplied");
    const FragmentHeader& first = fragments.front().header;
    for (const auto& f : fragments) {
        if (!f.header.same_run(first))
            throw Error(Errc::InconsistentSet, "fragments come from different runs or parameter sets");
        if (f.payload.size() != first.payload_length)
            throw Error(Errc::CorruptFragment, "payload size disagrees with header of fragment " +
                                                   std::to_string(f.header.frag_index));
    }
    std::vector<std::uint16_t> indices;
    for (const auto& f : fragments)
        indices.push_back(f.header.frag_index);
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw Error(Errc::DuplicateIndex, "the same fragment index appears twice");
    CodecParams p = first.params();
    if (fragments.size() < p.k)
        throw Error(Errc::NotEnoughFragments,
                    "need " + std::to_string(p.k) + " fragments, have " + std::to_string(fragments.size()));
    return p;
}

}  // namespace kfrag
