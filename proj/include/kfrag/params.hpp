// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>

#include "kfrag/error.hpp"
#include "kfrag/gf.hpp"

namespace kfrag {

/// Threshold parameters of one fragmentation run.
///
/// k fragments are needed for recovery out of n produced. Fragment indices
/// double as Reed-Solomon evaluation points, so n must stay below the field
/// size; j in 1..k is used literally as a field element, hence k < 2^q.
/// `block_chunks` is the number of k-chunk sets per independently seeded
/// block; 0 means the whole input is one block.
struct CodecParams {
    unsigned k = 2;
    unsigned n = 2;
    FieldParams field{};
    std::uint64_t block_chunks = 0;

    static CodecParams make(unsigned k, unsigned n, unsigned q = 8, std::uint64_t block_chunks = 0)
    {
        CodecParams p{k, n, FieldParams::for_bits(q), block_chunks};
        p.validate();
        return p;
    }

    void validate() const
    {
        const auto checked = FieldParams::for_bits(field.q);
        if (checked != field)
            throw Error(Errc::InvalidParams, "inconsistent field parameters");
        const std::uint64_t field_size = std::uint64_t{1} << field.q;
        if (k < 2)
            throw Error(Errc::InvalidParams, "k must be at least 2, got " + std::to_string(k));
        if (n < k)
            throw Error(Errc::InvalidParams, "n must be at least k (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
        if (n > field_size - 1)
            throw Error(Errc::InvalidParams,
                        "n must be at most " + std::to_string(field_size - 1) + " for q=" + std::to_string(field.q));
    }

    /// Bytes per k-chunk set.
    std::size_t set_bytes() const noexcept { return static_cast<std::size_t>(k) * field.w; }

    friend bool operator==(const CodecParams&, const CodecParams&) = default;
};

/// How an input of a given length is cut into chunk sets and blocks.
struct Layout {
    std::uint64_t original_length = 0;
    std::uint64_t chunks = 0;          // ceil(original_length / w)
    std::uint64_t sets = 0;            // ceil(chunks / k)
    std::uint64_t sets_per_block = 0;  // every block but the last holds this many sets
    std::uint64_t blocks = 1;
    std::size_t w = 1;

    std::uint64_t block_first_set(std::uint64_t b) const noexcept { return b * sets_per_block; }

    std::uint64_t block_sets(std::uint64_t b) const noexcept
    {
        const std::uint64_t first = block_first_set(b);
        return std::min(sets_per_block, sets - first);
    }

    /// Byte offset of block b inside every fragment payload (each block
    /// carries its own seed share ahead of its shares).
    std::uint64_t block_payload_offset(std::uint64_t b) const noexcept { return (block_first_set(b) + b) * w; }

    /// Systematic (and redundant) payload length: one seed share plus one
    /// share per set, for every block.
    std::uint64_t payload_length() const noexcept { return (sets + blocks) * w; }
};

inline Layout make_layout(const CodecParams& params, std::uint64_t original_length)
{
    Layout l;
    l.original_length = original_length;
    l.w = params.field.w;
    l.chunks = (original_length + l.w - 1) / l.w;
    l.sets = (l.chunks + params.k - 1) / params.k;
    if (params.block_chunks == 0 || l.sets == 0) {
        l.sets_per_block = l.sets;
        l.blocks = 1;
    } else {
        l.sets_per_block = params.block_chunks;
        l.blocks = (l.sets + params.block_chunks - 1) / params.block_chunks;
    }
    return l;
}

}  // namespace kfrag
