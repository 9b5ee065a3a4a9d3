// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <sys/random.h>

#include <cerrno>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>

#include "kfrag/error.hpp"

namespace kfrag {

template <class R>
concept RandomSource = requires(R& r, std::span<std::uint8_t> out) {
    { r.fill(out) };
};

/// Kernel CSPRNG (getrandom). This is the only source fit for seeds of real
/// fragmentation runs.
class SystemRandom {
public:
    void fill(std::span<std::uint8_t> out)
    {
        std::size_t done = 0;
        while (done < out.size()) {
            const ssize_t got = ::getrandom(out.data() + done, out.size() - done, 0);
            if (got < 0) {
                if (errno == EINTR)
                    continue;
                throw Error(Errc::RngFailure, std::string("getrandom failed: ") + std::strerror(errno));
            }
            done += static_cast<std::size_t>(got);
        }
    }
};

/// Reproducible, NOT cryptographically secure. Tests and benchmarks only.
class SeededRandom {
public:
    explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}

    void fill(std::span<std::uint8_t> out)
    {
        std::size_t i = 0;
        while (i < out.size()) {
            std::uint64_t v = engine_();
            for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
                out[i] = static_cast<std::uint8_t>(v);
                v >>= 8;
            }
        }
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace kfrag
