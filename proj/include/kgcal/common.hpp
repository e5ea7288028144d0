/*
 * Copyright 2026 The kgcal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KGCAL_COMMON_HPP_
#define KGCAL_COMMON_HPP_

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kgcal {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

inline constexpr std::uint32_t kNoEntity = 0xffffffffu;

enum class Split : int { train = 0, valid = 1, test = 2 };

/// Which edges an answer-set computation may see.
enum class Scope { train_only, all_splits };

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed textual input (triple files, query DSL, config).
struct ParseError : Error {
    using Error::Error;
};

/// Invalid configuration or misuse of an operation's contract.
struct ConfigError : Error {
    using Error::Error;
};

/// Corrupt or incompatible binary container.
struct FormatError : Error {
    using Error::Error;
};

/// Dimension or count mismatch between manifest and payload.
struct ShapeError : Error {
    using Error::Error;
};

/// A retry or enumeration budget was exhausted.
struct BudgetError : Error {
    using Error::Error;
};

namespace diag {

inline std::atomic<std::uint64_t>& warn_counter() {
    static std::atomic<std::uint64_t> n{0};
    return n;
}

inline std::uint64_t warn_count() { return warn_counter().load(); }

/// Emit a warning on the diagnostic stream. The first few occurrences are
/// printed; all are counted.
inline void warn(const std::string& msg) {
    const auto n = warn_counter().fetch_add(1);
    if (n < 32) {
        std::fprintf(stderr, "[warn] %s\n", msg.c_str());
    }
}

inline void info(const std::string& msg) {
    std::fprintf(stderr, "%s\n", msg.c_str());
}

}  // namespace diag

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}
}  // namespace detail

/// Deterministic random stream (xoshiro256**). All sampling goes through
/// this class so results are reproducible across compilers and platforms;
/// standard-library distributions are implementation-defined and avoided.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::string_view label = "") {
        std::uint64_t s = seed ^ detail::fnv1a(label);
        for (auto& w : state_) w = detail::splitmix64(s);
    }

    /// Derived stream for worker/item `index`; independent of draws made
    /// from this stream.
    Rng fork(std::uint64_t index) const {
        std::uint64_t s = seed_hash() ^ (0x9e3779b97f4a7c15ull * (index + 1));
        Rng r(s);
        return r;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Unbiased integer in [0, n). n must be > 0.
    std::uint64_t uniform(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform double in [0, 1).
    double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform_real();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t seed_hash() const {
        return state_[0] ^ rotl(state_[1], 13) ^ rotl(state_[2], 27) ^ rotl(state_[3], 41);
    }

    std::uint64_t state_[4];
};

}  // namespace kgcal

#endif  // KGCAL_COMMON_HPP_
