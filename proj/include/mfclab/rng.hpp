#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace mfclab {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// A draw is a pure function of (key, counter), so parallel consumers can
// index the stream by (replica, particle, step) without sharing state.
namespace philox {

inline constexpr std::uint32_t kW32A = 0x9E3779B9u;
inline constexpr std::uint32_t kW32B = 0xBB67AE85u;
inline constexpr std::uint32_t kM4x32A = 0xD2511F53u;
inline constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline void round_once(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kM4x32A, ctr[0], lo0, hi0);
    mulhilo(kM4x32B, ctr[2], lo1, hi1);
    const std::uint32_t out0 = hi1 ^ ctr[1] ^ key[0];
    const std::uint32_t out1 = lo1;
    const std::uint32_t out2 = hi0 ^ ctr[3] ^ key[1];
    const std::uint32_t out3 = lo0;
    ctr[0] = out0;
    ctr[1] = out1;
    ctr[2] = out2;
    ctr[3] = out3;
}

inline void block(std::uint64_t seed, std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                  std::uint32_t c3, std::uint32_t out[4]) {
    std::uint32_t key[2] = {static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
    for (int r = 0; r < 10; ++r) {
        round_once(out, key);
        key[0] += kW32A;
        key[1] += kW32B;
    }
}

}  // namespace philox

inline std::uint64_t philox_u64(std::uint64_t seed, std::uint64_t id0, std::uint64_t id1,
                                std::uint32_t lane = 0) {
    std::uint32_t out[4];
    philox::block(seed, static_cast<std::uint32_t>(id0), static_cast<std::uint32_t>(id0 >> 32),
                  static_cast<std::uint32_t>(id1),
                  (static_cast<std::uint32_t>(id1 >> 32) ^ lane), out);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

// Uniform in [0,1), 53-bit mantissa.
inline double uniform01(std::uint64_t seed, std::uint64_t id0, std::uint64_t id1,
                        std::uint32_t lane = 0) {
    return static_cast<double>(philox_u64(seed, id0, id1, lane) >> 11) * 0x1.0p-53;
}

// A standard normal pair from one Philox block via Box-Muller.
inline std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t id0,
                                             std::uint64_t id1, std::uint32_t lane = 0) {
    std::uint32_t out[4];
    philox::block(seed, static_cast<std::uint32_t>(id0), static_cast<std::uint32_t>(id0 >> 32),
                  static_cast<std::uint32_t>(id1),
                  (static_cast<std::uint32_t>(id1 >> 32) ^ lane), out);
    const std::uint64_t a = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;          // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(th), r * std::sin(th)};
}

inline double normal(std::uint64_t seed, std::uint64_t id0, std::uint64_t id1,
                     std::uint32_t lane = 0) {
    return normal_pair(seed, id0, id1, lane).first;
}

}  // namespace mfclab
