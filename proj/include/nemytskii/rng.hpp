#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so per-particle streams need no state.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace nemytskii {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t M0 = 0xD2511F53u;
    constexpr std::uint32_t M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{M0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{M1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

/// Stream addressed by (seed, particle, step).
class CounterRng {
public:
    static constexpr std::uint64_t kSeedingStep = ~std::uint64_t{0};

    explicit constexpr CounterRng(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    PhiloxCounter block(std::uint64_t particle, std::uint64_t step) const noexcept {
        return philox4x32_10({static_cast<std::uint32_t>(particle),
                              static_cast<std::uint32_t>(particle >> 32),
                              static_cast<std::uint32_t>(step),
                              static_cast<std::uint32_t>(step >> 32)},
                             key_);
    }

    /// Uniform in the open interval (0, 1) from two 32-bit words. 52 bits,
    /// so the half-offset keeps the largest value strictly below 1.
    static double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
        const std::uint64_t bits = (std::uint64_t{hi} << 20) ^ (lo >> 12);
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
    }

    double uniform(std::uint64_t particle, std::uint64_t step) const noexcept {
        const auto b = block(particle, step);
        return to_open_unit(b[0], b[1]);
    }

    /// Box-Muller normal from one block.
    double normal(std::uint64_t particle, std::uint64_t step) const noexcept {
        const auto b = block(particle, step);
        const double u1 = to_open_unit(b[0], b[1]);
        const double u2 = to_open_unit(b[2], b[3]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    PhiloxKey key_;
};

}  // namespace nemytskii
