#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace contract_lab {

/// SplitMix64 finalizer; used to turn user seeds into well-mixed keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block ctr, Key key) {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

/// Independent random stream identified by (seed, stream id). Two streams with the
/// same identifiers produce the same sequence regardless of thread or call order.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) {
        const std::uint64_t k = splitmix64(seed);
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
        stream_lo_ = static_cast<std::uint32_t>(stream_id);
        stream_hi_ = static_cast<std::uint32_t>(stream_id >> 32);
    }

    std::uint64_t next_u64() {
        if (slot_ == 2) refill();
        return buffer_[slot_++];
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586 * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    /// Unit-rate exponential.
    double exponential() { return -std::log(uniform()); }

  private:
    void refill() {
        const auto out = Philox4x32::generate(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
             stream_lo_, stream_hi_},
            key_);
        ++block_;
        buffer_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        buffer_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        slot_ = 0;
    }

    Philox4x32::Key key_{};
    std::uint32_t stream_lo_ = 0;
    std::uint32_t stream_hi_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int slot_ = 2;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace contract_lab
