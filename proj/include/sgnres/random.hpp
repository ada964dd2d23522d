#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sgnres {

/// Philox4x32-10 counter-based generator.
///
/// The key is the 64-bit seed; the 128-bit counter is split into a 64-bit
/// stream id (high words) and a 64-bit position (low words), so any
/// (seed, stream) pair yields an independent sequence that does not depend on
/// how other streams were consumed.
class Philox4x32
{
  public:
    using result_type = std::uint32_t;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream)
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        if (index_ == 4)
        {
            block_ = generate(position_++);
            index_ = 0;
        }
        return block_[index_++];
    }

    // One output block for a given counter position; pure.
    std::array<std::uint32_t, 4> generate(std::uint64_t position) const
    {
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(position),
                                         static_cast<std::uint32_t>(position >> 32),
                                         static_cast<std::uint32_t>(stream_),
                                         static_cast<std::uint32_t>(stream_ >> 32)};
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round)
        {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t position_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int index_ = 4;
};

// SplitMix64 finaliser; used to derive child seeds.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed for item `index` of the family identified by `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index)
{
    return mix64(parent ^ mix64(index + 0x632BE59BD9B4E019ull));
}

} // namespace sgnres
