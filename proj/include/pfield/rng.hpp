#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

namespace pfield {

/// 128-bit seed. Every random quantity in the library is a deterministic
/// function of one of these.
struct Seed128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  /// Parses up to 32 hex digits, optional "0x" prefix. Throws std::invalid_argument.
  static Seed128 from_hex(std::string_view text);
  /// Always 32 lowercase hex digits.
  std::string to_hex() const;

  friend auto operator<=>(const Seed128&, const Seed128&) = default;
};

/// SipHash-2-4 keyed by `key` (k0 = lo, k1 = hi) over the little-endian
/// serialization of `words`.
std::uint64_t siphash24(Seed128 key, std::span<const std::uint64_t> words);

inline std::uint64_t siphash24(Seed128 key, std::initializer_list<std::uint64_t> words) {
  return siphash24(key, std::span<const std::uint64_t>(words.begin(), words.size()));
}

/// Domain tags so that the different consumers of a replicate seed never
/// see correlated PRF inputs.
namespace tag {
inline constexpr std::uint64_t kSplit = 0x7370'6c69'7400'0001ULL;
inline constexpr std::uint64_t kStream = 0x7374'7265'616d'0002ULL;
inline constexpr std::uint64_t kSign = 0x7369'676e'0000'0003ULL;
inline constexpr std::uint64_t kMarginal = 0x6d61'7267'0000'0004ULL;
inline constexpr std::uint64_t kJump = 0x6a75'6d70'0000'0005ULL;
}  // namespace tag

/// Seed of replicate `index` under `base`: two SipHash-2-4 blocks in counter
/// mode, (kSplit, index, 0) and (kSplit, index, 1). Any replicate can be
/// derived without touching the others.
Seed128 split_seed(Seed128 base, std::uint64_t index);

/// Keyed hash of a (tag, a, b) triple; used for per-class spins and marginals.
inline std::uint64_t keyed_hash(Seed128 key, std::uint64_t domain, std::uint64_t a,
                                std::uint64_t b) {
  return siphash24(key, {domain, a, b});
}

/// Maps 64 random bits to (0,1): top 52 bits plus a half-step offset, so
/// both endpoints stay exactly representable and excluded.
inline double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Single-owner stream of uniform bits (xoshiro256**), seeded from a
/// Seed128 and a stream id through SipHash.
class RandomStream {
 public:
  explicit RandomStream(Seed128 seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();
  /// Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on (0,1].
  double uniform_open_low() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }
  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pfield
