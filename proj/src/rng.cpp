#include "pfield/rng.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace pfield {

namespace {

inline void sip_round(std::uint64_t& v0, std::uint64_t& v1, std::uint64_t& v2,
                      std::uint64_t& v3) {
  v0 += v1;
  v1 = std::rotl(v1, 13);
  v1 ^= v0;
  v0 = std::rotl(v0, 32);
  v2 += v3;
  v3 = std::rotl(v3, 16);
  v3 ^= v2;
  v0 += v3;
  v3 = std::rotl(v3, 21);
  v3 ^= v0;
  v2 += v1;
  v1 = std::rotl(v1, 17);
  v1 ^= v2;
  v2 = std::rotl(v2, 32);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Seed128 Seed128::from_hex(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.empty() || text.size() > 32) {
    throw std::invalid_argument("seed must be 1 to 32 hex digits");
  }
  Seed128 out;
  for (char c : text) {
    const int v = hex_value(c);
    if (v < 0) throw std::invalid_argument("seed contains a non-hex character");
    out.hi = (out.hi << 4) | (out.lo >> 60);
    out.lo = (out.lo << 4) | static_cast<std::uint64_t>(v);
  }
  return out;
}

std::string Seed128::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(32, '0');
  for (int i = 0; i < 16; ++i) {
    s[15 - i] = kDigits[(hi >> (4 * i)) & 0xF];
    s[31 - i] = kDigits[(lo >> (4 * i)) & 0xF];
  }
  return s;
}

std::uint64_t siphash24(Seed128 key, std::span<const std::uint64_t> words) {
  const std::uint64_t k0 = key.lo;
  const std::uint64_t k1 = key.hi;
  std::uint64_t v0 = 0x736f6d6570736575ULL ^ k0;
  std::uint64_t v1 = 0x646f72616e646f6dULL ^ k1;
  std::uint64_t v2 = 0x6c7967656e657261ULL ^ k0;
  std::uint64_t v3 = 0x7465646279746573ULL ^ k1;
  for (std::uint64_t m : words) {
    v3 ^= m;
    sip_round(v0, v1, v2, v3);
    sip_round(v0, v1, v2, v3);
    v0 ^= m;
  }
  // Message length is a whole number of 8-byte blocks, so the final block
  // carries only the length byte.
  const std::uint64_t b = (static_cast<std::uint64_t>(words.size() * 8) & 0xFF) << 56;
  v3 ^= b;
  sip_round(v0, v1, v2, v3);
  sip_round(v0, v1, v2, v3);
  v0 ^= b;
  v2 ^= 0xFF;
  for (int i = 0; i < 4; ++i) sip_round(v0, v1, v2, v3);
  return v0 ^ v1 ^ v2 ^ v3;
}

Seed128 split_seed(Seed128 base, std::uint64_t index) {
  return Seed128{siphash24(base, {tag::kSplit, index, 0}),
                 siphash24(base, {tag::kSplit, index, 1})};
}

RandomStream::RandomStream(Seed128 seed, std::uint64_t stream_id) {
  for (std::uint64_t i = 0; i < 4; ++i) {
    state_[i] = siphash24(seed, {tag::kStream, stream_id, i});
  }
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

}  // namespace pfield
