// 32-bit hashing policies for the concurrent trie. Branch selection consumes
// hash bits five at a time, so a policy must spread keys across all 32 bits
// and must return the same value for a key as long as that key is stored.

#ifndef CTRIE_HASH_HPP_INCLUDED
#define CTRIE_HASH_HPP_INCLUDED

#include <cstdint>
#include <functional>

namespace ctrie {

// Finalizer of the splitmix64 generator (Steele et al.); bijective on 64-bit
// inputs. The multiplier constants are the canonical ones.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Inverse of mix64. Useful for constructing keys with prescribed hash values,
// e.g. engineered 32-bit collisions in tests.
constexpr std::uint64_t unmix64(std::uint64_t z) noexcept {
  z ^= (z >> 31) ^ (z >> 62);
  z *= 0x319642b2d24d8ec3ULL;  // modular inverse of 0x94d049bb133111eb
  z ^= (z >> 27) ^ (z >> 54);
  z *= 0x96de1b173f119089ULL;  // modular inverse of 0xbf58476d1ce4e5b9
  z ^= (z >> 30) ^ (z >> 60);
  return z;
}

static_assert(mix64(unmix64(0x0123456789abcdefULL)) == 0x0123456789abcdefULL);
static_assert(unmix64(mix64(0xfedcba9876543210ULL)) == 0xfedcba9876543210ULL);

// Hash policy for 64-bit integer keys: the avalanche mix truncated to the
// 32 bits the trie consumes.
struct U64Hash {
  constexpr std::uint32_t operator()(std::uint64_t key) const noexcept {
    return static_cast<std::uint32_t>(mix64(key));
  }
};

// Default policy: run std::hash through the mix so types with weak identity
// hashes (integers under libstdc++) still populate the upper chunks.
template <class K>
struct DefaultHash {
  std::uint32_t operator()(const K& key) const {
    return static_cast<std::uint32_t>(
        mix64(static_cast<std::uint64_t>(std::hash<K>{}(key))));
  }
};

}  // namespace ctrie

#endif
