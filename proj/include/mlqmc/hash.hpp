#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace mlqmc {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2)));
}

constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return mix64(h);
}

// Stream index for a purpose tag and a list of indices, e.g. (tag, level, s, r).
constexpr std::uint64_t stream_id(std::string_view tag, std::initializer_list<std::uint64_t> idx) {
  std::uint64_t h = hash_tag(tag);
  for (std::uint64_t i : idx) h = hash_combine(h, i);
  return h;
}

// Counter-based uniform stream: value k of stream (seed, stream) is a pure function.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(hash_combine(mix64(seed), stream)) {}
  std::uint64_t bits(std::uint64_t k) const { return mix64(base_ ^ mix64(k)); }
  // Uniform on [0,1) with 53 random bits.
  double uniform(std::uint64_t k) const { return static_cast<double>(bits(k) >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t base_;
};

}  // namespace mlqmc
