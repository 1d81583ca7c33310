#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace offlabel {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Stable (platform-independent) hashing for seeded decisions.
std::uint64_t fnv1a64(std::string_view data);

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_interval(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Small deterministic generator keyed by (seed, key, stream).
class StableRng {
 public:
  StableRng(std::uint64_t seed, std::string_view key, std::uint64_t stream)
      : state_(splitmix64(seed ^ splitmix64(fnv1a64(key) ^ (stream << 1)))) {}

  std::uint64_t next() {
    state_ = splitmix64(state_);
    return state_;
  }
  double uniform() { return unit_interval(next()); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace offlabel
