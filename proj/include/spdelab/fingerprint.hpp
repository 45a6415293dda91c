#ifndef SPDELAB_FINGERPRINT_HPP
#define SPDELAB_FINGERPRINT_HPP

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>

namespace spdelab {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Round-trip exact decimal text for a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Sorted `key = value` lines; std::map ordering makes it independent of insertion order.
using KeyValues = std::map<std::string, std::string>;

inline std::string canonical_text(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

inline std::string fingerprint(const KeyValues& kv) { return hex64(fnv1a64(canonical_text(kv))); }

}  // namespace spdelab

#endif  // SPDELAB_FINGERPRINT_HPP
