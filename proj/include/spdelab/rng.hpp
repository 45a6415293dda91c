#ifndef SPDELAB_RNG_HPP
#define SPDELAB_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace spdelab {

/// Philox4x32-10 counter-based generator (Salmon et al. constants).
/// Output is a pure function of (key, counter), so draws need no shared state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int r = 0; r < 10; ++r) {
      std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0;
      std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2;
      std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
      std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
      c1 = static_cast<std::uint32_t>(p1);
      c3 = static_cast<std::uint32_t>(p0);
      c0 = n0;
      c2 = n2;
      k0 += kW0;
      k1 += kW1;
    }
    return {c0, c1, c2, c3};
  }
};

/// Identifies one independent noise draw: (master seed, replica, time step).
struct RngStream {
  std::uint64_t master_seed = 0xC0FFEE;
  std::uint64_t replica_id = 0;
  std::uint64_t step_index = 0;

  bool operator==(const RngStream&) const = default;

  Philox4x32::Counter counter(std::uint64_t mode_index) const {
    // Mode and replica share the low two words; step gets a full 64 bits.
    std::uint32_t mode_lo = static_cast<std::uint32_t>(mode_index);
    std::uint32_t rep = static_cast<std::uint32_t>(replica_id) ^
                        (static_cast<std::uint32_t>(mode_index >> 32) * 0x85EBCA6Bu);
    return {mode_lo, rep, static_cast<std::uint32_t>(step_index),
            static_cast<std::uint32_t>(step_index >> 32)};
  }

  Philox4x32::Key key() const {
    return {static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)};
  }

  /// Two independent uniforms in (0, 1) for the given mode, 53-bit resolution.
  std::pair<double, double> uniforms(std::uint64_t mode_index) const {
    auto w = Philox4x32::generate(counter(mode_index), key());
    auto to_unit = [](std::uint32_t hi, std::uint32_t lo) {
      std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
      return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    };
    return {to_unit(w[0], w[1]), to_unit(w[2], w[3])};
  }

  /// Two independent standard normals for the given mode (Box-Muller).
  std::pair<double, double> normals(std::uint64_t mode_index) const {
    auto [u1, u2] = uniforms(mode_index);
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
  }
};

}  // namespace spdelab

#endif  // SPDELAB_RNG_HPP
