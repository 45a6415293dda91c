#ifndef SPDELAB_GRID_HPP
#define SPDELAB_GRID_HPP

#include <bit>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "spdelab/errors.hpp"

namespace spdelab {

/// Periodic grid [0, l)^dim with n points per axis, plus time stepping.
struct GridSpec {
  int dim = 1;
  int n = 256;
  double l = 1.0;
  double dt = 0.0;  // 0 selects the default h^2 / 2
  double t_end = 1.0;
  double t_min = 0.1;

  double h() const { return l / n; }
  double step() const { return dt > 0.0 ? dt : 0.5 * h() * h(); }
  std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n); }
  std::vector<int> shape() const { return dim == 1 ? std::vector<int>{n} : std::vector<int>{n, n}; }

  /// Number of steps to reach t_end (rounded to the nearest lattice point).
  long steps() const { return std::lround(t_end / step()); }

  void validate() const {
    require(dim == 1 || dim == 2, ErrorKind::precondition, "grid dimension must be 1 or 2");
    require(n >= 2 && std::has_single_bit(static_cast<unsigned>(n)), ErrorKind::precondition,
            "grid n=" + std::to_string(n) + " must be a power of two");
    require(std::isfinite(l) && l > 0.0, ErrorKind::precondition, "grid length must be > 0");
    require(dt >= 0.0 && std::isfinite(dt), ErrorKind::precondition, "time step must be > 0");
    require(t_min >= 0.0 && t_min < t_end, ErrorKind::precondition, "need 0 <= t_min < t_end");
  }

  bool same_space(const GridSpec& o) const { return dim == o.dim && n == o.n && l == o.l; }
};

/// Signed DFT wavenumber of index i on an axis of n points (Nyquist reported as +n/2).
inline int signed_wavenumber(int i, int n) { return i <= n / 2 ? i : i - n; }

/// |xi|^2 for flat index q of a full (n^dim) spectrum; frequencies are k / l.
inline double freq_norm2(const GridSpec& g, std::size_t q) {
  if (g.dim == 1) {
    double k = signed_wavenumber(static_cast<int>(q), g.n) / g.l;
    return k * k;
  }
  int i = static_cast<int>(q / g.n), j = static_cast<int>(q % g.n);
  double k0 = signed_wavenumber(i, g.n) / g.l, k1 = signed_wavenumber(j, g.n) / g.l;
  return k0 * k0 + k1 * k1;
}

/// Flat index of the conjugate mode -k.
inline std::size_t conjugate_index(const GridSpec& g, std::size_t q) {
  auto neg = [n = g.n](int i) { return i == 0 ? 0 : n - i; };
  if (g.dim == 1) return static_cast<std::size_t>(neg(static_cast<int>(q)));
  int i = static_cast<int>(q / g.n), j = static_cast<int>(q % g.n);
  return static_cast<std::size_t>(neg(i)) * g.n + static_cast<std::size_t>(neg(j));
}

}  // namespace spdelab

#endif  // SPDELAB_GRID_HPP
