#ifndef SPDELAB_FFT_HPP
#define SPDELAB_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "spdelab/errors.hpp"

// Thin thread-safe wrapper over FFTW. Plans are created once per (kind, shape) under a
// mutex with FFTW_ESTIMATE (deterministic) and executed through the new-array interface,
// which FFTW documents as safe to call concurrently. All transforms are unnormalized.

namespace spdelab::fft {

using cplx = std::complex<double>;

enum class Kind { r2c, c2r, c2c_backward, c2c_forward };

/// Logical shape: {n} or {n0, n1} (row-major). Half-spectrum length for r2c/c2r.
inline std::size_t half_size(std::span<const int> shape) {
  std::size_t s = 1;
  for (std::size_t i = 0; i + 1 < shape.size(); ++i) s *= static_cast<std::size_t>(shape[i]);
  return s * static_cast<std::size_t>(shape.back() / 2 + 1);
}

inline std::size_t full_size(std::span<const int> shape) {
  std::size_t s = 1;
  for (int v : shape) s *= static_cast<std::size_t>(v);
  return s;
}

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, std::span<const int> shape) {
    require(shape.size() == 1 || shape.size() == 2, ErrorKind::precondition, "fft rank must be 1 or 2");
    std::lock_guard lock(mu_);
    auto key = std::make_tuple(kind, std::vector<int>(shape.begin(), shape.end()));
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    const int rank = static_cast<int>(shape.size());
    const std::size_t full = full_size(shape);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    auto* r = fftw_alloc_real(full);
    auto* c = fftw_alloc_complex(full);
    fftw_plan p = nullptr;
    switch (kind) {
      case Kind::r2c: p = fftw_plan_dft_r2c(rank, shape.data(), r, c, flags); break;
      case Kind::c2r: p = fftw_plan_dft_c2r(rank, shape.data(), c, r, flags); break;
      case Kind::c2c_backward: p = fftw_plan_dft(rank, shape.data(), c, c, FFTW_BACKWARD, flags); break;
      case Kind::c2c_forward: p = fftw_plan_dft(rank, shape.data(), c, c, FFTW_FORWARD, flags); break;
    }
    fftw_free(r);
    fftw_free(c);
    require(p != nullptr, ErrorKind::precondition, "fftw plan creation failed");
    plans_.emplace(std::move(key), p);
    return p;
  }

  ~PlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  PlanCache() = default;
  std::mutex mu_;
  std::map<std::tuple<Kind, std::vector<int>>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// Real -> half spectrum. `out` must hold half_size(shape) values.
inline void r2c(std::span<const int> shape, std::span<const double> in, std::span<cplx> out) {
  require(in.size() == full_size(shape) && out.size() == half_size(shape), ErrorKind::input,
          "r2c buffer size mismatch");
  fftw_plan p = detail::PlanCache::instance().get(Kind::r2c, shape);
  // r2c never writes its input, the cast only satisfies the C signature.
  fftw_execute_dft_r2c(p, const_cast<double*>(in.data()), detail::as_fftw(out.data()));
}

/// Half spectrum -> real. The spectrum is consumed (FFTW overwrites it).
inline void c2r(std::span<const int> shape, std::span<cplx> in, std::span<double> out) {
  require(out.size() == full_size(shape) && in.size() == half_size(shape), ErrorKind::input,
          "c2r buffer size mismatch");
  fftw_plan p = detail::PlanCache::instance().get(Kind::c2r, shape);
  fftw_execute_dft_c2r(p, detail::as_fftw(in.data()), out.data());
}

/// In-place full complex transform, sign +1 (synthesis) or -1 (analysis).
inline void c2c(std::span<const int> shape, std::span<cplx> data, int sign) {
  require(data.size() == full_size(shape), ErrorKind::input, "c2c buffer size mismatch");
  fftw_plan p = detail::PlanCache::instance().get(sign > 0 ? Kind::c2c_backward : Kind::c2c_forward, shape);
  fftw_execute_dft(p, detail::as_fftw(data.data()), detail::as_fftw(data.data()));
}

}  // namespace spdelab::fft

#endif  // SPDELAB_FFT_HPP
