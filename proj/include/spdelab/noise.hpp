#ifndef SPDELAB_NOISE_HPP
#define SPDELAB_NOISE_HPP

#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "spdelab/errors.hpp"
#include "spdelab/fft.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

/// Dirichlet beta function sum_{k>=0} (-1)^k (2k+1)^{-s}, s > 0, via the
/// Cohen-Rodriguez Villegas-Zagier acceleration of the alternating series.
inline double dirichlet_beta(double s) {
  require(s > 0.0, ErrorKind::domain, "dirichlet beta needs s > 0");
  constexpr int kTerms = 40;
  double d = std::pow(3.0 + std::sqrt(8.0), kTerms);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0, c = -d, sum = 0.0;
  for (int k = 0; k < kTerms; ++k) {
    c = b - c;
    sum += c * std::pow(2.0 * k + 1.0, -s);
    b = (k + kTerms) * (k - kTerms) * b / ((k + 0.5) * (k + 1.0));
  }
  return sum / d;
}

/// Regularized lattice sum Z_d(alpha) = sum'_{m in Z^d} |m|^{-alpha} (analytic continuation).
/// A zero-mean spectral field on the torus of side l has covariance r^{-alpha} + Z_d l^{-alpha}
/// + O((r/l)^2); the DC mode compensates that constant.
inline double lattice_zeta(double alpha, int d) {
  if (d == 1) return 2.0 * boost::math::zeta(alpha);
  if (d == 2) return 4.0 * boost::math::zeta(0.5 * alpha) * dirichlet_beta(0.5 * alpha);
  fail(ErrorKind::domain, "lattice zeta only implemented for d = 1, 2");
}

/// Per-mode standard deviations for unit dt over the full n^dim spectrum.
/// Field W(x_j) = sum_k A_k Z_k exp(2 pi i k.j / n) with E|Z_k|^2 = 1, Hermitian Z.
inline std::vector<double> spectral_amplitudes(const GridSpec& g, const KernelSpec& k) {
  g.validate();
  k.validate();
  require(k.dim == g.dim, ErrorKind::precondition, "kernel and grid dimensions differ");
  const std::size_t size = g.size();
  const double vol = std::pow(g.l, g.dim);
  std::vector<double> var(size, 0.0);

  switch (k.kind) {
    case KernelKind::white:
      std::fill(var.begin(), var.end(), k.amplitude / vol);
      break;
    case KernelKind::bounded_constant:
      var[0] = k.amplitude;
      break;
    case KernelKind::riesz:
    case KernelKind::riesz_plus_constant: {
      const double cr = riesz_spectral_constant(k.alpha, g.dim);
      for (std::size_t q = 1; q < size; ++q) {
        double xi = std::sqrt(freq_norm2(g, q));
        var[q] = k.amplitude * cr * std::pow(xi, k.alpha - g.dim) / vol;
      }
      var[0] = -k.amplitude * lattice_zeta(k.alpha, g.dim) * std::pow(g.l, -k.alpha);
      if (k.kind == KernelKind::riesz_plus_constant) var[0] += k.amplitude;
      break;
    }
  }

  std::vector<double> amp(size);
  for (std::size_t q = 0; q < size; ++q) {
    if (!std::isfinite(var[q]) || var[q] < 0.0)
      fail(ErrorKind::spectral, "mode " + std::to_string(q) + " has variance " + std::to_string(var[q]));
    amp[q] = std::sqrt(var[q]);
  }
  return amp;
}

/// One temporal increment of the noise on the grid.
struct NoiseField {
  GridSpec grid;
  KernelSpec kernel;
  RngStream stream;
  double dt = 0.0;
  std::vector<double> values;
  double imag_residue = 0.0;  // max |Im| before it was discarded
};

/// Reusable sampler: caches amplitudes and the complex work buffer.
class NoiseSampler {
 public:
  NoiseSampler(const GridSpec& g, const KernelSpec& k, double dt)
      : grid_(g), kernel_(k), dt_(dt), shape_(g.shape()) {
    require(dt > 0.0, ErrorKind::precondition, "noise increment needs dt > 0");
    amp_ = spectral_amplitudes(g, k);
    const double sdt = std::sqrt(dt);
    for (double& a : amp_) a *= sdt;
    conj_.resize(amp_.size());
    for (std::size_t q = 0; q < amp_.size(); ++q) conj_[q] = conjugate_index(g, q);
    work_.resize(amp_.size());
  }

  const GridSpec& grid() const { return grid_; }
  const KernelSpec& kernel() const { return kernel_; }
  double dt() const { return dt_; }

  /// Writes the increment for `stream` into `out`; returns the max imaginary residue.
  double sample(const RngStream& stream, std::span<double> out) {
    require(out.size() == amp_.size(), ErrorKind::input, "noise output size mismatch");
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    for (std::size_t q = 0; q < amp_.size(); ++q) {
      std::size_t c = conj_[q];
      if (c < q) continue;
      auto [a, b] = stream.normals(q);
      if (c == q) {
        work_[q] = {amp_[q] * a, 0.0};
      } else {
        work_[q] = {amp_[q] * a * kInvSqrt2, amp_[q] * b * kInvSqrt2};
        work_[c] = std::conj(work_[q]);
      }
    }
    fft::c2c(shape_, work_, +1);
    double resid = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = work_[i].real();
      resid = std::max(resid, std::abs(work_[i].imag()));
    }
    return resid;
  }

  NoiseField sample(const RngStream& stream) {
    NoiseField f{grid_, kernel_, stream, dt_, std::vector<double>(amp_.size()), 0.0};
    f.imag_residue = sample(stream, f.values);
    return f;
  }

 private:
  GridSpec grid_;
  KernelSpec kernel_;
  double dt_;
  std::vector<int> shape_;
  std::vector<double> amp_;
  std::vector<std::size_t> conj_;
  std::vector<fft::cplx> work_;
};

inline NoiseField sample_increment(const GridSpec& g, const KernelSpec& k, double dt, const RngStream& stream) {
  NoiseSampler s(g, k, dt);
  return s.sample(stream);
}

struct CovarianceEstimate {
  int lag = 0;          // in grid cells along the first axis
  double r = 0.0;       // lag * h
  double estimate = 0.0;
  double std_error = 0.0;
  double theory = 0.0;  // dt * kernel_eval(r); 0 for white noise off the diagonal

  double relative_error() const { return std::abs(estimate - theory) / std::abs(theory); }
};

/// Streaming form of empirical_covariance: add replicas one at a time, in a fixed order.
class CovarianceAccumulator {
 public:
  CovarianceAccumulator(const GridSpec& g, const KernelSpec& k, double dt, std::vector<int> lags)
      : grid_(g), kernel_(k), dt_(dt), lags_(std::move(lags)), sum_(lags_.size()), sum2_(lags_.size()) {
    for (int lag : lags_) {
      require(lag >= 0 && lag < g.n, ErrorKind::input, "lag outside the grid");
      if (lag == 0 && k.is_riesz())
        fail(ErrorKind::singularity, "lag 0 excluded: riesz kernel is singular at r = 0");
    }
  }

  void add(std::span<const double> w) {
    require(w.size() == grid_.size(), ErrorKind::input, "field size does not match the grid");
    const std::size_t n = grid_.n, rows = grid_.dim == 1 ? 1 : grid_.n;
    for (std::size_t li = 0; li < lags_.size(); ++li) {
      const std::size_t lag = static_cast<std::size_t>(lags_[li]);
      double acc = 0.0;
      // Lag taken along the first (slowest) axis for d = 2, the only axis for d = 1.
      if (grid_.dim == 1) {
        for (std::size_t x = 0; x < n; ++x) acc += w[x] * w[(x + lag) % n];
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          const double* a = &w[i * n];
          const double* b = &w[((i + lag) % n) * n];
          for (std::size_t j = 0; j < n; ++j) acc += a[j] * b[j];
        }
      }
      double m = acc / static_cast<double>(n * rows);
      sum_[li] += m;
      sum2_[li] += m * m;
    }
    ++count_;
  }

  void add(const NoiseField& f) {
    require(f.grid.same_space(grid_) && f.kernel.kind == kernel_.kind && f.kernel.alpha == kernel_.alpha,
            ErrorKind::input, "field grid or kernel differs from the accumulator");
    add(f.values);
  }

  std::size_t count() const { return count_; }

  /// Folds in another accumulator over the same grid, kernel, dt and lags.
  void merge(const CovarianceAccumulator& other) {
    require(other.grid_.same_space(grid_) && other.lags_ == lags_ && other.dt_ == dt_, ErrorKind::input,
            "merging incompatible covariance accumulators");
    for (std::size_t li = 0; li < lags_.size(); ++li) {
      sum_[li] += other.sum_[li];
      sum2_[li] += other.sum2_[li];
    }
    count_ += other.count_;
  }

  std::vector<CovarianceEstimate> result() const {
    require(count_ >= 2, ErrorKind::insufficient_data, "covariance needs >= 2 fields");
    std::vector<CovarianceEstimate> out;
    const double c = static_cast<double>(count_);
    for (std::size_t li = 0; li < lags_.size(); ++li) {
      CovarianceEstimate e;
      e.lag = lags_[li];
      e.r = lags_[li] * grid_.h();
      e.estimate = sum_[li] / c;
      double var = std::max(0.0, (sum2_[li] - c * e.estimate * e.estimate) / (c - 1.0));
      e.std_error = std::sqrt(var / c);
      if (kernel_.kind == KernelKind::white)
        e.theory = e.lag == 0 ? dt_ * kernel_.amplitude / std::pow(grid_.h(), grid_.dim) : 0.0;
      else
        e.theory = dt_ * kernel_eval(kernel_, e.r).value;
      out.push_back(e);
    }
    return out;
  }

 private:
  GridSpec grid_;
  KernelSpec kernel_;
  double dt_;
  std::vector<int> lags_;
  std::vector<double> sum_, sum2_;
  std::size_t count_ = 0;
};

inline std::vector<CovarianceEstimate> empirical_covariance(const std::vector<NoiseField>& fields,
                                                            const std::vector<int>& lags) {
  require(fields.size() >= 2, ErrorKind::insufficient_data, "covariance needs >= 2 fields");
  const auto& f0 = fields.front();
  CovarianceAccumulator acc(f0.grid, f0.kernel, f0.dt, lags);
  for (const auto& f : fields) {
    require(f.dt == f0.dt, ErrorKind::input, "fields sampled with different dt");
    acc.add(f);
  }
  return acc.result();
}

// Binary field format: "SPDENZ1\0", u32 dim, u32 n, f64 l, f64 dt, u32 kernel kind,
// f64 alpha, u64 seed, u64 replica, u64 step, then n^dim f64 values, all little-endian.

namespace io {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 4);
}
inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 8);
}
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_uint(std::istream& is, int bytes) {
  unsigned char b[8] = {};
  is.read(reinterpret_cast<char*>(b), bytes);
  require(static_cast<bool>(is), ErrorKind::input, "truncated field file");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline std::uint32_t get_u32(std::istream& is) { return static_cast<std::uint32_t>(get_uint(is, 4)); }
inline std::uint64_t get_u64(std::istream& is) { return get_uint(is, 8); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline constexpr char kMagic[8] = {'S', 'P', 'D', 'E', 'N', 'Z', '1', '\0'};

}  // namespace io

inline void write_field(std::ostream& os, const NoiseField& f) {
  os.write(io::kMagic, 8);
  io::put_u32(os, static_cast<std::uint32_t>(f.grid.dim));
  io::put_u32(os, static_cast<std::uint32_t>(f.grid.n));
  io::put_f64(os, f.grid.l);
  io::put_f64(os, f.dt);
  io::put_u32(os, static_cast<std::uint32_t>(f.kernel.kind));
  io::put_f64(os, f.kernel.alpha);
  io::put_u64(os, f.stream.master_seed);
  io::put_u64(os, f.stream.replica_id);
  io::put_u64(os, f.stream.step_index);
  for (double v : f.values) io::put_f64(os, v);
}

inline NoiseField read_field(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  require(is && std::memcmp(magic, io::kMagic, 8) == 0, ErrorKind::input, "bad field file magic");
  NoiseField f;
  f.grid.dim = static_cast<int>(io::get_u32(is));
  f.grid.n = static_cast<int>(io::get_u32(is));
  f.grid.l = io::get_f64(is);
  f.dt = io::get_f64(is);
  f.grid.dt = f.dt;
  auto kind = io::get_u32(is);
  require(kind <= static_cast<std::uint32_t>(KernelKind::white), ErrorKind::input, "bad kernel kind in field file");
  f.kernel.kind = static_cast<KernelKind>(kind);
  f.kernel.alpha = io::get_f64(is);
  f.kernel.dim = f.grid.dim;
  f.stream.master_seed = io::get_u64(is);
  f.stream.replica_id = io::get_u64(is);
  f.stream.step_index = io::get_u64(is);
  require(f.grid.dim == 1 || f.grid.dim == 2, ErrorKind::input, "bad dimension in field file");
  require(f.grid.n >= 1 && f.grid.n <= (1 << 20), ErrorKind::input, "bad size in field file");
  f.values.resize(f.grid.size());
  for (double& v : f.values) v = io::get_f64(is);
  return f;
}

inline void write_field(const std::string& path, const NoiseField& f) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::input, "cannot open '" + path + "' for writing");
  write_field(os, f);
  require(static_cast<bool>(os), ErrorKind::input, "write to '" + path + "' failed");
}

inline NoiseField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::input, "cannot open '" + path + "'");
  return read_field(is);
}

}  // namespace spdelab

#endif  // SPDELAB_NOISE_HPP
