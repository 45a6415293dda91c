#ifndef SPDELAB_KERNELS_HPP
#define SPDELAB_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "spdelab/errors.hpp"
#include "spdelab/sigma.hpp"

// Closed-form kernel mathematics. Fourier convention: F f(xi) = int exp(-2 pi i xi.x) f(x) dx,
// so the heat semigroup S_t (generator Laplacian / 2) has multiplier exp(-2 pi^2 |xi|^2 t).

namespace spdelab {

enum class KernelKind { riesz, riesz_plus_constant, bounded_constant, white };

inline std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::riesz: return "riesz";
    case KernelKind::riesz_plus_constant: return "riesz-plus-constant";
    case KernelKind::bounded_constant: return "bounded-constant";
    case KernelKind::white: return "white";
  }
  return "unknown";
}

inline KernelKind parse_kernel_kind(std::string_view s) {
  if (s == "riesz") return KernelKind::riesz;
  if (s == "riesz-plus-constant") return KernelKind::riesz_plus_constant;
  if (s == "bounded-constant") return KernelKind::bounded_constant;
  if (s == "white") return KernelKind::white;
  fail(ErrorKind::parse, "unknown kernel kind '" + std::string(s) + "'");
}

/// Spatial correlation kernel k(x, y) = k~(x - y) of the driving noise.
struct KernelSpec {
  KernelKind kind = KernelKind::riesz;
  double alpha = 0.5;
  double amplitude = 1.0;
  int dim = 1;

  bool is_riesz() const { return kind == KernelKind::riesz || kind == KernelKind::riesz_plus_constant; }

  /// Existence-regime invariants; sampling and simulation require them.
  void validate() const {
    require(dim >= 1, ErrorKind::precondition, "kernel dimension must be >= 1");
    require(std::isfinite(amplitude) && amplitude > 0.0, ErrorKind::precondition,
            "kernel amplitude must be > 0");
    if (is_riesz()) {
      double cap = std::min(2.0, static_cast<double>(dim));
      require(alpha > 0.0 && alpha < cap, ErrorKind::precondition,
              "riesz exponent alpha=" + std::to_string(alpha) + " must lie in (0, min(2, d))");
    }
    if (kind == KernelKind::white)
      require(dim == 1, ErrorKind::precondition, "white noise is only admitted in dimension 1");
  }
};

/// (2 pi t)^{-d/2} exp(-|x|^2 / (2t)), d = x.size().
inline double heat_kernel(double t, std::span<const double> x) {
  require(t > 0.0, ErrorKind::domain, "heat kernel needs t > 0");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  double d = static_cast<double>(x.size());
  return std::pow(2.0 * std::numbers::pi * t, -0.5 * d) * std::exp(-r2 / (2.0 * t));
}

inline double heat_kernel(double t, double x) { return heat_kernel(t, std::span<const double>(&x, 1)); }

inline double semigroup_multiplier(double xi_squared_norm, double t) {
  return std::exp(-2.0 * std::numbers::pi * std::numbers::pi * xi_squared_norm * t);
}

inline double semigroup_multiplier(std::span<const double> xi, double t) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return semigroup_multiplier(s, t);
}

/// Pointwise kernel value; white noise has none (distributional).
struct KernelValue {
  double value = 0.0;
  bool distributional = false;
};

inline KernelValue kernel_eval(const KernelSpec& spec, double r) {
  require(r >= 0.0, ErrorKind::domain, "kernel separation must be >= 0");
  switch (spec.kind) {
    case KernelKind::riesz:
    case KernelKind::riesz_plus_constant: {
      spec.validate();
      if (r == 0.0) fail(ErrorKind::singularity, "riesz kernel is singular at r = 0");
      double v = std::pow(r, -spec.alpha);
      if (spec.kind == KernelKind::riesz_plus_constant) v += 1.0;
      return {spec.amplitude * v, false};
    }
    case KernelKind::bounded_constant: return {spec.amplitude, false};
    case KernelKind::white: return {0.0, true};
  }
  return {};
}

/// c_R(alpha, d) = pi^{alpha - d/2} Gamma((d - alpha)/2) / Gamma(alpha/2), the Fourier
/// constant of |x|^{-alpha}.
inline double riesz_spectral_constant(double alpha, int d) {
  require(alpha > 0.0 && alpha < d, ErrorKind::domain, "riesz spectral constant needs 0 < alpha < d");
  return std::pow(std::numbers::pi, alpha - 0.5 * d) * std::tgamma(0.5 * (d - alpha)) /
         std::tgamma(0.5 * alpha);
}

struct SpectralValue {
  double value = 0.0;
  bool infinite = false;
};

/// Density c_R |xi|^{alpha - d} of the spectral measure of |x|^{-alpha}; infinite at xi = 0.
inline SpectralValue spectral_density(std::span<const double> xi, double alpha) {
  int d = static_cast<int>(xi.size());
  require(alpha > 0.0 && alpha < d, ErrorKind::domain,
          "spectral density needs 0 < alpha < d (alpha=" + std::to_string(alpha) + ")");
  double s = 0.0;
  for (double v : xi) s += v * v;
  if (s == 0.0) return {0.0, true};
  return {riesz_spectral_constant(alpha, d) * std::pow(std::sqrt(s), alpha - d), false};
}

inline SpectralValue spectral_density(double xi_norm, double alpha, int d) {
  require(alpha > 0.0 && alpha < d, ErrorKind::domain, "spectral density needs 0 < alpha < d");
  if (xi_norm == 0.0) return {0.0, true};
  return {riesz_spectral_constant(alpha, d) * std::pow(std::abs(xi_norm), alpha - d), false};
}

/// Finiteness of int mu(dxi) / (1 + |xi|^2)^eta for the riesz spectral measure.
inline bool dalang_condition(double alpha, int d, double eta) {
  return alpha < std::min(2.0 * eta, static_cast<double>(d));
}

/// E_0 |B_1|^{-alpha} for d-dimensional Brownian motion.
inline double negative_moment_constant(double alpha, int d) {
  require(alpha < d, ErrorKind::domain, "negative moment needs alpha < d");
  return std::pow(2.0, -0.5 * alpha) * std::tgamma(0.5 * (d - alpha)) / std::tgamma(0.5 * d);
}

enum class Verdict {
  proven_unique_holder,
  proven_unique_yw_bounded,
  proven_unique_lipschitz,
  open,
  no_function_solution
};

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::proven_unique_holder: return "proven-unique-holder";
    case Verdict::proven_unique_yw_bounded: return "proven-unique-yw-bounded";
    case Verdict::proven_unique_lipschitz: return "proven-unique-lipschitz";
    case Verdict::open: return "open";
    case Verdict::no_function_solution: return "no-function-solution";
  }
  return "unknown";
}

struct RegimeVerdict {
  Verdict verdict = Verdict::open;
  std::string citation;
};

/// Which uniqueness theorem (if any) covers the pair (kernel, sigma).
/// Lipschitz sigma is gamma = 1 and takes precedence over the Hoelder rule.
/// Kernel specs are not validated here so that out-of-regime exponents classify.
inline RegimeVerdict classify_regime(const KernelSpec& k, const SigmaSpec& s) {
  const double cap = std::min(2.0, static_cast<double>(k.dim));
  switch (k.kind) {
    case KernelKind::riesz:
    case KernelKind::riesz_plus_constant:
      if (k.alpha > cap)
        return {Verdict::no_function_solution, "nonexistence of function-valued solutions for alpha > min(2, d)"};
      if (s.is_lipschitz() && k.alpha > 0.0 && k.alpha < cap)
        return {Verdict::proven_unique_lipschitz, "Lipschitz uniqueness under the Dalang condition"};
      if (k.alpha > 0.0 && k.alpha < 1.0 && s.gamma > 0.5 * (1.0 + k.alpha) && s.gamma <= 1.0)
        return {Verdict::proven_unique_holder, "Hoelder-sigma uniqueness for Riesz-bounded kernels"};
      return {Verdict::open, "no uniqueness theorem covers this (alpha, gamma)"};
    case KernelKind::bounded_constant:
      if (s.is_lipschitz())
        return {Verdict::proven_unique_lipschitz, "Lipschitz uniqueness under the Dalang condition"};
      if (s.has_yamada_watanabe_modulus())
        return {Verdict::proven_unique_yw_bounded, "Yamada-Watanabe uniqueness for bounded kernels"};
      return {Verdict::open, "sigma has no Yamada-Watanabe modulus"};
    case KernelKind::white:
      if (s.is_lipschitz())
        return {Verdict::proven_unique_lipschitz, "Lipschitz uniqueness under the Dalang condition"};
      return {Verdict::open, "white noise with non-Lipschitz sigma is not covered"};
  }
  return {Verdict::open, "unclassified"};
}

}  // namespace spdelab

#endif  // SPDELAB_KERNELS_HPP
