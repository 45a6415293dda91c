#ifndef SPDELAB_SIGMA_HPP
#define SPDELAB_SIGMA_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "spdelab/errors.hpp"

namespace spdelab {

enum class SigmaKind { lipschitz_linear, holder_power, sqrt_plus, viot, table };

inline std::string_view to_string(SigmaKind kind) {
  switch (kind) {
    case SigmaKind::lipschitz_linear: return "lipschitz-linear";
    case SigmaKind::holder_power: return "holder-power";
    case SigmaKind::sqrt_plus: return "sqrt-plus";
    case SigmaKind::viot: return "viot";
    case SigmaKind::table: return "table";
  }
  return "unknown";
}

inline SigmaKind parse_sigma_kind(std::string_view s) {
  if (s == "lipschitz-linear") return SigmaKind::lipschitz_linear;
  if (s == "holder-power") return SigmaKind::holder_power;
  if (s == "sqrt-plus") return SigmaKind::sqrt_plus;
  if (s == "viot") return SigmaKind::viot;
  if (s == "table") return SigmaKind::table;
  fail(ErrorKind::parse, "unknown sigma kind '" + std::string(s) + "'");
}

/// Diffusion coefficient sigma(u).
///
///   lipschitz-linear  scale * u
///   holder-power      scale * |u|^gamma
///   sqrt-plus         scale * sqrt(u_+)
///   viot              scale * sqrt((u (1 - u))_+)
///   table             piecewise-linear through (table_u, table_sigma); gamma is declared
///
/// `growth_c` is the constant in |sigma(u)| <= growth_c (1 + |u|).
struct SigmaSpec {
  SigmaKind kind = SigmaKind::lipschitz_linear;
  double scale = 1.0;
  double gamma = 1.0;
  double growth_c = 1.0;
  std::vector<double> table_u;
  std::vector<double> table_sigma;

  static SigmaSpec lipschitz_linear(double scale) {
    return {SigmaKind::lipschitz_linear, scale, 1.0, std::abs(scale), {}, {}};
  }
  static SigmaSpec holder_power(double scale, double gamma) {
    return {SigmaKind::holder_power, scale, gamma, std::abs(scale), {}, {}};
  }
  static SigmaSpec sqrt_plus(double scale = 1.0) {
    return {SigmaKind::sqrt_plus, scale, 0.5, std::abs(scale), {}, {}};
  }
  static SigmaSpec viot(double scale = 1.0) {
    return {SigmaKind::viot, scale, 0.5, std::abs(scale), {}, {}};
  }

  /// Lipschitz coefficients are classified as gamma = 1.
  bool is_lipschitz() const { return gamma >= 1.0; }

  /// True when |sigma(u) - sigma(v)| <= rho(|u - v|) for a modulus with
  /// divergent integral of rho^-2 near 0 (Hoelder index >= 1/2 suffices).
  bool has_yamada_watanabe_modulus() const { return gamma >= 0.5; }

  void validate() const {
    require(std::isfinite(scale) && scale > 0.0, ErrorKind::precondition, "sigma scale must be > 0");
    require(gamma > 0.0 && gamma <= 1.0, ErrorKind::precondition, "sigma gamma must lie in (0, 1]");
    require(growth_c > 0.0, ErrorKind::precondition, "sigma growth constant must be > 0");
    if (kind == SigmaKind::table) {
      require(table_u.size() >= 2 && table_u.size() == table_sigma.size(), ErrorKind::precondition,
              "sigma table needs >= 2 matching (u, sigma) pairs");
      require(std::is_sorted(table_u.begin(), table_u.end()) &&
                  std::adjacent_find(table_u.begin(), table_u.end()) == table_u.end(),
              ErrorKind::precondition, "sigma table abscissae must be strictly increasing");
    }
  }
};

inline double sigma_eval(const SigmaSpec& spec, double u) {
  switch (spec.kind) {
    case SigmaKind::lipschitz_linear: return spec.scale * u;
    case SigmaKind::holder_power: return spec.scale * std::pow(std::abs(u), spec.gamma);
    case SigmaKind::sqrt_plus: return spec.scale * std::sqrt(std::max(u, 0.0));
    case SigmaKind::viot: return spec.scale * std::sqrt(std::max(u * (1.0 - u), 0.0));
    case SigmaKind::table: {
      const auto& xs = spec.table_u;
      if (u < xs.front() || u > xs.back())
        fail(ErrorKind::extrapolation, "sigma table queried at u=" + std::to_string(u) +
                                           " outside [" + std::to_string(xs.front()) + ", " +
                                           std::to_string(xs.back()) + "]");
      auto it = std::upper_bound(xs.begin(), xs.end(), u);
      std::size_t i = it == xs.end() ? xs.size() - 2 : static_cast<std::size_t>(it - xs.begin()) - 1;
      double w = (u - xs[i]) / (xs[i + 1] - xs[i]);
      return spec.scale * ((1.0 - w) * spec.table_sigma[i] + w * spec.table_sigma[i + 1]);
    }
  }
  return 0.0;
}

/// Checks the linear growth bound on a symmetric lattice of `points` values in [-extent, extent].
inline bool growth_bound_holds(const SigmaSpec& spec, double extent = 1e3, int points = 4001) {
  double lo = -extent, hi = extent;
  if (spec.kind == SigmaKind::table) {
    lo = spec.table_u.front();
    hi = spec.table_u.back();
  }
  for (int i = 0; i < points; ++i) {
    double u = lo + (hi - lo) * i / (points - 1);
    if (std::abs(sigma_eval(spec, u)) > spec.growth_c * (1.0 + std::abs(u)) * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace spdelab

#endif  // SPDELAB_SIGMA_HPP
