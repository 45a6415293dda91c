#ifndef SPDELAB_YWTOOLS_HPP
#define SPDELAB_YWTOOLS_HPP

#include <cmath>
// pchip.hpp calls isnan unqualified; it must see the global overloads first.
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spdelab/errors.hpp"
#include "spdelab/quadrature.hpp"

namespace spdelab {

enum class RhoKind { sqrt, custom };

/// Modulus rho on (0, 1]. `augmented` replaces rho by rho + sqrt(x).
/// Custom moduli are tabulated and interpolated with a monotone cubic (PCHIP).
class RhoSpec {
 public:
  static RhoSpec sqrt(bool augmented = false) {
    RhoSpec r;
    r.augmented_ = augmented;
    return r;
  }

  static RhoSpec custom(std::vector<double> x, std::vector<double> rho, bool augmented = false) {
    RhoSpec r;
    r.kind_ = RhoKind::custom;
    r.augmented_ = augmented;
    require(x.size() >= 4 && x.size() == rho.size(), ErrorKind::precondition,
            "custom rho table needs >= 4 matching points");
    require(x.front() > 0.0 && x.back() >= 1.0, ErrorKind::precondition, "custom rho table must cover [floor, 1]");
    for (std::size_t i = 1; i < x.size(); ++i) {
      require(x[i] > x[i - 1], ErrorKind::precondition, "custom rho abscissae must increase");
      require(rho[i] > rho[i - 1], ErrorKind::precondition, "custom rho must be strictly increasing");
    }
    require(rho.front() > 0.0, ErrorKind::precondition, "custom rho must be positive on the table");
    if (!augmented) {
      for (std::size_t i = 0; i < x.size(); ++i)
        require(rho[i] >= std::sqrt(x[i]), ErrorKind::precondition,
                "custom rho falls below sqrt(x) at x=" + std::to_string(x[i]) + "; set the augmented flag");
    }
    r.floor_ = x.front();
    r.table_x_ = x;
    r.table_rho_ = rho;
    r.interp_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(x), std::move(rho));
    return r;
  }

  RhoKind kind() const { return kind_; }
  bool augmented() const { return augmented_; }
  /// Smallest x at which rho is known (0 for the analytic modulus).
  double floor() const { return floor_; }
  const std::vector<double>& table_x() const { return table_x_; }
  const std::vector<double>& table_rho() const { return table_rho_; }

  /// rho(x) for x in (0, 1] (custom: [floor, table end]).
  double operator()(double x) const {
    double base;
    if (kind_ == RhoKind::sqrt) {
      require(x > 0.0, ErrorKind::domain, "rho evaluated at x <= 0");
      base = std::sqrt(x);
    } else {
      if (x < floor_) fail(ErrorKind::resolution, "rho table floor " + std::to_string(floor_) + " reached");
      require(x <= table_x_.back(), ErrorKind::extrapolation, "rho queried beyond its table");
      base = (*interp_)(x);
    }
    return augmented_ ? base + std::sqrt(x) : base;
  }

  double inv_sq(double x) const {
    double r = (*this)(x);
    return 1.0 / (r * r);
  }

  /// For rho = c sqrt(x), a_n = exp(-c^2 n(n+1)/2) in closed form; returns c^2 (0 if none).
  double closed_form_rate() const {
    if (kind_ != RhoKind::sqrt) return 0.0;
    return augmented_ ? 4.0 : 1.0;
  }

 private:
  RhoKind kind_ = RhoKind::sqrt;
  bool augmented_ = false;
  double floor_ = 0.0;
  std::vector<double> table_x_, table_rho_;
  std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

/// int_a^b rho^-2(x) dx, computed in u = log x (integrand e^u rho^-2(e^u)).
inline double rho_inv_sq_integral(const RhoSpec& rho, double a, double b, double tol = 1e-12) {
  auto g = [&](double u) {
    double x = std::exp(u);
    return x * rho.inv_sq(x);
  };
  return integrate_simpson(g, std::log(a), std::log(b), tol);
}

/// Partial integrals of rho^-2 from dyadic points 2^-k up to 1, down to the table floor.
/// Growth without bound certifies the divergence of the integral at 0+ only to the floor.
struct DivergenceCertificate {
  bool analytic = false;
  std::vector<double> points;
  std::vector<double> partial_sums;
  std::string warning;
};

inline DivergenceCertificate divergence_certificate(const RhoSpec& rho) {
  DivergenceCertificate c;
  if (rho.kind() == RhoKind::sqrt) {
    c.analytic = true;
    return c;
  }
  double acc = 0.0, hi = 1.0;
  for (double x = 0.5; x >= rho.floor(); x *= 0.5) {
    acc += rho_inv_sq_integral(rho, x, hi);
    c.points.push_back(x);
    c.partial_sums.push_back(acc);
    hi = x;
  }
  c.warning = "divergence of int rho^-2 certified only down to the table floor x=" + std::to_string(rho.floor());
  return c;
}

/// a_n by root-solving int_{a_n}^{a_{n-1}} rho^-2 = n in log coordinates, recursively from a_0 = 1.
inline std::vector<double> a_sequence_numeric(int n, const RhoSpec& rho) {
  require(n >= 0, ErrorKind::precondition, "a_sequence needs n >= 0");
  std::vector<double> a{1.0};
  for (int j = 1; j <= n; ++j) {
    const double upper = std::log(a.back());
    double lower;
    if (rho.kind() == RhoKind::custom) {
      lower = std::log(rho.floor());
      if (rho_inv_sq_integral(rho, rho.floor(), a.back()) < j)
        fail(ErrorKind::resolution, "rho table floor reached before int rho^-2 accumulated n=" + std::to_string(j));
    } else {
      lower = upper - 4.0 * j - 10.0;
    }
    auto target = [&](double u) { return rho_inv_sq_integral(rho, std::exp(u), a.back()) - j; };
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(target, lower, upper, target(lower), -double(j),
                                                      boost::math::tools::eps_tolerance<double>(52), iters);
    a.push_back(std::exp(0.5 * (lo + hi)));
  }
  return a;
}

/// a_n; the closed form is used whenever rho is a multiple of sqrt(x).
inline double a_sequence(int n, const RhoSpec& rho) {
  require(n >= 0, ErrorKind::precondition, "a_sequence needs n >= 0");
  if (double rate = rho.closed_form_rate(); rate > 0.0) return std::exp(-rate * 0.5 * n * (n + 1.0));
  return a_sequence_numeric(n, rho).back();
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double p = std::exp(-1.0 / t), q = std::exp(-1.0 / (1.0 - t));
  return p / (p + q);
}

/// Yamada-Watanabe objects for one n: support (a_n, a_{n-1}), mollifier psi_n and phi_n.
/// psi_n = c rho^-2 B, with B a plateau bump in log x whose tapers occupy a fraction theta
/// of the interval at each end. phi_n and phi_n' are cached on a log grid and refined by
/// local quadrature at evaluation time.
class YWFamily {
 public:
  static constexpr int kGridPoints = 10000;
  static constexpr double kPanelTol = 1e-9;

  YWFamily(int n, RhoSpec rho, bool numeric_a = false) : n_(n), rho_(std::move(rho)) {
    require(n >= 1, ErrorKind::precondition, "build_family needs n >= 1");
    if (numeric_a) {
      auto seq = a_sequence_numeric(n, rho_);
      a_prev_ = seq[n - 1];
      a_n_ = seq[n];
    } else {
      a_prev_ = a_sequence(n - 1, rho_);
      a_n_ = a_sequence(n, rho_);
    }
    require(a_n_ < a_prev_, ErrorKind::construction, "a_n must decrease");
    la_ = std::log(a_n_);
    lb_ = std::log(a_prev_);
    build();
  }

  int n() const { return n_; }
  const RhoSpec& rho() const { return rho_; }
  double a_prev() const { return a_prev_; }
  double a_n() const { return a_n_; }
  double taper() const { return theta_; }
  double normalization() const { return c_; }
  const std::vector<double>& grid() const { return grid_; }

  /// Plateau bump in s = log-position within the support.
  double bump(double x) const {
    if (x <= a_n_ || x >= a_prev_) return 0.0;
    double s = (std::log(x) - la_) / (lb_ - la_);
    return smooth_step(s / theta_) * smooth_step((1.0 - s) / theta_);
  }

  double psi(double x) const {
    double b = bump(x);
    return b == 0.0 ? 0.0 : c_ * rho_.inv_sq(x) * b;
  }

  /// int_0^x psi for x >= 0.
  double psi_cumulative(double x) const {
    if (x <= a_n_) return 0.0;
    if (x >= a_prev_) return cum_psi_.back();
    std::size_t i = panel(x);
    return cum_psi_[i] + integrate_simpson([&](double z) { return psi(z); }, grid_[i], x, kPanelTol * 1e-3);
  }

  /// phi_n(|x|) = int_0^{|x|} int_0^y psi.
  double phi(double x) const {
    x = std::abs(x);
    if (x <= a_n_) return 0.0;
    if (x >= grid_.back()) return cum_phi_.back() + (x - grid_.back()) * cum_psi_.back();
    std::size_t i = panel(x);
    double g = grid_[i];
    double local = integrate_simpson([&](double z) { return (x - z) * psi(z); }, g, x, kPanelTol * 1e-3);
    return cum_phi_[i] + (x - g) * cum_psi_[i] + local;
  }

  double phi_prime(double x) const {
    double v = psi_cumulative(std::abs(x));
    return x < 0.0 ? -v : v;
  }

  double phi_second(double x) const { return psi(std::abs(x)); }

  /// sup over the support of psi n rho^2 / 2 sampled on the cache grid (must be <= 1).
  double psi_bound_ratio() const {
    double worst = 0.0;
    for (double x : grid_) {
      if (x <= a_n_ || x >= a_prev_) continue;
      double r = rho_(x);
      worst = std::max(worst, psi(x) * n_ * r * r / 2.0);
    }
    return worst;
  }

  /// int psi over the support, by the cached panel sums.
  double psi_mass() const { return cum_psi_.back(); }

  /// Applies a functional int_{a_n}^{a_{n-1}} psi(x) w(x) dx panel by panel.
  double integrate_against_psi(const std::function<double(double)>& w) const {
    double acc = 0.0;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      if (grid_[i] <= a_n_ || grid_[i - 1] >= a_prev_) continue;
      acc += integrate_simpson([&](double z) { return psi(z) * w(z); }, grid_[i - 1], grid_[i], kPanelTol);
    }
    return acc;
  }

 private:
  std::size_t panel(double x) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    return static_cast<std::size_t>(it - grid_.begin()) - 1;
  }

  void build() {
    // Log grid over [a_n / 2, 2] with the support endpoints inserted as nodes.
    const double g0 = std::log(0.5 * a_n_), g1 = std::log(2.0);
    grid_.resize(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i) grid_[i] = std::exp(g0 + (g1 - g0) * i / (kGridPoints - 1));
    grid_.push_back(a_n_);
    grid_.push_back(a_prev_);
    std::sort(grid_.begin(), grid_.end());
    grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());

    theta_ = 0.25;
    for (;;) {
      c_ = 1.0;
      double mass = 0.0;
      for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (grid_[i] <= a_n_ || grid_[i - 1] >= a_prev_) continue;
        mass += integrate_simpson([&](double z) { return psi(z); }, grid_[i - 1], grid_[i], kPanelTol);
      }
      require(mass > 0.0, ErrorKind::construction, "mollifier has zero mass");
      c_ = 1.0 / mass;
      if (c_ * n_ / 2.0 <= 1.0 + 1e-12 && psi_bound_ratio() <= 1.0 + 1e-9) break;
      theta_ *= 0.5;
      if (theta_ < 1e-3)
        fail(ErrorKind::construction, "bound psi_n <= 2 rho^-2 / n infeasible even with taper 1e-3");
    }

    cum_psi_.assign(grid_.size(), 0.0);
    cum_phi_.assign(grid_.size(), 0.0);
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      double a = grid_[i - 1], b = grid_[i];
      double ipsi = 0.0, imom = 0.0;
      if (b > a_n_ && a < a_prev_) {
        ipsi = integrate_simpson([&](double z) { return psi(z); }, a, b, kPanelTol);
        imom = integrate_simpson([&](double z) { return (b - z) * psi(z); }, a, b, kPanelTol);
      }
      cum_psi_[i] = cum_psi_[i - 1] + ipsi;
      cum_phi_[i] = cum_phi_[i - 1] + (b - a) * cum_psi_[i - 1] + imom;
    }
  }

  int n_;
  RhoSpec rho_;
  double a_prev_ = 1.0, a_n_ = 0.0, la_ = 0.0, lb_ = 0.0;
  double theta_ = 0.25, c_ = 1.0;
  std::vector<double> grid_, cum_psi_, cum_phi_;
};

inline YWFamily build_family(int n, const RhoSpec& rho) { return YWFamily(n, rho); }

inline double phi_eval(const YWFamily& f, double x) { return f.phi(x); }
inline double phi_prime(const YWFamily& f, double x) { return f.phi_prime(x); }
inline double phi_second(const YWFamily& f, double x) { return f.phi_second(x); }

/// int phi_n''(x) h(x) dx = int psi_n(x) (h(x) + h(-x)) dx.
inline double delta_approx_check(const YWFamily& f, const std::function<double(double)>& h) {
  return f.integrate_against_psi([&](double x) { return h(x) + h(-x); });
}

struct CalculusBound {
  double lhs_sup = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Checks (df/dx_i)^2 / f <= 2 sup |D^2 f| for a nonnegative grid function (zero outside the
/// grid), using central first differences and second differences along each axis.
inline CalculusBound calculus_bound_check(std::span<const double> f, std::span<const int> shape, double h,
                                          double tol = 1e-12) {
  std::size_t total = 1;
  for (int s : shape) total *= static_cast<std::size_t>(s);
  require(f.size() == total, ErrorKind::input, "grid function does not match its shape");
  for (double v : f) require(v >= 0.0, ErrorKind::precondition, "calculus bound needs f >= 0");

  const int rank = static_cast<int>(shape.size());
  std::vector<std::size_t> stride(rank, 1);
  for (int a = rank - 2; a >= 0; --a) stride[a] = stride[a + 1] * static_cast<std::size_t>(shape[a + 1]);

  CalculusBound out;
  double d2max = 0.0;
  for (std::size_t q = 0; q < total; ++q) {
    for (int a = 0; a < rank; ++a) {
      long idx = static_cast<long>((q / stride[a]) % static_cast<std::size_t>(shape[a]));
      auto at = [&](long off) {
        long j = idx + off;
        if (j < 0 || j >= shape[a]) return 0.0;
        return f[q + static_cast<std::size_t>(off * static_cast<long>(stride[a]))];
      };
      double fm = at(-1), f0 = f[q], fp = at(1);
      d2max = std::max(d2max, std::abs(fp - 2.0 * f0 + fm) / (h * h));
      if (f0 > tol) {
        double d1 = (fp - fm) / (2.0 * h);
        out.lhs_sup = std::max(out.lhs_sup, d1 * d1 / f0);
      }
    }
  }
  out.rhs = 2.0 * d2max;
  out.pass = out.lhs_sup <= out.rhs * (1.0 + 1e-3);
  return out;
}

/// Grid verification of every constraint placed on psi_n and phi_n.
struct YWChecks {
  int n = 0;
  double a_n = 0.0, a_prev = 0.0;
  double mass_error = 0.0;       // |int psi - 1|, limit 1e-6
  double bound_ratio = 0.0;      // sup psi n rho^2 / 2, limit 1 + 1e-9
  double chain_ratio = 0.0;      // sup psi n x / 2, limit 1 + 1e-9
  double support_leak = 0.0;     // sup |psi| outside (a_n, a_{n-1})
  double phi_gap = 0.0;          // sup (|x| - phi(x)), limit a_{n-1}
  double phi_prime_max = 0.0;    // sup |phi'|, limit 1
  double convexity_min = 0.0;    // min second difference of phi on [0, 2], limit -1e-9
  double derivative_error = 0.0; // sup |numeric phi' - phi'|, limit 1e-5
  double phi_at_zero = 0.0;
  bool pass() const {
    return mass_error <= 1e-6 && bound_ratio <= 1.0 + 1e-9 && chain_ratio <= 1.0 + 1e-9 && support_leak == 0.0 &&
           phi_gap <= a_prev && phi_prime_max <= 1.0 + 1e-12 && convexity_min >= -1e-9 &&
           derivative_error <= 1e-5 && phi_at_zero == 0.0;
  }
};

inline YWChecks yw_checks(const YWFamily& f, int samples = 4001) {
  YWChecks c;
  c.n = f.n();
  c.a_n = f.a_n();
  c.a_prev = f.a_prev();
  c.mass_error = std::abs(f.psi_mass() - 1.0);
  c.bound_ratio = f.psi_bound_ratio();
  for (double x : f.grid())
    if (x > f.a_n() && x < f.a_prev()) c.chain_ratio = std::max(c.chain_ratio, f.psi(x) * f.n() * x / 2.0);
  for (double x : {0.0, 0.5 * f.a_n(), f.a_n(), f.a_prev(), 0.5 * (f.a_prev() + 1.0), 1.0, 2.0})
    c.support_leak = std::max(c.support_leak, std::abs(f.psi(x)));
  c.phi_at_zero = f.phi(0.0);
  // Uniform samples on [0, 2] plus the log-spaced cache grid.
  std::vector<double> xs;
  for (int i = 0; i < samples; ++i) xs.push_back(2.0 * i / (samples - 1));
  for (double x : f.grid())
    if (x <= 2.0) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    c.phi_gap = std::max(c.phi_gap, x - f.phi(x));
    c.phi_prime_max = std::max(c.phi_prime_max, std::abs(f.phi_prime(x)));
  }
  for (int i = 1; i + 1 < samples; ++i) {
    double x = 2.0 * i / (samples - 1), h = 2.0 / (samples - 1);
    c.convexity_min = std::min(c.convexity_min, f.phi(x + h) - 2.0 * f.phi(x) + f.phi(x - h));
  }
  // Central differences at interior points of the support and beyond it.
  const double la = std::log(f.a_n()), lb = std::log(f.a_prev());
  for (int i = 1; i < 64; ++i) {
    double x = std::exp(la + (lb - la) * i / 64.0);
    double h = 1e-4 * x;
    double num = (f.phi(x + h) - f.phi(x - h)) / (2.0 * h);
    c.derivative_error = std::max(c.derivative_error, std::abs(num - f.phi_prime(x)));
  }
  return c;
}

}  // namespace spdelab

#endif  // SPDELAB_YWTOOLS_HPP
