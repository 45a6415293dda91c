#ifndef SPDELAB_QUADRATURE_HPP
#define SPDELAB_QUADRATURE_HPP

#include <cmath>
#include <string>

#include "spdelab/errors.hpp"

namespace spdelab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated Richardson error estimate
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

template <class F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                       int depth, QuadResult& res) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  res.evaluations += 2;
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0) {
    res.converged = false;
    res.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) {
    res.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, res) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, res);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction. `tol` is the absolute tolerance of the whole
/// panel, split in half at every bisection.
template <class F>
QuadResult adaptive_simpson(const F& f, double a, double b, double tol = 1e-9, int max_depth = 48) {
  QuadResult res;
  if (a == b) return res;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  res.evaluations = 3;
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  res.value = detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth, res);
  return res;
}

/// As adaptive_simpson but raises an oracle error when the depth limit was hit.
template <class F>
double integrate_simpson(const F& f, double a, double b, double tol = 1e-9) {
  QuadResult r = adaptive_simpson(f, a, b, tol);
  require(r.converged, ErrorKind::oracle,
          "adaptive Simpson did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
              "] after " + std::to_string(r.evaluations) + " evaluations");
  return r.value;
}

}  // namespace spdelab

#endif  // SPDELAB_QUADRATURE_HPP
