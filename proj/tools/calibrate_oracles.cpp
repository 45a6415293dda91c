// Sweeps the heat-kernel difference bounds with unit constants and prints the largest
// observed lhs / shape ratio for each, plus the value frozen in oracle_constants.hpp.

#include <cmath>
#include <cstdio>
#include <vector>

#include "spdelab/oracles.hpp"

using namespace spdelab;

int main() {
  double pdiff = 0.0, space = 0.0, time = 0.0;
  const std::vector<double> ts{0.05, 0.1, 0.25, 0.5, 1.0, 2.0};
  const std::vector<double> gaps{0.0, 0.01, 0.05, 0.2, 0.5, 1.0};
  const std::vector<double> xs{-1.0, -0.3, 0.0, 0.2, 0.7};
  const std::vector<double> seps{0.0, 0.005, 0.02, 0.1, 0.4, 1.0};

  for (double t : ts)
    for (double g : gaps)
      for (double x : xs)
        for (double s : seps)
          for (double lambda : {0.0, 0.5, 1.0}) {
            if (g == 0.0 && s == 0.0) continue;
            double tp = t + g * t, y = x + s;
            double lhs = pdiff_integral(t, tp, x, y, lambda);
            double shape = pdiff_bound(t, tp, x, y, 1.0, lambda) / kPdiffConstant;
            pdiff = std::max(pdiff, lhs / shape);
          }

  for (double alpha : {0.1, 0.3, 0.5, 0.8}) {
    for (double t : ts)
      for (double x : xs)
        for (double s : seps) {
          if (s == 0.0) continue;
          double lhs = spacecorr_integral(t, x, x + s, alpha);
          double shape = (std::pow(t, -1.0 - 0.5 * alpha) + 1.0 / t) * s * s;
          space = std::max(space, lhs / shape);
        }
    for (double t : ts)
      for (double g : gaps) {
        if (g == 0.0) continue;
        double tp = t + g * t;
        double lhs = timecorr_integral(t, tp, 0.1, alpha);
        double shape = (std::pow(t, -2.0 - 0.5 * alpha) + std::pow(t, -2.0)) * (tp - t) * (tp - t);
        time = std::max(time, lhs / shape);
      }
  }
  std::printf("pdiff: max ratio %.6g, suggested %.4g (frozen %.4g)\n", pdiff, 1.25 * pdiff, kPdiffConstant);
  std::printf("space: max ratio %.6g\ntime:  max ratio %.6g\n", space, time);
  double corr = std::max(space, time);
  std::printf("corr diff: suggested %.4g (frozen %.4g)\n", 1.25 * corr, kCorrDiffConstant);
  return 0;
}
