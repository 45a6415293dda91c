#ifndef SPDELAB_ORACLE_CONSTANTS_HPP
#define SPDELAB_ORACLE_CONSTANTS_HPP

// Constants of the heat-kernel difference bounds. They are not given in closed form; each was
// fitted once by tools/calibrate_oracles.cpp (largest observed ratio on the calibration sweep,
// rounded up with a 25% margin) and is frozen here. Do not refit at test time.

namespace spdelab {

inline constexpr double kPdiffConstant = 0.62;
inline constexpr double kCorrDiffConstant = 1.7;

}  // namespace spdelab

#endif  // SPDELAB_ORACLE_CONSTANTS_HPP
