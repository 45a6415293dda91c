#ifndef SPDELAB_SPDELAB_HPP
#define SPDELAB_SPDELAB_HPP

#include "spdelab/config.hpp"
#include "spdelab/errors.hpp"
#include "spdelab/estimators.hpp"
#include "spdelab/fft.hpp"
#include "spdelab/fingerprint.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/oracles.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/sigma.hpp"
#include "spdelab/solver.hpp"
#include "spdelab/version.hpp"
#include "spdelab/ywtools.hpp"

#endif  // SPDELAB_SPDELAB_HPP
