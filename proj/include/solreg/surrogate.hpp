#pragma once

#include <cstddef>
#include <cstdint>

#include "solreg/dataio.hpp"

namespace solreg {

// Noise-free diffuse fraction used by the surrogate generator: a sigmoid
// decomposition curve in the clearness index kt plus a small sunshine-index
// correction.  Always in [0, 1] for kt, s in [0, 1].
double surrogate_diffuse_fraction(double kt, double sunshine_index);

// Synthetic dataset in the standard schema (global, beam, sunshine_index,
// kt, k, kd).  Deterministic per seed; kd gets Gaussian noise of the given
// standard deviation and is clamped to [0, 1].  Requires n >= 100.
Dataset generate_surrogate(std::size_t n, std::uint64_t seed, double noise);

} // namespace solreg
