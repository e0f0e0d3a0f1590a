#pragma once

#include <vector>

#include "nonholo/types.hpp"

namespace nonholo {

/// Element `index` (0-based) of the van der Corput sequence in the given base.
double van_der_corput(unsigned long long index, unsigned base);

/// Halton point in [0,1]^dim (bases = first `dim` primes), 0-based index.
Vec halton_point(unsigned long long index, int dim);

/// Deterministic low-discrepancy sample of `count` points in the closed ball
/// of the given radius (rejection from the Halton cube). `offset` shifts the
/// start of the underlying sequence so disjoint grids can be drawn.
std::vector<Vec> halton_ball(int dim, double radius, int count, unsigned long long offset = 0);

/// The 4*dim points +/- radius * e_i and +/- (radius/2) * e_i.
std::vector<Vec> axis_points(int dim, double radius);

}  // namespace nonholo
