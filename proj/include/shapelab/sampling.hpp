#pragma once

#include "shapelab/geometry.hpp"
#include "shapelab/shapegrad.hpp"

#include <random>

namespace shapelab {

/// Unit-scale star domain with modes k = 1..max_k, a_k, b_k uniform in
/// [-amplitude / k, amplitude / k].
StarDomain random_domain(std::mt19937_64& rng, int max_k = 4, double amplitude = 0.08);

/// Radial velocity with modes k = 0..max_k, coefficients uniform in
/// [-1 / (1 + k), 1 / (1 + k)].
BoundaryField random_field(std::mt19937_64& rng, int max_k = 4);

}  // namespace shapelab
