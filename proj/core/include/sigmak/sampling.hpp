#pragma once

#include <cstddef>
#include <vector>

#include "sigmak/conformal.hpp"

namespace sigmak {

/// Radical inverse of `index` in base `base`.
double radical_inverse(std::size_t index, int base);

/// Halton points in [0,1)^dim, starting at sequence index `skip`.
std::vector<Vector> halton(int dim, std::size_t count, std::size_t skip = 20);

/// Halton points mapped to the cube [-half_width, half_width]^dim.
std::vector<Vector> halton_box(int dim, std::size_t count, double half_width, std::size_t skip = 20);

/// Deterministic unit directions: +-e_i first, then normalized Halton points.
std::vector<Vector> sphere_directions(int dim, std::size_t count);

}  // namespace sigmak
