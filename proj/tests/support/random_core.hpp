#pragma once

#include "gentune/core/ir.hpp"

#include <random>

namespace testsupport {

struct RandomProgram {
  gentune::core::Program program;
  gentune::core::ExprId root = 0;
  std::size_t weight_count = 0;
};

// Random closed, well-typed core program with at most `max_flips` flips drawing
// on `weight_count` shared symbolic weights.
RandomProgram random_core_program(std::mt19937_64& rng, std::size_t max_flips,
                                  std::size_t weight_count);

gentune::WeightVector random_weights(std::mt19937_64& rng, std::size_t n);

}  // namespace testsupport
