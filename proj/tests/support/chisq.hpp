#pragma once

#include "gentune/model.hpp"

#include <vector>

namespace gentune::testing {

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

// Goodness of fit of observed samples against an exact distribution. Values
// expected fewer than `min_expected` times are pooled into one bin.
ChiSquare chi_square(const Distribution& exact, const std::vector<Value>& samples, double min_expected = 5.0);

}  // namespace gentune::testing
