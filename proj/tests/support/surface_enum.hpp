#pragma once

#include "gentune/surface/eval.hpp"

#include <map>

namespace gentune::testing {

// Exact distribution of a surface expression by exhausting every flip path
// of the concrete interpreter. Independent of lowering and BDDs.
std::map<surface::Value, double> enumerate_surface(const surface::Program& p, const surface::ExprPtr& entry,
                                                   const surface::EvalContext& ctx = {},
                                                   std::size_t max_paths = 1u << 20);

}  // namespace gentune::testing
