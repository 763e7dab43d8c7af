#pragma once

#include "gentune/core/ir.hpp"
#include "gentune/surface/ast.hpp"
#include "gentune/surface/shape.hpp"
#include "gentune/weights.hpp"

namespace gentune::surface {

struct LowerOptions {
  std::size_t max_call_depth = 256;
  std::size_t support_budget = 4096;
  std::size_t gate_budget = 20000000;
  std::size_t backtrack_limit = 4;
};

struct Lowered {
  core::Program core;
  core::ExprId root = 0;
  Shape shape;
  std::size_t flips = 0;  // live flips after dead-gate removal
  std::size_t gates = 0;  // live gates
  std::vector<WeightId> weights;  // symbolic weights referenced, first use order
};

// Lowers `entry` (which may refer to the program's main value as `main`) to
// a core let-chain over booleans whose body is the bit vector of the result.
Lowered lower(const Program& p, const ExprPtr& entry, WeightTable& table, const LowerOptions& opt = {});
Lowered lower_main(const Program& p, WeightTable& table, const LowerOptions& opt = {});

// Lowers an expression that must be fully deterministic and returns its value
// (used to evaluate predicates on concrete values through the compiler path).
Value lower_static(const Program& p, const ExprPtr& e, WeightTable& table,
                   const std::vector<std::pair<std::string, Value>>& bindings = {},
                   const LowerOptions& opt = {});

// Applies a named function to an expression: (fn e)
ExprPtr apply(const Program& p, const std::string& fn, ExprPtr arg);
ExprPtr main_ref();

}  // namespace gentune::surface
