#pragma once

#include "gentune/core/ir.hpp"

#include <map>
#include <stdexcept>
#include <unordered_map>

namespace gentune::core {

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TypeEnv = std::unordered_map<std::string, TypePtr>;

TypePtr typecheck(const Program& p, ExprId e, const TypeEnv& env = {});

using Distribution = std::unordered_map<Value, double, ValueHash>;

struct EnumerateOptions {
  std::size_t flip_budget = 20;
};

// Brute-force exact semantics. Exponential; meant as a test oracle.
Distribution enumerate_semantics(const Program& p, ExprId e, const WeightVector& w,
                                 const EnumerateOptions& opt = {});

std::vector<WeightId> collect_weights(const Program& p, ExprId e);

std::size_t count_flips(const Program& p, ExprId e);

// Copy of `e` with every symbolic flip replaced by its current value.
ExprId substitute_weights(Program& p, ExprId e, const WeightVector& w);

}  // namespace gentune::core
