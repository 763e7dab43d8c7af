#pragma once

#include "gentune/surface/ast.hpp"
#include "gentune/weights.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <stdexcept>

namespace gentune::surface {

// Supplies the outcome of each random flip, in encounter order. Flips whose
// probability is exactly 0 or 1 are decided without consulting the oracle.
class FlipOracle {
 public:
  virtual ~FlipOracle() = default;
  virtual bool flip(double p) = 0;
};

struct OracleExhausted : std::runtime_error {
  OracleExhausted() : std::runtime_error("flip oracle exhausted") {}
};

class SequenceOracle : public FlipOracle {
 public:
  explicit SequenceOracle(std::vector<bool> outcomes) : outcomes_(std::move(outcomes)) {}
  bool flip(double) override;
  std::size_t consumed() const { return pos_; }

 private:
  std::vector<bool> outcomes_;
  std::size_t pos_ = 0;
};

class RandomOracle : public FlipOracle {
 public:
  explicit RandomOracle(std::uint64_t seed) : rng_(seed) {}
  bool flip(double p) override { return unit_(rng_) < p; }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// Rejects every flip: used to evaluate code that must be deterministic.
class NoFlipOracle : public FlipOracle {
 public:
  bool flip(double) override { throw std::runtime_error("deterministic evaluation reached a random flip"); }
};

struct EvalContext {
  // Symbolic weights resolve by name; names missing from the table (or past
  // the end of the vector) take their uniform initial value.
  const WeightTable* table = nullptr;
  const WeightVector* weights = nullptr;
  std::size_t max_call_depth = 256;
  std::size_t backtrack_limit = 4;
  // When set, receives the name of every symbolic weight a flip consults.
  std::set<std::string>* touched = nullptr;
};

Value eval_concrete(const Program& p, const ExprPtr& entry, FlipOracle& oracle, const EvalContext& ctx = {},
                    const std::vector<std::pair<std::string, Value>>& bindings = {});

// Runs a one-argument function on a concrete value; flips inside it draw
// from `oracle` (NoFlipOracle for predicates and features).
Value call_concrete(const Program& p, const std::string& fn, const Value& arg, FlipOracle& oracle,
                    const EvalContext& ctx = {});

}  // namespace gentune::surface
