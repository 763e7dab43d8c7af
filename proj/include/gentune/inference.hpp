#pragma once

#include "gentune/compiler.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace gentune {

class SupportBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reachable part of one diagram, flattened leaves-first so that the forward
// and reverse sweeps are plain loops.
class WmcPlan {
 public:
  WmcPlan() = default;
  WmcPlan(const bdd::Manager& m, bdd::NodeId root);

  double value(const WeightVector& w) const;
  // Returns the value and adds d(value)/dw to `grad` scaled by `scale`.
  double accumulate_gradient(const WeightVector& w, WeightVector& grad, double scale = 1.0) const;

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::uint32_t high, low;  // local indices; 0 = F, 1 = T
    core::NumericTerm weight;
  };
  double forward(const WeightVector& w, std::vector<double>& pr) const;

  std::vector<Entry> entries_;  // entries_[0], [1] are the terminals
  bdd::NodeId root_ = bdd::kFalse;
};

double wmc(const bdd::Manager& m, bdd::NodeId root, const WeightVector& w);

struct WmcGrad {
  double value = 0.0;
  WeightVector grad;
};

WmcGrad wmc_grad(const bdd::Manager& m, bdd::NodeId root, const WeightVector& w);

struct SupportOptions {
  std::size_t budget = 1000000;
};

// Every output bit pattern with a satisfiable indicator, together with that
// indicator. Allocates in the program's manager; callers own the cleanup.
std::vector<std::pair<core::Bits, bdd::NodeId>> support(const CompiledProgram& prog,
                                                        const SupportOptions& opt = {});

struct ExactOptions {
  std::size_t budget = 1000000;
  double min_probability = 1e-15;
};

using BitDistribution = std::vector<std::pair<core::Bits, double>>;

BitDistribution exact_distribution(const CompiledProgram& prog, const WeightVector& w,
                                   const ExactOptions& opt = {});

}  // namespace gentune
