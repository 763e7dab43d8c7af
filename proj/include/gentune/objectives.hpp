#pragma once

#include "gentune/model.hpp"

#include <optional>
#include <string>

namespace gentune {

class ObjectiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObjectiveValue {
  double value = 0.0;
  WeightVector grad;
  std::size_t floored = 0;  // log terms floored at kLogFloor
  std::size_t kept = 0;     // samples that passed the validity check (estimators)
  std::size_t batch = 0;
  bool empty_batch = false;
};

inline constexpr double kLogFloor = 1e-300;

// Objectives are maximized. Stochastic ones draw their batch from `seed`.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual ObjectiveValue evaluate(const WeightVector& w, std::uint64_t seed) = 0;
  virtual bool stochastic() const { return false; }
  virtual std::string name() const = 0;
};

// A value with a frozen WMC plan for its indicator.
struct ValueTerm {
  Value value;
  WmcPlan plan;
};

std::vector<ValueTerm> support_terms(CompiledSurface& c, std::size_t budget = 1000000);

class TargetKL : public Objective {
 public:
  // `feature` names a one-argument function; empty means the identity.
  TargetKL(Model& m, Distribution target, const std::string& feature = "");
  ObjectiveValue evaluate(const WeightVector& w, std::uint64_t seed) override;
  std::string name() const override { return "target_kl"; }

 private:
  std::vector<std::pair<double, WmcPlan>> terms_;  // (target probability, plan)
  std::vector<Value> values_;
};

// Exact entropy family by full support enumeration:
//   no validity, no feature   -> Entropy
//   validity                  -> specification entropy
//   validity and feature      -> feature specification entropy
class EntropyExact : public Objective {
 public:
  EntropyExact(Model& m, const std::string& validity = "", const std::string& feature = "",
               std::size_t budget = 1000000);
  ObjectiveValue evaluate(const WeightVector& w, std::uint64_t seed) override;
  std::string name() const override;

 private:
  struct Term {
    WmcPlan plan;
    int feature_index;  // into features_, or -1 to use the value's own probability
  };
  std::vector<Term> terms_;
  std::vector<WmcPlan> features_;
  bool spec_ = false, feature_ = false;
};

class Specification : public Objective {
 public:
  Specification(Model& m, const std::string& validity);
  ObjectiveValue evaluate(const WeightVector& w, std::uint64_t seed) override;
  std::string name() const override { return "specification"; }

 private:
  WmcPlan plan_;
};

// Score-function estimator of (feature) specification entropy. The default
// gradient is the mean of -phi * log p * grad log p; `corrected` adds the
// -phi * grad log p term that comes from differentiating the expectand.
class EntropyReinforce : public Objective {
 public:
  EntropyReinforce(Model& m, std::size_t batch, const std::string& validity = "", const std::string& feature = "",
                   bool corrected = false);
  ObjectiveValue evaluate(const WeightVector& w, std::uint64_t seed) override;
  bool stochastic() const override { return true; }
  std::string name() const override;

 private:
  Model& m_;
  std::size_t batch_;
  std::string validity_, feature_;
  bool corrected_;
};

}  // namespace gentune
