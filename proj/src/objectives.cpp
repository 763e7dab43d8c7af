#include "gentune/objectives.hpp"

#include "gentune/sampler.hpp"

#include <cmath>
#include <unordered_map>

namespace gentune {

namespace {

double floored_log(double p, std::size_t& floored) {
  if (p < kLogFloor) {
    ++floored;
    return std::log(kLogFloor);
  }
  return std::log(p);
}

CompiledSurface& target_of(Model& m, const std::string& feature) {
  return feature.empty() ? m.generator() : m.composite(feature);
}

WmcPlan plan_for(CompiledSurface& c, const Value& v) {
  auto bits = c.shape.encode(v);
  if (!bits) return WmcPlan(*c.prog.mgr, bdd::kFalse);
  if (c.shape.width() == 0) return WmcPlan(*c.prog.mgr, bdd::kTrue);
  return WmcPlan(*c.prog.mgr, indicator(c.prog, *bits));
}

// RAII rollback for per-batch indicators.
struct CacheGuard {
  IndicatorCache& cache;
  ~CacheGuard() { cache.release(); }
};

}  // namespace

std::vector<ValueTerm> support_terms(CompiledSurface& c, std::size_t budget) {
  std::vector<ValueTerm> out;
  if (c.shape.width() == 0) {
    out.push_back({c.shape.decode({}), WmcPlan(*c.prog.mgr, bdd::kTrue)});
    return out;
  }
  for (auto& [bits, node] : support(c.prog, {budget})) out.push_back({c.shape.decode(bits), WmcPlan(*c.prog.mgr, node)});
  return out;
}

TargetKL::TargetKL(Model& m, Distribution target, const std::string& feature) {
  double total = 0;
  for (const auto& [v, p] : target) {
    if (p < 0) throw ObjectiveError("negative target probability for " + v.str());
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ObjectiveError("target probabilities sum to " + std::to_string(total));
  CompiledSurface& c = target_of(m, feature);
  for (const auto& [v, p] : target) {
    if (p == 0) continue;
    WmcPlan plan = plan_for(c, v);
    if (plan.size() == 2 && plan.value(WeightVector::Zero(0)) == 0.0)
      throw ObjectiveError("target value " + v.str() + " is not in the support of " +
                           (feature.empty() ? std::string("the generator") : feature));
    terms_.emplace_back(p, std::move(plan));
    values_.push_back(v);
  }
}

ObjectiveValue TargetKL::evaluate(const WeightVector& w, std::uint64_t) {
  ObjectiveValue out;
  out.grad = WeightVector::Zero(w.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& [t, plan] = terms_[i];
    double p = plan.value(w);
    if (!(p > 0))
      throw ObjectiveError("target value " + values_[i].str() + " has zero probability under the current weights");
    out.value += t * (floored_log(p, out.floored) - std::log(t));
    plan.accumulate_gradient(w, out.grad, t / p);
  }
  return out;
}

EntropyExact::EntropyExact(Model& m, const std::string& validity, const std::string& feature, std::size_t budget)
    : spec_(!validity.empty()), feature_(!feature.empty()) {
  std::unordered_map<core::Bits, int, core::BitsHash> feature_index;
  CompiledSurface* fc = feature_ ? &m.composite(feature) : nullptr;
  for (ValueTerm& t : support_terms(m.generator(), budget)) {
    if (!check_validity(m.program(), t.value, validity)) continue;
    int fi = -1;
    if (fc) {
      Value y = apply_feature(m.program(), t.value, feature);
      auto bits = fc->shape.encode(y);
      if (!bits) throw ObjectiveError("feature value " + y.str() + " falls outside the compiled feature shape");
      auto it = feature_index.find(*bits);
      if (it == feature_index.end()) {
        features_.push_back(plan_for(*fc, y));
        it = feature_index.emplace(*bits, static_cast<int>(features_.size() - 1)).first;
      }
      fi = it->second;
    }
    terms_.push_back({std::move(t.plan), fi});
  }
}

std::string EntropyExact::name() const {
  if (feature_) return "feature_spec_entropy_exact";
  return spec_ ? "spec_entropy_exact" : "entropy_exact";
}

ObjectiveValue EntropyExact::evaluate(const WeightVector& w, std::uint64_t) {
  ObjectiveValue out;
  out.grad = WeightVector::Zero(w.size());
  std::vector<double> q(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) q[i] = features_[i].value(w);
  WeightVector qgrad = WeightVector::Zero(w.size());
  std::vector<double> qscale(features_.size(), 0.0);
  for (const Term& t : terms_) {
    double p = t.plan.value(w);
    if (p == 0.0) continue;
    if (t.feature_index < 0) {
      double lp = floored_log(p, out.floored);
      out.value -= p * lp;
      t.plan.accumulate_gradient(w, out.grad, -(lp + 1.0));
    } else {
      double qi = q[static_cast<std::size_t>(t.feature_index)];
      double lq = floored_log(qi, out.floored);
      out.value -= p * lq;
      t.plan.accumulate_gradient(w, out.grad, -lq);
      qscale[static_cast<std::size_t>(t.feature_index)] -= p / std::max(qi, kLogFloor);
    }
  }
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (qscale[i] != 0.0) features_[i].accumulate_gradient(w, out.grad, qscale[i]);
  return out;
}

Specification::Specification(Model& m, const std::string& validity) {
  CompiledSurface& c = m.composite(validity);
  if (c.shape.kind != surface::Shape::Kind::Bool) throw ObjectiveError("validity predicate " + validity + " must return Bool");
  plan_ = WmcPlan(*c.prog.mgr, c.prog.roots.at(0));
}

ObjectiveValue Specification::evaluate(const WeightVector& w, std::uint64_t) {
  ObjectiveValue out;
  out.grad = WeightVector::Zero(w.size());
  double p = plan_.value(w);
  if (!(p > 0)) throw ObjectiveError("validity probability is zero under the current weights");
  out.value = std::log(p);
  plan_.accumulate_gradient(w, out.grad, 1.0 / p);
  return out;
}

EntropyReinforce::EntropyReinforce(Model& m, std::size_t batch, const std::string& validity,
                                   const std::string& feature, bool corrected)
    : m_(m), batch_(batch), validity_(validity), feature_(feature), corrected_(corrected) {
  if (batch_ == 0) throw ObjectiveError("samples per batch must be at least 1");
  target_of(m_, feature_);  // compile up front so the weight table is complete
}

std::string EntropyReinforce::name() const {
  if (!feature_.empty()) return "feature_spec_entropy_reinforce";
  return validity_.empty() ? "entropy_reinforce" : "spec_entropy_reinforce";
}

ObjectiveValue EntropyReinforce::evaluate(const WeightVector& w, std::uint64_t seed) {
  ObjectiveValue out;
  out.grad = WeightVector::Zero(w.size());
  out.batch = batch_;
  CompiledSurface& c = target_of(m_, feature_);
  IndicatorCache cache(c.prog);
  CacheGuard guard{cache};
  struct Scored {
    double p;
    WeightVector grad;
  };
  std::unordered_map<core::Bits, Scored, core::BitsHash> scored;
  for (std::size_t i = 0; i < batch_; ++i) {
    Value x = sample(m_.program(), m_.table(), w, seed, i);
    if (!check_validity(m_.program(), x, validity_)) continue;
    ++out.kept;
    Value y = apply_feature(m_.program(), x, feature_);
    auto bits = c.shape.encode(y);
    if (!bits) throw ObjectiveError("sampled value " + y.str() + " falls outside the compiled shape");
    auto it = scored.find(*bits);
    if (it == scored.end()) {
      Scored s{0.0, WeightVector::Zero(w.size())};
      if (c.shape.width() == 0) {
        s.p = 1.0;
      } else {
        WmcPlan plan(*c.prog.mgr, cache.get(*bits));
        s.p = plan.accumulate_gradient(w, s.grad);
      }
      if (!(s.p > 0)) throw ObjectiveError("sampled value " + y.str() + " has zero exact probability");
      s.grad /= s.p;  // score: grad log p
      it = scored.emplace(*bits, std::move(s)).first;
    }
    const Scored& s = it->second;
    double lp = floored_log(s.p, out.floored);
    out.value -= lp;
    out.grad -= lp * s.grad;
    if (corrected_) out.grad -= s.grad;
  }
  double n = static_cast<double>(batch_);
  out.value /= n;
  out.grad /= n;
  out.empty_batch = out.kept == 0;
  return out;
}

}  // namespace gentune
