#include "gentune/inference.hpp"

#include <string>
#include <unordered_map>

namespace gentune {

using bdd::NodeId;

namespace {
double level_value(const core::NumericTerm& q, const WeightVector& w) {
  double v;
  if (q.symbolic) {
    if (q.weight >= w.size())
      throw std::invalid_argument("weight assignment does not cover weight #" + std::to_string(q.weight));
    v = w[q.weight];
  } else {
    v = q.constant;
  }
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("weight value outside [0,1]");
  return v;
}
}  // namespace

WmcPlan::WmcPlan(const bdd::Manager& m, NodeId root) : root_(root) {
  entries_.push_back({0, 0, {}});
  entries_.push_back({1, 1, {}});
  if (bdd::Manager::is_terminal(root)) return;
  std::vector<NodeId> nodes = m.reachable(root);
  std::unordered_map<NodeId, std::uint32_t> local;
  local.reserve(nodes.size() * 2);
  local[bdd::kFalse] = 0;
  local[bdd::kTrue] = 1;
  entries_.reserve(nodes.size() + 2);
  for (NodeId n : nodes) {
    const bdd::Node& nd = m.node(n);
    entries_.push_back({local.at(nd.high), local.at(nd.low), m.level_weight(nd.level)});
    local[n] = static_cast<std::uint32_t>(entries_.size() - 1);
  }
}

double WmcPlan::forward(const WeightVector& w, std::vector<double>& pr) const {
  pr.assign(entries_.size(), 0.0);
  pr[1] = 1.0;
  if (root_ == bdd::kTrue) return 1.0;
  if (root_ == bdd::kFalse) return 0.0;
  for (std::size_t i = 2; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    double q = level_value(e.weight, w);
    pr[i] = q * pr[e.high] + (1.0 - q) * pr[e.low];
  }
  return pr.back();
}

double WmcPlan::value(const WeightVector& w) const {
  std::vector<double> pr;
  return forward(w, pr);
}

double WmcPlan::accumulate_gradient(const WeightVector& w, WeightVector& grad, double scale) const {
  std::vector<double> pr;
  double v = forward(w, pr);
  if (bdd::Manager::is_terminal(root_)) return v;
  std::vector<double> adj(entries_.size(), 0.0);
  adj.back() = scale;
  for (std::size_t i = entries_.size(); i-- > 2;) {
    const Entry& e = entries_[i];
    double a = adj[i];
    if (a == 0.0) continue;
    double q = level_value(e.weight, w);
    if (e.weight.symbolic) grad[e.weight.weight] += a * (pr[e.high] - pr[e.low]);
    adj[e.high] += a * q;
    adj[e.low] += a * (1.0 - q);
  }
  return v;
}

double wmc(const bdd::Manager& m, NodeId root, const WeightVector& w) {
  return WmcPlan(m, root).value(w);
}

WmcGrad wmc_grad(const bdd::Manager& m, NodeId root, const WeightVector& w) {
  WmcGrad out;
  out.grad = WeightVector::Zero(w.size());
  out.value = WmcPlan(m, root).accumulate_gradient(w, out.grad);
  return out;
}

namespace {
struct SupportWalk {
  const CompiledProgram& prog;
  std::size_t budget;
  std::vector<std::pair<core::Bits, NodeId>> out;
  core::Bits bits;

  void go(std::size_t i, NodeId acc) {
    if (i == prog.roots.size()) {
      if (out.size() >= budget)
        throw SupportBudgetError("support exceeds budget of " + std::to_string(budget) + " values");
      out.emplace_back(bits, acc);
      return;
    }
    bdd::Manager& m = *prog.mgr;
    NodeId r = prog.roots[i];
    for (bool b : {false, true}) {
      NodeId next = m.conj(acc, b ? r : m.neg(r));
      if (next == bdd::kFalse) continue;
      bits.push_back(b);
      go(i + 1, next);
      bits.pop_back();
    }
  }
};
}  // namespace

std::vector<std::pair<core::Bits, NodeId>> support(const CompiledProgram& prog,
                                                   const SupportOptions& opt) {
  SupportWalk walk{prog, opt.budget, {}, {}};
  walk.go(0, bdd::kTrue);
  return std::move(walk.out);
}

BitDistribution exact_distribution(const CompiledProgram& prog, const WeightVector& w,
                                   const ExactOptions& opt) {
  std::size_t mark = prog.mgr->mark();
  BitDistribution out;
  try {
    for (auto& [bits, node] : support(prog, {opt.budget})) {
      double p = wmc(*prog.mgr, node, w);
      if (p >= opt.min_probability) out.emplace_back(std::move(bits), p);
    }
  } catch (...) {
    prog.mgr->rollback(mark);
    throw;
  }
  prog.mgr->rollback(mark);
  return out;
}

}  // namespace gentune
