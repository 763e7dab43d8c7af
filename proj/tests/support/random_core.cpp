#include "support/random_core.hpp"

#include <string>
#include <vector>

namespace testsupport {

using namespace gentune::core;

namespace {

class Builder {
 public:
  Builder(std::mt19937_64& rng, std::size_t flips, std::size_t weights)
      : rng_(rng), flips_left_(flips), weights_(weights) {}

  Program p;

  TypePtr random_type(int depth) {
    if (depth <= 0 || chance(0.6)) return Type::boolean();
    return Type::product(random_type(depth - 1), random_type(depth - 1));
  }

  ExprId gen(const TypePtr& t, int depth) {
    if (depth <= 0) return leaf(t);
    int pick = uniform(0, 9);
    if (pick <= 2) {
      // let
      TypePtr bt = random_type(2);
      ExprId bound = gen(bt, depth - 1);
      std::string name = fresh_or_shadow();
      env_.push_back({name, bt});
      ExprId body = gen(t, depth - 1);
      env_.pop_back();
      return p.let(name, bound, body);
    }
    if (pick <= 4) {
      ExprId guard = bool_atom();
      if (guard == kNone) {
        ExprId g = gen(Type::boolean(), depth - 1);
        std::string name = fresh_or_shadow();
        env_.push_back({name, Type::boolean()});
        ExprId a = gen(t, depth - 1);
        ExprId b = gen(t, depth - 1);
        ExprId ite = p.ite(p.var(name), a, b);
        env_.pop_back();
        return p.let(name, g, ite);
      }
      ExprId a = gen(t, depth - 1);
      ExprId b = gen(t, depth - 1);
      return p.ite(guard, a, b);
    }
    if (!t->is_bool() && pick <= 6) {
      ExprId a = gen(t->left, depth - 1);
      return p.pair(a, gen(t->right, depth - 1));
    }
    return leaf(t);
  }

 private:
  static constexpr ExprId kNone = ~ExprId{0};

  bool chance(double q) { return std::bernoulli_distribution(q)(rng_); }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string fresh_or_shadow() {
    if (!env_.empty() && chance(0.15)) return env_[uniform(0, static_cast<int>(env_.size()) - 1)].name;
    return "x" + std::to_string(counter_++);
  }

  // Innermost binding of each visible name.
  const TypePtr* lookup(const std::string& name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->name == name) return &it->type;
    return nullptr;
  }

  ExprId bool_atom() {
    std::vector<std::string> cands;
    for (const auto& b : env_)
      if (*lookup(b.name) == b.type && b.type->is_bool()) cands.push_back(b.name);
    if (cands.empty()) return chance(0.2) ? p.constant(Value::boolean(chance(0.5))) : kNone;
    return p.var(cands[uniform(0, static_cast<int>(cands.size()) - 1)]);
  }

  ExprId leaf(const TypePtr& t) {
    if (t->is_bool()) {
      int pick = uniform(0, 9);
      if (pick <= 5 && flips_left_ > 0) {
        --flips_left_;
        if (weights_ > 0 && chance(0.7))
          return p.flip(NumericTerm::symbol(static_cast<gentune::WeightId>(uniform(0, static_cast<int>(weights_) - 1))));
        return p.flip(NumericTerm::constant_of(std::uniform_real_distribution<double>(0.0, 1.0)(rng_)));
      }
      if (pick <= 8) {
        std::vector<ExprId> cands;
        for (const auto& b : env_) {
          if (*lookup(b.name) != b.type) continue;
          if (b.type->is_bool()) cands.push_back(p.var(b.name));
          else if (b.type->left->is_bool()) cands.push_back(p.fst(p.var(b.name)));
          else if (b.type->right->is_bool()) cands.push_back(p.snd(p.var(b.name)));
        }
        if (!cands.empty()) return cands[uniform(0, static_cast<int>(cands.size()) - 1)];
      }
      return p.constant(Value::boolean(chance(0.5)));
    }
    for (const auto& b : env_)
      if (*lookup(b.name) == b.type && same_type(*b.type, *t) && chance(0.5)) return p.var(b.name);
    ExprId a = leaf(t->left);
    return p.pair(a, leaf(t->right));
  }

  struct Binding {
    std::string name;
    TypePtr type;
  };

  std::mt19937_64& rng_;
  std::size_t flips_left_;
  std::size_t weights_;
  std::vector<Binding> env_;
  int counter_ = 0;
};

}  // namespace

RandomProgram random_core_program(std::mt19937_64& rng, std::size_t max_flips,
                                  std::size_t weight_count) {
  Builder b(rng, max_flips, weight_count);
  TypePtr t = b.random_type(2);
  RandomProgram out;
  out.root = b.gen(t, 6);
  out.program = std::move(b.p);
  out.weight_count = weight_count;
  return out;
}

gentune::WeightVector random_weights(std::mt19937_64& rng, std::size_t n) {
  gentune::WeightVector w(static_cast<Eigen::Index>(n));
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (std::size_t i = 0; i < n; ++i) w[static_cast<Eigen::Index>(i)] = u(rng);
  return w;
}

}  // namespace testsupport
