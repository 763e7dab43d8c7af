#include "gentune/core/semantics.hpp"

#include <unordered_set>

namespace gentune::core {

namespace {

template <class T>
class ScopedEnv {
 public:
  void push(VarId v, T val) {
    if (v >= slots_.size()) slots_.resize(v + 1);
    slots_[v].push_back(std::move(val));
  }
  void pop(VarId v) { slots_[v].pop_back(); }
  const T* find(VarId v) const {
    if (v >= slots_.size() || slots_[v].empty()) return nullptr;
    return &slots_[v].back();
  }

 private:
  std::vector<std::vector<T>> slots_;
};

std::string describe(const Program& p, ExprId e) {
  auto s = p.to_string(e);
  if (s.size() > 80) s = s.substr(0, 77) + "...";
  return s;
}

class Checker {
 public:
  explicit Checker(const Program& p) : p_(p) {}

  ScopedEnv<TypePtr> env;

  TypePtr check(ExprId e) {
    std::vector<VarId> bound;
    while (p_.node(e).op == Op::Let) {
      const Node& n = p_.node(e);
      env.push(n.var, check(n.a));
      bound.push_back(n.var);
      e = n.b;
    }
    TypePtr t = check_non_let(e);
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) env.pop(*it);
    return t;
  }

 private:
  TypePtr atomic(ExprId e, const char* role) {
    if (!p_.is_atomic(e))
      throw TypeError(std::string(role) + " must be a variable or value: " + describe(p_, e));
    return check(e);
  }

  TypePtr check_non_let(ExprId e) {
    const Node& n = p_.node(e);
    switch (n.op) {
      case Op::Var: {
        const TypePtr* t = env.find(n.var);
        if (!t) throw TypeError("unbound variable " + p_.var_name(n.var));
        return *t;
      }
      case Op::Const: return p_.constant_value(n).type;
      case Op::Fst:
      case Op::Snd: {
        TypePtr t = atomic(n.a, "projection operand");
        if (t->is_bool())
          throw TypeError("projection of a Bool-typed expression: " + describe(p_, e));
        return n.op == Op::Fst ? t->left : t->right;
      }
      case Op::Pair: return Type::product(check(n.a), check(n.b));
      case Op::If: {
        TypePtr g = atomic(n.a, "if guard");
        if (!g->is_bool()) throw TypeError("if guard is not Bool: " + describe(p_, e));
        TypePtr a = check(n.b);
        TypePtr b = check(n.c);
        if (!same_type(*a, *b))
          throw TypeError("if branches have different types (" + to_string(*a) + " vs " +
                          to_string(*b) + "): " + describe(p_, e));
        return a;
      }
      case Op::Flip: return Type::boolean();
      case Op::Let: break;
    }
    return check(e);
  }

  const Program& p_;
};

class Enumerator {
 public:
  Enumerator(const Program& p, const WeightVector& w) : p_(p), w_(w) {}

  Distribution eval(ExprId e) {
    const Node& n = p_.node(e);
    switch (n.op) {
      case Op::Var: {
        const Value* v = env_.find(n.var);
        if (!v) throw TypeError("unbound variable " + p_.var_name(n.var));
        return dirac(*v);
      }
      case Op::Const: return dirac(p_.constant_value(n));
      case Op::Fst:
      case Op::Snd: {
        Distribution out;
        for (const auto& [v, pr] : eval(n.a)) out[n.op == Op::Fst ? v.fst() : v.snd()] += pr;
        return out;
      }
      case Op::Pair: {
        Distribution a = eval(n.a);
        Distribution b = eval(n.b);
        Distribution out;
        for (const auto& [va, pa] : a)
          for (const auto& [vb, pb] : b) out[Value::pair(va, vb)] += pa * pb;
        return out;
      }
      case Op::Let: {
        Distribution out;
        for (const auto& [v, pr] : eval(n.a)) {
          env_.push(n.var, v);
          for (const auto& [vb, pb] : eval(n.b)) out[vb] += pr * pb;
          env_.pop(n.var);
        }
        return out;
      }
      case Op::If: {
        Distribution out;
        for (const auto& [g, pg] : eval(n.a)) {
          for (const auto& [v, pv] : eval(g.truth() ? n.b : n.c)) out[v] += pg * pv;
        }
        return out;
      }
      case Op::Flip: {
        double q = weight(n.weight);
        Distribution out;
        out[Value::boolean(true)] += q;
        out[Value::boolean(false)] += 1.0 - q;
        return out;
      }
    }
    return {};
  }

 private:
  static Distribution dirac(const Value& v) {
    Distribution d;
    d.emplace(v, 1.0);
    return d;
  }

  double weight(const NumericTerm& q) const {
    if (!q.symbolic) return q.constant;
    if (q.weight >= w_.size())
      throw std::invalid_argument("unbound symbolic weight #" + std::to_string(q.weight));
    double v = w_[q.weight];
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("weight #" + std::to_string(q.weight) + " outside [0,1]");
    return v;
  }

  const Program& p_;
  const WeightVector& w_;
  ScopedEnv<Value> env_;
};

template <class F>
void preorder(const Program& p, ExprId root, F&& visit) {
  std::vector<ExprId> stack{root};
  std::unordered_set<ExprId> seen;
  while (!stack.empty()) {
    ExprId e = stack.back();
    stack.pop_back();
    if (!seen.insert(e).second) continue;
    const Node& n = p.node(e);
    visit(n);
    switch (n.op) {
      case Op::Fst:
      case Op::Snd: stack.push_back(n.a); break;
      case Op::Pair:
      case Op::Let:
        stack.push_back(n.b);
        stack.push_back(n.a);
        break;
      case Op::If:
        stack.push_back(n.c);
        stack.push_back(n.b);
        stack.push_back(n.a);
        break;
      default: break;
    }
  }
}

}  // namespace

TypePtr typecheck(const Program& p, ExprId e, const TypeEnv& env) {
  Checker c(p);
  for (const auto& [name, t] : env) {
    // Names never seen by the program cannot be referenced by it.
    for (VarId v = 0; v < p.var_count(); ++v)
      if (p.var_name(v) == name) c.env.push(v, t);
  }
  return c.check(e);
}

Distribution enumerate_semantics(const Program& p, ExprId e, const WeightVector& w,
                                 const EnumerateOptions& opt) {
  std::size_t flips = count_flips(p, e);
  if (flips > opt.flip_budget)
    throw BudgetError("enumeration oracle refuses " + std::to_string(flips) +
                      " flips (budget " + std::to_string(opt.flip_budget) + ")");
  typecheck(p, e);
  Enumerator en(p, w);
  return en.eval(e);
}

std::vector<WeightId> collect_weights(const Program& p, ExprId e) {
  std::vector<WeightId> out;
  std::unordered_set<WeightId> seen;
  preorder(p, e, [&](const Node& n) {
    if (n.op == Op::Flip && n.weight.symbolic && seen.insert(n.weight.weight).second)
      out.push_back(n.weight.weight);
  });
  return out;
}

std::size_t count_flips(const Program& p, ExprId e) {
  std::size_t n = 0;
  preorder(p, e, [&](const Node& node) { n += node.op == Op::Flip; });
  return n;
}

ExprId substitute_weights(Program& p, ExprId e, const WeightVector& w) {
  const Node n = p.node(e);
  switch (n.op) {
    case Op::Var:
    case Op::Const: return e;
    case Op::Flip:
      return n.weight.symbolic ? p.flip(NumericTerm::constant_of(w[n.weight.weight])) : e;
    case Op::Fst: return p.fst(substitute_weights(p, n.a, w));
    case Op::Snd: return p.snd(substitute_weights(p, n.a, w));
    case Op::Pair: {
      ExprId a = substitute_weights(p, n.a, w);
      return p.pair(a, substitute_weights(p, n.b, w));
    }
    case Op::Let: {
      ExprId a = substitute_weights(p, n.a, w);
      return p.let(n.var, a, substitute_weights(p, n.b, w));
    }
    case Op::If: {
      ExprId b = substitute_weights(p, n.b, w);
      ExprId c = substitute_weights(p, n.c, w);
      return p.ite(n.a, b, c);
    }
  }
  return e;
}

}  // namespace gentune::core
