#include "gentune/compiler.hpp"

#include "gentune/core/semantics.hpp"

namespace gentune {

namespace {

using bdd::NodeId;
using core::ExprId;
using core::Node;
using core::Op;

struct Compiled {
  core::TypePtr type;
  std::vector<NodeId> bits;
};

class Compiler {
 public:
  Compiler(const core::Program& p, bdd::Manager& m, const CompileOptions& opt)
      : p_(p), m_(m), opt_(opt) {}

  Compiled run(ExprId e) {
    std::vector<core::VarId> bound;
    while (p_.node(e).op == Op::Let) {
      const Node& n = p_.node(e);
      bind(n.var, run(n.a));
      bound.push_back(n.var);
      e = n.b;
    }
    Compiled out = non_let(e);
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) env_[*it].pop_back();
    return out;
  }

 private:
  void bind(core::VarId v, Compiled c) {
    if (v >= env_.size()) env_.resize(v + 1);
    env_[v].push_back(std::move(c));
  }

  Compiled non_let(ExprId e) {
    const Node& n = p_.node(e);
    switch (n.op) {
      case Op::Var: {
        if (n.var >= env_.size() || env_[n.var].empty())
          throw CompileError("unbound variable " + p_.var_name(n.var));
        return env_[n.var].back();
      }
      case Op::Const: {
        const core::Value& v = p_.constant_value(n);
        Compiled c{v.type, {}};
        for (bool b : v.bits) c.bits.push_back(b ? bdd::kTrue : bdd::kFalse);
        return c;
      }
      case Op::Fst:
      case Op::Snd: {
        Compiled a = run(n.a);
        if (a.type->is_bool()) throw CompileError("projection of a Bool");
        auto split = static_cast<std::ptrdiff_t>(a.type->left->width());
        if (n.op == Op::Fst) return {a.type->left, {a.bits.begin(), a.bits.begin() + split}};
        return {a.type->right, {a.bits.begin() + split, a.bits.end()}};
      }
      case Op::Pair: {
        Compiled a = run(n.a);
        Compiled b = run(n.b);
        a.bits.insert(a.bits.end(), b.bits.begin(), b.bits.end());
        return {core::Type::product(a.type, b.type), std::move(a.bits)};
      }
      case Op::If: {
        Compiled g = run(n.a);
        if (!g.type->is_bool()) throw CompileError("if guard is not Bool");
        NodeId gb = g.bits[0];
        if (gb == bdd::kTrue) return run(n.b);
        if (gb == bdd::kFalse) return run(n.c);
        Compiled t = run(n.b);
        Compiled f = run(n.c);
        if (!core::same_type(*t.type, *f.type)) throw CompileError("if branches differ in type");
        for (std::size_t i = 0; i < t.bits.size(); ++i) t.bits[i] = m_.ite(gb, t.bits[i], f.bits[i]);
        return t;
      }
      case Op::Flip: {
        if (++flips_ > opt_.flip_budget)
          throw CompileError("flip count exceeds compilation budget of " +
                             std::to_string(opt_.flip_budget));
        return {core::Type::boolean(), {m_.fresh_var(n.weight)}};
      }
      case Op::Let: break;
    }
    return run(e);
  }

  const core::Program& p_;
  bdd::Manager& m_;
  const CompileOptions& opt_;
  std::vector<std::vector<Compiled>> env_;
  std::size_t flips_ = 0;
};

}  // namespace

CompiledProgram compile(const core::Program& p, ExprId e, std::shared_ptr<bdd::Manager> mgr,
                        const CompileOptions& opt) {
  if (!mgr) mgr = std::make_shared<bdd::Manager>();
  Compiler c(p, *mgr, opt);
  Compiled out = c.run(e);
  CompiledProgram prog;
  prog.mgr = std::move(mgr);
  prog.roots = std::move(out.bits);
  prog.type = out.type;
  prog.weights = core::collect_weights(p, e);
  return prog;
}

NodeId indicator(const CompiledProgram& prog, const core::Bits& bits) {
  if (bits.size() != prog.roots.size())
    throw std::invalid_argument("indicator: value has " + std::to_string(bits.size()) +
                                " bits, program has " + std::to_string(prog.roots.size()));
  bdd::Manager& m = *prog.mgr;
  NodeId acc = bdd::kTrue;
  // Conjoin from the last bit so partial results stay small when later roots
  // depend on later levels.
  for (std::size_t i = bits.size(); i-- > 0;) {
    NodeId lit = bits[i] ? prog.roots[i] : m.neg(prog.roots[i]);
    acc = m.conj(lit, acc);
    if (acc == bdd::kFalse) break;
  }
  return acc;
}

NodeId IndicatorCache::get(const core::Bits& bits) {
  auto it = cache_.find(bits);
  if (it != cache_.end()) return it->second;
  NodeId r = indicator(*prog_, bits);
  cache_.emplace(bits, r);
  return r;
}

void IndicatorCache::release() {
  cache_.clear();
  prog_->mgr->rollback(mark_);
}

}  // namespace gentune
