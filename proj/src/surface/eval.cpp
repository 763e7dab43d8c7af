#include "gentune/surface/eval.hpp"

#include "gentune/surface/naming.hpp"

#include <algorithm>

namespace gentune::surface {

bool SequenceOracle::flip(double) {
  if (pos_ >= outcomes_.size()) throw OracleExhausted();
  return outcomes_[pos_++];
}

namespace {

class Interpreter {
 public:
  Interpreter(const Program& p, FlipOracle& oracle, const EvalContext& ctx) : p_(p), oracle_(oracle), ctx_(ctx) {}

  void bind(const std::string& name, Value v) { env_.emplace_back(name, std::move(v)); }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::BoolLit: return Value::boolean(e.b);
      case Expr::Kind::NatLit: return Value::nat(e.n);
      case Expr::Kind::Var: return lookup(e.name, e.loc);
      case Expr::Kind::Tuple: {
        std::vector<Value> ps;
        for (const auto& a : e.args) ps.push_back(eval(*a));
        return Value::tuple(std::move(ps));
      }
      case Expr::Kind::Get: {
        Value t = eval(*e.args[0]);
        if (t.kind != Value::Kind::Tuple) fail(e, "get applied to a non-tuple");
        if (e.n >= t.args.size()) fail(e, "tuple index out of range");
        return t.args[e.n];
      }
      case Expr::Kind::Ctor: return ctor(e);
      case Expr::Kind::Call: return call(e);
      case Expr::Kind::If: {
        Value c = eval(*e.args[0]);
        if (c.kind != Value::Kind::Bool) fail(*e.args[0], "if condition is not Bool");
        return eval(*e.args[c.b ? 1 : 2]);
      }
      case Expr::Kind::Let: {
        std::size_t mark = env_.size();
        for (const auto& [name, rhs] : e.binds) {
          Value v = eval(*rhs);
          if (name != "_") bind(name, std::move(v));
        }
        Value out = eval(*e.args[0]);
        env_.resize(mark);
        return out;
      }
      case Expr::Kind::Match: return match(e);
      case Expr::Kind::Flip: return Value::boolean(draw(flip_probability(e.weights[0])));
      case Expr::Kind::Freq: return freq(e);
      case Expr::Kind::Backtrack: return backtrack(e);
      case Expr::Kind::FreqDep: return freqdep(e);
      case Expr::Kind::Split: return eval(*e.args[0]);
      case Expr::Kind::Prim: return prim(e);
    }
    fail(e, "unhandled expression");
  }

 private:
  [[noreturn]] void fail(const Expr& e, const std::string& msg) const { throw SurfaceError(e.loc, msg); }

  bool draw(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return oracle_.flip(p);
  }

  double weight_named(const std::string& name, double init) const {
    if (ctx_.touched) ctx_.touched->insert(name);
    if (ctx_.table && ctx_.weights) {
      if (auto id = ctx_.table->find(name); id && *id < ctx_.weights->size()) return (*ctx_.weights)[*id];
    }
    return init;
  }

  Value lookup(const std::string& name, const Loc& loc) {
    for (std::size_t i = env_.size(); i-- > frame_base_;)
      if (env_[i].first == name) return env_[i].second;
    if (name == "main" && p_.main) {
      if (!main_) {
        std::size_t saved = frame_base_;
        frame_base_ = env_.size();
        main_ = eval(*p_.main);
        frame_base_ = saved;
      }
      return *main_;
    }
    throw SurfaceError(loc, "unbound variable " + name);
  }

  Value ctor(const Expr& e) {
    const CtorDecl& decl = e.adt->ctors[e.ctor];
    std::vector<Value> fs;
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      Value v = eval(*e.args[i]);
      const FieldType& ft = decl.fields[i];
      switch (ft.kind) {
        case FieldType::Kind::Bool:
          if (v.kind != Value::Kind::Bool) fail(*e.args[i], decl.name + " field " + std::to_string(i) + " expects Bool");
          break;
        case FieldType::Kind::Nat:
          if (v.kind != Value::Kind::Nat) fail(*e.args[i], decl.name + " field " + std::to_string(i) + " expects Nat");
          if (ft.width < 64) v.n &= (std::uint64_t{1} << ft.width) - 1;
          break;
        case FieldType::Kind::Adt:
          if (v.kind != Value::Kind::Ctor || v.adt->name != ft.adt)
            fail(*e.args[i], decl.name + " field " + std::to_string(i) + " expects " + ft.adt);
          break;
        case FieldType::Kind::Any: break;
      }
      fs.push_back(std::move(v));
    }
    return Value::make(e.adt, e.ctor, std::move(fs));
  }

  Value call(const Expr& e) {
    const Function& f = p_.functions.at(e.name);
    std::vector<Value> args;
    for (const auto& a : e.args) args.push_back(eval(*a));
    if (++depth_ > ctx_.max_call_depth)
      fail(e, "unbounded recursion: call depth exceeds " + std::to_string(ctx_.max_call_depth));
    std::size_t saved = frame_base_;
    std::size_t mark = env_.size();
    frame_base_ = mark;
    for (std::size_t i = 0; i < args.size(); ++i)
      if (f.params[i] != "_") bind(f.params[i], std::move(args[i]));
    Value out = eval(*f.body);
    env_.resize(mark);
    frame_base_ = saved;
    --depth_;
    return out;
  }

  bool matches(const Pattern& pt, const Value& v, const Expr& where) {
    switch (pt.kind) {
      case Pattern::Kind::Wild:
      case Pattern::Kind::Var: return true;
      case Pattern::Kind::NatLit:
        if (v.kind != Value::Kind::Nat) fail(where, "nat pattern against a non-Nat");
        return v.n == pt.n;
      case Pattern::Kind::Succ:
        if (v.kind != Value::Kind::Nat) fail(where, "(S x) pattern against a non-Nat");
        return v.n > 0;
      case Pattern::Kind::BoolLit:
        if (v.kind != Value::Kind::Bool) fail(where, "boolean pattern against a non-Bool");
        return v.b == pt.b;
      case Pattern::Kind::Ctor:
        if (v.kind != Value::Kind::Ctor || v.adt->name != pt.adt->name)
          fail(where, "constructor pattern " + pt.name + " against another type");
        return v.ctor == pt.ctor;
      case Pattern::Kind::Tuple:
        if (v.kind != Value::Kind::Tuple || v.args.size() != pt.binders.size())
          fail(where, "tuple pattern arity mismatch");
        return true;
    }
    return false;
  }

  void bind_pattern(const Pattern& pt, const Value& v) {
    switch (pt.kind) {
      case Pattern::Kind::Var: bind(pt.name, v); break;
      case Pattern::Kind::Succ:
        if (pt.name != "_") bind(pt.name, Value::nat(v.n - 1));
        break;
      case Pattern::Kind::Ctor:
      case Pattern::Kind::Tuple:
        for (std::size_t i = 0; i < pt.binders.size(); ++i)
          if (pt.binders[i] != "_") bind(pt.binders[i], v.args[i]);
        break;
      default: break;
    }
  }

  Value match(const Expr& e) {
    Value v = eval(*e.args[0]);
    for (const Arm& arm : e.arms) {
      if (!matches(arm.pat, v, *arm.body)) continue;
      std::size_t mark = env_.size();
      bind_pattern(arm.pat, v);
      Value out = eval(*arm.body);
      env_.resize(mark);
      return out;
    }
    fail(e, "no match arm applies to " + v.str());
  }

  std::uint64_t static_nat(const Expr& e, const char* what) {
    Value v = eval(e);
    if (v.kind != Value::Kind::Nat) fail(e, std::string(what) + " must be a natural number");
    return v.n;
  }

  std::string site_name(const WeightExpr& w) {
    std::vector<Value> idx;
    for (const auto& i : w.indices) idx.push_back(eval(*i));
    return naming::site(w.name, idx);
  }

  double flip_probability(const WeightExpr& w) {
    switch (w.kind) {
      case WeightExpr::Kind::Literal:
        if (w.literal > 1.0) throw SurfaceError(w.loc, "flip probability above 1");
        return w.literal;
      case WeightExpr::Kind::Ratio: {
        auto a = static_nat(*w.num, "ratio numerator");
        auto b = static_nat(*w.den, "ratio denominator");
        if (b == 0 || a > b) throw SurfaceError(w.loc, "ratio must lie in [0,1]");
        return static_cast<double>(a) / static_cast<double>(b);
      }
      case WeightExpr::Kind::Static: {
        auto a = static_nat(*w.num, "flip probability");
        if (a > 1) throw SurfaceError(w.loc, "flip probability above 1");
        return static_cast<double>(a);
      }
      case WeightExpr::Kind::Param: return weight_named(site_name(w), naming::kParamInit);
    }
    return 0.0;
  }

  double branch_weight(const WeightExpr& w) {
    switch (w.kind) {
      case WeightExpr::Kind::Literal: return w.literal;
      case WeightExpr::Kind::Ratio: {
        auto a = static_nat(*w.num, "ratio numerator");
        auto b = static_nat(*w.den, "ratio denominator");
        if (b == 0) throw SurfaceError(w.loc, "ratio with zero denominator");
        return static_cast<double>(a) / static_cast<double>(b);
      }
      case WeightExpr::Kind::Static: return static_cast<double>(static_nat(*w.num, "branch weight"));
      case WeightExpr::Kind::Param:
        throw SurfaceError(w.loc, "symbolic branch weights use the (freq (param ...) e...) form");
    }
    return 0.0;
  }

  // Walks a stick chain; `stick(j)` gives the probability of stopping at j.
  template <class StickFn>
  std::size_t pick(std::size_t n, StickFn stick) {
    for (std::size_t j = 0; j + 1 < n; ++j)
      if (draw(stick(j))) return j;
    return n - 1;
  }

  static double const_stick(const std::vector<double>& w, std::size_t j) {
    double rest = 0;
    for (std::size_t i = j; i < w.size(); ++i) rest += w[i];
    return rest > 0 ? std::clamp(w[j] / rest, 0.0, 1.0) : 0.0;
  }

  Value freq(const Expr& e) {
    std::size_t k = e.args.size();
    if (k == 1) return eval(*e.args[0]);
    std::size_t chosen;
    if (e.site) {
      std::string site = site_name(*e.site);
      chosen = pick(k, [&](std::size_t j) { return weight_named(naming::stick(site, j), naming::stick_init(k, j)); });
    } else {
      std::vector<double> w;
      for (const auto& x : e.weights) w.push_back(branch_weight(x));
      double total = 0;
      for (double x : w) total += x;
      if (!(total > 0)) fail(e, "freq weights sum to zero");
      while (w.size() > 1 && w.back() == 0.0) w.pop_back();
      chosen = pick(w.size(), [&](std::size_t j) { return const_stick(w, j); });
    }
    return eval(*e.args[chosen]);
  }

  Value backtrack(const Expr& e) {
    std::size_t k = e.args.size();
    if (k > ctx_.backtrack_limit)
      fail(e, "backtrack over " + std::to_string(k) + " branches exceeds the expansion bound of " +
                  std::to_string(ctx_.backtrack_limit));
    std::vector<double> w(k, 1.0);
    std::string site;
    if (e.site) site = site_name(*e.site);
    else
      for (std::size_t i = 0; i < k; ++i) w[i] = branch_weight(e.weights[i]);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < k; ++i)
      if (w[i] > 0) members.push_back(i);
    if (members.empty()) fail(e, "backtrack weights sum to zero");
    while (!members.empty()) {
      std::size_t n = members.size();
      std::size_t j;
      if (e.site) {
        j = pick(n, [&](std::size_t s) {
          return weight_named(naming::backtrack_stick(site, members, s), naming::stick_init(n, s));
        });
      } else {
        std::vector<double> ws;
        for (auto i : members) ws.push_back(w[i]);
        j = pick(n, [&](std::size_t s) { return const_stick(ws, s); });
      }
      Value v = eval(*e.args[members[j]]);
      if (v.kind != Value::Kind::Ctor || v.adt->name != "Option")
        fail(*e.args[members[j]], "backtrack branch must produce an Option");
      if (v.ctor == 1) return v;
      members.erase(members.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return Value::make(p_.option(), 0, {});
  }

  Value freqdep(const Expr& e) {
    Value d = eval(*e.args[0]);
    std::size_t k = e.args.size() - 1;
    std::string site = site_name(*e.site);
    std::size_t j =
        pick(k, [&](std::size_t s) { return weight_named(naming::dependent_stick(site, d, s), naming::stick_init(k, s)); });
    return eval(*e.args[j + 1]);
  }

  Value prim(const Expr& e) {
    std::vector<Value> v;
    for (const auto& a : e.args) v.push_back(eval(*a));
    const std::string& op = e.name;
    auto need = [&](Value::Kind k, const char* kn) {
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i].kind != k) fail(*e.args[i], "'" + op + "' expects " + kn + " operands");
    };
    if (op == "and" || op == "or") {
      need(Value::Kind::Bool, "Bool");
      bool acc = op == "and";
      for (const auto& x : v) acc = op == "and" ? (acc && x.b) : (acc || x.b);
      return Value::boolean(acc);
    }
    if (op == "not") {
      need(Value::Kind::Bool, "Bool");
      return Value::boolean(!v[0].b);
    }
    if (op == "=") {
      if (v[0].kind != v[1].kind) fail(e, "cannot compare values of different kinds");
      return Value::boolean(v[0] == v[1]);
    }
    need(Value::Kind::Nat, "Nat");
    std::uint64_t a = v[0].n, b = v[1].n;
    if (op == "<") return Value::boolean(a < b);
    if (op == ">") return Value::boolean(a > b);
    if (op == "<=") return Value::boolean(a <= b);
    if (op == ">=") return Value::boolean(a >= b);
    if (op == "+") return Value::nat(a + b);
    if (op == "-") return Value::nat(a > b ? a - b : 0);
    if (op == "max") return Value::nat(std::max(a, b));
    if (op == "min") return Value::nat(std::min(a, b));
    fail(e, "unknown primitive " + op);
  }

  const Program& p_;
  FlipOracle& oracle_;
  const EvalContext& ctx_;
  std::vector<std::pair<std::string, Value>> env_;
  std::size_t frame_base_ = 0;
  std::size_t depth_ = 0;
  std::optional<Value> main_;
};

}  // namespace

Value eval_concrete(const Program& p, const ExprPtr& entry, FlipOracle& oracle, const EvalContext& ctx,
                    const std::vector<std::pair<std::string, Value>>& bindings) {
  Interpreter in(p, oracle, ctx);
  for (const auto& [n, v] : bindings) in.bind(n, v);
  return in.eval(*entry);
}

Value call_concrete(const Program& p, const std::string& fn, const Value& arg, FlipOracle& oracle,
                    const EvalContext& ctx) {
  auto it = p.functions.find(fn);
  if (it == p.functions.end()) throw std::invalid_argument("unknown function " + fn);
  if (it->second.params.size() != 1) throw std::invalid_argument("function " + fn + " must take exactly one argument");
  Interpreter in(p, oracle, ctx);
  in.bind("__arg", arg);
  Expr call;
  call.kind = Expr::Kind::Call;
  call.name = fn;
  auto var = std::make_shared<Expr>();
  var->kind = Expr::Kind::Var;
  var->name = "__arg";
  call.args.push_back(var);
  return in.eval(call);
}

}  // namespace gentune::surface
