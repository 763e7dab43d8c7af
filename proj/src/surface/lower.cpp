#include "gentune/surface/lower.hpp"

#include "gentune/surface/naming.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

namespace gentune::surface {

namespace {

using Atom = std::int32_t;
constexpr Atom F = 0;
constexpr Atom T = 1;
inline bool is_static(Atom a) { return a <= T; }

struct Gate {
  bool is_flip;
  core::NumericTerm q;
  Atom a, b, c;
};

struct TripleHash {
  std::size_t operator()(const std::tuple<Atom, Atom, Atom>& t) const noexcept {
    std::uint64_t x = static_cast<std::uint32_t>(std::get<0>(t));
    x = x * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint32_t>(std::get<1>(t));
    x = x * 0xbf58476d1ce4e5b9ULL ^ static_cast<std::uint32_t>(std::get<2>(t));
    return static_cast<std::size_t>(x ^ (x >> 31));
  }
};

// Hash-consed boolean circuit with constant folding.
class Circuit {
 public:
  explicit Circuit(std::size_t budget) : budget_(budget) {}

  std::vector<Gate> gates;

  Atom flip(const core::NumericTerm& q) {
    if (!q.symbolic && q.constant == 0.0) return F;
    if (!q.symbolic && q.constant == 1.0) return T;
    return push({true, q, 0, 0, 0});
  }

  Atom ite(Atom a, Atom b, Atom c) {
    if (a == T) return b;
    if (a == F) return c;
    if (b == c) return b;
    if (b == a) b = T;
    if (c == a) c = F;
    if (Atom na = negation(a); na >= 0) {
      if (b == na) b = F;
      if (c == na) c = T;
      if (b == c) return b;
      // Prefer the positive guard.
      if (a > na) return ite(na, c, b);
    }
    if (b == T && c == F) return a;
    auto key = std::make_tuple(a, b, c);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Atom g = push({false, {}, a, b, c});
    cache_.emplace(key, g);
    if (b == F && c == T) {
      neg_.resize(std::max<std::size_t>(neg_.size(), static_cast<std::size_t>(g) + 1), -1);
      neg_[static_cast<std::size_t>(a)] = g;
      neg_[static_cast<std::size_t>(g)] = a;
    }
    return g;
  }

  Atom neg(Atom a) {
    if (a == T) return F;
    if (a == F) return T;
    if (Atom na = negation(a); na >= 0) return na;
    return ite(a, F, T);
  }
  Atom conj(Atom a, Atom b) { return ite(a, b, F); }
  Atom disj(Atom a, Atom b) { return ite(a, T, b); }
  Atom exclusive(Atom a, Atom b) { return ite(a, neg(b), b); }
  Atom same(Atom a, Atom b) { return ite(a, b, neg(b)); }

 private:
  Atom negation(Atom a) const {
    auto i = static_cast<std::size_t>(a);
    return i < neg_.size() ? neg_[i] : -1;
  }

  Atom push(const Gate& g) {
    if (gates.size() >= budget_) throw std::length_error("lowering exceeded the gate budget");
    gates.push_back(g);
    auto id = static_cast<Atom>(gates.size() + 1);
    if (neg_.size() <= static_cast<std::size_t>(id)) neg_.resize(static_cast<std::size_t>(id) + 1, -1);
    return id;
  }

  std::size_t budget_;
  std::unordered_map<std::tuple<Atom, Atom, Atom>, Atom, TripleHash> cache_;
  std::vector<Atom> neg_;
};

struct SymVal;
using SV = std::shared_ptr<const SymVal>;
using Fields = std::vector<SV>;

struct SymVal {
  Shape::Kind kind = Shape::Kind::Bool;
  Atom b = F;
  std::vector<Atom> bits;  // Nat, most significant first
  std::vector<SV> parts;   // Tuple
  AdtPtr adt;
  std::vector<Atom> tag;
  std::vector<std::optional<Fields>> fields;
};

SV make_bool(Atom a) {
  auto s = std::make_shared<SymVal>();
  s->kind = Shape::Kind::Bool;
  s->b = a;
  return s;
}

std::vector<Atom> trim(std::vector<Atom> bits) {
  std::size_t k = 0;
  while (k + 1 < bits.size() && bits[k] == F) ++k;
  bits.erase(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(k));
  if (bits.empty()) bits.push_back(F);
  return bits;
}

SV make_nat(std::vector<Atom> bits) {
  auto s = std::make_shared<SymVal>();
  s->kind = Shape::Kind::Nat;
  s->bits = trim(std::move(bits));
  return s;
}

SV make_nat_const(std::uint64_t n) {
  std::vector<Atom> bits;
  for (unsigned i = std::max(1u, bit_width(n)); i-- > 0;) bits.push_back((n >> i) & 1u ? T : F);
  return make_nat(std::move(bits));
}

SV make_tuple(std::vector<SV> parts) {
  auto s = std::make_shared<SymVal>();
  s->kind = Shape::Kind::Tuple;
  s->parts = std::move(parts);
  return s;
}

std::vector<Atom> const_bits(std::uint64_t v, unsigned width) {
  std::vector<Atom> out;
  for (unsigned i = width; i-- > 0;) out.push_back((v >> i) & 1u ? T : F);
  return out;
}

SV make_ctor(const AdtPtr& adt, std::uint32_t ctor, Fields fs) {
  auto s = std::make_shared<SymVal>();
  s->kind = Shape::Kind::Adt;
  s->adt = adt;
  s->tag = const_bits(ctor + 1, adt->tag_width());
  s->fields.resize(adt->ctors.size());
  s->fields[ctor] = std::move(fs);
  return s;
}

SV from_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Bool: return make_bool(v.b ? T : F);
    case Value::Kind::Nat: return make_nat_const(v.n);
    case Value::Kind::Tuple: {
      std::vector<SV> ps;
      for (const auto& a : v.args) ps.push_back(from_value(a));
      return make_tuple(std::move(ps));
    }
    case Value::Kind::Ctor: {
      Fields fs;
      const auto& decl = v.adt->ctors[v.ctor];
      for (std::size_t i = 0; i < v.args.size(); ++i) {
        SV f = from_value(v.args[i]);
        const FieldType& ft = decl.fields[i];
        if (ft.kind == FieldType::Kind::Nat && f->kind == Shape::Kind::Nat && f->bits.size() < ft.width) {
          auto padded = std::make_shared<SymVal>(*f);
          padded->bits.insert(padded->bits.begin(), ft.width - f->bits.size(), F);
          f = padded;
        }
        fs.push_back(std::move(f));
      }
      return make_ctor(v.adt, v.ctor, std::move(fs));
    }
  }
  return nullptr;
}

std::uint64_t static_number(const std::vector<Atom>& bits) {
  std::uint64_t n = 0;
  for (Atom a : bits) n = (n << 1) | (a == T ? 1u : 0u);
  return n;
}

bool all_static(const std::vector<Atom>& bits) {
  return std::all_of(bits.begin(), bits.end(), [](Atom a) { return is_static(a); });
}

std::optional<Value> static_value(const SV& s) {
  switch (s->kind) {
    case Shape::Kind::Bool:
      if (!is_static(s->b)) return std::nullopt;
      return Value::boolean(s->b == T);
    case Shape::Kind::Nat:
      if (!all_static(s->bits) || s->bits.size() > 64) return std::nullopt;
      return Value::nat(static_number(s->bits));
    case Shape::Kind::Tuple: {
      std::vector<Value> vs;
      for (const auto& p : s->parts) {
        auto v = static_value(p);
        if (!v) return std::nullopt;
        vs.push_back(std::move(*v));
      }
      return Value::tuple(std::move(vs));
    }
    case Shape::Kind::Adt: {
      if (!all_static(s->tag)) return std::nullopt;
      std::uint64_t t = static_number(s->tag);
      if (t == 0 || t > s->fields.size() || !s->fields[t - 1]) return std::nullopt;
      std::vector<Value> vs;
      for (const auto& f : *s->fields[t - 1]) {
        auto v = static_value(f);
        if (!v) return std::nullopt;
        vs.push_back(std::move(*v));
      }
      return Value::make(s->adt, static_cast<std::uint32_t>(t - 1), std::move(vs));
    }
  }
  return std::nullopt;
}

Shape shape_of(const SV& s) {
  Shape sh;
  sh.kind = s->kind;
  switch (s->kind) {
    case Shape::Kind::Bool: break;
    case Shape::Kind::Nat: sh.nat_width = static_cast<unsigned>(s->bits.size()); break;
    case Shape::Kind::Tuple:
      for (const auto& p : s->parts) sh.parts.push_back(shape_of(p));
      break;
    case Shape::Kind::Adt:
      sh.adt = s->adt;
      for (const auto& f : s->fields) {
        if (!f) {
          sh.ctors.emplace_back();
          continue;
        }
        std::vector<Shape> fs;
        for (const auto& x : *f) fs.push_back(shape_of(x));
        sh.ctors.emplace_back(std::move(fs));
      }
      break;
  }
  return sh;
}

void flatten(const SV& s, std::vector<Atom>& out) {
  switch (s->kind) {
    case Shape::Kind::Bool: out.push_back(s->b); break;
    case Shape::Kind::Nat: out.insert(out.end(), s->bits.begin(), s->bits.end()); break;
    case Shape::Kind::Tuple:
      for (const auto& p : s->parts) flatten(p, out);
      break;
    case Shape::Kind::Adt:
      out.insert(out.end(), s->tag.begin(), s->tag.end());
      for (const auto& f : s->fields)
        if (f)
          for (const auto& x : *f) flatten(x, out);
      break;
  }
}

std::string kind_name(const SV& s) {
  switch (s->kind) {
    case Shape::Kind::Bool: return "Bool";
    case Shape::Kind::Nat: return "Nat";
    case Shape::Kind::Tuple: return "tuple of " + std::to_string(s->parts.size());
    case Shape::Kind::Adt: return s->adt->name;
  }
  return "?";
}

struct Frame {
  std::size_t base;
};

class Lowerer {
 public:
  Lowerer(const Program& p, WeightTable& table, const LowerOptions& opt)
      : p_(p), table_(table), opt_(opt), c_(opt.gate_budget) {}

  Circuit& circuit() { return c_; }

  void bind(const std::string& name, SV v) { env_.emplace_back(name, std::move(v)); }

  SV eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::BoolLit: return make_bool(e.b ? T : F);
      case Expr::Kind::NatLit: return make_nat_const(e.n);
      case Expr::Kind::Var: return lookup(e.name, e.loc);
      case Expr::Kind::Tuple: {
        std::vector<SV> ps;
        for (const auto& a : e.args) ps.push_back(eval(*a));
        return make_tuple(std::move(ps));
      }
      case Expr::Kind::Get: {
        SV t = eval(*e.args[0]);
        if (t->kind != Shape::Kind::Tuple) fail(e, "get applied to a " + kind_name(t));
        if (e.n >= t->parts.size()) fail(e, "tuple index out of range");
        return t->parts[e.n];
      }
      case Expr::Kind::Ctor: return ctor(e);
      case Expr::Kind::Call: return call(e);
      case Expr::Kind::If: {
        SV c = eval(*e.args[0]);
        if (c->kind != Shape::Kind::Bool) fail(*e.args[0], "if condition is a " + kind_name(c) + ", not Bool");
        if (c->b == T) return eval(*e.args[1]);
        if (c->b == F) return eval(*e.args[2]);
        SV a = eval(*e.args[1]);
        SV b = eval(*e.args[2]);
        return merge(c->b, a, b, e);
      }
      case Expr::Kind::Let: {
        std::size_t mark = env_.size();
        for (const auto& [name, rhs] : e.binds) {
          SV v = eval(*rhs);
          if (name != "_") bind(name, std::move(v));
        }
        SV out = eval(*e.args[0]);
        env_.resize(mark);
        return out;
      }
      case Expr::Kind::Match: return match(e);
      case Expr::Kind::Flip: return make_bool(c_.flip(flip_weight(e.weights[0])));
      case Expr::Kind::Freq: return freq(e);
      case Expr::Kind::Backtrack: return backtrack(e);
      case Expr::Kind::FreqDep: return freqdep(e);
      case Expr::Kind::Split: return split(e);
      case Expr::Kind::Prim: return prim(e);
    }
    fail(e, "unhandled expression");
  }

  // --- structural helpers -------------------------------------------------

  Atom tag_is(const SV& s, std::uint32_t ctor) {
    if (!s->fields[ctor]) return F;
    auto want = const_bits(ctor + 1, s->adt->tag_width());
    Atom acc = T;
    for (std::size_t i = 0; i < want.size(); ++i) acc = c_.conj(acc, want[i] == T ? s->tag[i] : c_.neg(s->tag[i]));
    return acc;
  }

  SV mask(const SV& s, Atom g) {
    if (g == T) return s;
    auto out = std::make_shared<SymVal>(*s);
    switch (s->kind) {
      case Shape::Kind::Bool: out->b = c_.conj(g, s->b); break;
      case Shape::Kind::Nat:
        for (auto& b : out->bits) b = c_.conj(g, b);
        break;
      case Shape::Kind::Tuple:
        for (auto& p : out->parts) p = mask(p, g);
        break;
      case Shape::Kind::Adt:
        for (auto& t : out->tag) t = c_.conj(g, t);
        for (auto& f : out->fields)
          if (f)
            for (auto& x : *f) x = mask(x, g);
        break;
    }
    return out;
  }

  SV merge(Atom g, const SV& a, const SV& b, const Expr& where) {
    if (g == T) return a;
    if (g == F) return b;
    if (a == b) return a;
    if (a->kind != b->kind) fail(where, "branches produce different kinds: " + kind_name(a) + " and " + kind_name(b));
    auto out = std::make_shared<SymVal>();
    out->kind = a->kind;
    switch (a->kind) {
      case Shape::Kind::Bool: out->b = c_.ite(g, a->b, b->b); break;
      case Shape::Kind::Nat: {
        auto [x, y] = align(a->bits, b->bits);
        for (std::size_t i = 0; i < x.size(); ++i) out->bits.push_back(c_.ite(g, x[i], y[i]));
        break;
      }
      case Shape::Kind::Tuple:
        if (a->parts.size() != b->parts.size()) fail(where, "branches produce tuples of different arity");
        for (std::size_t i = 0; i < a->parts.size(); ++i) out->parts.push_back(merge(g, a->parts[i], b->parts[i], where));
        break;
      case Shape::Kind::Adt: {
        if (a->adt->name != b->adt->name)
          fail(where, "branches produce different types: " + a->adt->name + " and " + b->adt->name);
        out->adt = a->adt;
        for (std::size_t i = 0; i < a->tag.size(); ++i) out->tag.push_back(c_.ite(g, a->tag[i], b->tag[i]));
        out->fields.resize(a->fields.size());
        for (std::size_t k = 0; k < a->fields.size(); ++k) {
          const auto& fa = a->fields[k];
          const auto& fb = b->fields[k];
          if (fa && fb) {
            Fields fs;
            for (std::size_t i = 0; i < fa->size(); ++i) fs.push_back(merge(g, (*fa)[i], (*fb)[i], where));
            out->fields[k] = std::move(fs);
          } else if (fa) {
            Fields fs;
            for (const auto& x : *fa) fs.push_back(mask(x, g));
            out->fields[k] = std::move(fs);
          } else if (fb) {
            Fields fs;
            Atom ng = c_.neg(g);
            for (const auto& x : *fb) fs.push_back(mask(x, ng));
            out->fields[k] = std::move(fs);
          }
        }
        break;
      }
    }
    return out;
  }

  Atom is_zero(const SV& s) {
    std::vector<Atom> bits;
    flatten(s, bits);
    Atom acc = T;
    for (Atom b : bits) acc = c_.conj(acc, c_.neg(b));
    return acc;
  }

  Atom equal(const SV& a, const SV& b, const Expr& where) {
    if (a == b) return T;
    if (a->kind != b->kind) fail(where, "cannot compare a " + kind_name(a) + " with a " + kind_name(b));
    switch (a->kind) {
      case Shape::Kind::Bool: return c_.same(a->b, b->b);
      case Shape::Kind::Nat: {
        auto [x, y] = align(a->bits, b->bits);
        Atom acc = T;
        for (std::size_t i = 0; i < x.size() && acc != F; ++i) acc = c_.conj(acc, c_.same(x[i], y[i]));
        return acc;
      }
      case Shape::Kind::Tuple: {
        if (a->parts.size() != b->parts.size()) fail(where, "cannot compare tuples of different arity");
        Atom acc = T;
        for (std::size_t i = 0; i < a->parts.size() && acc != F; ++i) acc = c_.conj(acc, equal(a->parts[i], b->parts[i], where));
        return acc;
      }
      case Shape::Kind::Adt: {
        if (a->adt->name != b->adt->name) fail(where, "cannot compare " + a->adt->name + " with " + b->adt->name);
        Atom acc = T;
        for (std::size_t i = 0; i < a->tag.size() && acc != F; ++i) acc = c_.conj(acc, c_.same(a->tag[i], b->tag[i]));
        for (std::size_t k = 0; k < a->fields.size() && acc != F; ++k) {
          const auto& fa = a->fields[k];
          const auto& fb = b->fields[k];
          if (fa && fb) {
            for (std::size_t i = 0; i < fa->size(); ++i) acc = c_.conj(acc, equal((*fa)[i], (*fb)[i], where));
          } else if (fa) {
            for (const auto& x : *fa) acc = c_.conj(acc, is_zero(x));
          } else if (fb) {
            for (const auto& x : *fb) acc = c_.conj(acc, is_zero(x));
          }
        }
        return acc;
      }
    }
    return F;
  }

  // Values the symbolic value may take (an over-approximation when bits
  // are correlated; impossible members only cost unused guards).
  std::vector<Value> support(const SV& s, const Expr& where) {
    std::vector<Value> out;
    support_into(s, out, where);
    return out;
  }

  SV refine(const SV& s, std::uint32_t ctor) {
    auto out = std::make_shared<SymVal>(*s);
    out->tag = const_bits(ctor + 1, s->adt->tag_width());
    for (std::size_t k = 0; k < out->fields.size(); ++k)
      if (k != ctor) out->fields[k].reset();
    return out;
  }

  [[noreturn]] void fail(const Expr& e, const std::string& msg) const { throw SurfaceError(e.loc, msg); }

 private:
  void support_into(const SV& s, std::vector<Value>& out, const Expr& where) {
    auto check = [&] {
      if (out.size() > opt_.support_budget)
        fail(where, "dependency domain exceeds the enumeration budget of " + std::to_string(opt_.support_budget));
    };
    switch (s->kind) {
      case Shape::Kind::Bool:
        if (s->b != T) out.push_back(Value::boolean(false));
        if (s->b != F) out.push_back(Value::boolean(true));
        break;
      case Shape::Kind::Nat: {
        std::vector<std::uint64_t> vals{0};
        for (Atom b : s->bits) {
          std::vector<std::uint64_t> next;
          for (auto v : vals) {
            if (b != T) next.push_back(v << 1);
            if (b != F) next.push_back((v << 1) | 1u);
          }
          vals.swap(next);
          if (vals.size() > opt_.support_budget) fail(where, "dependency domain exceeds the enumeration budget");
        }
        for (auto v : vals) out.push_back(Value::nat(v));
        break;
      }
      case Shape::Kind::Tuple: {
        std::vector<std::vector<Value>> rows{{}};
        for (const auto& p : s->parts) {
          auto sub = support(p, where);
          std::vector<std::vector<Value>> next;
          for (const auto& r : rows)
            for (const auto& v : sub) {
              next.push_back(r);
              next.back().push_back(v);
              if (next.size() > opt_.support_budget) fail(where, "dependency domain exceeds the enumeration budget");
            }
          rows.swap(next);
        }
        for (auto& r : rows) out.push_back(Value::tuple(std::move(r)));
        break;
      }
      case Shape::Kind::Adt:
        for (std::uint32_t k = 0; k < s->fields.size(); ++k) {
          if (!s->fields[k] || tag_is(s, k) == F) continue;
          std::vector<std::vector<Value>> rows{{}};
          for (const auto& f : *s->fields[k]) {
            auto sub = support(f, where);
            std::vector<std::vector<Value>> next;
            for (const auto& r : rows)
              for (const auto& v : sub) {
                next.push_back(r);
                next.back().push_back(v);
                if (next.size() > opt_.support_budget) fail(where, "dependency domain exceeds the enumeration budget");
              }
            rows.swap(next);
          }
          for (auto& r : rows) out.push_back(Value::make(s->adt, k, std::move(r)));
        }
        break;
    }
    check();
  }

  std::pair<std::vector<Atom>, std::vector<Atom>> align(const std::vector<Atom>& a, const std::vector<Atom>& b) {
    std::size_t w = std::max(a.size(), b.size());
    std::vector<Atom> x(w - a.size(), F), y(w - b.size(), F);
    x.insert(x.end(), a.begin(), a.end());
    y.insert(y.end(), b.begin(), b.end());
    return {x, y};
  }

  SV lookup(const std::string& name, const Loc& loc) {
    for (std::size_t i = env_.size(); i-- > frame_base_;)
      if (env_[i].first == name) return env_[i].second;
    throw SurfaceError(loc, "unbound variable " + name);
  }

  SV ctor(const Expr& e) {
    const CtorDecl& decl = e.adt->ctors[e.ctor];
    Fields fs;
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      SV v = eval(*e.args[i]);
      const FieldType& ft = decl.fields[i];
      switch (ft.kind) {
        case FieldType::Kind::Bool:
          if (v->kind != Shape::Kind::Bool) fail(*e.args[i], decl.name + " field " + std::to_string(i) + " expects Bool, got " + kind_name(v));
          break;
        case FieldType::Kind::Nat: {
          if (v->kind != Shape::Kind::Nat) fail(*e.args[i], decl.name + " field " + std::to_string(i) + " expects Nat, got " + kind_name(v));
          // Stored at exactly the declared width: truncate or zero-extend.
          std::vector<Atom> bits = v->bits;
          if (bits.size() > ft.width) bits.erase(bits.begin(), bits.end() - ft.width);
          bits.insert(bits.begin(), ft.width - bits.size(), F);
          auto fixed = std::make_shared<SymVal>();
          fixed->kind = Shape::Kind::Nat;
          fixed->bits = std::move(bits);
          v = fixed;
          break;
        }
        case FieldType::Kind::Adt:
          if (v->kind != Shape::Kind::Adt || v->adt->name != ft.adt)
            fail(*e.args[i], decl.name + " field " + std::to_string(i) + " expects " + ft.adt + ", got " + kind_name(v));
          break;
        case FieldType::Kind::Any: break;
      }
      fs.push_back(std::move(v));
    }
    return make_ctor(e.adt, e.ctor, std::move(fs));
  }

  SV call(const Expr& e) {
    const Function& f = p_.functions.at(e.name);
    std::vector<SV> args;
    for (const auto& a : e.args) args.push_back(eval(*a));
    if (++depth_ > opt_.max_call_depth)
      fail(e, "unbounded recursion: call depth exceeds " + std::to_string(opt_.max_call_depth) +
                  " (recursive calls must decrease a static size argument)");
    std::size_t saved_base = frame_base_;
    std::size_t mark = env_.size();
    frame_base_ = mark;
    for (std::size_t i = 0; i < args.size(); ++i)
      if (f.params[i] != "_") bind(f.params[i], std::move(args[i]));
    SV out = eval(*f.body);
    env_.resize(mark);
    frame_base_ = saved_base;
    --depth_;
    return out;
  }

  Atom pattern_test(const Pattern& pt, const SV& s, const Expr& where) {
    switch (pt.kind) {
      case Pattern::Kind::Wild:
      case Pattern::Kind::Var: return T;
      case Pattern::Kind::NatLit:
        if (s->kind != Shape::Kind::Nat) fail(where, "nat pattern against a " + kind_name(s));
        return equal(s, make_nat_const(pt.n), where);
      case Pattern::Kind::Succ: {
        if (s->kind != Shape::Kind::Nat) fail(where, "(S x) pattern against a " + kind_name(s));
        Atom any = F;
        for (Atom b : s->bits) any = c_.disj(any, b);
        return any;
      }
      case Pattern::Kind::BoolLit:
        if (s->kind != Shape::Kind::Bool) fail(where, "boolean pattern against a " + kind_name(s));
        return pt.b ? s->b : c_.neg(s->b);
      case Pattern::Kind::Ctor:
        if (s->kind != Shape::Kind::Adt || s->adt->name != pt.adt->name)
          fail(where, "constructor pattern " + pt.name + " against a " + kind_name(s));
        return tag_is(s, pt.ctor);
      case Pattern::Kind::Tuple:
        if (s->kind != Shape::Kind::Tuple || s->parts.size() != pt.binders.size())
          fail(where, "tuple pattern of arity " + std::to_string(pt.binders.size()) + " against a " + kind_name(s));
        return T;
    }
    return F;
  }

  void pattern_bind(const Pattern& pt, const SV& s, const std::string* scrut_var) {
    switch (pt.kind) {
      case Pattern::Kind::Wild: break;
      case Pattern::Kind::Var: bind(pt.name, s); break;
      case Pattern::Kind::NatLit:
        if (scrut_var) bind(*scrut_var, make_nat_const(pt.n));
        break;
      case Pattern::Kind::BoolLit:
        if (scrut_var) bind(*scrut_var, make_bool(pt.b ? T : F));
        break;
      case Pattern::Kind::Succ:
        if (pt.name != "_") bind(pt.name, monus(s, make_nat_const(1)));
        break;
      case Pattern::Kind::Ctor: {
        SV r = refine(s, pt.ctor);
        if (scrut_var) bind(*scrut_var, r);
        const Fields& fs = *r->fields[pt.ctor];
        for (std::size_t i = 0; i < pt.binders.size(); ++i)
          if (pt.binders[i] != "_") bind(pt.binders[i], fs[i]);
        break;
      }
      case Pattern::Kind::Tuple:
        for (std::size_t i = 0; i < pt.binders.size(); ++i)
          if (pt.binders[i] != "_") bind(pt.binders[i], s->parts[i]);
        break;
    }
  }

  SV match(const Expr& e) {
    SV s = eval(*e.args[0]);
    const std::string* var = e.args[0]->kind == Expr::Kind::Var ? &e.args[0]->name : nullptr;
    std::vector<std::pair<Atom, SV>> results;
    for (const Arm& arm : e.arms) {
      Atom t = pattern_test(arm.pat, s, *arm.body);
      if (t == F) continue;
      std::size_t mark = env_.size();
      pattern_bind(arm.pat, s, var);
      SV v = eval(*arm.body);
      env_.resize(mark);
      results.emplace_back(t, std::move(v));
      if (t == T) break;
    }
    if (results.empty()) fail(e, "no match arm can apply");
    SV r = results.back().second;
    for (std::size_t i = results.size() - 1; i-- > 0;) r = merge(results[i].first, results[i].second, r, e);
    return r;
  }

  Value static_of(const Expr& e, const char* what) {
    SV v = eval(e);
    auto sv = static_value(v);
    if (!sv) fail(e, std::string(what) + " must be statically known");
    return *sv;
  }

  std::uint64_t static_nat(const Expr& e, const char* what) {
    Value v = static_of(e, what);
    if (v.kind != Value::Kind::Nat) fail(e, std::string(what) + " must be a natural number");
    return v.n;
  }

  std::string site_name(const WeightExpr& w) {
    std::vector<Value> idx;
    for (const auto& i : w.indices) idx.push_back(static_of(*i, "parameter index"));
    return naming::site(w.name, idx);
  }

  core::NumericTerm flip_weight(const WeightExpr& w) {
    switch (w.kind) {
      case WeightExpr::Kind::Literal:
        if (w.literal > 1.0) throw SurfaceError(w.loc, "flip probability above 1");
        return core::NumericTerm::constant_of(w.literal);
      case WeightExpr::Kind::Ratio: {
        auto a = static_nat(*w.num, "ratio numerator");
        auto b = static_nat(*w.den, "ratio denominator");
        if (b == 0 || a > b) throw SurfaceError(w.loc, "ratio must lie in [0,1]");
        return core::NumericTerm::constant_of(static_cast<double>(a) / static_cast<double>(b));
      }
      case WeightExpr::Kind::Static: {
        auto a = static_nat(*w.num, "flip probability");
        if (a > 1) throw SurfaceError(w.loc, "flip probability above 1");
        return core::NumericTerm::constant_of(static_cast<double>(a));
      }
      case WeightExpr::Kind::Param:
        return core::NumericTerm::symbol(table_.intern(site_name(w), naming::kParamInit));
    }
    return {};
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

  // Stick-breaking chain over `members` (indices into branches); returns the
  // atom for "stop at member j" conditional on not stopping earlier.
  std::vector<Atom> sticks_const(const std::vector<double>& w) {
    std::vector<Atom> out;
    double rest = 0;
    for (double x : w) rest += x;
    for (std::size_t j = 0; j + 1 < w.size(); ++j) {
      double q = rest > 0 ? w[j] / rest : 0.0;
      q = std::clamp(q, 0.0, 1.0);
      out.push_back(c_.flip(core::NumericTerm::constant_of(q)));
      rest -= w[j];
    }
    return out;
  }

  std::vector<Atom> sticks_named(const std::function<std::string(std::size_t)>& name, std::size_t n) {
    std::vector<Atom> out;
    for (std::size_t j = 0; j + 1 < n; ++j)
      out.push_back(c_.flip(core::NumericTerm::symbol(table_.intern(name(j), naming::stick_init(n, j)))));
    return out;
  }

  // Chooses among values with a stick chain; values[i] may be null when the
  // branch is unreachable.
  SV chain(const std::vector<Atom>& sticks, const std::vector<SV>& values, const Expr& where) {
    SV r = values.back();
    for (std::size_t j = sticks.size(); j-- > 0;) {
      if (!values[j]) continue;
      if (!r) {
        r = values[j];
        continue;
      }
      r = merge(sticks[j], values[j], r, where);
    }
    return r;
  }

  // Which branches can be reached through the chain at all.
  static std::vector<bool> reachable(const std::vector<Atom>& sticks, std::size_t n) {
    std::vector<bool> out(n, false);
    bool open = true;
    for (std::size_t j = 0; j < n && open; ++j) {
      if (j + 1 == n) {
        out[j] = true;
        break;
      }
      out[j] = sticks[j] != F;
      if (sticks[j] == T) open = false;
    }
    return out;
  }

  SV freq(const Expr& e) {
    std::size_t k = e.args.size();
    if (k == 1) return eval(*e.args[0]);
    std::vector<Atom> sticks;
    if (e.site) {
      std::string site = site_name(*e.site);
      sticks = sticks_named([&](std::size_t j) { return naming::stick(site, j); }, k);
    } else {
      std::vector<double> w;
      for (const auto& x : e.weights) w.push_back(branch_weight(x));
      double total = 0;
      for (double x : w) total += x;
      if (!(total > 0)) fail(e, "freq weights sum to zero");
      // Trailing zero-weight branches can never be picked.
      while (w.size() > 1 && w.back() == 0.0) w.pop_back();
      k = w.size();
      if (k == 1) return eval(*e.args[0]);
      sticks = sticks_const(w);
    }
    auto reach = reachable(sticks, k);
    std::vector<SV> values(k);
    for (std::size_t i = 0; i < k; ++i)
      if (reach[i]) values[i] = eval(*e.args[i]);
    return chain(sticks, values, e);
  }

  SV none_value() { return make_ctor(p_.option(), 0, {}); }

  SV backtrack(const Expr& e) {
    std::size_t k = e.args.size();
    if (k > opt_.backtrack_limit)
      fail(e, "backtrack over " + std::to_string(k) + " branches exceeds the expansion bound of " +
                  std::to_string(opt_.backtrack_limit));
    std::vector<double> w(k, 1.0);
    std::string site;
    if (e.site) site = site_name(*e.site);
    else
      for (std::size_t i = 0; i < k; ++i) w[i] = branch_weight(e.weights[i]);
    std::uint32_t full = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (w[i] > 0) full |= 1u << i;
    if (!full) fail(e, "backtrack weights sum to zero");

    std::vector<SV> values(k);
    std::map<std::uint32_t, SV> memo;
    std::function<SV(std::uint32_t)> go = [&](std::uint32_t set) -> SV {
      if (!set) return none_value();
      if (auto it = memo.find(set); it != memo.end()) return it->second;
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < k; ++i)
        if (set >> i & 1u) members.push_back(i);
      std::vector<Atom> sticks;
      if (e.site) {
        sticks = sticks_named([&](std::size_t j) { return naming::backtrack_stick(site, members, j); }, members.size());
      } else {
        std::vector<double> ws;
        for (auto i : members) ws.push_back(w[i]);
        sticks = sticks_const(ws);
      }
      std::vector<SV> outcomes;
      for (auto i : members) {
        if (!values[i]) {
          values[i] = eval(*e.args[i]);
          if (values[i]->kind != Shape::Kind::Adt || values[i]->adt->name != "Option")
            fail(*e.args[i], "backtrack branch must produce an Option, got " + kind_name(values[i]));
        }
        SV rest = go(set & ~(1u << i));
        outcomes.push_back(merge(tag_is(values[i], 1), values[i], rest, e));
      }
      SV r = chain(sticks, outcomes, e);
      memo[set] = r;
      return r;
    };
    return go(full);
  }

  SV freqdep(const Expr& e) {
    SV deps = eval(*e.args[0]);
    std::size_t k = e.args.size() - 1;
    std::string site = site_name(*e.site);
    std::vector<Value> domain = support(deps, *e.args[0]);
    std::vector<std::pair<Atom, std::vector<Atom>>> cases;
    for (const Value& d : domain) {
      Atom g = equal(deps, from_value(d), e);
      if (g == F) continue;
      cases.emplace_back(g, sticks_named([&](std::size_t j) { return naming::dependent_stick(site, d, j); }, k));
    }
    if (cases.empty()) fail(e, "dependency has an empty domain");
    std::vector<SV> options;
    for (std::size_t i = 1; i < e.args.size(); ++i) options.push_back(eval(*e.args[i]));
    SV r = chain(cases.back().second, options, e);
    for (std::size_t i = cases.size() - 1; i-- > 0;) r = merge(cases[i].first, chain(cases[i].second, options, e), r, e);
    return r;
  }

  SV split(const Expr& e) {
    SV x = lookup(e.name, e.loc);
    std::vector<std::pair<Atom, SV>> results;
    for (const Value& d : support(x, e)) {
      Atom g = equal(x, from_value(d), e);
      if (g == F) continue;
      std::size_t mark = env_.size();
      bind(e.name, from_value(d));
      SV v = eval(*e.args[0]);
      env_.resize(mark);
      results.emplace_back(g, std::move(v));
      if (g == T) break;
    }
    if (results.empty()) fail(e, "split over an empty domain");
    SV r = results.back().second;
    for (std::size_t i = results.size() - 1; i-- > 0;) r = merge(results[i].first, results[i].second, r, e);
    return r;
  }

  // --- arithmetic ----------------------------------------------------------

  SV add(const SV& a, const SV& b) {
    auto [x, y] = align(a->bits, b->bits);
    std::vector<Atom> out(x.size() + 1);
    Atom carry = F;
    for (std::size_t i = x.size(); i-- > 0;) {
      Atom s = c_.exclusive(c_.exclusive(x[i], y[i]), carry);
      carry = c_.disj(c_.conj(x[i], y[i]), c_.conj(carry, c_.exclusive(x[i], y[i])));
      out[i + 1] = s;
    }
    out[0] = carry;
    return make_nat(std::move(out));
  }

  // Returns (a - b mod 2^w, borrow-out).
  std::pair<std::vector<Atom>, Atom> subtract(const SV& a, const SV& b) {
    auto [x, y] = align(a->bits, b->bits);
    std::vector<Atom> out(x.size());
    Atom borrow = F;
    for (std::size_t i = x.size(); i-- > 0;) {
      Atom d = c_.exclusive(x[i], y[i]);
      out[i] = c_.exclusive(d, borrow);
      borrow = c_.disj(c_.conj(c_.neg(x[i]), y[i]), c_.conj(c_.neg(d), borrow));
    }
    return {out, borrow};
  }

  SV monus(const SV& a, const SV& b) {
    auto [d, borrow] = subtract(a, b);
    Atom ok = c_.neg(borrow);
    for (auto& x : d) x = c_.conj(ok, x);
    return make_nat(std::move(d));
  }

  Atom less(const SV& a, const SV& b) { return subtract(a, b).second; }

  SV prim(const Expr& e) {
    std::vector<SV> v;
    for (const auto& a : e.args) v.push_back(eval(*a));
    const std::string& op = e.name;
    auto need = [&](Shape::Kind k, const char* kn) {
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]->kind != k) fail(*e.args[i], "'" + op + "' expects " + kn + " operands, got " + kind_name(v[i]));
    };
    if (op == "and" || op == "or") {
      need(Shape::Kind::Bool, "Bool");
      Atom acc = op == "and" ? T : F;
      for (const auto& x : v) acc = op == "and" ? c_.conj(acc, x->b) : c_.disj(acc, x->b);
      return make_bool(acc);
    }
    if (op == "not") {
      need(Shape::Kind::Bool, "Bool");
      return make_bool(c_.neg(v[0]->b));
    }
    if (op == "=") return make_bool(equal(v[0], v[1], e));
    need(Shape::Kind::Nat, "Nat");
    if (op == "<") return make_bool(less(v[0], v[1]));
    if (op == ">") return make_bool(less(v[1], v[0]));
    if (op == "<=") return make_bool(c_.neg(less(v[1], v[0])));
    if (op == ">=") return make_bool(c_.neg(less(v[0], v[1])));
    if (op == "+") return add(v[0], v[1]);
    if (op == "-") return monus(v[0], v[1]);
    if (op == "max") return merge(less(v[0], v[1]), v[1], v[0], e);
    if (op == "min") return merge(less(v[0], v[1]), v[0], v[1], e);
    fail(e, "unknown primitive " + op);
  }

  const Program& p_;
  WeightTable& table_;
  const LowerOptions& opt_;
  Circuit c_;
  std::vector<std::pair<std::string, SV>> env_;
  std::size_t frame_base_ = 0;
  std::size_t depth_ = 0;
};

Lowered emit(Circuit& c, const std::vector<Atom>& outputs, Shape shape) {
  Lowered out;
  out.shape = std::move(shape);
  const auto& gates = c.gates;
  std::vector<bool> live(gates.size() + 2, false);
  for (Atom a : outputs) live[static_cast<std::size_t>(a)] = true;
  for (std::size_t i = gates.size(); i-- > 0;) {
    if (!live[i + 2] || gates[i].is_flip) continue;
    for (Atom x : {gates[i].a, gates[i].b, gates[i].c}) live[static_cast<std::size_t>(x)] = true;
  }
  core::Program& p = out.core;
  auto atom = [&](Atom a) -> core::ExprId {
    if (a == T) return p.constant(core::Value::boolean(true));
    if (a == F) return p.constant(core::Value::boolean(false));
    return p.var("g" + std::to_string(a));
  };
  core::ExprId body;
  if (outputs.empty()) {
    body = p.constant(core::Value::boolean(true));
  } else {
    body = atom(outputs.back());
    for (std::size_t i = outputs.size() - 1; i-- > 0;) body = p.pair(atom(outputs[i]), body);
  }
  for (std::size_t i = gates.size(); i-- > 0;) {
    if (!live[i + 2]) continue;
    const Gate& g = gates[i];
    core::ExprId rhs;
    if (g.is_flip) {
      rhs = p.flip(g.q);
      ++out.flips;
      if (g.q.symbolic) out.weights.push_back(g.q.weight);
    } else {
      core::ExprId then_e = atom(g.b);
      core::ExprId else_e = atom(g.c);
      rhs = p.ite(atom(g.a), then_e, else_e);
    }
    ++out.gates;
    body = p.let("g" + std::to_string(i + 2), rhs, body);
  }
  out.root = body;
  std::reverse(out.weights.begin(), out.weights.end());
  std::vector<WeightId> uniq;
  for (auto w : out.weights)
    if (std::find(uniq.begin(), uniq.end(), w) == uniq.end()) uniq.push_back(w);
  out.weights = std::move(uniq);
  return out;
}

}  // namespace

ExprPtr main_ref() {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = "main";
  return e;
}

ExprPtr apply(const Program& p, const std::string& fn, ExprPtr arg) {
  auto it = p.functions.find(fn);
  if (it == p.functions.end()) throw std::invalid_argument("unknown function " + fn);
  if (it->second.params.size() != 1) throw std::invalid_argument("function " + fn + " must take exactly one argument");
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Call;
  e->name = fn;
  e->loc = it->second.loc;
  e->args = {std::move(arg)};
  return e;
}

Lowered lower(const Program& p, const ExprPtr& entry, WeightTable& table, const LowerOptions& opt) {
  Lowerer lw(p, table, opt);
  if (p.main && entry != p.main) lw.bind("main", lw.eval(*p.main));
  SV result = lw.eval(*entry);
  std::vector<Atom> outputs;
  flatten(result, outputs);
  return emit(lw.circuit(), outputs, shape_of(result));
}

Lowered lower_main(const Program& p, WeightTable& table, const LowerOptions& opt) {
  if (!p.main) throw std::invalid_argument("program has no main");
  return lower(p, p.main, table, opt);
}

Value lower_static(const Program& p, const ExprPtr& e, WeightTable& table,
                   const std::vector<std::pair<std::string, Value>>& bindings, const LowerOptions& opt) {
  Lowerer lw(p, table, opt);
  for (const auto& [name, v] : bindings) lw.bind(name, from_value(v));
  SV r = lw.eval(*e);
  auto v = static_value(r);
  if (!v) throw SurfaceError(e->loc, "expression is not deterministic");
  return *v;
}

}  // namespace gentune::surface
