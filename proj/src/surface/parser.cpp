#include "gentune/surface/parser.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace gentune::surface {

Program::Program() {
  auto opt = std::make_shared<AdtDecl>();
  opt->name = "Option";
  opt->ctors.push_back({"None", {}});
  opt->ctors.push_back({"Some", {FieldType{}}});
  types["Option"] = opt;
  ctors["None"] = {opt, 0};
  ctors["Some"] = {opt, 1};
}

const AdtDecl& Program::adt(const std::string& name) const {
  auto it = types.find(name);
  if (it == types.end()) throw std::out_of_range("unknown type " + name);
  return *it->second;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

const std::set<std::string> kForms = {"tuple", "get", "if", "let", "match", "flip", "freq",
                                      "backtrack", "freqdep", "split", "param", "type",
                                      "define", "main", "true", "false", "_"};
const std::set<std::string> kPrims = {"and", "or", "not", "=", "<", "<=", ">", ">=", "+", "-", "max", "min"};

[[noreturn]] void fail(const Datum& d, const std::string& msg) { throw SurfaceError(d.loc, msg); }

const std::string& symbol(const Datum& d, const char* what) {
  if (!d.is_symbol()) fail(d, std::string("expected ") + what + ", found " + d.str());
  return d.text;
}

FieldType field_type(const Datum& d) {
  FieldType t;
  if (d.is_symbol("Bool")) {
    t.kind = FieldType::Kind::Bool;
  } else if (d.is_symbol("Nat")) {
    t.kind = FieldType::Kind::Nat;
    t.width = kDefaultNatWidth;
  } else if (d.head_is("Nat")) {
    if (d.items.size() != 2 || d.items[1].kind != Datum::Kind::Integer || d.items[1].integer == 0 ||
        d.items[1].integer > 62)
      fail(d, "Nat width must be an integer in 1..62");
    t.kind = FieldType::Kind::Nat;
    t.width = static_cast<unsigned>(d.items[1].integer);
  } else if (d.is_symbol()) {
    t.kind = FieldType::Kind::Adt;
    t.adt = d.text;
  } else {
    fail(d, "malformed field type " + d.str());
  }
  return t;
}

class ExprParser {
 public:
  explicit ExprParser(const Program& p) : p_(p) {}

  ExprPtr expr(const Datum& d) {
    auto e = std::make_shared<Expr>();
    e->loc = d.loc;
    switch (d.kind) {
      case Datum::Kind::Integer:
        e->kind = Expr::Kind::NatLit;
        e->n = d.integer;
        return e;
      case Datum::Kind::Real: fail(d, "real literal outside a weight position");
      case Datum::Kind::Symbol:
        if (d.text == "true" || d.text == "false") {
          e->kind = Expr::Kind::BoolLit;
          e->b = d.text == "true";
          return e;
        }
        if (auto c = p_.ctors.find(d.text); c != p_.ctors.end()) {
          ctor_into(*e, d, c->second, {});
          return e;
        }
        if ((kForms.count(d.text) && d.text != "main") || kPrims.count(d.text))
          fail(d, "reserved word used as a value: " + d.text);
        e->kind = Expr::Kind::Var;
        e->name = d.text;
        return e;
      case Datum::Kind::List: break;
    }
    if (d.items.empty()) fail(d, "empty form");
    const Datum& head = d.items[0];
    if (!head.is_symbol()) fail(head, "form head must be a symbol, found " + head.str());
    const std::string& h = head.text;
    auto rest = [&](std::size_t from) {
      std::vector<ExprPtr> out;
      for (std::size_t i = from; i < d.items.size(); ++i) out.push_back(expr(d.items[i]));
      return out;
    };
    auto arity = [&](std::size_t n) {
      if (d.items.size() != n + 1)
        fail(d, "'" + h + "' expects " + std::to_string(n) + " operand(s), found " + std::to_string(d.items.size() - 1));
    };

    if (h == "tuple") {
      e->kind = Expr::Kind::Tuple;
      e->args = rest(1);
    } else if (h == "get") {
      arity(2);
      if (d.items[1].kind != Datum::Kind::Integer) fail(d.items[1], "get index must be an integer literal");
      e->kind = Expr::Kind::Get;
      e->n = d.items[1].integer;
      e->args = {expr(d.items[2])};
    } else if (h == "if") {
      arity(3);
      e->kind = Expr::Kind::If;
      e->args = rest(1);
    } else if (h == "let") {
      arity(2);
      if (!d.items[1].is_list()) fail(d.items[1], "let bindings must be a list");
      e->kind = Expr::Kind::Let;
      for (const Datum& b : d.items[1].items) {
        if (!b.is_list() || b.items.size() != 2) fail(b, "let binding must be (name expr)");
        e->binds.emplace_back(binder(b.items[0]), expr(b.items[1]));
      }
      e->args = {expr(d.items[2])};
    } else if (h == "match") {
      if (d.items.size() < 3) fail(d, "match needs a scrutinee and at least one arm");
      e->kind = Expr::Kind::Match;
      e->args = {expr(d.items[1])};
      for (std::size_t i = 2; i < d.items.size(); ++i) {
        const Datum& a = d.items[i];
        if (!a.is_list() || a.items.size() != 2) fail(a, "match arm must be (pattern body)");
        e->arms.push_back({pattern(a.items[0]), expr(a.items[1])});
      }
    } else if (h == "flip") {
      arity(1);
      e->kind = Expr::Kind::Flip;
      e->weights = {weight(d.items[1])};
    } else if (h == "freq" || h == "backtrack") {
      e->kind = h == "freq" ? Expr::Kind::Freq : Expr::Kind::Backtrack;
      if (d.items.size() < 2) fail(d, h + " needs at least one branch");
      if (d.items[1].head_is("param")) {
        e->site = weight(d.items[1]);
        e->args = rest(2);
        if (e->args.empty()) fail(d, h + " needs at least one branch");
      } else {
        for (std::size_t i = 1; i < d.items.size(); ++i) {
          const Datum& b = d.items[i];
          if (!b.is_list() || b.items.size() != 2) fail(b, h + " branch must be (weight expr)");
          e->weights.push_back(weight(b.items[0]));
          e->args.push_back(expr(b.items[1]));
        }
      }
    } else if (h == "freqdep") {
      if (d.items.size() < 4 || !d.items[1].head_is("param"))
        fail(d, "freqdep expects (param ...), a dependency expression and at least one option");
      e->kind = Expr::Kind::FreqDep;
      e->site = weight(d.items[1]);
      e->args = rest(2);  // args[0] = deps
    } else if (h == "split") {
      arity(2);
      e->kind = Expr::Kind::Split;
      e->name = symbol(d.items[1], "variable");
      e->args = {expr(d.items[2])};
    } else if (kPrims.count(h)) {
      e->kind = Expr::Kind::Prim;
      e->name = h;
      e->args = rest(1);
      std::size_t n = e->args.size();
      bool ok = (h == "and" || h == "or") ? n >= 1 : h == "not" ? n == 1 : n == 2;
      if (!ok) fail(d, "wrong number of operands for '" + h + "'");
    } else if (auto c = p_.ctors.find(h); c != p_.ctors.end()) {
      ctor_into(*e, d, c->second, rest(1));
    } else if (kForms.count(h)) {
      fail(head, "'" + h + "' is not valid in expression position");
    } else {
      e->kind = Expr::Kind::Call;
      e->name = h;
      e->args = rest(1);
    }
    return e;
  }

  WeightExpr weight(const Datum& d) {
    WeightExpr w;
    w.loc = d.loc;
    if (d.is_number()) {
      w.kind = WeightExpr::Kind::Literal;
      w.literal = d.number();
      if (!(w.literal >= 0.0)) fail(d, "weights must be non-negative");
    } else if (d.head_is("param")) {
      if (d.items.size() < 2) fail(d, "param needs a name");
      w.kind = WeightExpr::Kind::Param;
      w.name = symbol(d.items[1], "parameter name");
      for (std::size_t i = 2; i < d.items.size(); ++i) w.indices.push_back(expr(d.items[i]));
    } else if (d.head_is("/")) {
      if (d.items.size() != 3) fail(d, "ratio weight must be (/ a b)");
      w.kind = WeightExpr::Kind::Ratio;
      w.num = expr(d.items[1]);
      w.den = expr(d.items[2]);
    } else {
      w.kind = WeightExpr::Kind::Static;
      w.num = expr(d);
    }
    return w;
  }

  std::string binder(const Datum& d) {
    const std::string& s = symbol(d, "binder");
    if (s != "_" && (p_.ctors.count(s) || kForms.count(s) || kPrims.count(s)))
      fail(d, "cannot bind reserved or constructor name " + s);
    return s;
  }

  Pattern pattern(const Datum& d) {
    Pattern pt;
    pt.loc = d.loc;
    if (d.kind == Datum::Kind::Integer) {
      pt.kind = Pattern::Kind::NatLit;
      pt.n = d.integer;
      return pt;
    }
    if (d.is_symbol()) {
      if (d.text == "_") return pt;
      if (d.text == "true" || d.text == "false") {
        pt.kind = Pattern::Kind::BoolLit;
        pt.b = d.text == "true";
        return pt;
      }
      if (auto c = p_.ctors.find(d.text); c != p_.ctors.end()) {
        ctor_pattern(pt, d, c->second, 0);
        return pt;
      }
      pt.kind = Pattern::Kind::Var;
      pt.name = binder(d);
      return pt;
    }
    if (!d.is_list() || d.items.empty() || !d.items[0].is_symbol()) fail(d, "malformed pattern " + d.str());
    const std::string& h = d.items[0].text;
    std::vector<std::string> bs;
    for (std::size_t i = 1; i < d.items.size(); ++i) {
      if (!d.items[i].is_symbol()) fail(d.items[i], "nested patterns are not supported; bind a variable and match again");
      bs.push_back(binder(d.items[i]));
    }
    if (h == "S") {
      if (bs.size() != 1) fail(d, "(S x) takes one binder");
      pt.kind = Pattern::Kind::Succ;
      pt.name = bs[0];
    } else if (h == "tuple") {
      pt.kind = Pattern::Kind::Tuple;
      pt.binders = bs;
    } else if (auto c = p_.ctors.find(h); c != p_.ctors.end()) {
      ctor_pattern(pt, d, c->second, bs.size());
      pt.binders = bs;
    } else {
      fail(d, "unknown constructor in pattern: " + h);
    }
    return pt;
  }

 private:
  void ctor_into(Expr& e, const Datum& d, const std::pair<AdtPtr, std::uint32_t>& c, std::vector<ExprPtr> args) {
    const CtorDecl& decl = c.first->ctors[c.second];
    if (args.size() != decl.fields.size())
      fail(d, "constructor " + decl.name + " expects " + std::to_string(decl.fields.size()) +
                  " argument(s), found " + std::to_string(args.size()));
    e.kind = Expr::Kind::Ctor;
    e.adt = c.first;
    e.ctor = c.second;
    e.name = decl.name;
    e.args = std::move(args);
  }

  void ctor_pattern(Pattern& pt, const Datum& d, const std::pair<AdtPtr, std::uint32_t>& c, std::size_t n) {
    const CtorDecl& decl = c.first->ctors[c.second];
    if (n != decl.fields.size())
      fail(d, "constructor pattern " + decl.name + " expects " + std::to_string(decl.fields.size()) + " binder(s)");
    pt.kind = Pattern::Kind::Ctor;
    pt.adt = c.first;
    pt.ctor = c.second;
    pt.name = decl.name;
  }

  const Program& p_;
};

void check_calls(const Program& p, const ExprPtr& e) {
  if (!e) return;
  if (e->kind == Expr::Kind::Call) {
    auto it = p.functions.find(e->name);
    if (it == p.functions.end()) throw SurfaceError(e->loc, "unknown function or form '" + e->name + "'");
    if (it->second.params.size() != e->args.size())
      throw SurfaceError(e->loc, "function " + e->name + " expects " + std::to_string(it->second.params.size()) +
                                     " argument(s), found " + std::to_string(e->args.size()));
  }
  for (const auto& a : e->args) check_calls(p, a);
  for (const auto& [n, b] : e->binds) check_calls(p, b);
  for (const auto& a : e->arms) check_calls(p, a.body);
  auto check_weight = [&](const WeightExpr& w) {
    check_calls(p, w.num);
    check_calls(p, w.den);
    for (const auto& i : w.indices) check_calls(p, i);
  };
  for (const auto& w : e->weights) check_weight(w);
  if (e->site) check_weight(*e->site);
}

}  // namespace

void parse_program(const std::string& text, const std::string& file, Program& into) {
  std::vector<Datum> top = read_all(text, file);
  // Types first so constructor names are known everywhere in the file.
  for (const Datum& d : top) {
    if (!d.head_is("type")) continue;
    if (d.items.size() < 3) fail(d, "type needs a name and at least one constructor");
    auto decl = std::make_shared<AdtDecl>();
    decl->name = symbol(d.items[1], "type name");
    if (into.types.count(decl->name)) fail(d.items[1], "duplicate type " + decl->name);
    for (std::size_t i = 2; i < d.items.size(); ++i) {
      const Datum& c = d.items[i];
      CtorDecl cd;
      if (c.is_symbol()) {
        cd.name = c.text;
      } else {
        if (!c.is_list() || c.items.empty()) fail(c, "constructor must be (Name field-types...)");
        cd.name = symbol(c.items[0], "constructor name");
        for (std::size_t k = 1; k < c.items.size(); ++k) cd.fields.push_back(field_type(c.items[k]));
      }
      if (into.ctors.count(cd.name)) fail(c, "duplicate constructor " + cd.name);
      if (kForms.count(cd.name) || kPrims.count(cd.name) || cd.name == "S") fail(c, "reserved constructor name " + cd.name);
      decl->ctors.push_back(cd);
      into.ctors[cd.name] = {decl, static_cast<std::uint32_t>(decl->ctors.size() - 1)};
    }
    into.types[decl->name] = decl;
    into.type_order.push_back(decl->name);
  }
  for (const Datum& d : top) {
    if (!d.head_is("type")) continue;
    for (std::size_t i = 2; i < d.items.size(); ++i) {
      const Datum& c = d.items[i];
      if (!c.is_list()) continue;
      for (std::size_t k = 1; k < c.items.size(); ++k) {
        FieldType ft = field_type(c.items[k]);
        if (ft.kind == FieldType::Kind::Adt && !into.types.count(ft.adt))
          fail(c.items[k], "unknown field type " + ft.adt);
      }
    }
  }
  ExprParser ep(into);
  for (const Datum& d : top) {
    if (d.head_is("type")) continue;
    if (d.head_is("define")) {
      if (d.items.size() != 3 || !d.items[1].is_list() || d.items[1].items.empty())
        fail(d, "define must be (define (name params...) body)");
      Function f;
      f.loc = d.loc;
      f.name = symbol(d.items[1].items[0], "function name");
      if (kForms.count(f.name) || kPrims.count(f.name) || into.ctors.count(f.name))
        fail(d.items[1].items[0], "reserved function name " + f.name);
      if (into.functions.count(f.name)) fail(d, "duplicate function " + f.name);
      for (std::size_t i = 1; i < d.items[1].items.size(); ++i) f.params.push_back(ep.binder(d.items[1].items[i]));
      f.body = ep.expr(d.items[2]);
      into.functions[f.name] = std::move(f);
    } else if (d.head_is("main")) {
      if (d.items.size() != 2) fail(d, "main takes one expression");
      if (into.main) fail(d, "duplicate main");
      into.main = ep.expr(d.items[1]);
    } else {
      fail(d, "unknown top-level form " + (d.is_list() && !d.items.empty() ? d.items[0].str() : d.str()));
    }
  }
  for (const auto& [name, f] : into.functions) check_calls(into, f.body);
  check_calls(into, into.main);
}

Program parse_program(const std::string& text, const std::string& file) {
  Program p;
  parse_program(text, file, p);
  return p;
}

void load_program_file(const std::string& path, Program& into) { parse_program(read_file(path), path, into); }

ExprPtr parse_expr(const Datum& d, const Program& program) {
  ExprParser ep(program);
  ExprPtr e = ep.expr(d);
  check_calls(program, e);
  return e;
}

ExprPtr parse_expr(const std::string& text, const Program& program, const std::string& file) {
  return parse_expr(read_one(text, file), program);
}

Value parse_value(const Datum& d, const Program& program) {
  if (d.kind == Datum::Kind::Integer) return Value::nat(d.integer);
  if (d.is_symbol("true")) return Value::boolean(true);
  if (d.is_symbol("false")) return Value::boolean(false);
  auto ctor_value = [&](const Datum& head, std::vector<Value> args) {
    auto it = program.ctors.find(head.text);
    if (it == program.ctors.end()) fail(head, "unknown constructor " + head.text);
    const CtorDecl& cd = it->second.first->ctors[it->second.second];
    if (cd.fields.size() != args.size()) fail(head, "arity mismatch for " + cd.name);
    return Value::make(it->second.first, it->second.second, std::move(args));
  };
  if (d.is_symbol()) return ctor_value(d, {});
  if (!d.is_list() || d.items.empty() || !d.items[0].is_symbol()) fail(d, "malformed value " + d.str());
  std::vector<Value> args;
  for (std::size_t i = 1; i < d.items.size(); ++i) args.push_back(parse_value(d.items[i], program));
  if (d.items[0].is_symbol("tuple")) return Value::tuple(std::move(args));
  return ctor_value(d.items[0], std::move(args));
}

Value parse_value(const std::string& text, const Program& program) {
  return parse_value(read_one(text, "<value>"), program);
}

}  // namespace gentune::surface
