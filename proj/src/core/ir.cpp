#include "gentune/core/ir.hpp"

#include <sstream>
#include <stdexcept>

namespace gentune::core {

TypePtr Type::boolean() {
  static const TypePtr b = std::make_shared<Type>();
  return b;
}

TypePtr Type::product(TypePtr l, TypePtr r) {
  auto t = std::make_shared<Type>();
  t->width_ = l->width() + r->width();
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}

TypePtr Type::bits(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Type::bits needs at least one bit");
  TypePtr t = boolean();
  for (std::size_t i = 1; i < n; ++i) t = product(boolean(), t);
  return t;
}

bool same_type(const Type& a, const Type& b) {
  if (&a == &b) return true;
  if (a.is_bool() || b.is_bool()) return a.is_bool() && b.is_bool();
  return a.width() == b.width() && same_type(*a.left, *b.left) && same_type(*a.right, *b.right);
}

std::string to_string(const Type& t) {
  if (t.is_bool()) return "Bool";
  return "(" + to_string(*t.left) + " x " + to_string(*t.right) + ")";
}

Value Value::boolean(bool b) { return Value{Type::boolean(), Bits{b}}; }

Value Value::pair(const Value& a, const Value& b) {
  Value v{Type::product(a.type, b.type), a.bits};
  v.bits.insert(v.bits.end(), b.bits.begin(), b.bits.end());
  return v;
}

Value Value::fst() const {
  if (type->is_bool()) throw std::logic_error("fst of a Bool value");
  auto n = static_cast<std::ptrdiff_t>(type->left->width());
  return Value{type->left, Bits(bits.begin(), bits.begin() + n)};
}

Value Value::snd() const {
  if (type->is_bool()) throw std::logic_error("snd of a Bool value");
  auto n = static_cast<std::ptrdiff_t>(type->left->width());
  return Value{type->right, Bits(bits.begin() + n, bits.end())};
}

namespace {
void print_value(std::ostream& os, const Type& t, const Bits& bits, std::size_t& pos) {
  if (t.is_bool()) {
    os << (bits.at(pos++) ? 'T' : 'F');
    return;
  }
  os << '(';
  print_value(os, *t.left, bits, pos);
  os << ", ";
  print_value(os, *t.right, bits, pos);
  os << ')';
}
}  // namespace

std::string to_string(const Value& v) {
  std::ostringstream os;
  std::size_t pos = 0;
  print_value(os, *v.type, v.bits, pos);
  return os.str();
}

std::size_t BitsHash::operator()(const Bits& b) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ b.size();
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    word = (word << 1) | (b[i] ? 1u : 0u);
    if ((i & 63u) == 63u) {
      h = (h ^ word) * 0x100000001b3ULL;
      word = 0;
    }
  }
  h = (h ^ word) * 0x100000001b3ULL;
  return static_cast<std::size_t>(h ^ (h >> 29));
}

NumericTerm NumericTerm::constant_of(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("flip constant outside [0,1]");
  return {false, c, 0};
}

VarId Program::intern(const std::string& name) {
  auto it = var_index_.find(name);
  if (it != var_index_.end()) return it->second;
  auto id = static_cast<VarId>(vars_.size());
  vars_.push_back(name);
  var_index_.emplace(name, id);
  return id;
}

ExprId Program::push(Node n) {
  nodes_.push_back(n);
  return static_cast<ExprId>(nodes_.size() - 1);
}

ExprId Program::var(VarId v) {
  Node n;
  n.op = Op::Var;
  n.var = v;
  return push(n);
}

ExprId Program::constant(const Value& v) {
  Node n;
  n.op = Op::Const;
  n.constant = static_cast<std::uint32_t>(constants_.size());
  constants_.push_back(v);
  return push(n);
}

ExprId Program::fst(ExprId e) {
  Node n;
  n.op = Op::Fst;
  n.a = e;
  return push(n);
}

ExprId Program::snd(ExprId e) {
  Node n;
  n.op = Op::Snd;
  n.a = e;
  return push(n);
}

ExprId Program::pair(ExprId a, ExprId b) {
  Node n;
  n.op = Op::Pair;
  n.a = a;
  n.b = b;
  return push(n);
}

ExprId Program::let(VarId v, ExprId bound, ExprId body) {
  Node n;
  n.op = Op::Let;
  n.var = v;
  n.a = bound;
  n.b = body;
  return push(n);
}

ExprId Program::ite(ExprId guard, ExprId then_e, ExprId else_e) {
  Node n;
  n.op = Op::If;
  n.a = guard;
  n.b = then_e;
  n.c = else_e;
  return push(n);
}

ExprId Program::flip(NumericTerm q) {
  Node n;
  n.op = Op::Flip;
  n.weight = q;
  return push(n);
}

bool Program::is_atomic(ExprId e) const {
  auto op = node(e).op;
  return op == Op::Var || op == Op::Const;
}

namespace {
void print_expr(const Program& p, ExprId e, std::ostream& os) {
  const Node& n = p.node(e);
  switch (n.op) {
    case Op::Var: os << p.var_name(n.var); break;
    case Op::Const: os << to_string(p.constant_value(n)); break;
    case Op::Fst: os << "fst "; print_expr(p, n.a, os); break;
    case Op::Snd: os << "snd "; print_expr(p, n.a, os); break;
    case Op::Pair:
      os << '(';
      print_expr(p, n.a, os);
      os << ", ";
      print_expr(p, n.b, os);
      os << ')';
      break;
    case Op::Let:
      os << "let " << p.var_name(n.var) << " = ";
      print_expr(p, n.a, os);
      os << " in ";
      print_expr(p, n.b, os);
      break;
    case Op::If:
      os << "if ";
      print_expr(p, n.a, os);
      os << " then ";
      print_expr(p, n.b, os);
      os << " else ";
      print_expr(p, n.c, os);
      break;
    case Op::Flip:
      if (n.weight.symbolic)
        os << "flip #" << n.weight.weight;
      else
        os << "flip " << n.weight.constant;
      break;
  }
}
}  // namespace

std::string Program::to_string(ExprId root) const {
  std::ostringstream os;
  print_expr(*this, root, os);
  return os.str();
}

}  // namespace gentune::core
