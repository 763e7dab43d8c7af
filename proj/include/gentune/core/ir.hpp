#pragma once

#include "gentune/weights.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace gentune::core {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

// Bool or a binary product. Widths are fixed and known statically.
struct Type {
  TypePtr left, right;  // both null for Bool

  bool is_bool() const { return !left; }
  std::size_t width() const { return width_; }

  static TypePtr boolean();
  static TypePtr product(TypePtr l, TypePtr r);
  // Right-nested product of n Bools (n >= 1).
  static TypePtr bits(std::size_t n);

  std::size_t width_ = 1;
};

bool same_type(const Type& a, const Type& b);
std::string to_string(const Type& t);

using Bits = std::vector<bool>;

// A core value is a bit vector laid out by its type (left before right).
struct Value {
  TypePtr type;
  Bits bits;

  static Value boolean(bool b);
  static Value pair(const Value& a, const Value& b);
  Value fst() const;
  Value snd() const;
  bool truth() const { return bits.at(0); }

  bool operator==(const Value& o) const { return bits == o.bits && same_type(*type, *o.type); }
};

std::string to_string(const Value& v);

struct BitsHash {
  std::size_t operator()(const Bits& b) const noexcept;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept { return BitsHash{}(v.bits); }
};

struct NumericTerm {
  bool symbolic = false;
  double constant = 0.0;
  WeightId weight = 0;

  static NumericTerm constant_of(double c);
  static NumericTerm symbol(WeightId id) { return {true, 0.0, id}; }
  double resolve(const WeightVector& w) const { return symbolic ? w[weight] : constant; }
};

using ExprId = std::uint32_t;
using VarId = std::uint32_t;

enum class Op : std::uint8_t { Var, Const, Fst, Snd, Pair, Let, If, Flip };

struct Node {
  Op op = Op::Const;
  VarId var = 0;                     // Var, Let
  ExprId a = 0, b = 0, c = 0;        // children (meaning depends on op)
  std::uint32_t constant = 0;        // Const: index into the constant pool
  NumericTerm weight;                // Flip
};

// Arena-allocated expression graph. Subexpressions are referenced by id, so
// very long let chains never recurse in destructors.
class Program {
 public:
  VarId intern(const std::string& name);
  const std::string& var_name(VarId v) const { return vars_.at(v); }
  std::size_t var_count() const { return vars_.size(); }

  ExprId var(const std::string& name) { return var(intern(name)); }
  ExprId var(VarId v);
  ExprId constant(const Value& v);
  ExprId fst(ExprId e);
  ExprId snd(ExprId e);
  ExprId pair(ExprId a, ExprId b);
  ExprId let(const std::string& name, ExprId bound, ExprId body) { return let(intern(name), bound, body); }
  ExprId let(VarId v, ExprId bound, ExprId body);
  ExprId ite(ExprId guard, ExprId then_e, ExprId else_e);
  ExprId flip(NumericTerm q);

  const Node& node(ExprId e) const { return nodes_.at(e); }
  const Value& constant_value(const Node& n) const { return constants_.at(n.constant); }
  std::size_t size() const { return nodes_.size(); }
  bool is_atomic(ExprId e) const;

  std::string to_string(ExprId root) const;

 private:
  ExprId push(Node n);
  std::vector<Node> nodes_;
  std::vector<Value> constants_;
  std::vector<std::string> vars_;
  std::unordered_map<std::string, VarId> var_index_;
};

}  // namespace gentune::core
