#pragma once

#include "gentune/surface/sexpr.hpp"
#include "gentune/surface/value.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gentune::surface {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// A numeric weight position: a literal, a static ratio of naturals, or a named
// symbolic parameter indexed by static values.
struct WeightExpr {
  enum class Kind { Literal, Ratio, Static, Param };
  Kind kind = Kind::Literal;
  double literal = 0.0;
  ExprPtr num, den;             // Ratio; Static uses num only
  std::string name;             // Param
  std::vector<ExprPtr> indices; // Param
  Loc loc;
};

struct Pattern {
  enum class Kind { Wild, Var, NatLit, Succ, BoolLit, Ctor, Tuple };
  Kind kind = Kind::Wild;
  std::string name;            // Var binder, Succ binder, Ctor name
  std::uint64_t n = 0;
  bool b = false;
  AdtPtr adt;
  std::uint32_t ctor = 0;
  std::vector<std::string> binders;  // Ctor / Tuple fields ("_" ignores)
  Loc loc;
};

struct Arm {
  Pattern pat;
  ExprPtr body;
};

struct Expr {
  enum class Kind {
    BoolLit, NatLit, Var, Tuple, Get, Ctor, Call, If, Let, Match,
    Flip, Freq, Backtrack, FreqDep, Split, Prim
  };
  Kind kind = Kind::BoolLit;
  Loc loc;
  bool b = false;
  std::uint64_t n = 0;        // NatLit value, Get index
  std::string name;           // Var, Call target, Prim op, Split variable
  AdtPtr adt;                 // Ctor
  std::uint32_t ctor = 0;     // Ctor
  std::vector<ExprPtr> args;  // operands / branch bodies / Tuple parts
  std::vector<std::pair<std::string, ExprPtr>> binds;  // Let
  std::vector<Arm> arms;      // Match
  std::vector<WeightExpr> weights;  // Flip: 1; constant Freq/Backtrack: one per branch
  std::optional<WeightExpr> site;   // symbolic Freq / Backtrack / FreqDep
};

struct Function {
  std::string name;
  std::vector<std::string> params;
  ExprPtr body;
  Loc loc;
};

struct Program {
  std::map<std::string, AdtPtr> types;
  std::map<std::string, std::pair<AdtPtr, std::uint32_t>> ctors;
  std::map<std::string, Function> functions;
  ExprPtr main;
  std::vector<std::string> type_order;  // declaration order, builtins excluded

  Program();  // registers the builtin Option type
  const AdtDecl& adt(const std::string& name) const;
  AdtPtr option() const { return types.at("Option"); }
};

}  // namespace gentune::surface
