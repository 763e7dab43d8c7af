#include "gentune/surface/value.hpp"

#include <bit>
#include <tuple>

namespace gentune::surface {

std::string FieldType::str() const {
  switch (kind) {
    case Kind::Bool: return "Bool";
    case Kind::Nat: return width == kDefaultNatWidth ? "Nat" : "(Nat " + std::to_string(width) + ")";
    case Kind::Adt: return adt;
    case Kind::Any: return "Any";
  }
  return "?";
}

unsigned bit_width(std::uint64_t n) { return static_cast<unsigned>(std::bit_width(n)); }

unsigned AdtDecl::tag_width() const { return bit_width(ctors.size()); }

int AdtDecl::find(const std::string& ctor) const {
  for (std::size_t i = 0; i < ctors.size(); ++i)
    if (ctors[i].name == ctor) return static_cast<int>(i);
  return -1;
}

Value Value::boolean(bool v) {
  Value x;
  x.kind = Kind::Bool;
  x.b = v;
  return x;
}

Value Value::nat(std::uint64_t v) {
  Value x;
  x.kind = Kind::Nat;
  x.n = v;
  return x;
}

Value Value::tuple(std::vector<Value> parts) {
  Value x;
  x.kind = Kind::Tuple;
  x.args = std::move(parts);
  return x;
}

Value Value::make(AdtPtr adt, std::uint32_t ctor, std::vector<Value> fields) {
  Value x;
  x.kind = Kind::Ctor;
  x.adt = std::move(adt);
  x.ctor = ctor;
  x.args = std::move(fields);
  return x;
}

std::string Value::str() const {
  switch (kind) {
    case Kind::Bool: return b ? "true" : "false";
    case Kind::Nat: return std::to_string(n);
    case Kind::Tuple: {
      std::string s = "(tuple";
      for (const auto& a : args) s += " " + a.str();
      return s + ")";
    }
    case Kind::Ctor: {
      if (args.empty()) return ctor_name();
      std::string s = "(" + ctor_name();
      for (const auto& a : args) s += " " + a.str();
      return s + ")";
    }
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Bool: return a.b == b.b;
    case Value::Kind::Nat: return a.n == b.n;
    case Value::Kind::Tuple: return a.args == b.args;
    case Value::Kind::Ctor:
      return a.ctor == b.ctor && (a.adt == b.adt || a.adt->name == b.adt->name) && a.args == b.args;
  }
  return false;
}

bool operator<(const Value& a, const Value& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  switch (a.kind) {
    case Value::Kind::Bool: return a.b < b.b;
    case Value::Kind::Nat: return a.n < b.n;
    case Value::Kind::Tuple: return a.args < b.args;
    case Value::Kind::Ctor:
      if (a.adt != b.adt && a.adt->name != b.adt->name) return a.adt->name < b.adt->name;
      return std::tie(a.ctor, a.args) < std::tie(b.ctor, b.args);
  }
  return false;
}

std::size_t SurfaceValueHash::operator()(const Value& v) const noexcept {
  std::size_t h = static_cast<std::size_t>(v.kind) * 0x9e3779b97f4a7c15ULL;
  auto combine = [&](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  switch (v.kind) {
    case Value::Kind::Bool: combine(v.b); break;
    case Value::Kind::Nat: combine(std::hash<std::uint64_t>{}(v.n)); break;
    case Value::Kind::Ctor: combine(v.ctor); [[fallthrough]];
    case Value::Kind::Tuple:
      for (const auto& a : v.args) combine((*this)(a));
      break;
  }
  return h;
}

}  // namespace gentune::surface
