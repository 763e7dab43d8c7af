#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace gentune::surface {

struct FieldType {
  enum class Kind { Bool, Nat, Adt, Any };
  Kind kind = Kind::Any;
  unsigned width = 0;  // Nat only
  std::string adt;     // Adt only
  std::string str() const;
};

struct CtorDecl {
  std::string name;
  std::vector<FieldType> fields;
};

struct AdtDecl {
  std::string name;
  std::vector<CtorDecl> ctors;
  unsigned tag_width() const;  // tags are ctor index + 1; 0 marks an absent value
  int find(const std::string& ctor) const;
};

using AdtPtr = std::shared_ptr<const AdtDecl>;

inline constexpr unsigned kDefaultNatWidth = 4;

unsigned bit_width(std::uint64_t n);

// Concrete surface value.
struct Value {
  enum class Kind : std::uint8_t { Bool, Nat, Tuple, Ctor };
  Kind kind = Kind::Bool;
  bool b = false;
  std::uint64_t n = 0;
  AdtPtr adt;
  std::uint32_t ctor = 0;
  std::vector<Value> args;  // tuple parts or constructor fields

  static Value boolean(bool v);
  static Value nat(std::uint64_t v);
  static Value tuple(std::vector<Value> parts);
  static Value make(AdtPtr adt, std::uint32_t ctor, std::vector<Value> fields);

  const std::string& ctor_name() const { return adt->ctors.at(ctor).name; }
  std::string str() const;
};

bool operator==(const Value& a, const Value& b);
inline bool operator!=(const Value& a, const Value& b) { return !(a == b); }
bool operator<(const Value& a, const Value& b);

struct SurfaceValueHash {
  std::size_t operator()(const Value& v) const noexcept;
};

}  // namespace gentune::surface
