#pragma once

#include "gentune/core/ir.hpp"
#include "gentune/surface/value.hpp"

#include <optional>
#include <vector>

namespace gentune::surface {

// Bit layout of a lowered value. ADTs carry a tag (ctor index + 1) followed by
// one field block per constructor that can occur; blocks of constructors
// other than the tagged one are all zero.
struct Shape {
  enum class Kind { Bool, Nat, Tuple, Adt };
  Kind kind = Kind::Bool;
  unsigned nat_width = 0;
  std::vector<Shape> parts;  // Tuple
  AdtPtr adt;
  std::vector<std::optional<std::vector<Shape>>> ctors;  // Adt: present constructors

  std::size_t width() const;
  std::optional<core::Bits> encode(const Value& v) const;
  Value decode(const core::Bits& bits) const;
  std::string str() const;

  // Every value of the shape, for exhaustive round-trip checks.
  std::vector<Value> enumerate(std::size_t budget = 1u << 20) const;

  void encode_into(const Value& v, core::Bits& out, bool& ok) const;
  Value decode_from(const core::Bits& bits, std::size_t& pos) const;
  void zeros_into(core::Bits& out) const;
};

}  // namespace gentune::surface
