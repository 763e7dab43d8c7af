#pragma once

#include "gentune/surface/ast.hpp"

#include <string>

namespace gentune {

struct DeriveConfig {
  std::string root;
  unsigned initial_size = 4;
  unsigned lookback = 2;
};

// Hands out program-location integers; a new derivation starts from 0.
class LocationCounter {
 public:
  unsigned fresh_loc() { return next_++; }
  unsigned issued() const { return next_; }
  void reset() { next_ = 0; }

 private:
  unsigned next_ = 0;
};

struct DerivedGenerator {
  std::string text;        // complete surface program, including the input types
  unsigned locations = 0;  // call-site locations allocated
};

class DeriveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Emits a sized, dependency-weighted generator for `cfg.root` and every ADT
// reachable from it. Weights split on (size, stack, chosen constructor).
DerivedGenerator derive_generator(const surface::Program& types, const DeriveConfig& cfg);

// Surface fragment generating a value of `type` from its non-recursive
// constructors only, with weights split on the expression `deps`.
std::string gen_terminal(const surface::Program& types, const std::string& type, const std::string& deps);

}  // namespace gentune
