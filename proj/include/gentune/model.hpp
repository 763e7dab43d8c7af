#pragma once

#include "gentune/compiler.hpp"
#include "gentune/inference.hpp"
#include "gentune/surface/lower.hpp"

#include <map>
#include <memory>

namespace gentune {

using surface::Value;
using Distribution = std::map<Value, double>;

// A lowered surface expression compiled to one BDD root per output bit.
struct CompiledSurface {
  surface::Shape shape;
  CompiledProgram prog;
  std::size_t flips = 0;
  std::size_t gates = 0;
};

CompiledSurface compile_surface(const surface::Program& p, const surface::ExprPtr& entry, WeightTable& table,
                                const surface::LowerOptions& opt = {});

Distribution decode(const BitDistribution& d, const surface::Shape& shape);
Distribution distribution(const CompiledSurface& c, const WeightVector& w, const ExactOptions& opt = {});

// Probability of exactly `v`, or 0 when `v` cannot be encoded in the shape.
double probability(CompiledSurface& c, const Value& v, const WeightVector& w);

// A generator program together with the compositions fn∘main used by
// features and validity predicates. All share one weight table.
class Model {
 public:
  explicit Model(std::shared_ptr<const surface::Program> p, const surface::LowerOptions& opt = {});

  const surface::Program& program() const { return *program_; }
  const std::shared_ptr<const surface::Program>& program_ptr() const { return program_; }
  WeightTable& table() { return *table_; }
  const WeightTable& table() const { return *table_; }
  const surface::LowerOptions& lower_options() const { return opt_; }

  CompiledSurface& generator() { return generator_; }
  // fn∘main, compiled on first use.
  CompiledSurface& composite(const std::string& fn);

  WeightVector initial_weights() const { return table_->initial_vector(); }

  Distribution exact(const WeightVector& w, const ExactOptions& opt = {}) { return distribution(generator_, w, opt); }
  Distribution push_forward(const std::string& fn, const WeightVector& w, const ExactOptions& opt = {});

 private:
  std::shared_ptr<const surface::Program> program_;
  std::shared_ptr<WeightTable> table_;
  surface::LowerOptions opt_;
  CompiledSurface generator_;
  std::map<std::string, CompiledSurface> composites_;
};

std::shared_ptr<const surface::Program> load_program(const std::vector<std::string>& files);

}  // namespace gentune
