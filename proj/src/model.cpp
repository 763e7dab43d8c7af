#include "gentune/model.hpp"

#include "gentune/surface/parser.hpp"

namespace gentune {

CompiledSurface compile_surface(const surface::Program& p, const surface::ExprPtr& entry, WeightTable& table,
                                const surface::LowerOptions& opt) {
  surface::Lowered low = surface::lower(p, entry, table, opt);
  CompiledSurface out;
  out.shape = low.shape;
  out.flips = low.flips;
  out.gates = low.gates;
  out.prog = compile(low.core, low.root);
  if (out.shape.width() == 0) out.prog.roots.clear();
  if (out.prog.width() != out.shape.width())
    throw CompileError("lowered program width does not match its shape");
  return out;
}

Distribution decode(const BitDistribution& d, const surface::Shape& shape) {
  Distribution out;
  for (const auto& [bits, pr] : d) out[shape.decode(bits)] += pr;
  return out;
}

Distribution distribution(const CompiledSurface& c, const WeightVector& w, const ExactOptions& opt) {
  if (c.shape.width() == 0) return {{c.shape.decode({}), 1.0}};
  return decode(exact_distribution(c.prog, w, opt), c.shape);
}

double probability(CompiledSurface& c, const Value& v, const WeightVector& w) {
  auto bits = c.shape.encode(v);
  if (!bits) return 0.0;
  if (c.shape.width() == 0) return 1.0;
  auto& m = *c.prog.mgr;
  std::size_t mark = m.mark();
  double p = wmc(m, indicator(c.prog, *bits), w);
  m.rollback(mark);
  return p;
}

Model::Model(std::shared_ptr<const surface::Program> p, const surface::LowerOptions& opt)
    : program_(std::move(p)), table_(std::make_shared<WeightTable>()), opt_(opt) {
  if (!program_->main) throw std::invalid_argument("program has no main expression");
  generator_ = compile_surface(*program_, program_->main, *table_, opt_);
}

CompiledSurface& Model::composite(const std::string& fn) {
  auto it = composites_.find(fn);
  if (it != composites_.end()) return it->second;
  auto entry = surface::apply(*program_, fn, surface::main_ref());
  return composites_.emplace(fn, compile_surface(*program_, entry, *table_, opt_)).first->second;
}

Distribution Model::push_forward(const std::string& fn, const WeightVector& w, const ExactOptions& opt) {
  return distribution(composite(fn), w, opt);
}

std::shared_ptr<const surface::Program> load_program(const std::vector<std::string>& files) {
  auto p = std::make_shared<surface::Program>();
  for (const auto& f : files) surface::load_program_file(f, *p);
  return p;
}

}  // namespace gentune
