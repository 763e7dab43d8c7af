#pragma once

#include "gentune/bdd/manager.hpp"
#include "gentune/core/ir.hpp"

#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace gentune {

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One BDD root per output bit, all owned by `mgr`.
struct CompiledProgram {
  std::shared_ptr<bdd::Manager> mgr;
  std::vector<bdd::NodeId> roots;
  std::vector<WeightId> weights;
  core::TypePtr type;

  std::size_t width() const { return roots.size(); }
};

struct CompileOptions {
  std::size_t flip_budget = std::size_t{1} << 22;
};

CompiledProgram compile(const core::Program& p, core::ExprId e,
                        std::shared_ptr<bdd::Manager> mgr = nullptr,
                        const CompileOptions& opt = {});

// Conjunction of (root_i if bit_i else not root_i); its WMC is the exact
// probability of the program producing exactly `bits`.
bdd::NodeId indicator(const CompiledProgram& prog, const core::Bits& bits);

// Caches indicator roots by value. Entries are only valid until the manager
// is rolled back past the cache's mark, so the cache owns that rollback.
class IndicatorCache {
 public:
  explicit IndicatorCache(const CompiledProgram& prog) : prog_(&prog), mark_(prog.mgr->mark()) {}
  bdd::NodeId get(const core::Bits& bits);
  void release();
  std::size_t size() const { return cache_.size(); }

 private:
  const CompiledProgram* prog_;
  std::size_t mark_;
  std::unordered_map<core::Bits, bdd::NodeId, core::BitsHash> cache_;
};

}  // namespace gentune
