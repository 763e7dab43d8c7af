#pragma once

#include "gentune/core/ir.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace gentune::bdd {

using NodeId = std::uint32_t;
using Level = std::uint32_t;

inline constexpr NodeId kFalse = 0;
inline constexpr NodeId kTrue = 1;
inline constexpr Level kTerminalLevel = std::numeric_limits<Level>::max();

struct Node {
  Level level;
  NodeId high;
  NodeId low;
};

// Reduced ordered BDD store without complement edges. Children are always
// allocated before their parents, so ascending node id is a topological order
// (leaves first) over any set of nodes.
class Manager {
 public:
  Manager();

  NodeId fresh_var(core::NumericTerm weight);
  NodeId ite(NodeId f, NodeId g, NodeId h);
  NodeId neg(NodeId f) { return ite(f, kFalse, kTrue); }
  NodeId conj(NodeId f, NodeId g) { return ite(f, g, kFalse); }
  NodeId disj(NodeId f, NodeId g) { return ite(f, kTrue, g); }
  NodeId exclusive(NodeId f, NodeId g) { return ite(f, neg(g), g); }

  const Node& node(NodeId n) const { return nodes_[n]; }
  static bool is_terminal(NodeId n) { return n <= kTrue; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t level_count() const { return levels_.size(); }
  const core::NumericTerm& level_weight(Level l) const { return levels_.at(l); }

  std::size_t node_count(NodeId root) const;
  std::size_t node_count(const std::vector<NodeId>& roots) const;
  std::vector<NodeId> reachable(NodeId root) const;  // interior nodes, ascending

  void clear_memo();

  // Every node allocated after `mark()` can be released again with
  // `rollback(mark)`; ids below the mark stay valid.
  std::size_t mark() const { return nodes_.size(); }
  void rollback(std::size_t mark);

  std::string to_dot(const std::vector<NodeId>& roots,
                     const std::vector<std::string>& weight_names = {}) const;

 private:
  NodeId make(Level level, NodeId high, NodeId low);
  Level top(NodeId n) const { return nodes_[n].level; }
  void grow_unique();
  void insert_unique(NodeId n);

  struct MemoEntry {
    NodeId f, g, h, result;
  };

  std::vector<Node> nodes_;
  std::vector<core::NumericTerm> levels_;
  std::vector<NodeId> unique_;  // open addressing, kFalse marks an empty slot
  std::size_t unique_used_ = 0;
  std::vector<MemoEntry> memo_;  // direct-mapped; lossy by design
};

// Manager-checked handle for callers that juggle several managers.
struct Bdd {
  Manager* mgr = nullptr;
  NodeId id = kFalse;
};

Bdd ite(Bdd f, Bdd g, Bdd h);
Bdd operator&(Bdd a, Bdd b);
Bdd operator|(Bdd a, Bdd b);
Bdd operator^(Bdd a, Bdd b);
Bdd operator!(Bdd a);
inline bool operator==(Bdd a, Bdd b) { return a.mgr == b.mgr && a.id == b.id; }

}  // namespace gentune::bdd
