#include "gentune/bdd/manager.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gentune::bdd {

namespace {

inline std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

inline std::uint64_t hash3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  return mix((static_cast<std::uint64_t>(a) << 32 | b) ^ mix(c + 0x9e3779b97f4a7c15ULL));
}

constexpr std::size_t kInitialUnique = 1u << 12;
constexpr std::size_t kInitialMemo = 1u << 14;

}  // namespace

Manager::Manager()
    : nodes_{{kTerminalLevel, kFalse, kFalse}, {kTerminalLevel, kTrue, kTrue}},
      unique_(kInitialUnique, kFalse),
      memo_(kInitialMemo, MemoEntry{kFalse, kFalse, kFalse, kFalse}) {}

NodeId Manager::fresh_var(core::NumericTerm weight) {
  auto level = static_cast<Level>(levels_.size());
  levels_.push_back(weight);
  return make(level, kTrue, kFalse);
}

void Manager::insert_unique(NodeId n) {
  const Node& nd = nodes_[n];
  std::size_t mask = unique_.size() - 1;
  std::size_t i = hash3(nd.level, nd.high, nd.low) & mask;
  while (unique_[i] != kFalse) i = (i + 1) & mask;
  unique_[i] = n;
}

void Manager::grow_unique() {
  std::vector<NodeId> old;
  old.swap(unique_);
  unique_.assign(old.size() * 2, kFalse);
  for (NodeId n : old)
    if (n != kFalse) insert_unique(n);
  if (memo_.size() < unique_.size() * 2)
    memo_.assign(unique_.size() * 2, MemoEntry{kFalse, kFalse, kFalse, kFalse});
}

NodeId Manager::make(Level level, NodeId high, NodeId low) {
  if (high == low) return high;
  std::size_t mask = unique_.size() - 1;
  std::size_t i = hash3(level, high, low) & mask;
  while (unique_[i] != kFalse) {
    const Node& nd = nodes_[unique_[i]];
    if (nd.level == level && nd.high == high && nd.low == low) return unique_[i];
    i = (i + 1) & mask;
  }
  if (nodes_.size() >= std::numeric_limits<NodeId>::max() - 1)
    throw std::length_error("BDD node store exhausted");
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({level, high, low});
  unique_[i] = id;
  if (++unique_used_ * 2 > unique_.size()) grow_unique();
  return id;
}

NodeId Manager::ite(NodeId f, NodeId g, NodeId h) {
  if (f == kTrue) return g;
  if (f == kFalse) return h;
  if (g == f) g = kTrue;
  if (h == f) h = kFalse;
  if (g == h) return g;
  if (g == kTrue && h == kFalse) return f;

  std::size_t slot = hash3(f, g, h) & (memo_.size() - 1);
  MemoEntry& e = memo_[slot];
  if (e.f == f && e.g == g && e.h == h && e.f != kFalse) return e.result;

  Level lv = std::min({top(f), top(g), top(h)});
  auto cof = [&](NodeId n, bool hi) {
    if (nodes_[n].level != lv) return n;
    return hi ? nodes_[n].high : nodes_[n].low;
  };
  NodeId hi = ite(cof(f, true), cof(g, true), cof(h, true));
  NodeId lo = ite(cof(f, false), cof(g, false), cof(h, false));
  NodeId r = make(lv, hi, lo);
  // The table may have been resized during recursion.
  memo_[hash3(f, g, h) & (memo_.size() - 1)] = MemoEntry{f, g, h, r};
  return r;
}

std::vector<NodeId> Manager::reachable(NodeId root) const {
  std::vector<NodeId> out;
  if (is_terminal(root)) return out;
  std::vector<NodeId> stack{root};
  std::vector<bool> seen(nodes_.size(), false);
  seen[root] = true;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    out.push_back(n);
    for (NodeId c : {nodes_[n].high, nodes_[n].low}) {
      if (!is_terminal(c) && !seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Manager::node_count(NodeId root) const { return reachable(root).size(); }

std::size_t Manager::node_count(const std::vector<NodeId>& roots) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack;
  std::size_t count = 0;
  for (NodeId r : roots)
    if (!is_terminal(r) && !seen[r]) {
      seen[r] = true;
      stack.push_back(r);
    }
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    ++count;
    for (NodeId c : {nodes_[n].high, nodes_[n].low})
      if (!is_terminal(c) && !seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
  }
  return count;
}

void Manager::clear_memo() {
  std::fill(memo_.begin(), memo_.end(), MemoEntry{kFalse, kFalse, kFalse, kFalse});
}

void Manager::rollback(std::size_t mark) {
  if (mark < 2 || mark > nodes_.size()) throw std::invalid_argument("bad rollback mark");
  if (mark == nodes_.size()) return;
  nodes_.resize(mark);
  std::fill(unique_.begin(), unique_.end(), kFalse);
  unique_used_ = 0;
  for (NodeId n = 2; n < mark; ++n) {
    insert_unique(n);
    ++unique_used_;
  }
  clear_memo();
}

std::string Manager::to_dot(const std::vector<NodeId>& roots,
                            const std::vector<std::string>& weight_names) const {
  std::ostringstream os;
  os << "digraph bdd {\n  node [shape=circle];\n";
  os << "  n0 [shape=box,label=\"F\"];\n  n1 [shape=box,label=\"T\"];\n";
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    os << "  r" << i << " [shape=plaintext,label=\"out" << i << "\"];\n";
    os << "  r" << i << " -> n" << roots[i] << ";\n";
    if (!is_terminal(roots[i]) && !seen[roots[i]]) {
      seen[roots[i]] = true;
      stack.push_back(roots[i]);
    }
  }
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[n];
    const auto& w = levels_[nd.level];
    os << "  n" << n << " [label=\"f" << nd.level << "\\n";
    if (w.symbolic)
      os << (w.weight < weight_names.size() ? weight_names[w.weight] : "#" + std::to_string(w.weight));
    else
      os << w.constant;
    os << "\"];\n";
    os << "  n" << n << " -> n" << nd.high << ";\n";
    os << "  n" << n << " -> n" << nd.low << " [style=dashed];\n";
    for (NodeId c : {nd.high, nd.low})
      if (!is_terminal(c) && !seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
  }
  os << "}\n";
  return os.str();
}

namespace {
Manager* same_manager(std::initializer_list<Bdd> xs) {
  Manager* m = xs.begin()->mgr;
  for (const Bdd& b : xs)
    if (b.mgr != m || m == nullptr) throw std::invalid_argument("BDD operands belong to different managers");
  return m;
}
}  // namespace

Bdd ite(Bdd f, Bdd g, Bdd h) {
  Manager* m = same_manager({f, g, h});
  return {m, m->ite(f.id, g.id, h.id)};
}
Bdd operator&(Bdd a, Bdd b) {
  Manager* m = same_manager({a, b});
  return {m, m->conj(a.id, b.id)};
}
Bdd operator|(Bdd a, Bdd b) {
  Manager* m = same_manager({a, b});
  return {m, m->disj(a.id, b.id)};
}
Bdd operator^(Bdd a, Bdd b) {
  Manager* m = same_manager({a, b});
  return {m, m->exclusive(a.id, b.id)};
}
Bdd operator!(Bdd a) {
  if (!a.mgr) throw std::invalid_argument("BDD handle without manager");
  return {a.mgr, a.mgr->neg(a.id)};
}

}  // namespace gentune::bdd
