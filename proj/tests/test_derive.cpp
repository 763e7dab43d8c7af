#include "gentune/derive.hpp"
#include "gentune/model.hpp"
#include "gentune/surface/parser.hpp"
#include "support/surface_enum.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace gentune;

namespace {

const char* kRbt =
    "(type Color Red Black)\n"
    "(type Tree Leaf (Branch Color Tree Nat Nat Tree))\n";

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Derive, RedBlackTreeShape) {
  auto types = surface::parse_program(kRbt, "rbt.gen");
  auto g = derive_generator(types, {"Tree", 3, 2});
  EXPECT_EQ(g.locations, 3u);  // two subtrees plus the color
  EXPECT_NE(g.text.find("(type TreeC LeafC BranchC)"), std::string::npos);
  EXPECT_NE(g.text.find("(type ColorC RedC BlackC)"), std::string::npos);
  EXPECT_NE(g.text.find("(define (firstN k s)"), std::string::npos);
  // Color x Tree x Tree constructor choices for the fields of Branch.
  EXPECT_EQ(count(g.text, "(tuple RedC") + count(g.text, "(tuple BlackC"), 8u);
  EXPECT_NE(g.text.find("(genTreeHelper 3 LNil"), std::string::npos);
  // The helper of a non-recursive type does not look at its size.
  auto color = g.text.substr(g.text.find("(define (genColorHelper"));
  color = color.substr(0, color.find("\n\n"));
  EXPECT_EQ(color.find("(match size"), std::string::npos);
  // Only Leaf terminates a Tree.
  auto term = g.text.substr(g.text.find("(define (genTerminalTree"));
  term = term.substr(0, term.find("\n\n"));
  EXPECT_NE(term.find("Leaf"), std::string::npos);
  EXPECT_EQ(term.find("Branch"), std::string::npos);
}

TEST(Derive, OutputParsesAndCompiles) {
  auto types = surface::parse_program("(type Color Red Black)\n(type Tree Leaf (Branch Color Tree Tree))", "t.gen");
  auto g = derive_generator(types, {"Tree", 2, 1});
  auto p = std::make_shared<surface::Program>(surface::parse_program(g.text, "derived.gen"));
  Model m(p);
  auto d = m.exact(m.initial_weights());
  double total = 0;
  for (const auto& [v, pr] : d) total += pr;
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_GT(d.size(), 1u);
}

TEST(Derive, TerminalGeneratorOverBaseConstructors) {
  auto types = surface::parse_program(kRbt, "rbt.gen");
  std::string t = gen_terminal(types, "Color", "(tuple)");
  EXPECT_NE(t.find("freqdep"), std::string::npos);
  EXPECT_NE(t.find("Red"), std::string::npos);
  EXPECT_NE(t.find("Black"), std::string::npos);
}

TEST(Derive, RejectsTypesWithoutBaseCase) {
  auto types = surface::parse_program("(type Stream (Cons Bool Stream))", "s.gen");
  EXPECT_THROW(derive_generator(types, {"Stream", 3, 2}), DeriveError);
  EXPECT_THROW(derive_generator(types, {"Missing", 3, 2}), DeriveError);
}

TEST(Derive, LocationsRestartPerDerivation) {
  auto types = surface::parse_program(kRbt, "rbt.gen");
  auto a = derive_generator(types, {"Tree", 2, 2});
  auto b = derive_generator(types, {"Tree", 2, 2});
  EXPECT_EQ(a.locations, b.locations);
  EXPECT_EQ(a.text, b.text);
  LocationCounter c;
  EXPECT_EQ(c.fresh_loc(), 0u);
  EXPECT_EQ(c.fresh_loc(), 1u);
  c.reset();
  EXPECT_EQ(c.issued(), 0u);
}

TEST(Derive, WeightCountMatchesReachableDependencies) {
  // Every weight the compiled model registers is one the concrete interpreter
  // actually consults on some execution path, and vice versa.
  auto types = surface::parse_program("(type T L (N T Bool T))", "t.gen");
  auto g = derive_generator(types, {"T", 2, 1});
  auto p = std::make_shared<surface::Program>(surface::parse_program(g.text, "derived.gen"));
  Model m(p);
  std::set<std::string> touched;
  surface::EvalContext ctx;
  ctx.table = &m.table();
  ctx.touched = &touched;
  gentune::testing::enumerate_surface(*p, p->main, ctx);
  std::set<std::string> registered;
  for (WeightId i = 0; i < m.table().size(); ++i) registered.insert(m.table().name(i));
  EXPECT_EQ(touched, registered);
}
