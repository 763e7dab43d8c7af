#include "gentune/model.hpp"
#include "gentune/surface/eval.hpp"
#include "gentune/surface/parser.hpp"
#include "support/surface_enum.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gentune;
using namespace gentune::surface;

namespace {

std::shared_ptr<const Program> prog(const std::string& text) {
  return std::make_shared<Program>(parse_program(text, "test.gen"));
}

Loc error_loc(const std::string& text) {
  try {
    parse_program(text, "bad.gen");
  } catch (const SurfaceError& e) {
    return e.loc();
  }
  ADD_FAILURE() << "expected a parse error";
  return {};
}

void expect_same(const Distribution& a, const Distribution& b, double tol) {
  for (const auto& [v, p] : a) {
    auto it = b.find(v);
    double q = it == b.end() ? 0.0 : it->second;
    EXPECT_NEAR(p, q, tol) << v.str();
  }
  for (const auto& [v, p] : b)
    if (!a.count(v)) EXPECT_NEAR(p, 0.0, tol) << v.str();
}

double mass(const Distribution& d) {
  double s = 0;
  for (const auto& [v, p] : d) s += p;
  return s;
}

}  // namespace

TEST(Parser, UnknownFormReportsLineAndColumn) {
  Loc l = error_loc("(main\n  (frob 1))");
  EXPECT_EQ(l.line, 2);
  EXPECT_EQ(l.col, 3);
  l = error_loc("(type T A)\n(nonsense x)");
  EXPECT_EQ(l.line, 2);
  EXPECT_EQ(l.col, 1);
}

TEST(Parser, RejectsBadConstructorUse) {
  EXPECT_EQ(error_loc("(type T A (B Bool))\n(main (B))").line, 2);
  EXPECT_EQ(error_loc("(type T A)\n(main (match A\n   ((Q x) 1)))").line, 3);
  EXPECT_THROW(parse_program("(main (flip))"), SurfaceError);
  EXPECT_THROW(parse_program("(main (freq))"), SurfaceError);
  EXPECT_THROW(parse_program("(main (1 2"), SurfaceError);
  EXPECT_THROW(parse_program("(type T (C Wat))"), SurfaceError);
}

TEST(Parser, ValueSyntaxRoundTrips) {
  auto p = prog("(type Tree Leaf (Node Tree (Nat 3) Bool Tree))");
  for (std::string s : {"Leaf", "(Node Leaf 5 true (Node Leaf 0 false Leaf))", "(tuple 1 true Leaf)", "(Some 3)"}) {
    Value v = parse_value(s, *p);
    EXPECT_EQ(v.str(), s);
    EXPECT_EQ(parse_value(v.str(), *p), v);
  }
}

TEST(Lowering, ListEncodingMatchesNestedTagLayout) {
  auto p = prog(
      "(type List Nil (Cons (Nat 5) List))\n"
      "(main (Cons 10 (Cons 20 Nil)))");
  WeightTable t;
  auto c = compile_surface(*p, p->main, t);
  // (2,10,(2,20,(1,))): tag 2, then 10 in five bits, then the tail.
  std::string expect = "10" "01010" "10" "10100" "01";
  ASSERT_EQ(c.shape.width(), expect.size());
  auto bits = c.shape.encode(parse_value("(Cons 10 (Cons 20 Nil))", *p));
  ASSERT_TRUE(bits);
  std::string got;
  for (bool b : *bits) got += b ? '1' : '0';
  EXPECT_EQ(got, expect);
  auto d = distribution(c, t.initial_vector());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.begin()->first.str(), "(Cons 10 (Cons 20 Nil))");
  EXPECT_EQ(c.flips, 0u);
}

TEST(Lowering, ConstantFreqIsARatioChain) {
  auto p = prog("(type L A B C)\n(main (freq (1 A) (2 B) (3 C)))");
  WeightTable t;
  Lowered low = lower_main(*p, t);
  std::vector<double> qs;
  for (std::size_t i = 0; i < low.core.size(); ++i) {
    const auto& n = low.core.node(static_cast<core::ExprId>(i));
    if (n.op == core::Op::Flip) qs.push_back(n.weight.constant);
  }
  std::sort(qs.begin(), qs.end());
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_DOUBLE_EQ(qs[0], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(qs[1], 2.0 / 5.0);
  auto d = distribution(compile_surface(*p, p->main, t), t.initial_vector());
  EXPECT_NEAR(d.at(parse_value("A", *p)), 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(d.at(parse_value("B", *p)), 2.0 / 6.0, 1e-12);
  EXPECT_NEAR(d.at(parse_value("C", *p)), 3.0 / 6.0, 1e-12);
}

TEST(Lowering, SingleBranchFreqEmitsNoFlip) {
  auto p = prog("(type L A B)\n(main (freq (param a) A))");
  WeightTable t;
  Lowered low = lower_main(*p, t);
  EXPECT_EQ(low.flips, 0u);
  EXPECT_EQ(t.size(), 0u);
}

TEST(Lowering, StickBreakingEquivalence) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> q(2 + trial % 5);
    std::string text = "(main (freq";
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = u(rng);
      char buf[64];
      std::snprintf(buf, sizeof buf, " (%.17g %zu)", q[i], i);
      text += buf;
    }
    text += "))";
    auto p = prog(text);
    Model m(p);
    auto d = m.exact(m.initial_weights());
    double total = 0;
    for (double x : q) total += x;
    for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(d.at(Value::nat(i)), q[i] / total, 1e-12);
  }
}

TEST(Lowering, SymbolicFreqStartsUniform) {
  auto p = prog("(type L A B C D)\n(main (freq (param w) A B C D))");
  Model m(p);
  EXPECT_EQ(m.table().size(), 3u);
  EXPECT_EQ(m.table().name(0), "w/0");
  auto d = m.exact(m.initial_weights());
  for (const auto& [v, pr] : d) EXPECT_NEAR(pr, 0.25, 1e-12);
}

TEST(Lowering, NormalizationInvariance) {
  auto a = prog("(main (tuple (flip 0.3) (freq (1 0) (2 1) (4 2) (0 3))))");
  auto b = prog("(main (tuple (flip 0.3) (freq (7 0) (14 1) (28 2) (0 3))))");
  Model ma(a), mb(b);
  expect_same(ma.exact(ma.initial_weights()), mb.exact(mb.initial_weights()), 1e-12);
}

TEST(Lowering, BacktrackExamples) {
  auto one = prog("(main (backtrack (1 (Some 4))))");
  Model m1(one);
  auto d1 = m1.exact(m1.initial_weights());
  ASSERT_EQ(d1.size(), 1u);
  EXPECT_EQ(d1.begin()->first.str(), "(Some 4)");

  auto fall = prog("(main (backtrack (3 None) (1 (Some 2))))");
  Model m2(fall);
  auto d2 = m2.exact(m2.initial_weights());
  ASSERT_EQ(d2.size(), 1u);
  EXPECT_EQ(d2.begin()->first.str(), "(Some 2)");

  auto even = prog("(main (backtrack (1 (Some 0)) (1 (Some 1))))");
  Model m3(even);
  auto d3 = m3.exact(m3.initial_weights());
  EXPECT_NEAR(d3.at(parse_value("(Some 0)", *even)), 0.5, 1e-12);
  EXPECT_NEAR(d3.at(parse_value("(Some 1)", *even)), 0.5, 1e-12);
}

TEST(Lowering, BacktrackRenormalizesAmongRemaining) {
  // First pick A (w=1) with 1/4; A fails half the time; then B vs C at 2:1.
  auto p = prog("(main (backtrack (1 (if (flip 0.5) (Some 0) None)) (2 (Some 1)) (1 (Some 2))))");
  Model m(p);
  auto d = m.exact(m.initial_weights());
  double a = 0.25 * 0.5;
  double fail = 0.25 * 0.5;
  EXPECT_NEAR(d.at(parse_value("(Some 0)", *p)), a, 1e-12);
  EXPECT_NEAR(d.at(parse_value("(Some 1)", *p)), 0.5 + fail * 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.at(parse_value("(Some 2)", *p)), 0.25 + fail / 3.0, 1e-12);
}

TEST(Lowering, BacktrackExpansionBound) {
  auto p = prog("(main (backtrack (1 None) (1 None) (1 None) (1 None) (1 (Some 1))))");
  WeightTable t;
  EXPECT_THROW(lower_main(*p, t), SurfaceError);
  LowerOptions wide;
  wide.backtrack_limit = 5;
  WeightTable t2;
  EXPECT_NO_THROW(lower_main(*p, t2, wide));
}

TEST(Lowering, FreqDepParameterCounts) {
  auto two = prog("(main (let ((d (if (flip 0.5) 1 2))) (freqdep (param fd) d 0 1 2)))");
  Model m(two);
  EXPECT_EQ(m.table().size(), 4u);
  auto one = prog("(main (let ((d 1)) (freqdep (param fd) d 0 1 2)))");
  Model m1(one);
  EXPECT_EQ(m1.table().size(), 2u);
  auto d = m1.exact(m1.initial_weights());
  for (const auto& [v, pr] : d) EXPECT_NEAR(pr, 1.0 / 3.0, 1e-12);
}

TEST(Lowering, UnboundedRecursionIsReported) {
  auto p = prog("(define (f n) (f n))\n(main (f 1))");
  WeightTable t;
  try {
    lower_main(*p, t);
    FAIL();
  } catch (const SurfaceError& e) {
    EXPECT_NE(std::string(e.what()).find("unbounded recursion"), std::string::npos);
  }
}

TEST(Lowering, KindMismatchAcrossBranches) {
  auto p = prog("(main (if (flip 0.5) 1 true))");
  WeightTable t;
  EXPECT_THROW(lower_main(*p, t), SurfaceError);
}

TEST(Lowering, NatFieldsTruncateToDeclaredWidth) {
  auto p = prog("(type Box (Box (Nat 2)))\n(main (Box (+ 3 2)))");
  Model m(p);
  auto d = m.exact(m.initial_weights());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.begin()->first.str(), "(Box 1)");
  NoFlipOracle none;
  EXPECT_EQ(eval_concrete(*p, p->main, none).str(), "(Box 1)");
}

TEST(Shape, RoundTripExhaustive) {
  auto p = prog(
      "(type Color R B)\n"
      "(type Tree Leaf (Branch Color Tree (Nat 2) Tree))\n"
      "(define (g s) (match s (0 Leaf) ((S n) (freq (param w s) Leaf (Branch (freq (1 R) (1 B)) (g n) (if (flip 0.5) 3 0) (g n))))))\n"
      "(main (g 2))");
  Model m(p);
  const Shape& sh = m.generator().shape;
  auto values = sh.enumerate();
  EXPECT_GT(values.size(), 10u);
  for (const auto& v : values) {
    auto bits = sh.encode(v);
    ASSERT_TRUE(bits) << v.str();
    EXPECT_EQ(sh.decode(*bits), v);
  }
}

TEST(Eval, OracleExamples) {
  auto p = prog(
      "(type Tree Leaf (Branch Tree Tree))\n"
      "(define (g s) (match s (0 Leaf) ((S n) (freq (param w s) Leaf (Branch (g n) (g n))))))\n"
      "(main (g 0))");
  SequenceOracle empty({});
  EXPECT_EQ(eval_concrete(*p, p->main, empty).str(), "Leaf");

  auto f = prog("(main (flip (param t)))");
  SequenceOracle yes({true});
  EXPECT_EQ(eval_concrete(*f, f->main, yes).str(), "true");

  auto three = prog("(main (freq (param w) 0 1 2))");
  SequenceOracle ft({false, true});
  EXPECT_EQ(eval_concrete(*three, three->main, ft).str(), "1");
  SequenceOracle short_seq({false});
  EXPECT_THROW(eval_concrete(*three, three->main, short_seq), OracleExhausted);
}

// Programs exercising each surface construct; all have at most 12 flips.
const char* kCorpus[] = {
    "(type Color R B)\n(type Tree Leaf (Branch Color Tree Nat Tree))\n"
    "(define (genTree size) (match size (0 Leaf) ((S n) (freq (param w size) Leaf"
    " (Branch (freq (1 R) (1 B)) (genTree n) (freq (1 3) (2 5)) (genTree n))))))\n(main (genTree 2))",

    "(define (coin) (if (flip 0.3) 1 0))\n"
    "(main (let ((a (+ (coin) (coin))) (b (+ (coin) 2))) (tuple (- a b) (max a b) (min a b) (< a b) (= a 2) (>= b a))))",

    "(main (backtrack (1 (if (flip 0.4) (Some 1) None)) (2 (if (flip (param p)) (Some 2) None)) (3 None)))",

    "(main (backtrack (param bt) (if (flip 0.5) (Some true) None) (Some false) (if (flip (param q)) (Some true) None)))",

    "(main (let ((d (if (flip 0.5) 1 2))) (tuple d (freqdep (param fd) d true false (flip 0.3)))))",

    "(main (let ((x (freq (1 0) (1 1) (2 3)))) (split x (if (= x 3) (flip 0.2) (flip (param s x))))))",

    "(define (pick) (freq (param pk) None (Some (flip 0.7)) (Some false)))\n"
    "(main (match (pick) (None 0) ((Some b) (if b 1 2))))",

    "(type Box (Box (Nat 2)))\n(main (Box (+ (if (flip 0.5) 3 1) (if (flip 0.5) 2 0))))",

    "(define (count n) (match n (0 0) ((S m) (+ (if (flip 0.5) 1 0) (count m)))))\n"
    "(main (let ((x 3) (x (count x))) x))",

    "(main (let ((a (flip 0.2)) (b (flip (param q)))) (tuple (and a b) (or a (not b)) (= a b))))",

    "(main (let ((t (tuple (flip 0.5) (if (flip 0.5) 2 3)))) (match t ((tuple a b) (if a b (get 1 t))))))",

    "(type Color R B)\n"
    "(main (let ((c (freq (param c) R B)) (d (if (flip 0.6) R B))) (tuple (= c d) (match c (R d) (B c)))))",

    "(type T A (K Bool) (M T))\n"
    "(define (g s) (match s (0 (if (flip 0.5) A (K true))) ((S n) (freq (param t s) A (K (flip 0.1)) (M (g n))))))\n"
    "(main (let ((x (g 2))) (match x ((M y) (match y ((K b) (tuple 1 b)) (_ (tuple 2 false)))) (_ (tuple 0 (= x A))))))",

    "(main (let ((n (if (flip (param a)) 2 0)) (m (if (flip 0.5) 1 3))) (if (> n m) (- n m) (+ n m))))",
};

TEST(Lowering, SoundAgainstSurfaceEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (const char* text : kCorpus) {
    SCOPED_TRACE(text);
    auto p = prog(text);
    Model m(p);
    EXPECT_LE(m.generator().flips, 12u);
    for (int rep = 0; rep < 3; ++rep) {
      WeightVector w = m.initial_weights();
      if (rep > 0)
        for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = u(rng);
      EvalContext ctx;
      ctx.table = &m.table();
      ctx.weights = &w;
      auto expect = gentune::testing::enumerate_surface(*p, p->main, ctx);
      auto got = m.exact(w);
      EXPECT_NEAR(mass(got), 1.0, 1e-9);
      expect_same(got, expect, 1e-9);
    }
  }
}
