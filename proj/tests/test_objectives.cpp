#include "gentune/objectives.hpp"
#include "gentune/surface/parser.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gentune;

namespace {

std::shared_ptr<const surface::Program> prog(const std::string& text) {
  return std::make_shared<surface::Program>(surface::parse_program(text, "obj.gen"));
}

const char* kChar =
    "(type Char a b c d e)\n"
    "(define (yes x) true)\n"
    "(define (id x) x)\n"
    "(define (const x) 0)\n"
    "(main (freq (param top) (freq (param left) a b c) (freq (param right) c d e)))";

const char* kFlat =
    "(type Char a b c d e)\n"
    "(main (freq (param p) a b c d e))";

WeightVector at(const WeightTable& t, std::initializer_list<std::pair<const char*, double>> named) {
  std::unordered_map<std::string, double> m;
  for (const auto& [k, v] : named) m[k] = v;
  return t.from_named(m);
}

// Central finite differences of objective value.
WeightVector numeric_grad(Objective& o, const WeightVector& w, double h = 1e-6) {
  WeightVector g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    WeightVector lo = w, hi = w;
    lo[i] -= h;
    hi[i] += h;
    g[i] = (o.evaluate(hi, 0).value - o.evaluate(lo, 0).value) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(TargetKL, ZeroAtTargetNegativeElsewhere) {
  Model m(prog("(main (flip (param t)))"));
  Distribution target{{surface::Value::boolean(true), 0.3}, {surface::Value::boolean(false), 0.7}};
  TargetKL kl(m, target);
  WeightVector w(1);
  w[0] = 0.3;
  EXPECT_NEAR(kl.evaluate(w, 0).value, 0.0, 1e-12);
  w[0] = 0.6;
  double v = kl.evaluate(w, 0).value;
  EXPECT_LT(v, 0.0);
  EXPECT_NEAR(v, 0.3 * std::log(0.6 / 0.3) + 0.7 * std::log(0.4 / 0.7), 1e-12);
}

TEST(TargetKL, RejectsBadTargets) {
  Model m(prog("(main (flip 0.5))"));
  Distribution unnormalized{{surface::Value::boolean(true), 0.3}};
  EXPECT_THROW(TargetKL(m, unnormalized), ObjectiveError);
  Model m2(prog("(main true)"));
  Distribution outside{{surface::Value::boolean(true), 0.5}, {surface::Value::boolean(false), 0.5}};
  EXPECT_THROW(TargetKL(m2, outside), ObjectiveError);
}

TEST(TargetKL, ZeroProbabilityIsNumericFailure) {
  Model m(prog("(main (flip (param t)))"));
  Distribution target{{surface::Value::boolean(true), 0.5}, {surface::Value::boolean(false), 0.5}};
  TargetKL kl(m, target);
  WeightVector w(1);
  w[0] = 1.0;
  EXPECT_THROW(kl.evaluate(w, 0), ObjectiveError);
}

TEST(TargetKL, FeatureGradientMatchesFiniteDifferences) {
  auto p = prog(
      "(type Char a b c d e)\n"
      "(define (vowel x) (match x (a true) (e true) (_ false)))\n"
      "(main (freq (param top) (freq (param left) a b c) (freq (param right) c d e)))");
  Model m(p);
  Distribution target{{surface::Value::boolean(true), 0.4}, {surface::Value::boolean(false), 0.6}};
  TargetKL kl(m, target, "vowel");
  WeightVector w = at(m.table(), {{"top/0", 0.3}, {"left/0", 0.6}, {"left/1", 0.2}, {"right/0", 0.7}, {"right/1", 0.4}});
  auto g = kl.evaluate(w, 0).grad;
  auto fd = numeric_grad(kl, w);
  for (Eigen::Index i = 0; i < w.size(); ++i) EXPECT_NEAR(g[i], fd[i], std::max(1e-9, 1e-6 * std::abs(fd[i])));
}

TEST(Entropy, UniformOverFiveIsLogFive) {
  Model m(prog(kFlat));
  EntropyExact h(m);
  EXPECT_NEAR(h.evaluate(m.initial_weights(), 0).value, std::log(5.0), 1e-12);
  EXPECT_NEAR(h.evaluate(m.initial_weights(), 0).grad.norm(), 0.0, 1e-9);
}

TEST(Entropy, DeterministicGeneratorHasZeroEntropy) {
  Model m(prog("(type C a b)\n(main a)"));
  EntropyExact h(m);
  auto v = h.evaluate(m.initial_weights(), 0);
  EXPECT_NEAR(v.value, 0.0, 1e-15);
}

TEST(Entropy, SpecAndFeatureVariantsReduceToEntropy) {
  Model m(prog(kChar));
  WeightVector w = at(m.table(), {{"top/0", 0.35}, {"left/0", 0.5}, {"left/1", 0.3}, {"right/0", 0.2}, {"right/1", 0.6}});
  EntropyExact plain(m), spec(m, "yes"), feat(m, "yes", "id");
  auto a = plain.evaluate(w, 0), b = spec.evaluate(w, 0), c = feat.evaluate(w, 0);
  EXPECT_NEAR(a.value, b.value, 1e-9);
  EXPECT_NEAR(a.value, c.value, 1e-9);
  EXPECT_LT((a.grad - b.grad).norm(), 1e-9);
  EXPECT_LT((a.grad - c.grad).norm(), 1e-9);
}

TEST(Entropy, ConstantFeatureHasNoEntropy) {
  Model m(prog(kChar));
  EntropyExact feat(m, "yes", "const");
  auto v = feat.evaluate(m.initial_weights(), 0);
  EXPECT_NEAR(v.value, 0.0, 1e-12);
  EXPECT_NEAR(v.grad.norm(), 0.0, 1e-12);
}

TEST(Entropy, GradientMatchesFiniteDifferences) {
  auto p = prog(
      "(type Char a b c d e)\n"
      "(define (notc x) (match x (c false) (_ true)))\n"
      "(main (freq (param top) (freq (param left) a b c) (freq (param right) c d e)))");
  Model m(p);
  WeightVector w = at(m.table(), {{"top/0", 0.3}, {"left/0", 0.6}, {"left/1", 0.2}, {"right/0", 0.7}, {"right/1", 0.4}});
  EntropyExact plain(m), spec(m, "notc");
  for (Objective* o : {static_cast<Objective*>(&plain), static_cast<Objective*>(&spec)}) {
    auto g = o->evaluate(w, 0).grad;
    auto fd = numeric_grad(*o, w);
    for (Eigen::Index i = 0; i < w.size(); ++i) EXPECT_NEAR(g[i], fd[i], std::max(1e-9, 1e-6 * std::abs(fd[i])));
  }
}

TEST(Specification, LogValidityProbability) {
  Model m(prog("(define (isT x) x)\n(main (flip 0.3))"));
  Specification s(m, "isT");
  EXPECT_NEAR(s.evaluate(WeightVector(0), 0).value, std::log(0.3), 1e-12);
  Model always(prog("(define (yes x) true)\n(main (flip 0.3))"));
  EXPECT_NEAR(Specification(always, "yes").evaluate(WeightVector(0), 0).value, 0.0, 1e-15);
}

TEST(Specification, ZeroValidityIsNumericFailure) {
  Model m(prog("(define (no x) false)\n(main (flip 0.3))"));
  Specification s(m, "no");
  EXPECT_THROW(s.evaluate(WeightVector(0), 0), ObjectiveError);
}

TEST(Reinforce, DeterministicGeneratorGivesZero) {
  Model m(prog("(type C a b)\n(define (yes x) true)\n(main (freq (param p) a))"));
  EntropyReinforce r(m, 20, "yes");
  auto v = r.evaluate(m.initial_weights(), 1);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.grad.norm(), 0.0);
}

TEST(Reinforce, AllInvalidBatchIsFlagged) {
  Model m(prog("(define (no x) false)\n(main (flip (param t)))"));
  EntropyReinforce r(m, 10, "no");
  auto v = r.evaluate(m.initial_weights(), 3);
  EXPECT_TRUE(v.empty_batch);
  EXPECT_EQ(v.kept, 0u);
  EXPECT_EQ(v.grad.norm(), 0.0);
}

TEST(Reinforce, CorrectedFormIsUnbiasedForSpecEntropy) {
  auto p = prog(
      "(type Char a b c d e)\n"
      "(define (notc x) (match x (c false) (_ true)))\n"
      "(main (freq (param top) (freq (param left) a b c) (freq (param right) c d e)))");
  Model m(p);
  WeightVector w = at(m.table(), {{"top/0", 0.3}, {"left/0", 0.6}, {"left/1", 0.2}, {"right/0", 0.7}, {"right/1", 0.4}});
  auto exact = EntropyExact(m, "notc").evaluate(w, 0);
  EntropyReinforce r(m, 100, "notc", "", true);
  const int batches = 400;
  WeightVector sum = WeightVector::Zero(w.size()), sq = WeightVector::Zero(w.size());
  for (int b = 0; b < batches; ++b) {
    WeightVector g = r.evaluate(w, b).grad;
    sum += g;
    sq += g.cwiseProduct(g);
  }
  WeightVector mean = sum / batches;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    double var = sq[i] / batches - mean[i] * mean[i];
    double se = std::sqrt(std::max(var, 0.0) / batches);
    EXPECT_NEAR(mean[i], exact.grad[i], 4 * se + 1e-9) << m.table().name(i);
  }
}

TEST(Reinforce, SameSeedSameEstimate) {
  Model m(prog(kChar));
  EntropyReinforce r(m, 50);
  auto a = r.evaluate(m.initial_weights(), 11), b = r.evaluate(m.initial_weights(), 11);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ((a.grad - b.grad).norm(), 0.0);
}
