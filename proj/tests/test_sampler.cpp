#include "gentune/sampler.hpp"
#include "gentune/surface/parser.hpp"
#include "gentune/workloads.hpp"
#include "support/chisq.hpp"

#include <gtest/gtest.h>

using namespace gentune;

namespace {

std::shared_ptr<const surface::Program> prog(const std::string& text) {
  return std::make_shared<surface::Program>(surface::parse_program(text, "sampler.gen"));
}

const char* kChar =
    "(type Char a b c d e)\n"
    "(define (vowel x) (match x (a true) (e true) (_ false)))\n"
    "(main (freq (param top) (freq (param left) a b c) (freq (param right) c d e)))";

}  // namespace

TEST(Sampler, SameSeedSameSamples) {
  auto p = prog(kChar);
  Model m(p);
  auto a = sample_batch(*p, m.table(), m.initial_weights(), 200, 5);
  auto b = sample_batch(*p, m.table(), m.initial_weights(), 200, 5);
  auto c = sample_batch(*p, m.table(), m.initial_weights(), 200, 6);
  bool differs = false;
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_EQ(a.samples[i].value, b.samples[i].value);
    differs |= a.samples[i].value != c.samples[i].value;
  }
  EXPECT_TRUE(differs);
  // Each sample depends only on (seed, index).
  EXPECT_EQ(sample(*p, m.table(), m.initial_weights(), 5, 17), a.samples[17].value);
}

TEST(Sampler, StreamSeedsDiffer) {
  EXPECT_NE(stream_seed(0, 0), stream_seed(0, 1));
  EXPECT_NE(stream_seed(0, 0), stream_seed(1, 0));
}

TEST(Sampler, ChiSquareAgainstExactDistribution) {
  auto p = prog(kChar);
  Model m(p);
  std::unordered_map<std::string, double> named{{"top/0", 0.3}, {"left/0", 0.6}, {"left/1", 0.2}};
  WeightVector w = m.table().from_named(named);
  auto batch = sample_batch(*p, m.table(), w, 20000, 3);
  std::vector<Value> values;
  for (const auto& s : batch.samples) values.push_back(s.value);
  auto chi = gentune::testing::chi_square(m.exact(w), values);
  EXPECT_EQ(chi.dof, 4u);
  EXPECT_GT(chi.p_value, 1e-4) << chi.statistic;
}

TEST(Sampler, ChiSquareDetectsWrongWeights) {
  auto p = prog(kChar);
  Model m(p);
  auto batch = sample_batch(*p, m.table(), m.initial_weights(), 20000, 3);
  std::vector<Value> values;
  for (const auto& s : batch.samples) values.push_back(s.value);
  std::unordered_map<std::string, double> named{{"top/0", 0.3}};
  auto chi = gentune::testing::chi_square(m.exact(m.table().from_named(named)), values);
  EXPECT_LT(chi.p_value, 1e-4);
}

TEST(Report, CheckpointsAndMonotoneCounts) {
  EXPECT_EQ(log_checkpoints(100), (std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100}));
  EXPECT_EQ(log_checkpoints(7), (std::vector<std::size_t>{1, 2, 5, 7}));
  auto p = prog(kChar);
  Model m(p);
  auto batch = sample_batch(*p, m.table(), m.initial_weights(), 1000, 9, "vowel");
  Report r = empirical_report(batch);
  ASSERT_FALSE(r.curve.empty());
  EXPECT_EQ(r.curve.back().samples, 1000u);
  for (std::size_t i = 1; i < r.curve.size(); ++i) {
    EXPECT_GE(r.curve[i].unique, r.curve[i - 1].unique);
    EXPECT_GE(r.curve[i].unique_valid, r.curve[i - 1].unique_valid);
  }
  EXPECT_EQ(r.total.unique, 5u);
  EXPECT_EQ(r.total.unique_valid, 2u);
  EXPECT_NEAR(r.total.validity_rate, 1.0 / 3.0, 0.05);
}

TEST(Sampler, ValidityAgreesWithCompiledPredicate) {
  // The concrete predicate on a sample matches the compiled predicate applied
  // to the same constant value.
  const Workload& wl = find_workload("rbt");
  auto p = load_workload(wl);
  Model m(p);
  auto batch = sample_batch(*p, m.table(), m.initial_weights(), 300, 4, wl.validity);
  for (const auto& s : batch.samples) {
    WeightTable t;
    auto c = compile_surface(*p, surface::parse_expr("(" + wl.validity + " " + s.value.str() + ")", *p), t);
    auto d = distribution(c, WeightVector(0));
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.begin()->first.b, s.valid) << s.value.str();
  }
}
