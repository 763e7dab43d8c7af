#include "gentune/config.hpp"
#include "gentune/weights_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gentune;

TEST(Config, ParsesSectionsAndValues) {
  auto doc = parse_config(
      "# comment\n"
      "[objective]\n"
      "kind = \"spec_entropy\"   # trailing\n"
      "validity = 'isRBT'\n"
      "[objective.target]\n"
      "\"(Branch Leaf 0)\" = 0.25\n"
      "[train]\n"
      "lr = 0.3\n"
      "epochs = 2_000\n"
      "clamp = true\n"
      "[io]\n"
      "program = [\"a.gen\", \"b.gen\"]\n");
  EXPECT_EQ(doc.get_string("objective", "kind", ""), "spec_entropy");
  EXPECT_EQ(doc.get_string("objective", "validity", ""), "isRBT");
  EXPECT_DOUBLE_EQ(doc.get_number("objective.target", "(Branch Leaf 0)", 0), 0.25);
  EXPECT_DOUBLE_EQ(doc.get_number("train", "epochs", 0), 2000);
  EXPECT_TRUE(doc.get_bool("train", "clamp", false));
  ASSERT_TRUE(doc.at("io", "program").is_array());
  EXPECT_EQ(doc.at("io", "program").array().size(), 2u);
  EXPECT_EQ(doc.get_number("train", "spb", 7), 7);
}

TEST(Config, ErrorsCarryLocation) {
  try {
    parse_config("[train]\nlr = 0.1\nlr = 0.2\n", "x.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.toml:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config("[train\n"), ConfigError);
  EXPECT_THROW(parse_config("lr 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config("s = \"open\n"), ConfigError);
}

TEST(Config, TrainingJobResolvesPathsAndValidates) {
  auto doc = parse_config(
      "[objective]\nkind = \"target_kl\"\n"
      "[objective.target]\na = 0.5\nb = 0.5\n"
      "[train]\nlr = 0.5\nepochs = 10\nspb = 20\nclamp_lo = 0.2\nclamp_hi = 0.8\nseed = 4\n"
      "[io]\nprogram = \"gen.gen\"\nweights_out = \"/tmp/w.json\"\n");
  auto job = training_job_from(doc, "/base");
  EXPECT_EQ(job.objective.kind, "target_kl");
  EXPECT_EQ(job.objective.target.size(), 2u);
  EXPECT_DOUBLE_EQ(job.train.lr, 0.5);
  EXPECT_EQ(job.train.epochs, 10u);
  EXPECT_EQ(job.train.spb, 20u);
  EXPECT_DOUBLE_EQ(job.train.clamp_lo, 0.2);
  EXPECT_EQ(job.train.seed, 4u);
  ASSERT_EQ(job.program.size(), 1u);
  EXPECT_EQ(job.program[0], "/base/gen.gen");
  EXPECT_EQ(job.weights_out, "/tmp/w.json");

  EXPECT_THROW(training_job_from(parse_config("[objective]\nkind = \"bogus\"\n[io]\nprogram = \"g\"\n"), "."),
               ConfigError);
  EXPECT_THROW(training_job_from(parse_config("[objective]\nkind = \"entropy\"\n[wat]\nx = 1\n"), "."),
               ConfigError);
  EXPECT_THROW(training_job_from(parse_config("[objective]\nkind = \"entropy\"\n[train]\nlr = \"fast\"\n"), "."),
               ConfigError);
}

TEST(WeightsIo, JsonRoundTrip) {
  WeightTable t;
  t.intern("a/0", 0.5);
  t.intern("b/1", 0.5);
  t.intern("c", 0.5);
  WeightVector w(3);
  w << 0.125, 0.3333333333333333, 0.9;
  WeightVector back = weights_from_json(weights_to_json(t, w), t);
  EXPECT_EQ(back, w);
}

TEST(WeightsIo, MissingAndUnknownNames) {
  WeightTable t;
  t.intern("a", 0.4);
  t.intern("b", 0.6);
  std::vector<std::string> unknown;
  WeightVector w = weights_from_json(R"({"a": 0.2, "zzz": 0.5})", t, &unknown);
  EXPECT_DOUBLE_EQ(w[0], 0.2);
  EXPECT_DOUBLE_EQ(w[1], 0.6);
  EXPECT_EQ(unknown, std::vector<std::string>{"zzz"});
  EXPECT_ANY_THROW(weights_from_json(R"({"a": 1.5})", t));
  EXPECT_ANY_THROW(weights_from_json(R"({"a": "x"})", t));
  EXPECT_ANY_THROW(weights_from_json("[1, 2]", t));
}

TEST(WeightsIo, TraceCsv) {
  auto path = std::filesystem::temp_directory_path() / "gentune_trace_test.csv";
  write_trace_csv(path.string(), {{0, -1.5, 0.25, 0}, {1, -1.0, 0.125, 0}});
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "epoch,objective,grad_norm");
  EXPECT_NE(text.find("1,-1"), std::string::npos);
  std::filesystem::remove(path);
}
