#pragma once

#include "gentune/model.hpp"
#include "gentune/surface/eval.hpp"

#include <map>
#include <optional>

namespace gentune {

// Seed of sample `index` in the stream `seed` (splitmix64 of a Weyl step), so
// each sample can be drawn independently of the others.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

Value sample(const surface::Program& p, const WeightTable& table, const WeightVector& w, std::uint64_t seed,
             std::uint64_t index = 0);

// Concrete evaluation of a one-argument predicate; an empty name accepts all.
bool check_validity(const surface::Program& p, const Value& v, const std::string& fn);
Value apply_feature(const surface::Program& p, const Value& v, const std::string& fn);

struct Sample {
  Value value;
  bool valid = true;
  std::optional<Value> feature;
};

struct SampleBatch {
  std::vector<Sample> samples;
  std::uint64_t seed = 0;
  WeightVector weights;
};

SampleBatch sample_batch(const surface::Program& p, const WeightTable& table, const WeightVector& w, std::size_t n,
                         std::uint64_t seed, const std::string& validity = "", const std::string& feature = "");

struct ReportRow {
  std::size_t samples = 0;
  std::size_t unique = 0;
  std::size_t unique_valid = 0;
  double validity_rate = 0.0;
};

struct Report {
  std::vector<ReportRow> curve;  // cumulative, at 1,2,5,10,20,50,... and the batch size
  ReportRow total;
  std::map<Value, std::size_t> feature_histogram;
};

std::vector<std::size_t> log_checkpoints(std::size_t n);
Report empirical_report(const SampleBatch& batch);

}  // namespace gentune
