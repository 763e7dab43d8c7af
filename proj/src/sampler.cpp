#include "gentune/sampler.hpp"

#include <set>

namespace gentune {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Value sample(const surface::Program& p, const WeightTable& table, const WeightVector& w, std::uint64_t seed,
             std::uint64_t index) {
  surface::RandomOracle oracle(stream_seed(seed, index));
  surface::EvalContext ctx;
  ctx.table = &table;
  ctx.weights = &w;
  return surface::eval_concrete(p, p.main, oracle, ctx);
}

bool check_validity(const surface::Program& p, const Value& v, const std::string& fn) {
  if (fn.empty()) return true;
  surface::NoFlipOracle none;
  Value r = surface::call_concrete(p, fn, v, none);
  if (r.kind != Value::Kind::Bool) throw std::runtime_error("validity predicate " + fn + " did not return a Bool");
  return r.b;
}

Value apply_feature(const surface::Program& p, const Value& v, const std::string& fn) {
  if (fn.empty()) return v;
  surface::NoFlipOracle none;
  return surface::call_concrete(p, fn, v, none);
}

SampleBatch sample_batch(const surface::Program& p, const WeightTable& table, const WeightVector& w, std::size_t n,
                         std::uint64_t seed, const std::string& validity, const std::string& feature) {
  SampleBatch b;
  b.seed = seed;
  b.weights = w;
  b.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.value = sample(p, table, w, seed, i);
    s.valid = check_validity(p, s.value, validity);
    if (!feature.empty()) s.feature = apply_feature(p, s.value, feature);
    b.samples.push_back(std::move(s));
  }
  return b;
}

std::vector<std::size_t> log_checkpoints(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t decade = 1; decade <= n; decade *= 10) {
    for (std::size_t m : {1, 2, 5})
      if (decade * m < n) out.push_back(decade * m);
    if (decade > n / 10) break;
  }
  if (n) out.push_back(n);
  return out;
}

Report empirical_report(const SampleBatch& batch) {
  Report r;
  std::set<Value> seen, seen_valid;
  std::size_t valid = 0;
  auto checkpoints = log_checkpoints(batch.samples.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < batch.samples.size(); ++i) {
    const Sample& s = batch.samples[i];
    seen.insert(s.value);
    if (s.valid) {
      ++valid;
      seen_valid.insert(s.value);
    }
    if (s.feature) ++r.feature_histogram[*s.feature];
    if (next < checkpoints.size() && checkpoints[next] == i + 1) {
      r.curve.push_back({i + 1, seen.size(), seen_valid.size(), static_cast<double>(valid) / static_cast<double>(i + 1)});
      ++next;
    }
  }
  if (!r.curve.empty()) r.total = r.curve.back();
  return r;
}

}  // namespace gentune
