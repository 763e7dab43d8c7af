#include "support/chisq.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <limits>
#include <map>

namespace gentune::testing {

ChiSquare chi_square(const Distribution& exact, const std::vector<Value>& samples, double min_expected) {
  std::map<Value, std::size_t> counts;
  for (const auto& v : samples) ++counts[v];
  const double n = static_cast<double>(samples.size());

  std::vector<std::pair<double, double>> bins;  // (expected, observed)
  double pooled_e = 0, pooled_o = 0;
  for (const auto& [v, p] : exact) {
    auto it = counts.find(v);
    double o = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    if (it != counts.end()) counts.erase(it);
    if (n * p >= min_expected) {
      bins.emplace_back(n * p, o);
    } else {
      pooled_e += n * p;
      pooled_o += o;
    }
  }
  // Samples outside the exact support land in the pooled bin.
  for (const auto& [v, c] : counts) pooled_o += static_cast<double>(c);
  if (pooled_e > 0 || pooled_o > 0) bins.emplace_back(pooled_e, pooled_o);

  ChiSquare r;
  for (const auto& [e, o] : bins) {
    if (e <= 0) {
      if (o > 0) r.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    r.statistic += (o - e) * (o - e) / e;
  }
  if (bins.size() < 2) return r;
  r.dof = bins.size() - 1;
  if (!std::isfinite(r.statistic)) {
    r.p_value = 0.0;
    return r;
  }
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace gentune::testing
