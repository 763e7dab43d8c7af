#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gentune {

using WeightId = std::uint32_t;
using WeightVector = Eigen::VectorXd;

// Registry of symbolic weights. Ids are dense and assigned in registration
// order; every weight carries the value it starts training from.
class WeightTable {
 public:
  WeightId intern(const std::string& name, double init);
  std::optional<WeightId> find(const std::string& name) const;

  std::size_t size() const { return names_.size(); }
  const std::string& name(WeightId id) const { return names_.at(id); }
  double initial(WeightId id) const { return init_.at(id); }

  WeightVector initial_vector() const;
  // Values for names present in `named`; all others keep their initial value.
  WeightVector from_named(const std::unordered_map<std::string, double>& named) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> init_;
  std::unordered_map<std::string, WeightId> index_;
};

}  // namespace gentune
