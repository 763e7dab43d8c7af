#include "gentune/weights.hpp"

#include <stdexcept>

namespace gentune {

WeightId WeightTable::intern(const std::string& name, double init) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  if (!(init >= 0.0 && init <= 1.0))
    throw std::invalid_argument("initial weight for " + name + " outside [0,1]");
  auto id = static_cast<WeightId>(names_.size());
  names_.push_back(name);
  init_.push_back(init);
  index_.emplace(name, id);
  return id;
}

std::optional<WeightId> WeightTable::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WeightVector WeightTable::initial_vector() const {
  WeightVector w(static_cast<Eigen::Index>(init_.size()));
  for (std::size_t i = 0; i < init_.size(); ++i) w[static_cast<Eigen::Index>(i)] = init_[i];
  return w;
}

WeightVector WeightTable::from_named(const std::unordered_map<std::string, double>& named) const {
  WeightVector w = initial_vector();
  for (const auto& [name, value] : named) {
    auto id = find(name);
    if (id) w[*id] = value;
  }
  return w;
}

}  // namespace gentune
