#include "gentune/surface/naming.hpp"

namespace gentune::surface::naming {

std::string site(const std::string& base, const std::vector<Value>& indices) {
  if (indices.empty()) return base;
  std::string s = base + "[";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) s += ",";
    s += indices[i].str();
  }
  return s + "]";
}

std::string stick(const std::string& site, std::size_t j) { return site + "/" + std::to_string(j); }

std::string backtrack_stick(const std::string& site, const std::vector<std::size_t>& remaining, std::size_t j) {
  std::string s = site + "/{";
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(remaining[i]);
  }
  return s + "}/" + std::to_string(j);
}

std::string dependent_stick(const std::string& site, const Value& dep, std::size_t j) {
  return site + "{" + dep.str() + "}/" + std::to_string(j);
}

}  // namespace gentune::surface::naming
