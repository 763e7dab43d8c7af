#pragma once

#include "gentune/surface/value.hpp"

#include <string>
#include <vector>

namespace gentune::surface::naming {

// Weight names shared by the lowering and the concrete interpreter, so that a
// tuned weight file applies to both.
std::string site(const std::string& base, const std::vector<Value>& indices);
std::string stick(const std::string& site, std::size_t j);
std::string backtrack_stick(const std::string& site, const std::vector<std::size_t>& remaining, std::size_t j);
std::string dependent_stick(const std::string& site, const Value& dep, std::size_t j);

// Uniform initialisation of stick j in a chain over n branches.
inline double stick_init(std::size_t n, std::size_t j) { return 1.0 / static_cast<double>(n - j); }

inline constexpr double kParamInit = 0.5;

}  // namespace gentune::surface::naming
