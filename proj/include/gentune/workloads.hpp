#pragma once

#include "gentune/derive.hpp"
#include "gentune/trainer.hpp"
#include "gentune/surface/ast.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gentune {

struct Workload {
  std::string name;
  std::string description;
  std::vector<std::string> files;  // relative to the workload directory
  std::optional<DeriveConfig> derive;  // set: files[0] holds type declarations to derive from
  std::string validity;
  std::vector<std::string> features;
  TrainConfig train;
};

std::string workload_dir();
const std::vector<Workload>& builtin_workloads();
const Workload& find_workload(const std::string& name);

// Parses (and, for derived workloads, first derives) the workload's program.
std::shared_ptr<const surface::Program> load_workload(const Workload& w);
// Source text of the workload's generator; derived ones are regenerated.
std::string workload_generator_text(const Workload& w);

}  // namespace gentune
