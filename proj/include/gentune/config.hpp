#pragma once

#include "gentune/trainer.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace gentune {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Values of the key/value configuration format: strings, numbers, booleans
// and single-line arrays of those.
struct ConfigValue {
  std::variant<std::string, double, bool, std::vector<ConfigValue>> v;
  int line = 0;

  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<std::vector<ConfigValue>>(v); }
  const std::string& str() const;
  double num() const;
  bool boolean() const;
  const std::vector<ConfigValue>& array() const;
};

// Section name -> ordered (key, value) entries. Keys before any header land
// in section "".
struct ConfigDoc {
  std::map<std::string, std::vector<std::pair<std::string, ConfigValue>>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const ConfigValue& at(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& dflt) const;
  double get_number(const std::string& section, const std::string& key, double dflt) const;
  bool get_bool(const std::string& section, const std::string& key, bool dflt) const;
};

ConfigDoc parse_config(const std::string& text, const std::string& file = "<config>");

struct ObjectiveSpec {
  // target_kl | entropy | specification | spec_entropy | feature_spec_entropy
  std::string kind = "entropy";
  std::string validity;
  std::string feature;
  std::string estimator = "exact";  // exact | reinforce (entropy family)
  bool corrected = false;
  std::vector<std::pair<std::string, double>> target;  // value text -> probability
};

struct TrainingJob {
  ObjectiveSpec objective;
  TrainConfig train;
  std::vector<std::string> program;  // generator file plus helper files
  std::string init_weights;          // optional JSON map to start from
  std::string weights_out;
  std::string trace_out;
};

// Relative paths in [io] resolve against the config file's directory.
TrainingJob load_training_job(const std::string& path);
TrainingJob training_job_from(const ConfigDoc& doc, const std::string& base_dir);

}  // namespace gentune
