#include "gentune/config.hpp"

#include "gentune/surface/parser.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <set>

namespace gentune {

const std::string& ConfigValue::str() const {
  if (!is_string()) throw ConfigError("line " + std::to_string(line) + ": expected a string");
  return std::get<std::string>(v);
}
double ConfigValue::num() const {
  if (!is_number()) throw ConfigError("line " + std::to_string(line) + ": expected a number");
  return std::get<double>(v);
}
bool ConfigValue::boolean() const {
  if (!is_bool()) throw ConfigError("line " + std::to_string(line) + ": expected true or false");
  return std::get<bool>(v);
}
const std::vector<ConfigValue>& ConfigValue::array() const {
  if (!is_array()) throw ConfigError("line " + std::to_string(line) + ": expected an array");
  return std::get<std::vector<ConfigValue>>(v);
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end()) return false;
  for (const auto& [k, _] : s->second)
    if (k == key) return true;
  return false;
}

const ConfigValue& ConfigDoc::at(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s != sections.end())
    for (const auto& [k, v] : s->second)
      if (k == key) return v;
  throw ConfigError("missing key '" + key + "' in [" + section + "]");
}

std::string ConfigDoc::get_string(const std::string& section, const std::string& key, const std::string& dflt) const {
  return has(section, key) ? at(section, key).str() : dflt;
}
double ConfigDoc::get_number(const std::string& section, const std::string& key, double dflt) const {
  return has(section, key) ? at(section, key).num() : dflt;
}
bool ConfigDoc::get_bool(const std::string& section, const std::string& key, bool dflt) const {
  return has(section, key) ? at(section, key).boolean() : dflt;
}

namespace {

class LineParser {
 public:
  LineParser(const std::string& s, const std::string& file, int line) : s_(s), file_(file), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(file_ + ":" + std::to_string(line_) + ":" + std::to_string(i_ + 1) + ": " + msg);
  }

  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  bool at_end() {
    ws();
    return i_ >= s_.size() || s_[i_] == '#';
  }
  bool eat(char c) {
    ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (true) {
      if (i_ >= s_.size()) fail("unterminated string");
      char c = s_[i_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (i_ >= s_.size()) fail("unterminated escape");
      char e = s_[i_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
  }

  // Single-quoted strings are literal: no escapes.
  std::string literal() {
    expect('\'');
    std::size_t end = s_.find_first_of("'\n", i_);
    if (end == std::string::npos || s_[end] != '\'') fail("unterminated string");
    std::string out = s_.substr(i_, end - i_);
    i_ = end + 1;
    return out;
  }

  std::string key() {
    ws();
    if (i_ < s_.size() && s_[i_] == '"') return quoted();
    if (i_ < s_.size() && s_[i_] == '\'') return literal();
    std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '-' ||
                              s_[i_] == '.'))
      ++i_;
    if (start == i_) fail("expected a key");
    return s_.substr(start, i_ - start);
  }

  ConfigValue value() {
    ws();
    ConfigValue out;
    out.line = line_;
    if (i_ >= s_.size()) fail("expected a value");
    char c = s_[i_];
    if (c == '"') {
      out.v = quoted();
    } else if (c == '\'') {
      out.v = literal();
    } else if (c == '[') {
      ++i_;
      std::vector<ConfigValue> items;
      if (!eat(']')) {
        do {
          items.push_back(value());
        } while (eat(','));
        expect(']');
      }
      out.v = std::move(items);
    } else if (s_.compare(i_, 4, "true") == 0) {
      i_ += 4;
      out.v = true;
    } else if (s_.compare(i_, 5, "false") == 0) {
      i_ += 5;
      out.v = false;
    } else {
      std::size_t start = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' || s_[i_] == '-' ||
                                s_[i_] == '+' || s_[i_] == '_'))
        ++i_;
      std::string tok = s_.substr(start, i_ - start);
      std::erase(tok, '_');
      std::size_t used = 0;
      double d = 0;
      try {
        d = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (tok.empty() || used != tok.size() || !std::isfinite(d)) {
        i_ = start;
        fail("expected a string, number, boolean or array");
      }
      out.v = d;
    }
    return out;
  }

 private:
  const std::string& s_;
  const std::string& file_;
  int line_;
  std::size_t i_ = 0;
};

}  // namespace

ConfigDoc parse_config(const std::string& text, const std::string& file) {
  ConfigDoc doc;
  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    LineParser lp(line, file, line_no);
    if (lp.at_end()) continue;
    if (lp.eat('[')) {
      section = lp.key();
      lp.expect(']');
      if (!lp.at_end()) lp.fail("trailing text after section header");
      doc.sections[section];
      continue;
    }
    std::string key = lp.key();
    lp.expect('=');
    ConfigValue v = lp.value();
    if (!lp.at_end()) lp.fail("trailing text after value");
    if (!seen.insert({section, key}).second) lp.fail("duplicate key '" + key + "'");
    doc.sections[section].emplace_back(key, std::move(v));
  }
  return doc;
}

namespace {

const std::set<std::string> kKinds = {"target_kl", "entropy", "specification", "spec_entropy",
                                      "feature_spec_entropy"};

void check_keys(const ConfigDoc& doc, const std::string& section, const std::set<std::string>& allowed) {
  auto s = doc.sections.find(section);
  if (s == doc.sections.end()) return;
  for (const auto& [k, v] : s->second)
    if (!allowed.count(k))
      throw ConfigError("line " + std::to_string(v.line) + ": unknown key '" + k + "' in [" + section + "]");
}

std::size_t count(const ConfigDoc& doc, const std::string& section, const std::string& key, std::size_t dflt) {
  if (!doc.has(section, key)) return dflt;
  double d = doc.at(section, key).num();
  if (d < 0 || d != std::floor(d))
    throw ConfigError("'" + key + "' in [" + section + "] must be a non-negative integer");
  return static_cast<std::size_t>(d);
}

}  // namespace

TrainingJob training_job_from(const ConfigDoc& doc, const std::string& base_dir) {
  for (const auto& [name, _] : doc.sections)
    if (name != "objective" && name != "objective.target" && name != "train" && name != "io")
      throw ConfigError("unknown section [" + name + "]");
  check_keys(doc, "objective", {"kind", "validity", "feature", "estimator", "corrected"});
  check_keys(doc, "train", {"lr", "epochs", "spb", "clamp", "clamp_lo", "clamp_hi", "seed", "log_every",
                            "early_stop", "plateau_window", "plateau_tol"});
  check_keys(doc, "io", {"program", "init_weights", "weights_out", "trace_out"});

  TrainingJob job;
  ObjectiveSpec& o = job.objective;
  o.kind = doc.get_string("objective", "kind", "entropy");
  if (!kKinds.count(o.kind)) throw ConfigError("unknown objective kind '" + o.kind + "'");
  o.validity = doc.get_string("objective", "validity", "");
  o.feature = doc.get_string("objective", "feature", "");
  o.estimator = doc.get_string("objective", "estimator", "exact");
  if (o.estimator != "exact" && o.estimator != "reinforce")
    throw ConfigError("estimator must be \"exact\" or \"reinforce\"");
  o.corrected = doc.get_bool("objective", "corrected", false);
  if ((o.kind == "specification" || o.kind == "spec_entropy" || o.kind == "feature_spec_entropy") &&
      o.validity.empty())
    throw ConfigError("objective '" + o.kind + "' needs a validity function");
  if (o.kind == "feature_spec_entropy" && o.feature.empty())
    throw ConfigError("objective 'feature_spec_entropy' needs a feature function");
  if (auto t = doc.sections.find("objective.target"); t != doc.sections.end())
    for (const auto& [k, v] : t->second) o.target.emplace_back(k, v.num());
  if (o.kind == "target_kl" && o.target.empty()) throw ConfigError("target_kl needs an [objective.target] section");

  TrainConfig& c = job.train;
  c.lr = doc.get_number("train", "lr", c.lr);
  if (!(c.lr > 0)) throw ConfigError("lr must be positive");
  c.epochs = count(doc, "train", "epochs", c.epochs);
  c.spb = count(doc, "train", "spb", c.spb);
  if (c.spb == 0) throw ConfigError("spb must be at least 1");
  c.clamp = doc.get_bool("train", "clamp", c.clamp);
  c.clamp_lo = doc.get_number("train", "clamp_lo", c.clamp_lo);
  c.clamp_hi = doc.get_number("train", "clamp_hi", c.clamp_hi);
  if (c.clamp && !(0 < c.clamp_lo && c.clamp_lo <= c.clamp_hi && c.clamp_hi < 1))
    throw ConfigError("clamp bounds must satisfy 0 < clamp_lo <= clamp_hi < 1");
  c.seed = count(doc, "train", "seed", c.seed);
  c.log_every = count(doc, "train", "log_every", c.log_every);
  c.early_stop = doc.get_bool("train", "early_stop", c.early_stop);
  c.plateau_window = count(doc, "train", "plateau_window", c.plateau_window);
  c.plateau_tol = doc.get_number("train", "plateau_tol", c.plateau_tol);

  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base_dir) / p).lexically_normal().string();
  };
  if (doc.has("io", "program")) {
    const ConfigValue& pv = doc.at("io", "program");
    if (pv.is_string())
      job.program.push_back(resolve(pv.str()));
    else
      for (const auto& item : pv.array()) job.program.push_back(resolve(item.str()));
  }
  job.init_weights = resolve(doc.get_string("io", "init_weights", ""));
  job.weights_out = resolve(doc.get_string("io", "weights_out", ""));
  job.trace_out = resolve(doc.get_string("io", "trace_out", ""));
  return job;
}

TrainingJob load_training_job(const std::string& path) {
  ConfigDoc doc = parse_config(surface::read_file(path), path);
  return training_job_from(doc, std::filesystem::path(path).parent_path().string());
}

}  // namespace gentune
