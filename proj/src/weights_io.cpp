#include "gentune/weights_io.hpp"

#include "gentune/surface/parser.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace gentune {

std::string weights_to_json(const WeightTable& table, const WeightVector& w) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < table.size(); ++i)
    j[table.name(static_cast<WeightId>(i))] = i < static_cast<std::size_t>(w.size()) ? w[i] : table.initial(i);
  return j.dump(2) + "\n";
}

void write_weights(const std::string& path, const WeightTable& table, const WeightVector& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << weights_to_json(table, w);
}

WeightVector weights_from_json(const std::string& text, const WeightTable& table, std::vector<std::string>* unknown) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("weights file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("weights file must hold a JSON object");
  std::unordered_map<std::string, double> named;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw std::runtime_error("weight '" + k + "' is not a number");
    double d = v.get<double>();
    if (!(d > 0.0 && d < 1.0)) throw std::runtime_error("weight '" + k + "' must lie strictly between 0 and 1");
    if (!table.find(k) && unknown) unknown->push_back(k);
    named[k] = d;
  }
  return table.from_named(named);
}

WeightVector read_weights(const std::string& path, const WeightTable& table, std::vector<std::string>* unknown) {
  return weights_from_json(surface::read_file(path), table, unknown);
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "epoch,objective,grad_norm\n" << std::setprecision(17);
  for (const auto& r : trace) out << r.epoch << "," << r.objective << "," << r.grad_norm << "\n";
}

}  // namespace gentune
