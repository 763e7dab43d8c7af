#pragma once

#include "gentune/trainer.hpp"
#include "gentune/weights.hpp"

#include <string>
#include <vector>

namespace gentune {

// Weights file: a JSON object mapping weight name to value.
std::string weights_to_json(const WeightTable& table, const WeightVector& w);
void write_weights(const std::string& path, const WeightTable& table, const WeightVector& w);

// Names missing from the file keep their initial value; names the table does
// not know are reported through `unknown` (or ignored when it is null).
WeightVector weights_from_json(const std::string& text, const WeightTable& table,
                               std::vector<std::string>* unknown = nullptr);
WeightVector read_weights(const std::string& path, const WeightTable& table,
                          std::vector<std::string>* unknown = nullptr);

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);

}  // namespace gentune
