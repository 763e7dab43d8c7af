#pragma once

#include "gentune/objectives.hpp"

#include <functional>

namespace gentune {

// Unconstrained logits squashed through the logistic function, then
// optionally projected onto [lo, hi].
struct WeightParams {
  Eigen::VectorXd logits;
  bool clamp = true;
  double lo = 0.1, hi = 0.9;

  static WeightParams from_weights(const WeightVector& w, bool clamp = true, double lo = 0.1, double hi = 0.9);
  WeightVector squash() const;
  WeightVector realize() const;
};

struct TrainConfig {
  double lr = 0.3;
  std::size_t epochs = 2000;
  std::size_t spb = 200;
  bool clamp = true;
  double clamp_lo = 0.1, clamp_hi = 0.9;
  std::uint64_t seed = 0;
  std::size_t log_every = 0;  // 0: silent
  bool early_stop = false;
  std::size_t plateau_window = 50;
  double plateau_tol = 1e-7;
};

struct TraceRow {
  std::size_t epoch = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  std::uint64_t digest = 0;
};

struct TrainResult {
  WeightVector weights;
  std::vector<TraceRow> trace;
  bool stopped_early = false;
  std::size_t empty_batches = 0;
};

class TrainError : public std::runtime_error {
 public:
  TrainError(std::size_t epoch, WeightVector w, const std::string& msg)
      : std::runtime_error(msg), epoch(epoch), weights(std::move(w)) {}
  std::size_t epoch;
  WeightVector weights;
};

std::uint64_t weight_digest(const WeightVector& w);

// Gradient ascent on the objective. `on_epoch` sees every trace row.
TrainResult train(Objective& objective, const WeightVector& init, const TrainConfig& cfg,
                  const std::function<void(const TraceRow&)>& on_epoch = {});

}  // namespace gentune
