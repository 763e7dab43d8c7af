#include "gentune/job.hpp"

#include "gentune/surface/parser.hpp"
#include "gentune/weights_io.hpp"

#include <ostream>

namespace gentune {

std::unique_ptr<Objective> make_objective(Model& m, const ObjectiveSpec& spec, std::size_t spb) {
  if (spec.kind == "target_kl") {
    Distribution target;
    for (const auto& [text, prob] : spec.target) target[surface::parse_value(text, m.program())] += prob;
    return std::make_unique<TargetKL>(m, std::move(target), spec.feature);
  }
  if (spec.kind == "specification") return std::make_unique<Specification>(m, spec.validity);

  std::string validity = spec.kind == "entropy" ? "" : spec.validity;
  std::string feature = spec.kind == "feature_spec_entropy" ? spec.feature : "";
  if (spec.estimator == "reinforce")
    return std::make_unique<EntropyReinforce>(m, spb, validity, feature, spec.corrected);
  return std::make_unique<EntropyExact>(m, validity, feature);
}

JobOutcome run_training_job(const TrainingJob& job, std::ostream* log) {
  if (job.program.empty()) throw ConfigError("[io] program is required");
  Model model(load_program(job.program));
  WeightVector init = job.init_weights.empty() ? model.initial_weights() : read_weights(job.init_weights, model.table());
  auto objective = make_objective(model, job.objective, job.train.spb);

  TrainConfig cfg = job.train;
  auto on_epoch = [&](const TraceRow& row) {
    if (log && cfg.log_every && row.epoch % cfg.log_every == 0)
      *log << "epoch " << row.epoch << " objective " << row.objective << " grad_norm " << row.grad_norm << "\n";
  };
  JobOutcome out{train(*objective, init, cfg, on_epoch), init};
  if (!job.weights_out.empty()) write_weights(job.weights_out, model.table(), out.result.weights);
  if (!job.trace_out.empty()) write_trace_csv(job.trace_out, out.result.trace);
  if (log && out.result.empty_batches)
    *log << "warning: " << out.result.empty_batches << " batches had no valid sample\n";
  return out;
}

}  // namespace gentune
