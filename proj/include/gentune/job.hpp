#pragma once

#include "gentune/config.hpp"
#include "gentune/objectives.hpp"

#include <iosfwd>
#include <memory>

namespace gentune {

// Builds the objective a config describes. Target keys are parsed as surface
// values against the model's program.
std::unique_ptr<Objective> make_objective(Model& m, const ObjectiveSpec& spec, std::size_t spb);

struct JobOutcome {
  TrainResult result;
  WeightVector initial;
};

// Loads the program, trains, and writes the weights and trace files named in
// the job. Progress lines go to `log` when it is non-null.
JobOutcome run_training_job(const TrainingJob& job, std::ostream* log = nullptr);

}  // namespace gentune
