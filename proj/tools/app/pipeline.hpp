#pragma once

#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "tstruct/ensemble.hpp"
#include "tstruct/metrics.hpp"
#include "tstruct/subsample.hpp"
#include "tstruct/synthdata.hpp"

namespace tstruct::app {

// Seeds for one repeat, split from the master seed by label.
struct RepeatSeeds {
  std::uint64_t data = 0;
  std::uint64_t subsample = 0;
  std::uint64_t init = 0;
};

RepeatSeeds repeat_seeds(std::uint64_t master, int repeat);

struct GeneratedData {
  SemSystem sem;
  Matrix data;
  std::uint64_t seed = 0;

  const BinaryDag& truth() const { return sem.dag; }
};

GeneratedData generate_data(const ExperimentConfig& config, int repeat);

struct LearnOutput {
  DStructModel model;
  TrainResult train;
  CombineResult combined;
  // Present only when the subsets were drawn from a single dataset.
  std::optional<SubsetPartition> partition;
  TransportReport transport;          // at config.omega
  TransportReport transport_default;  // at omega = 0.3
  double train_seconds = 0.0;
};

// Splits `datasets` according to the config (one file: subsampling applies
// unless K = 1; several files: used directly as the K subsets) and trains.
// TrainingDiverged propagates.
LearnOutput learn(const ExperimentConfig& config, const std::vector<Matrix>& datasets, int repeat = 0);

// Single learner, alpha = 0, on the full dataset. Same init seed as learner 0
// of the ensemble run.
LearnOutput learn_baseline(const ExperimentConfig& config, const Matrix& data, int repeat = 0);

Json learn_summary(const LearnOutput& out);

// Writes model.json, dag.json, train_log.jsonl, transport.json and, when the
// run subsampled, partition.json under `dir`.
void write_learn_outputs(const LearnOutput& out, const ExperimentConfig& config, const std::string& dir);

}  // namespace tstruct::app
