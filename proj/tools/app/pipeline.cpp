#include "app/pipeline.hpp"

#include <chrono>
#include <filesystem>

#include "tstruct/errors.hpp"
#include "tstruct/rng.hpp"
#include "tstruct/serialization.hpp"

namespace tstruct::app {

RepeatSeeds repeat_seeds(std::uint64_t master, int repeat) {
  const auto r = static_cast<std::uint64_t>(repeat);
  return {derive_seed(master, "data", r), derive_seed(master, "subsample", r), derive_seed(master, "init", r)};
}

GeneratedData generate_data(const ExperimentConfig& config, int repeat) {
  config.validate();
  GeneratedData out;
  out.seed = repeat_seeds(config.seed, repeat).data;
  Rng rng(out.seed);
  const BinaryDag dag = config.graph_kind == GraphKind::kErdosRenyi
                            ? sample_er_dag(config.d, config.expected_edges(), rng)
                            : sample_sf_dag(config.d, rng);
  out.sem = sample_index_model(dag, rng, config.noise_scale);
  out.data = simulate(out.sem, config.n, rng);
  if (config.standardize) out.data = standardize(out.data);
  return out;
}

LearnOutput learn(const ExperimentConfig& config, const std::vector<Matrix>& datasets, int repeat) {
  config.validate();
  if (datasets.empty()) throw InvalidInput("no dataset given");
  const Eigen::Index d = datasets.front().cols();
  for (const Matrix& x : datasets) {
    if (x.cols() != d) throw InvalidInput("datasets have different column counts");
    if (x.rows() == 0) throw InvalidInput("empty dataset");
  }

  const RepeatSeeds seeds = repeat_seeds(config.seed, repeat);
  LearnOutput out;
  std::vector<Matrix> subsets;
  int K = config.K;
  if (datasets.size() > 1) {
    subsets = datasets;
    K = static_cast<int>(datasets.size());
  } else if (K == 1) {
    subsets = datasets;
  } else {
    const Matrix& x = datasets.front();
    if (K > x.rows()) throw InvalidInput("K exceeds the number of rows");
    switch (config.subsample) {
      case SubsampleMode::kBeta:
        out.partition = beta_subsample(x, K, seeds.subsample, config.sort);
        break;
      case SubsampleMode::kRandomSplit:
        out.partition = random_split(static_cast<int>(x.rows()), K, seeds.subsample);
        break;
      case SubsampleMode::kProvidedFiles:
        throw InvalidInput("subsample.mode provided-files needs one dataset per learner");
    }
    subsets = materialize(x, *out.partition);
  }

  ModelSpec spec;
  spec.K = K;
  spec.variant = config.variant;
  spec.d = static_cast<int>(d);
  spec.hyper = config.hyper;
  spec.alpha = config.effective_alpha();
  spec.omega = config.omega;
  out.model = make_model(spec, seeds.init);

  const auto start = std::chrono::steady_clock::now();
  out.train = dual_ascent_train(out.model, subsets, config.optim);
  out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.combined = combine_graphs(out.model);
  out.transport = transportability_check(out.model, config.omega);
  out.transport_default = transportability_check(out.model, 0.3);
  return out;
}

LearnOutput learn_baseline(const ExperimentConfig& config, const Matrix& data, int repeat) {
  ExperimentConfig single = config;
  single.K = 1;
  single.alpha = 0.0;
  return learn(single, {data}, repeat);
}

Json learn_summary(const LearnOutput& out) {
  return {
      {"K", out.model.K()},
      {"epochs", out.train.epochs},
      {"stop_reason", out.train.stop_reason},
      {"max_h", out.train.max_h},
      {"min_rho", out.train.min_rho},
      {"acyclic_before_repair", out.combined.acyclic_before_repair},
      {"edges", out.combined.dag.graph().edge_count()},
      {"transportable", out.transport.transportable},
      {"train_seconds", out.train_seconds},
  };
}

void write_learn_outputs(const LearnOutput& out, const ExperimentConfig& config, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  Json model = model_to_json(out.model);
  model["config_hash"] = config_hash(config);
  write_json_file((base / "model.json").string(), model);
  write_json_file((base / "dag.json").string(), dag_to_json(out.combined.dag));
  write_file_atomic((base / "train_log.jsonl").string(), log_to_jsonl(out.train.log));
  Json dropped = Json::array();
  for (const Edge& e : out.combined.dropped) dropped.push_back({e.from, e.to});
  const Json transport = {
      {"acyclic_before_repair", out.combined.acyclic_before_repair},
      {"repair_dropped", dropped},
      {"configured", transport_to_json(out.transport)},
      {"default", transport_to_json(out.transport_default)},
  };
  write_json_file((base / "transport.json").string(), transport);
  if (out.partition) write_json_file((base / "partition.json").string(), partition_to_json(*out.partition));
}

}  // namespace tstruct::app
