#include "app/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "app/bench.hpp"
#include "app/config.hpp"
#include "app/pipeline.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/metrics.hpp"
#include "tstruct/serialization.hpp"

namespace tstruct::app {
namespace {

namespace fs = std::filesystem;

// Config file plus one --<dotted.name> flag per config field.
struct ConfigOptions {
  std::string path;
  std::map<std::string, std::string> values;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", path, "JSON config document");
    const Json defaults = config_to_json(ExperimentConfig{});
    for (const std::string& key : config_keys()) {
      std::string pointer = "/" + key;
      std::replace(pointer.begin(), pointer.end(), '.', '/');
      const Json& d = defaults.at(Json::json_pointer(pointer));
      const std::string shown = d.is_null() ? "depends on K" : d.dump();
      cmd.add_option("--" + key, values[key], "config field " + key + " (default " + shown + ")");
    }
  }

  std::vector<std::pair<std::string, std::string>> given(const CLI::App& cmd) const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, value] : values) {
      if (cmd.count("--" + key) > 0) out.emplace_back(key, value);
    }
    return out;
  }

  Json document() const { return path.empty() ? Json::object() : read_json_file(path); }

  ExperimentConfig load(const CLI::App& cmd) const {
    Json j = document();
    for (const auto& [key, value] : given(cmd)) apply_override(j, key, value);
    return config_from_json(j);
  }
};

std::string repeat_dir(const ExperimentConfig& c, int r) {
  if (c.repeats == 1) return c.output;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "repeat_%03d", r);
  return (fs::path(c.output) / buf).string();
}

int cmd_generate(const ExperimentConfig& c, std::ostream& out) {
  for (int r = 0; r < c.repeats; ++r) {
    const GeneratedData g = generate_data(c, r);
    const fs::path dir(repeat_dir(c, r));
    write_file_atomic((dir / "data.csv").string(), matrix_to_csv(g.data));
    write_json_file((dir / "truth.json").string(), dag_to_json(g.truth()));
    write_json_file((dir / "sem.json").string(), sem_to_json(g.sem));
    out << "wrote " << (dir / "data.csv").string() << " (" << g.data.rows() << " rows, "
        << g.truth().graph().edge_count() << " true edges)\n";
  }
  return kExitOk;
}

int cmd_learn(ExperimentConfig c, const std::vector<std::string>& data_paths, int repeat, std::ostream& out) {
  if (data_paths.empty()) throw InvalidInput("learn needs at least one --data file");
  std::vector<Matrix> datasets;
  for (const auto& p : data_paths) datasets.push_back(read_csv_file(p));
  if (datasets.size() > 1) c.subsample = SubsampleMode::kProvidedFiles;
  const LearnOutput result = learn(c, datasets, repeat);
  write_learn_outputs(result, c, c.output);
  out << learn_summary(result).dump(2) << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path, std::string out_path,
                 std::ostream& out) {
  const BinaryGraph pred = graph_from_json(read_json_file(pred_path));
  const BinaryDag truth = dag_from_json(read_json_file(truth_path));
  const MetricsReport report = confusion_rates(pred, truth.graph());
  const Json j = metrics_to_json(report);
  if (out_path.empty()) out_path = (fs::path(pred_path).parent_path() / "metrics.json").string();
  write_json_file(out_path, j);
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_bench(const std::string& grid_path, const ConfigOptions& options, const CLI::App& cmd, std::string csv_path,
              bool quiet, std::ostream& out, std::ostream& err) {
  Json grid = read_json_file(grid_path);
  // --config supplies a base that the grid's own "base" refines.
  if (!options.path.empty()) {
    Json base = options.document();
    base.merge_patch(grid.value("base", Json::object()));
    grid["base"] = base;
  }
  const std::vector<BenchCell> cells = parse_grid(grid, options.given(cmd));
  if (csv_path.empty()) csv_path = (fs::path(cells.empty() ? "out" : cells.front().config.output) / "bench.csv").string();
  std::string csv = bench_csv_header();
  int failures = 0;
  Json errors = Json::object();
  for (const BenchCell& cell : cells) {
    Progress progress;
    if (!quiet) progress = [&err](const std::string& line) { err << line << "\n"; };
    const CellResult result = run_cell(cell, progress);
    csv += bench_csv_rows(result);
    failures += result.failures;
    if (!result.errors.empty()) errors[cell.name] = result.errors;
    // Keep partial results on disk as cells complete.
    write_file_atomic(csv_path, csv);
  }
  write_file_atomic(csv_path, csv);
  if (!errors.empty()) write_json_file(csv_path + ".errors.json", errors);
  out << csv;
  if (failures > 0) err << failures << " repeat(s) failed; see " << csv_path << ".errors.json\n";
  return kExitOk;
}

int cmd_transport_check(const std::string& model_path, std::optional<double> omega, std::ostream& out) {
  const DStructModel model = model_from_json(read_json_file(model_path));
  const double w = omega.value_or(model.omega);
  const TransportReport report = transportability_check(model, w);
  out << transport_to_json(report).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transportable DAG structure learning with an ensemble of differentiable score functions"};
  app.require_subcommand(1);

  ConfigOptions gen_opts;
  CLI::App* gen = app.add_subcommand("generate", "simulate a graph, index-model SEM and dataset");
  gen_opts.attach(*gen);

  ConfigOptions learn_opts;
  std::vector<std::string> data_paths;
  int repeat = 0;
  CLI::App* learn_cmd = app.add_subcommand("learn", "train D-Struct on one dataset (subsampled) or K datasets");
  learn_opts.attach(*learn_cmd);
  learn_cmd->add_option("--data", data_paths, "dataset CSV; repeat the flag to give one file per learner")->required();
  learn_cmd->add_option("--repeat", repeat, "repeat index used for seed derivation")->capture_default_str();

  std::string pred_path, truth_path, metrics_out;
  CLI::App* eval = app.add_subcommand("evaluate", "compare a predicted DAG with the true DAG");
  eval->add_option("--pred", pred_path, "predicted graph JSON")->required();
  eval->add_option("--truth", truth_path, "true DAG JSON")->required();
  eval->add_option("--out", metrics_out, "metrics JSON (default: metrics.json next to --pred)");

  ConfigOptions bench_opts;
  std::string grid_path, csv_path;
  bool quiet = false;
  CLI::App* bench = app.add_subcommand("bench", "run a grid of experiments and aggregate into CSV");
  bench_opts.attach(*bench);
  bench->add_option("--grid", grid_path, "grid JSON")->required();
  bench->add_option("--csv", csv_path, "output CSV (default: <output>/bench.csv)");
  bench->add_flag("--quiet", quiet, "no per-repeat progress on stderr");

  std::string model_path;
  std::optional<double> omega;
  CLI::App* transport = app.add_subcommand("transport-check", "pairwise SHD between a trained model's learners");
  transport->add_option("--model", model_path, "model.json written by learn")->required();
  transport->add_option("--omega", omega, "threshold (default: the model's omega)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (app.get_subcommands().empty()) {
      err << e.what() << "\n" << app.help();
    } else {
      err << e.what() << "\n";
    }
    return kExitInvalidInput;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_opts.load(*gen), out);
    if (learn_cmd->parsed()) return cmd_learn(learn_opts.load(*learn_cmd), data_paths, repeat, out);
    if (eval->parsed()) return cmd_evaluate(pred_path, truth_path, metrics_out, out);
    if (bench->parsed()) return cmd_bench(grid_path, bench_opts, *bench, csv_path, quiet, out, err);
    if (transport->parsed()) return cmd_transport_check(model_path, omega, out);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const OptimizationDiverged& e) {
    err << "numerical divergence: " << e.what() << "\n";
    return kExitDiverged;
  }
  return kExitInvalidInput;
}

}  // namespace tstruct::app
