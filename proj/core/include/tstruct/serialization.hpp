#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tstruct/adjacency.hpp"
#include "tstruct/dsf.hpp"
#include "tstruct/dual_ascent.hpp"
#include "tstruct/ensemble.hpp"
#include "tstruct/metrics.hpp"
#include "tstruct/subsample.hpp"
#include "tstruct/synthdata.hpp"

namespace tstruct {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal representation in fixed notation ('.' separator,
// never an exponent).
std::string format_double(double v);

// Row-major array of arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// {"d": int, "edges": [[i, j], ...]}, 0-based.
Json graph_to_json(const BinaryGraph& g);
BinaryGraph graph_from_json(const Json& j);
Json dag_to_json(const BinaryDag& g);
// Throws InvalidInput if the edges contain a cycle.
BinaryDag dag_from_json(const Json& j);

// {"variant", "d", "hidden", "values"}.
Json dsf_params_to_json(const DsfParams& p);
DsfParams dsf_params_from_json(const Json& j);

Json dsf_hyper_to_json(const DsfHyper& h);
DsfHyper dsf_hyper_from_json(const Json& j);

// {"dag", "theta": [3 matrices], "noise_scale"}.
Json sem_to_json(const SemSystem& sem);
SemSystem sem_from_json(const Json& j);

// {"K", "permutation", "index_sets", "seed"}.
Json partition_to_json(const SubsetPartition& p);
SubsetPartition partition_from_json(const Json& j);

Json metrics_to_json(const MetricsReport& m);

// One training-log line: {epoch, k, h, rho_k, lambda2_k, objective, l_mse}.
Json step_to_json(const StepRecord& r);
std::string log_to_jsonl(const std::vector<StepRecord>& log);

Json transport_to_json(const TransportReport& r);

// Hyperparameters, learner parameter blocks and dual state.
Json model_to_json(const DStructModel& model);
DStructModel model_from_json(const Json& j);

// CSV with header x1..xd and one row per sample.
std::string matrix_to_csv(const Matrix& x);
// Throws InvalidInput on ragged rows or unparsable numbers.
Matrix matrix_from_csv(const std::string& text);

// Throws IoError naming the path.
std::string read_file(const std::string& path);
Json read_json_file(const std::string& path);
// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);
Matrix read_csv_file(const std::string& path);

}  // namespace tstruct
