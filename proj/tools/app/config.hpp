#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tstruct/dsf.hpp"
#include "tstruct/dual_ascent.hpp"
#include "tstruct/serialization.hpp"
#include "tstruct/subsample.hpp"
#include "tstruct/synthdata.hpp"

namespace tstruct::app {

enum class SubsampleMode { kBeta, kRandomSplit, kProvidedFiles };

std::string to_string(SubsampleMode m);
SubsampleMode parse_subsample_mode(const std::string& s);

// Suggested ensemble weight per learner count; larger ensembles want a
// smaller alpha because the per-learner penalties add up.
double suggested_alpha(int K);

// Everything a generate / learn / bench run needs. Defaults follow the
// standard benchmark setting: n = 1000, d = 5, K = 3, s = 2 (edges = s * d).
struct ExperimentConfig {
  GraphKind graph_kind = GraphKind::kErdosRenyi;
  int d = 5;
  double s = 2.0;
  int n = 1000;
  double noise_scale = 1.0;
  bool standardize = false;

  int K = 3;
  // Unset means suggested_alpha(K).
  std::optional<double> alpha;
  double omega = 0.3;

  DsfVariant variant = DsfVariant::kMlp;
  DsfHyper hyper;
  DualAscentConfig optim;
  SubsampleMode subsample = SubsampleMode::kBeta;
  SortKey sort = SortKey::kLexicographic;

  std::uint64_t seed = 1;
  int repeats = 1;
  std::string output = "out";

  double effective_alpha() const { return alpha.value_or(suggested_alpha(K)); }
  double expected_edges() const { return s * d; }
  void validate() const;
};

Json config_to_json(const ExperimentConfig& c);
// Missing fields keep their defaults; unknown fields are rejected.
ExperimentConfig config_from_json(const Json& j);

// Dotted paths of every leaf in the default configuration ("graph.d",
// "optim.inner.pgtol", ...).
std::vector<std::string> config_keys();

// Sets the leaf at `dotted_key`. Throws InvalidInput for unknown keys.
void set_config_value(Json& config, const std::string& dotted_key, const Json& value);
// Same with a command-line string: parsed as JSON when possible and taken as
// a string otherwise.
void apply_override(Json& config, const std::string& dotted_key, const std::string& value);

// Short stable hex digest of the canonical JSON form, ignoring `output`.
std::string config_hash(const ExperimentConfig& c);

}  // namespace tstruct::app
