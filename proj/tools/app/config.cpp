#include "app/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tstruct/errors.hpp"

namespace tstruct::app {

std::string to_string(SubsampleMode m) {
  switch (m) {
    case SubsampleMode::kBeta:
      return "beta";
    case SubsampleMode::kRandomSplit:
      return "random-split";
    case SubsampleMode::kProvidedFiles:
      return "provided-files";
  }
  return "beta";
}

SubsampleMode parse_subsample_mode(const std::string& s) {
  if (s == "beta") return SubsampleMode::kBeta;
  if (s == "random-split") return SubsampleMode::kRandomSplit;
  if (s == "provided-files") return SubsampleMode::kProvidedFiles;
  throw InvalidInput("unknown subsample mode '" + s + "' (expected beta, random-split or provided-files)");
}

double suggested_alpha(int K) {
  if (K <= 2) return 2.0;
  if (K == 3) return 1.0;
  if (K <= 5) return 0.5;
  return 0.25;
}

void ExperimentConfig::validate() const {
  if (d < 2) throw InvalidInput("graph.d must be >= 2");
  if (!(s >= 0.0)) throw InvalidInput("graph.s must be >= 0");
  if (graph_kind == GraphKind::kErdosRenyi && expected_edges() > 0.5 * d * (d - 1) + 1e-9) {
    throw InvalidInput("graph.s * graph.d exceeds the d(d-1)/2 possible edges");
  }
  if (n < 1) throw InvalidInput("n must be >= 1");
  if (!(noise_scale >= 0.0)) throw InvalidInput("noise_scale must be >= 0");
  if (K < 1) throw InvalidInput("K must be >= 1");
  if (K > n) throw InvalidInput("K must not exceed n");
  if (!(effective_alpha() >= 0.0)) throw InvalidInput("alpha must be >= 0");
  if (!(omega >= 0.0)) throw InvalidInput("omega must be >= 0");
  if (repeats < 1) throw InvalidInput("repeats must be >= 1");
  hyper.validate();
  optim.validate();
}

Json config_to_json(const ExperimentConfig& c) {
  const LbfgsbSettings& in = c.optim.inner;
  return {
      {"graph", {{"kind", to_string(c.graph_kind)}, {"d", c.d}, {"s", c.s}}},
      {"n", c.n},
      {"noise_scale", c.noise_scale},
      {"standardize", c.standardize},
      {"K", c.K},
      {"alpha", c.alpha ? Json(*c.alpha) : Json(nullptr)},
      {"omega", c.omega},
      {"dsf",
       {{"variant", to_string(c.variant)}, {"lambda1", c.hyper.lambda1}, {"l2", c.hyper.l2}, {"hidden", c.hyper.hidden}, {"init_scale", c.hyper.init_scale}}},
      {"optim",
       {{"h_tol", c.optim.h_tol},
        {"rho_max", c.optim.rho_max},
        {"rho_growth", c.optim.rho_growth},
        {"h_decrease_factor", c.optim.h_decrease_factor},
        {"max_epochs", c.optim.max_epochs},
        {"lambda2_update", c.optim.lambda2_update},
        {"rho_guard", c.optim.guard == RhoGuard::kLearner ? "learner" : "global-min"},
        {"batch_size", c.optim.batch_size},
        {"inner",
         {{"max_iterations", in.max_iterations},
          {"history", in.history},
          {"pgtol", in.pgtol},
          {"ftol", in.ftol},
          {"max_line_search_steps", in.max_line_search_steps}}}}},
      {"subsample", {{"mode", to_string(c.subsample)}, {"sort", to_string(c.sort)}}},
      {"seed", c.seed},
      {"repeats", c.repeats},
      {"output", c.output},
  };
}

namespace {

// Every key in `j` must exist in `schema` (recursively for objects).
void reject_unknown(const Json& j, const Json& schema, const std::string& prefix) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!schema.contains(it.key())) throw InvalidInput("unknown config field '" + key + "'");
    const Json& sub = schema.at(it.key());
    if (sub.is_object()) {
      if (!it.value().is_object()) throw InvalidInput("config field '" + key + "' must be an object");
      reject_unknown(it.value(), sub, key);
    }
  }
}

void collect_keys(const Json& j, const std::string& prefix, std::vector<std::string>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object()) {
      collect_keys(it.value(), key, out);
    } else {
      out.push_back(key);
    }
  }
}

}  // namespace

ExperimentConfig config_from_json(const Json& input) {
  const Json defaults = config_to_json(ExperimentConfig{});
  if (!input.is_object()) throw InvalidInput("config must be a JSON object");
  reject_unknown(input, defaults, "");
  Json j = defaults;
  j.merge_patch(input);
  // merge_patch drops keys set to null; alpha = null means "suggested".
  try {
    ExperimentConfig c;
    c.graph_kind = parse_graph_kind(j.at("graph").at("kind").get<std::string>());
    c.d = j.at("graph").at("d").get<int>();
    c.s = j.at("graph").at("s").get<double>();
    c.n = j.at("n").get<int>();
    c.noise_scale = j.at("noise_scale").get<double>();
    c.standardize = j.at("standardize").get<bool>();
    c.K = j.at("K").get<int>();
    if (j.contains("alpha") && !j.at("alpha").is_null()) c.alpha = j.at("alpha").get<double>();
    c.omega = j.at("omega").get<double>();
    const Json& dsf = j.at("dsf");
    c.variant = parse_dsf_variant(dsf.at("variant").get<std::string>());
    c.hyper.lambda1 = dsf.at("lambda1").get<double>();
    c.hyper.l2 = dsf.at("l2").get<double>();
    c.hyper.hidden = dsf.at("hidden").get<std::vector<int>>();
    c.hyper.init_scale = dsf.at("init_scale").get<double>();
    const Json& o = j.at("optim");
    c.optim.h_tol = o.at("h_tol").get<double>();
    c.optim.rho_max = o.at("rho_max").get<double>();
    c.optim.rho_growth = o.at("rho_growth").get<double>();
    c.optim.h_decrease_factor = o.at("h_decrease_factor").get<double>();
    c.optim.max_epochs = o.at("max_epochs").get<int>();
    c.optim.lambda2_update = o.at("lambda2_update").get<bool>();
    const std::string guard = o.at("rho_guard").get<std::string>();
    if (guard == "learner") {
      c.optim.guard = RhoGuard::kLearner;
    } else if (guard == "global-min") {
      c.optim.guard = RhoGuard::kGlobalMin;
    } else {
      throw InvalidInput("optim.rho_guard must be learner or global-min");
    }
    c.optim.batch_size = o.at("batch_size").get<int>();
    const Json& in = o.at("inner");
    c.optim.inner.max_iterations = in.at("max_iterations").get<int>();
    c.optim.inner.history = in.at("history").get<int>();
    c.optim.inner.pgtol = in.at("pgtol").get<double>();
    c.optim.inner.ftol = in.at("ftol").get<double>();
    c.optim.inner.max_line_search_steps = in.at("max_line_search_steps").get<int>();
    c.subsample = parse_subsample_mode(j.at("subsample").at("mode").get<std::string>());
    c.sort = parse_sort_key(j.at("subsample").at("sort").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.repeats = j.at("repeats").get<int>();
    c.output = j.at("output").get<std::string>();
    c.validate();
    return c;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  collect_keys(config_to_json(ExperimentConfig{}), "", out);
  return out;
}

void apply_override(Json& config, const std::string& dotted_key, const std::string& value) {
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::parse_error&) {
    parsed = value;
  }
  set_config_value(config, dotted_key, parsed);
}

void set_config_value(Json& config, const std::string& dotted_key, const Json& value) {
  const auto keys = config_keys();
  if (std::find(keys.begin(), keys.end(), dotted_key) == keys.end()) {
    throw InvalidInput("unknown config field '" + dotted_key + "'");
  }
  Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = Json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  Json j = config_to_json(c);
  j.erase("output");
  for (const char ch : j.dump()) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tstruct::app
