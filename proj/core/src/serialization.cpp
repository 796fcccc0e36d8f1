#include "tstruct/serialization.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "tstruct/errors.hpp"

namespace tstruct {

std::string format_double(double v) {
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  if (res.ec != std::errc()) throw InvalidInput("cannot format value");
  std::string s(buf, res.ptr);
  if (s == "-0") s = "0";
  return s;
}

namespace {

// Wraps nlohmann parse/type errors into InvalidInput.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    if (!j.is_array()) throw InvalidInput("matrix must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.front().size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Json& row = j.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput("ragged matrix rows");
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
  });
}

Json graph_to_json(const BinaryGraph& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.from, e.to});
  return {{"d", g.dim()}, {"edges", std::move(edges)}};
}

BinaryGraph graph_from_json(const Json& j) {
  return guarded("graph", [&] {
    const int d = j.at("d").get<int>();
    std::vector<Edge> edges;
    for (const Json& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw InvalidInput("edge must be a pair [i, j]");
      edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    }
    return BinaryGraph::from_edges(d, edges);
  });
}

Json dag_to_json(const BinaryDag& g) { return graph_to_json(g.graph()); }

BinaryDag dag_from_json(const Json& j) {
  auto dag = BinaryDag::certify(graph_from_json(j));
  if (!dag) throw InvalidInput("graph contains a directed cycle");
  return *std::move(dag);
}

Json dsf_params_to_json(const DsfParams& p) {
  std::vector<double> values(p.values().data(), p.values().data() + p.values().size());
  return {{"variant", to_string(p.variant())}, {"d", p.dim()}, {"hidden", p.hidden()}, {"values", values}};
}

DsfParams dsf_params_from_json(const Json& j) {
  return guarded("dsf params", [&] {
    const auto values = j.at("values").get<std::vector<double>>();
    return DsfParams::from_values(parse_dsf_variant(j.at("variant").get<std::string>()), j.at("d").get<int>(),
                                  j.at("hidden").get<std::vector<int>>(),
                                  Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  });
}

Json dsf_hyper_to_json(const DsfHyper& h) {
  return {{"lambda1", h.lambda1}, {"l2", h.l2}, {"hidden", h.hidden}, {"init_scale", h.init_scale}};
}

DsfHyper dsf_hyper_from_json(const Json& j) {
  return guarded("dsf hyper", [&] {
    DsfHyper h;
    h.lambda1 = j.value("lambda1", h.lambda1);
    h.l2 = j.value("l2", h.l2);
    h.hidden = j.value("hidden", h.hidden);
    h.init_scale = j.value("init_scale", h.init_scale);
    h.validate();
    return h;
  });
}

Json sem_to_json(const SemSystem& sem) {
  Json theta = Json::array();
  for (const Matrix& t : sem.theta) theta.push_back(matrix_to_json(t));
  return {{"dag", dag_to_json(sem.dag)}, {"theta", std::move(theta)}, {"noise_scale", sem.noise_scale}};
}

SemSystem sem_from_json(const Json& j) {
  return guarded("sem", [&] {
    SemSystem sem;
    sem.dag = dag_from_json(j.at("dag"));
    const Json& theta = j.at("theta");
    if (theta.size() != 3) throw InvalidInput("sem theta must hold three matrices");
    for (std::size_t m = 0; m < 3; ++m) {
      sem.theta[m] = matrix_from_json(theta.at(m));
      if (sem.theta[m].rows() != sem.dag.dim() || sem.theta[m].cols() != sem.dag.dim()) {
        throw InvalidInput("sem theta shape does not match the dag");
      }
    }
    sem.noise_scale = j.at("noise_scale").get<double>();
    return sem;
  });
}

Json partition_to_json(const SubsetPartition& p) {
  return {{"K", p.K}, {"permutation", p.permutation}, {"index_sets", p.index_sets}, {"seed", p.seed}};
}

SubsetPartition partition_from_json(const Json& j) {
  return guarded("partition", [&] {
    SubsetPartition p;
    p.K = j.at("K").get<int>();
    p.permutation = j.at("permutation").get<std::vector<int>>();
    p.index_sets = j.at("index_sets").get<std::vector<std::vector<int>>>();
    p.seed = j.at("seed").get<std::uint64_t>();
    if (static_cast<int>(p.index_sets.size()) != p.K) throw InvalidInput("partition K does not match index sets");
    return p;
  });
}

Json metrics_to_json(const MetricsReport& m) {
  return {{"shd", m.shd},
          {"fdr", m.fdr},
          {"fpr", m.fpr},
          {"tpr", m.tpr},
          {"true_edges", m.true_edges},
          {"predicted_edges", m.predicted_edges},
          {"correct", m.correct},
          {"reversed", m.reversed},
          {"extra", m.extra},
          {"missing", m.missing},
          {"non_edges", m.non_edges}};
}

Json step_to_json(const StepRecord& r) {
  return {{"epoch", r.epoch},     {"k", r.k},           {"h", r.h},
          {"rho_k", r.rho_k},     {"lambda2_k", r.lambda2_k}, {"objective", r.objective},
          {"l_mse", r.l_mse}};
}

std::string log_to_jsonl(const std::vector<StepRecord>& log) {
  std::string out;
  for (const StepRecord& r : log) out += step_to_json(r).dump() + "\n";
  return out;
}

Json transport_to_json(const TransportReport& r) {
  return {{"omega", r.omega},
          {"transportable", r.transportable},
          {"mean_pairwise_shd", r.mean_pairwise_shd()},
          {"pairwise_shd", matrix_to_json(r.pairwise_shd.cast<double>())}};
}

Json model_to_json(const DStructModel& model) {
  Json learners = Json::array();
  for (const LearnerState& l : model.learners) {
    learners.push_back({{"params", dsf_params_to_json(l.params)},
                        {"rho", l.rho},
                        {"lambda2", l.lambda2},
                        {"h_prev", std::isfinite(l.h_prev) ? Json(l.h_prev) : Json(nullptr)},
                        {"init_seed", l.init_seed}});
  }
  Json forbidden = Json::array();
  for (const Edge& e : model.forbidden) forbidden.push_back({e.from, e.to});
  return {{"hyper", dsf_hyper_to_json(model.hyper)},
          {"alpha", model.alpha},
          {"omega", model.omega},
          {"forbidden", std::move(forbidden)},
          {"learners", std::move(learners)}};
}

DStructModel model_from_json(const Json& j) {
  return guarded("model", [&] {
    DStructModel model;
    model.hyper = dsf_hyper_from_json(j.at("hyper"));
    model.alpha = j.at("alpha").get<double>();
    model.omega = j.at("omega").get<double>();
    for (const Json& e : j.value("forbidden", Json::array())) model.forbidden.push_back({e.at(0), e.at(1)});
    for (const Json& l : j.at("learners")) {
      const Json& hp = l.at("h_prev");
      model.learners.push_back({dsf_params_from_json(l.at("params")), l.at("rho").get<double>(),
                                l.at("lambda2").get<double>(),
                                hp.is_null() ? std::numeric_limits<double>::infinity() : hp.get<double>(),
                                l.at("init_seed").get<std::uint64_t>()});
    }
    model.validate();
    return model;
  });
}

std::string matrix_to_csv(const Matrix& x) {
  std::string out;
  for (Eigen::Index c = 0; c < x.cols(); ++c) out += (c ? ",x" : "x") + std::to_string(c + 1);
  out += "\n";
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c) out += ",";
      out += format_double(x(r, c));
    }
    out += "\n";
  }
  return out;
}

Matrix matrix_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("CSV is empty");
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Eigen::Index count = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw InvalidInput("CSV row " + std::to_string(rows + 1) + ": cannot parse number");
      }
      if (!std::isfinite(v)) throw InvalidInput("CSV row " + std::to_string(rows + 1) + ": non-finite value");
      values.push_back(v);
      ++count;
      p = res.ptr;
      if (p == end) break;
      if (*p != ',') throw InvalidInput("CSV row " + std::to_string(rows + 1) + ": unexpected character");
      ++p;
    }
    if (count != cols) {
      throw InvalidInput("CSV row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                         " fields, header has " + std::to_string(cols));
    }
    ++rows;
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput("invalid JSON in " + path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file", tmp.string());
    out << content;
    if (!out.flush()) throw IoError("write failed", tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename temp file into place", path);
}

void write_json_file(const std::string& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

Matrix read_csv_file(const std::string& path) {
  try {
    return matrix_from_csv(read_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace tstruct
