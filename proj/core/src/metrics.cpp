#include "tstruct/metrics.hpp"

#include "tstruct/errors.hpp"
#include "tstruct/serialization.hpp"

namespace tstruct {
namespace {

void check_dims(const BinaryGraph& pred, const BinaryGraph& truth) {
  if (pred.dim() != truth.dim()) {
    throw InvalidInput("graph dimensions differ: " + std::to_string(pred.dim()) + " vs " +
                       std::to_string(truth.dim()));
  }
}

// 0 = no edge, 1 = i->j, 2 = j->i, 3 = both.
int pair_state(const BinaryGraph& g, int i, int j) {
  return (g.has_edge(i, j) ? 1 : 0) | (g.has_edge(j, i) ? 2 : 0);
}

}  // namespace

int shd(const BinaryGraph& pred, const BinaryGraph& truth) {
  check_dims(pred, truth);
  int total = 0;
  for (int i = 0; i < pred.dim(); ++i) {
    for (int j = i + 1; j < pred.dim(); ++j) {
      const int p = pair_state(pred, i, j);
      const int t = pair_state(truth, i, j);
      if (p != t) ++total;
    }
  }
  return total;
}

MetricsReport confusion_rates(const BinaryGraph& pred, const BinaryGraph& truth) {
  check_dims(pred, truth);
  const int d = pred.dim();
  MetricsReport m;
  m.shd = shd(pred, truth);
  m.true_edges = static_cast<int>(truth.edge_count());
  m.predicted_edges = static_cast<int>(pred.edge_count());
  for (const Edge& e : pred.edges()) {
    if (truth.has_edge(e.from, e.to)) {
      ++m.correct;
    } else if (truth.has_edge(e.to, e.from)) {
      ++m.reversed;
    } else {
      ++m.extra;
    }
  }
  for (const Edge& e : truth.edges()) {
    if (!pred.has_edge(e.from, e.to) && !pred.has_edge(e.to, e.from)) ++m.missing;
  }
  m.non_edges = d * (d - 1) - m.true_edges;
  const int wrong = m.reversed + m.extra;
  m.tpr = m.true_edges > 0 ? static_cast<double>(m.correct) / m.true_edges : 0.0;
  m.fdr = m.predicted_edges > 0 ? static_cast<double>(wrong) / m.predicted_edges : 0.0;
  m.fpr = m.non_edges > 0 ? static_cast<double>(wrong) / m.non_edges : 0.0;
  return m;
}

std::string metrics_csv_header() {
  return "shd,fdr,fpr,tpr,true_edges,predicted_edges,correct,reversed,extra,missing,non_edges";
}

std::string metrics_csv_row(const MetricsReport& m) {
  return std::to_string(m.shd) + "," + format_double(m.fdr) + "," + format_double(m.fpr) + "," +
         format_double(m.tpr) + "," + std::to_string(m.true_edges) + "," + std::to_string(m.predicted_edges) +
         "," + std::to_string(m.correct) + "," + std::to_string(m.reversed) + "," + std::to_string(m.extra) + "," +
         std::to_string(m.missing) + "," + std::to_string(m.non_edges);
}

}  // namespace tstruct
