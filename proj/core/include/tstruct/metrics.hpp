#pragma once

#include <string>

#include "tstruct/adjacency.hpp"

namespace tstruct {

struct MetricsReport {
  int shd = 0;
  double fdr = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;

  int true_edges = 0;
  int predicted_edges = 0;
  int correct = 0;
  int reversed = 0;  // predicted i->j where the truth has j->i
  int extra = 0;     // predicted i->j with no edge between i and j in the truth
  int missing = 0;   // true edges with no predicted edge in either direction
  int non_edges = 0; // d(d-1) - true_edges
};

// Structural Hamming distance: per unordered pair {i, j}, +1 when exactly one
// graph joins them, +1 when both do with different orientation. A reversal
// therefore costs one. Throws InvalidInput if the dimensions differ.
int shd(const BinaryGraph& pred, const BinaryGraph& truth);

// TPR = correct / |E_true|; FDR = (reversed + extra) / |E_pred| (0 for an
// empty prediction); FPR = (reversed + extra) / (d(d-1) - |E_true|).
MetricsReport confusion_rates(const BinaryGraph& pred, const BinaryGraph& truth);

inline int shd(const BinaryDag& pred, const BinaryDag& truth) { return shd(pred.graph(), truth.graph()); }
inline MetricsReport confusion_rates(const BinaryDag& pred, const BinaryDag& truth) {
  return confusion_rates(pred.graph(), truth.graph());
}

// Column names matching metrics_csv_row().
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& m);

}  // namespace tstruct
