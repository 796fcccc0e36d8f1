#pragma once

#include <functional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "tstruct/metrics.hpp"

namespace tstruct::app {

// "accuracy": D-Struct on the full dataset vs one baseline learner on the
// same data. "transport": the data is split into K equal random halves;
// D-Struct trains on the split, and K independent baselines train one per
// part so their mutual SHD can be compared with D-Struct's internal SHD.
enum class BenchProtocol { kAccuracy, kTransport };

struct BenchCell {
  std::string name;
  BenchProtocol protocol = BenchProtocol::kAccuracy;
  ExperimentConfig config;
};

// Grid document:
//   {"base": {<config>}, "cells": [{"name": "n200", "protocol": "accuracy",
//                                   "set": {"n": 200, "graph.s": 1}}, ...]}
// "set" keys are dotted config names. Global overrides (from the command
// line) are applied to the base before the per-cell settings.
std::vector<BenchCell> parse_grid(const Json& grid, const std::vector<std::pair<std::string, std::string>>& overrides = {});

struct MethodRuns {
  std::vector<MetricsReport> metrics;
  std::vector<double> transport_shd;  // mean pairwise SHD per repeat
  std::vector<double> seconds;
  int nondag_before_repair = 0;
};

struct CellResult {
  BenchCell cell;
  MethodRuns dstruct;
  MethodRuns baseline;
  int failures = 0;
  std::vector<std::string> errors;
};

using Progress = std::function<void(const std::string&)>;

CellResult run_cell(const BenchCell& cell, const Progress& progress = {});

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  double se = 0.0;
  std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

std::string bench_csv_header();
// Two rows per cell: dstruct then baseline.
std::string bench_csv_rows(const CellResult& result);

}  // namespace tstruct::app
