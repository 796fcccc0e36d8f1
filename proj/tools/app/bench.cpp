#include "app/bench.hpp"

#include <cmath>

#include "app/pipeline.hpp"
#include "tstruct/errors.hpp"

namespace tstruct::app {

std::vector<BenchCell> parse_grid(const Json& grid, const std::vector<std::pair<std::string, std::string>>& overrides) {
  if (!grid.is_object() || !grid.contains("cells") || !grid.at("cells").is_array()) {
    throw InvalidInput("bench grid needs a \"cells\" array");
  }
  Json base = grid.value("base", Json::object());
  for (const auto& [key, value] : overrides) apply_override(base, key, value);

  std::vector<BenchCell> cells;
  for (const Json& c : grid.at("cells")) {
    if (!c.is_object()) throw InvalidInput("bench cell must be an object");
    BenchCell cell;
    cell.name = c.value("name", "cell" + std::to_string(cells.size()));
    const std::string protocol = c.value("protocol", "accuracy");
    if (protocol == "accuracy") {
      cell.protocol = BenchProtocol::kAccuracy;
    } else if (protocol == "transport") {
      cell.protocol = BenchProtocol::kTransport;
    } else {
      throw InvalidInput("cell '" + cell.name + "': unknown protocol '" + protocol + "'");
    }
    Json config = base;
    if (c.contains("set")) {
      for (auto it = c.at("set").begin(); it != c.at("set").end(); ++it) set_config_value(config, it.key(), it.value());
    }
    cell.config = config_from_json(config);
    if (cell.protocol == BenchProtocol::kTransport) cell.config.subsample = SubsampleMode::kRandomSplit;
    cells.push_back(std::move(cell));
  }
  return cells;
}

namespace {

void record(MethodRuns& runs, const MetricsReport& m, double transport, double seconds, bool acyclic_before_repair) {
  runs.metrics.push_back(m);
  runs.transport_shd.push_back(transport);
  runs.seconds.push_back(seconds);
  if (!acyclic_before_repair) ++runs.nondag_before_repair;
}

MetricsReport average(const std::vector<MetricsReport>& reports) {
  MetricsReport out = reports.front();
  double shd = 0.0;
  out.fdr = out.fpr = out.tpr = 0.0;
  for (const auto& r : reports) {
    shd += r.shd;
    out.fdr += r.fdr;
    out.fpr += r.fpr;
    out.tpr += r.tpr;
  }
  const double n = static_cast<double>(reports.size());
  out.shd = static_cast<int>(std::lround(shd / n));
  out.fdr /= n;
  out.fpr /= n;
  out.tpr /= n;
  return out;
}

}  // namespace

CellResult run_cell(const BenchCell& cell, const Progress& progress) {
  CellResult result;
  result.cell = cell;
  const ExperimentConfig& config = cell.config;
  for (int r = 0; r < config.repeats; ++r) {
    try {
      const GeneratedData data = generate_data(config, r);
      const LearnOutput ds = learn(config, {data.data}, r);
      // SHD is an integer per repeat; keep the averaged baseline exact.
      MethodRuns bl_runs;
      if (cell.protocol == BenchProtocol::kAccuracy) {
        const LearnOutput bl = learn_baseline(config, data.data, r);
        record(result.dstruct, confusion_rates(ds.combined.dag, data.truth()), ds.transport.mean_pairwise_shd(),
               ds.train_seconds, ds.combined.acyclic_before_repair);
        record(result.baseline, confusion_rates(bl.combined.dag, data.truth()), std::nan(""), bl.train_seconds,
               bl.combined.acyclic_before_repair);
      } else {
        // One independent baseline per part of the same split D-Struct used.
        const std::vector<Matrix> parts = materialize(data.data, *ds.partition);
        std::vector<MetricsReport> reports;
        std::vector<BinaryDag> dags;
        double seconds = 0.0;
        bool acyclic = true;
        for (const Matrix& part : parts) {
          const LearnOutput bl = learn_baseline(config, part, r);
          reports.push_back(confusion_rates(bl.combined.dag, data.truth()));
          dags.push_back(bl.combined.dag);
          seconds += bl.train_seconds;
          acyclic = acyclic && bl.combined.acyclic_before_repair;
        }
        double pair_shd = 0.0;
        int pairs = 0;
        for (std::size_t a = 0; a < dags.size(); ++a) {
          for (std::size_t b = a + 1; b < dags.size(); ++b) {
            pair_shd += shd(dags[a], dags[b]);
            ++pairs;
          }
        }
        record(result.dstruct, confusion_rates(ds.combined.dag, data.truth()), ds.transport.mean_pairwise_shd(),
               ds.train_seconds, ds.combined.acyclic_before_repair);
        MetricsReport avg = average(reports);
        record(result.baseline, avg, pairs > 0 ? pair_shd / pairs : 0.0, seconds, acyclic);
      }
      if (progress) {
        progress(cell.name + " repeat " + std::to_string(r) + ": dstruct shd " +
                 std::to_string(result.dstruct.metrics.back().shd) + ", baseline shd " +
                 std::to_string(result.baseline.metrics.back().shd));
      }
    } catch (const std::exception& e) {
      ++result.failures;
      result.errors.push_back("repeat " + std::to_string(r) + ": " + e.what());
      if (progress) progress(cell.name + " repeat " + std::to_string(r) + " failed: " + e.what());
    }
  }
  return result;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  for (const double v : values) {
    if (std::isfinite(v)) {
      s.mean += v;
      ++s.count;
    }
  }
  if (s.count == 0) return s;
  s.mean /= static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (const double v : values) {
      if (std::isfinite(v)) ss += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
    s.se = s.std / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

std::string bench_csv_header() {
  return "cell,protocol,method,graph,n,d,s,K,alpha,subsample,repeats,completed,failures,"
         "shd_mean,shd_std,shd_se,fdr_mean,fdr_std,fdr_se,fpr_mean,fpr_std,fpr_se,tpr_mean,tpr_std,tpr_se,"
         "transport_shd_mean,transport_shd_se,transport_zero,nondag_before_repair,time_mean_s,time_ratio\n";
}

namespace {

std::string stat_columns(const std::vector<double>& values) {
  const Summary s = summarize(values);
  if (s.count == 0) return ",,";
  std::string out = format_double(s.mean) + ",";
  out += (s.count > 1 ? format_double(s.std) : "") + ",";
  out += s.count > 1 ? format_double(s.se) : "";
  return out;
}

std::string method_row(const CellResult& r, const MethodRuns& runs, const std::string& method, int K, double alpha,
                       double time_ratio, bool has_transport) {
  const ExperimentConfig& c = r.cell.config;
  std::vector<double> shd_v, fdr_v, fpr_v, tpr_v;
  for (const auto& m : runs.metrics) {
    shd_v.push_back(m.shd);
    fdr_v.push_back(m.fdr);
    fpr_v.push_back(m.fpr);
    tpr_v.push_back(m.tpr);
  }
  std::string row = r.cell.name + "," + (r.cell.protocol == BenchProtocol::kAccuracy ? "accuracy" : "transport") + "," +
                    method + "," + to_string(c.graph_kind) + "," + std::to_string(c.n) + "," + std::to_string(c.d) +
                    "," + format_double(c.s) + "," + std::to_string(K) + "," + format_double(alpha) + "," +
                    to_string(c.subsample) + "," + std::to_string(c.repeats) + "," +
                    std::to_string(runs.metrics.size()) + "," + std::to_string(r.failures) + ",";
  row += stat_columns(shd_v) + "," + stat_columns(fdr_v) + "," + stat_columns(fpr_v) + "," + stat_columns(tpr_v) + ",";
  if (has_transport && !runs.transport_shd.empty()) {
    const Summary t = summarize(runs.transport_shd);
    int zero = 0;
    for (const double v : runs.transport_shd) zero += v == 0.0 ? 1 : 0;
    row += format_double(t.mean) + "," + (t.count > 1 ? format_double(t.se) : "") + "," + std::to_string(zero) + ",";
  } else {
    row += ",,,";
  }
  row += std::to_string(runs.nondag_before_repair) + ",";
  row += (runs.seconds.empty() ? "" : format_double(summarize(runs.seconds).mean)) + ",";
  row += std::isfinite(time_ratio) ? format_double(time_ratio) : "";
  return row + "\n";
}

}  // namespace

std::string bench_csv_rows(const CellResult& r) {
  const ExperimentConfig& c = r.cell.config;
  const double ds_time = summarize(r.dstruct.seconds).mean;
  const double bl_time = summarize(r.baseline.seconds).mean;
  const double ratio = bl_time > 0.0 && !r.dstruct.seconds.empty() ? ds_time / bl_time : std::nan("");
  const bool transport = r.cell.protocol == BenchProtocol::kTransport;
  return method_row(r, r.dstruct, "dstruct", c.K, c.effective_alpha(), ratio, true) +
         method_row(r, r.baseline, "baseline", 1, 0.0, r.baseline.seconds.empty() ? std::nan("") : 1.0, transport);
}

}  // namespace tstruct::app
