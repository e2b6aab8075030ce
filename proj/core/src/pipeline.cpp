#include "dyncomm/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "dyncomm/error.hpp"
#include "dyncomm/synth.hpp"

namespace dyncomm {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NumericError& e) {
    throw NumericError(std::string("stage '") + stage + "': " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(std::string("stage '") + stage + "': " + e.what());
  } catch (const IoError& e) {
    throw IoError(std::string("stage '") + stage + "': " + e.what());
  }
}

std::string slice_file(const char* stem, std::size_t t) { return stem + std::to_string(t) + ".csv"; }

}  // namespace

io::ResultFile DetectionResult::result_file() const {
  io::ResultFile out;
  for (std::size_t t = 0; t < refined.partitions.size(); ++t) {
    const Labels& labels = refined.partitions[t];
    const std::size_t k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    out.per_slice.push_back({t, refined.modularity[t], k, labels});
  }
  out.avg_q = refined.average_modularity;
  return out;
}

DetectionResult run_detection(const TemporalGraph& g, RescalConfig rescal, MapperConfig mapper,
                              bool parallel_slices) {
  rescal.parallel_slices = parallel_slices;
  mapper.parallel_slices = parallel_slices;
  DetectionResult r;
  r.rescal = in_stage("rescal", [&] { return fit_rescal(g, rescal); });
  r.mapper = in_stage("mapper", [&] { return train_mapper(g, r.rescal.model, mapper); });
  r.refined = in_stage("refine", [&] { return refine_series(g, r.mapper.memberships, parallel_slices); });
  return r;
}

void write_detection_outputs(const fs::path& out_dir, const DetectionResult& r,
                             bool export_embeddings) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  io::write_result_json(out_dir / "result.json", r.result_file());
  io::write_modularity_csv(out_dir / "modularity.csv", r.refined.modularity);
  io::write_factor_checkpoint(out_dir / "factors.json", r.rescal.model);
  io::write_loss_csv(out_dir / "rescal_loss.csv", "sweep", r.rescal.loss_history);
  io::write_mlp_checkpoint(out_dir / "mlp.json", r.mapper.params);
  io::write_loss_csv(out_dir / "mapper_loss.csv", "epoch", r.mapper.loss_history);
  for (std::size_t t = 0; t < r.mapper.memberships.size(); ++t) {
    io::write_node_matrix_csv(out_dir / slice_file("memberships_t", t), "c_",
                              r.mapper.memberships[t]);
  }
  if (export_embeddings) {
    const std::vector<Matrix> z = slice_embeddings(r.rescal.model);
    for (std::size_t t = 0; t < z.size(); ++t) {
      io::write_node_matrix_csv(out_dir / slice_file("embeddings_t", t), "z_", z[t]);
    }
  }
}

DetectionResult detect(const RunConfig& cfg) {
  TemporalGraph g = in_stage("ingest", [&] {
    const std::vector<EdgeEvent> events = io::read_edge_events(cfg.input);
    TemporalGraph built = from_edge_events(events);
    return cfg.binarize ? binarized(built) : built;
  });
  DetectionResult r = run_detection(g, cfg.rescal, cfg.mapper, cfg.parallel_slices);
  in_stage("output", [&] { write_detection_outputs(cfg.out_dir, r, cfg.export_embeddings); });
  return r;
}

EvalReport evaluate(const fs::path& results, const std::optional<fs::path>& ground_truth) {
  const io::ResultFile rf = io::read_result_json(results);
  EvalReport report;
  for (const io::SliceResult& s : rf.per_slice) report.modularity.push_back(s.q);
  double sum = 0.0;
  for (double q : report.modularity) sum += q;
  report.average_modularity =
      report.modularity.empty() ? 0.0 : sum / static_cast<double>(report.modularity.size());

  if (ground_truth) {
    const PartitionSeries truth = io::read_partition_csv(*ground_truth);
    if (truth.size() != rf.per_slice.size()) {
      throw ParseError("slice count mismatch: results have " + std::to_string(rf.per_slice.size()) +
                       " slices, ground truth has " + std::to_string(truth.size()));
    }
    std::vector<double> scores;
    double total = 0.0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (truth[t].size() != rf.per_slice[t].labels.size()) {
        throw ParseError("node count mismatch at slice " + std::to_string(t));
      }
      scores.push_back(nmi(rf.per_slice[t].labels, truth[t]));
      total += scores.back();
    }
    report.mean_nmi = scores.empty() ? 0.0 : total / static_cast<double>(scores.size());
    report.nmi = std::move(scores);
  }
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["per_slice"] = nlohmann::json::array();
  for (std::size_t t = 0; t < modularity.size(); ++t) {
    nlohmann::json row{{"t", t}, {"Q", modularity[t]}};
    if (nmi) row["NMI"] = (*nmi)[t];
    j["per_slice"].push_back(row);
  }
  j["avg_Q"] = average_modularity;
  if (mean_nmi) j["mean_NMI"] = *mean_nmi;
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char buf[96];
  out << (nmi ? "   t         Q       NMI\n" : "   t         Q\n");
  for (std::size_t t = 0; t < modularity.size(); ++t) {
    if (nmi) {
      std::snprintf(buf, sizeof buf, "%4zu  %8.4f  %8.4f\n", t, modularity[t], (*nmi)[t]);
    } else {
      std::snprintf(buf, sizeof buf, "%4zu  %8.4f\n", t, modularity[t]);
    }
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "avg Q  %.4f\n", average_modularity);
  out << buf;
  if (mean_nmi) {
    std::snprintf(buf, sizeof buf, "mean NMI  %.4f\n", *mean_nmi);
    out << buf;
  }
  return out.str();
}

}  // namespace dyncomm
