#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dyncomm/community_mapper.hpp"
#include "dyncomm/io.hpp"
#include "dyncomm/modularity.hpp"
#include "dyncomm/rescal.hpp"
#include "dyncomm/temporal_graph.hpp"

namespace dyncomm {

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  RescalConfig rescal;
  MapperConfig mapper;
  bool binarize = false;
  bool parallel_slices = false;
  bool export_embeddings = false;
};

struct DetectionResult {
  RescalFit rescal;
  MapperFit mapper;
  RefinedSeries refined;

  io::ResultFile result_file() const;
};

/// factorize -> map -> refine on an in-memory graph. Failures are rethrown with
/// the stage name ("rescal", "mapper", "refine") prefixed to the message.
DetectionResult run_detection(const TemporalGraph& g, RescalConfig rescal, MapperConfig mapper,
                              bool parallel_slices = false);

/// Writes result.json, modularity.csv, memberships_t<t>.csv, factors.json,
/// rescal_loss.csv, mlp.json, mapper_loss.csv and, when requested,
/// embeddings_t<t>.csv into `out_dir` (created if missing).
void write_detection_outputs(const std::filesystem::path& out_dir, const DetectionResult& r,
                             bool export_embeddings);

/// Full run: read the TSV input, optionally binarize, run_detection, write outputs.
DetectionResult detect(const RunConfig& cfg);

struct EvalReport {
  std::vector<double> modularity;
  double average_modularity = 0.0;
  std::optional<std::vector<double>> nmi;
  std::optional<double> mean_nmi;

  std::string to_json() const;
  std::string to_table() const;
};

/// Modularity summary of a result file, plus per-slice NMI against a
/// `t,node,community` ground truth when one is given. Throws ParseError when
/// the slice counts or node counts disagree.
EvalReport evaluate(const std::filesystem::path& results,
                    const std::optional<std::filesystem::path>& ground_truth = std::nullopt);

}  // namespace dyncomm
