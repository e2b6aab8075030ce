// dyncomm: dynamic community detection from temporal edge lists.
//
//   dyncomm detect --input events.tsv --out-dir run/ --communities 4
//   dyncomm eval   --results run/result.json --ground-truth truth.csv
//   dyncomm synth  --nodes 100 --communities 4 --slices 6 --out-edges g.tsv --out-truth truth.csv
//
// Exit codes: 0 ok, 2 parse/usage error, 3 numeric failure, 4 I/O failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dyncomm/error.hpp"
#include "dyncomm/io.hpp"
#include "dyncomm/pipeline.hpp"
#include "dyncomm/synth.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

void print_detection(const dyncomm::DetectionResult& r) {
  const auto& refined = r.refined;
  std::printf("   t         Q  communities\n");
  for (std::size_t t = 0; t < refined.modularity.size(); ++t) {
    const auto& labels = refined.partitions[t];
    const std::size_t k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::printf("%4zu  %8.4f  %11zu\n", t, refined.modularity[t], k);
  }
  std::printf("avg Q  %.6f\n", refined.average_modularity);
}

// Flat config files hold detect options, so top-level keys are routed there.
class DetectConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigTOML::from_config(input);
    for (CLI::ConfigItem& item : items) {
      if (item.parents.empty()) item.parents = {"detect"};
    }
    return items;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic community detection via nonnegative RESCAL + MLP mapping + Louvain"};
  app.require_subcommand(1);

  // detect
  dyncomm::RunConfig run;
  run.rescal.rank = 16;
  std::uint64_t seed = 0;
  auto* detect = app.add_subcommand("detect", "Detect communities in every slice of a temporal graph");
  app.config_formatter(std::make_shared<DetectConfig>());
  app.set_config("--config", "", "Flat key = value file for detect; keys mirror the long flag names");
  detect->fallthrough();
  detect->add_option("--input", run.input, "Edge-event TSV (t, i, j[, w])")->required()->check(CLI::ExistingFile);
  detect->add_option("--out-dir", run.out_dir, "Output directory")->required();
  detect->add_option("--rank", run.rescal.rank, "RESCAL decomposition rank R")->capture_default_str()->check(CLI::PositiveNumber);
  detect->add_option("--communities", run.mapper.communities, "Number of communities K")->required()->check(CLI::Range(2, 1 << 20));
  detect->add_option("--lambda-a", run.rescal.lambda_a, "Regularization on A")->capture_default_str()->check(CLI::NonNegativeNumber);
  detect->add_option("--lambda-r", run.rescal.lambda_r, "Regularization on each R_t")->capture_default_str()->check(CLI::NonNegativeNumber);
  detect->add_option("--max-iters", run.rescal.max_iters, "Maximum RESCAL sweeps")->capture_default_str()->check(CLI::PositiveNumber);
  detect->add_option("--rel-tol", run.rescal.rel_tol, "RESCAL relative loss-change tolerance")->capture_default_str();
  detect->add_option("--beta", run.mapper.beta, "Temporal smoothness weight")->capture_default_str()->check(CLI::NonNegativeNumber);
  detect->add_option("--epochs", run.mapper.epochs, "Mapper gradient-descent epochs")->capture_default_str()->check(CLI::PositiveNumber);
  detect->add_option("--hidden", run.mapper.hidden, "Mapper hidden width (0: 2*max(R,K))")->capture_default_str();
  detect->add_option("--learning-rate", run.mapper.learning_rate, "Mapper learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  detect->add_option("--grad-clip", run.mapper.grad_clip, "Mapper gradient-norm clip (0: off)")->capture_default_str()->check(CLI::NonNegativeNumber);
  detect->add_option("--seed", seed, "Random seed")->capture_default_str();
  detect->add_flag("--binarize", run.binarize, "Replace accumulated weights by 1");
  detect->add_flag("--parallel", run.parallel_slices, "Process independent slices on multiple threads");
  detect->add_flag("--export-embeddings", run.export_embeddings, "Write Z_t = A R_t as embeddings_t<t>.csv");

  // eval
  std::filesystem::path results_path;
  std::optional<std::filesystem::path> truth_path;
  std::optional<std::filesystem::path> eval_json;
  auto* eval = app.add_subcommand("eval", "Summarize a result file, optionally against ground truth");
  eval->add_option("--results", results_path, "result.json written by detect")->required()->check(CLI::ExistingFile);
  eval->add_option("--ground-truth", truth_path, "Ground-truth CSV (t,node,community)")->check(CLI::ExistingFile);
  eval->add_option("--json", eval_json, "Write the JSON report here instead of standard output");

  // synth
  dyncomm::DsbmConfig dsbm;
  std::filesystem::path edges_out;
  std::optional<std::filesystem::path> synth_truth;
  auto* synth = app.add_subcommand("synth", "Generate a dynamic stochastic block model benchmark");
  synth->add_option("--nodes", dsbm.num_nodes, "Number of nodes N")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--communities", dsbm.num_communities, "Number of planted communities K")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--slices", dsbm.num_slices, "Number of time slices T")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--p-in", dsbm.p_in, "Intra-community edge probability")->capture_default_str();
  synth->add_option("--p-out", dsbm.p_out, "Inter-community edge probability")->capture_default_str();
  synth->add_option("--churn", dsbm.churn, "Fraction of nodes reassigned per transition")->capture_default_str();
  synth->add_option("--seed", dsbm.seed, "Random seed")->capture_default_str();
  synth->add_option("--out-edges", edges_out, "Edge-event TSV output")->required();
  synth->add_option("--out-truth", synth_truth, "Ground-truth CSV output (t,node,community)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*detect) {
      run.rescal.seed = seed;
      run.mapper.seed = seed;
      const dyncomm::DetectionResult r = dyncomm::detect(run);
      print_detection(r);
    } else if (*eval) {
      const dyncomm::EvalReport report = dyncomm::evaluate(results_path, truth_path);
      std::cout << report.to_table();
      if (eval_json) {
        std::ofstream out(*eval_json);
        out << report.to_json();
        if (!out) throw dyncomm::IoError("cannot write '" + eval_json->string() + "'");
      } else {
        std::cout << report.to_json();
      }
    } else if (*synth) {
      const dyncomm::DsbmInstance inst = dyncomm::generate_dsbm(dsbm);
      dyncomm::io::write_edge_events(edges_out, inst.events);
      if (synth_truth) dyncomm::io::write_partition_csv(*synth_truth, inst.truth);
      std::printf("wrote %zu edge events over %zu slices\n", inst.events.size(), dsbm.num_slices);
    }
  } catch (const dyncomm::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  } catch (const dyncomm::NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const dyncomm::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  }
  return 0;
}
