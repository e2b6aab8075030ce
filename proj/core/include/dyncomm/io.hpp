#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dyncomm/community_mapper.hpp"
#include "dyncomm/rescal.hpp"
#include "dyncomm/temporal_graph.hpp"
#include "dyncomm/types.hpp"

namespace dyncomm::io {

// Edge-event TSV: `t<TAB>i<TAB>j[<TAB>w]`, '#' comment lines, blank lines skipped.
std::vector<EdgeEvent> read_edge_events(std::istream& in, std::string_view source = "<stream>");
std::vector<EdgeEvent> read_edge_events(const std::filesystem::path& path);
void write_edge_events(std::ostream& out, const std::vector<EdgeEvent>& events);
void write_edge_events(const std::filesystem::path& path, const std::vector<EdgeEvent>& events);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

void write_factor_checkpoint(const std::filesystem::path& path, const FactorModel& f);
FactorModel read_factor_checkpoint(const std::filesystem::path& path);

void write_mlp_checkpoint(const std::filesystem::path& path, const MlpParams& p);
MlpParams read_mlp_checkpoint(const std::filesystem::path& path);

/// Two-column CSV `<index_name>,loss`, one row per entry.
void write_loss_csv(const std::filesystem::path& path, std::string_view index_name,
                    const std::vector<double>& history);
std::vector<double> read_loss_csv(const std::filesystem::path& path);

/// Node-indexed matrix CSV with header `node,<prefix>0,...,<prefix>{k-1}`.
/// Memberships use prefix "c_", embeddings "z_".
void write_node_matrix_csv(const std::filesystem::path& path, std::string_view prefix,
                           const Matrix& m);
Matrix read_node_matrix_csv(const std::filesystem::path& path);

/// Per-slice Q as CSV `t,Q`.
void write_modularity_csv(const std::filesystem::path& path, const std::vector<double>& q);
std::vector<double> read_modularity_csv(const std::filesystem::path& path);

/// Ground truth / label CSV `t,node,community`.
void write_partition_csv(const std::filesystem::path& path, const PartitionSeries& labels);
PartitionSeries read_partition_csv(const std::filesystem::path& path);

struct SliceResult {
  std::size_t t = 0;
  double q = 0.0;
  std::size_t num_communities = 0;
  Labels labels;

  bool operator==(const SliceResult&) const = default;
};

struct ResultFile {
  std::vector<SliceResult> per_slice;
  double avg_q = 0.0;

  bool operator==(const ResultFile&) const = default;
};

std::string result_json(const ResultFile& r);
void write_result_json(const std::filesystem::path& path, const ResultFile& r);
ResultFile read_result_json(const std::filesystem::path& path);

}  // namespace dyncomm::io
