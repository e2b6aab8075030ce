#include "dyncomm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "dyncomm/error.hpp"

namespace dyncomm::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, const std::string& at, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError(at + ": invalid " + what + " '" + std::string(field) + "'");
  }
  return value;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

json matrix_to_json(const Matrix& m) {
  return json(std::vector<double>(m.data(), m.data() + m.size()));
}

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& what) {
  const auto values = j.get<std::vector<double>>();
  if (values.size() != rows * cols) {
    throw ParseError(what + ": expected " + std::to_string(rows * cols) + " values, found " +
                     std::to_string(values.size()));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

// Reads every non-comment line after the header.
template <typename RowFn>
void read_csv(const fs::path& path, std::string_view expected_header_prefix, RowFn&& on_row) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line.rfind(expected_header_prefix, 0) != 0) {
        throw ParseError(where(path.string(), line_no) + ": expected header starting with '" +
                         std::string(expected_header_prefix) + "'");
      }
      header = true;
      on_row(split(line, ','), where(path.string(), line_no), true);
      continue;
    }
    on_row(split(line, ','), where(path.string(), line_no), false);
  }
  if (!header) throw ParseError(path.string() + ": missing CSV header");
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::vector<EdgeEvent> read_edge_events(std::istream& in, std::string_view source) {
  std::vector<EdgeEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    const std::string at = where(source, line_no);
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError(at + ": expected 3 or 4 tab-separated fields, found " +
                       std::to_string(fields.size()));
    }
    EdgeEvent ev;
    ev.t = parse_number<std::size_t>(fields[0], at, "slice index");
    ev.i = parse_number<NodeId>(fields[1], at, "node id");
    ev.j = parse_number<NodeId>(fields[2], at, "node id");
    if (fields.size() == 4) ev.w = parse_number<double>(fields[3], at, "weight");
    events.push_back(ev);
  }
  return events;
}

std::vector<EdgeEvent> read_edge_events(const fs::path& path) {
  std::ifstream in = open_in(path);
  return read_edge_events(in, path.string());
}

void write_edge_events(std::ostream& out, const std::vector<EdgeEvent>& events) {
  for (const EdgeEvent& ev : events) {
    out << ev.t << '\t' << ev.i << '\t' << ev.j;
    if (ev.w != 1.0) out << '\t' << format_double(ev.w);
    out << '\n';
  }
}

void write_edge_events(const fs::path& path, const std::vector<EdgeEvent>& events) {
  std::ofstream out = open_out(path);
  write_edge_events(out, events);
  finish(out, path);
}

void write_factor_checkpoint(const fs::path& path, const FactorModel& f) {
  json j;
  j["format"] = "dyncomm-factors";
  j["num_nodes"] = f.num_nodes();
  j["rank"] = f.rank();
  j["num_slices"] = f.num_slices();
  j["A"] = matrix_to_json(f.a);
  j["R"] = json::array();
  for (const Matrix& r : f.relations) j["R"].push_back(matrix_to_json(r));
  write_json(path, j);
}

FactorModel read_factor_checkpoint(const fs::path& path) {
  const json j = read_json(path);
  try {
    const auto n = j.at("num_nodes").get<std::size_t>();
    const auto rank = j.at("rank").get<std::size_t>();
    const auto slices = j.at("num_slices").get<std::size_t>();
    FactorModel f;
    f.a = matrix_from_json(j.at("A"), n, rank, path.string() + " A");
    const json& rs = j.at("R");
    if (rs.size() != slices) throw ParseError(path.string() + ": R count differs from num_slices");
    for (const json& r : rs) f.relations.push_back(matrix_from_json(r, rank, rank, path.string() + " R"));
    return f;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_mlp_checkpoint(const fs::path& path, const MlpParams& p) {
  json j;
  j["format"] = "dyncomm-mlp";
  j["rank"] = p.rank();
  j["hidden"] = p.hidden();
  j["communities"] = p.communities();
  j["W1"] = matrix_to_json(p.w1);
  j["b1"] = std::vector<double>(p.b1.data(), p.b1.data() + p.b1.size());
  j["W2"] = matrix_to_json(p.w2);
  j["b2"] = std::vector<double>(p.b2.data(), p.b2.data() + p.b2.size());
  write_json(path, j);
}

MlpParams read_mlp_checkpoint(const fs::path& path) {
  const json j = read_json(path);
  try {
    const auto rank = j.at("rank").get<std::size_t>();
    const auto hidden = j.at("hidden").get<std::size_t>();
    const auto k = j.at("communities").get<std::size_t>();
    MlpParams p;
    p.w1 = matrix_from_json(j.at("W1"), hidden, rank, path.string() + " W1");
    p.w2 = matrix_from_json(j.at("W2"), k, hidden, path.string() + " W2");
    const Matrix b1 = matrix_from_json(j.at("b1"), hidden, 1, path.string() + " b1");
    const Matrix b2 = matrix_from_json(j.at("b2"), k, 1, path.string() + " b2");
    p.b1 = b1.col(0);
    p.b2 = b2.col(0);
    return p;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_loss_csv(const fs::path& path, std::string_view index_name,
                    const std::vector<double>& history) {
  std::ofstream out = open_out(path);
  out << index_name << ",loss\n";
  for (std::size_t k = 0; k < history.size(); ++k) out << k << ',' << format_double(history[k]) << '\n';
  finish(out, path);
}

std::vector<double> read_loss_csv(const fs::path& path) {
  std::vector<double> history;
  read_csv(path, "", [&](const auto& fields, const std::string& at, bool header) {
    if (fields.size() != 2) throw ParseError(at + ": expected 2 columns");
    if (header) return;
    if (parse_number<std::size_t>(fields[0], at, "index") != history.size()) {
      throw ParseError(at + ": rows out of order");
    }
    history.push_back(parse_number<double>(fields[1], at, "loss"));
  });
  return history;
}

void write_node_matrix_csv(const fs::path& path, std::string_view prefix, const Matrix& m) {
  std::ofstream out = open_out(path);
  out << "node";
  for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << prefix << c;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << i;
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_double(m(i, c));
    out << '\n';
  }
  finish(out, path);
}

Matrix read_node_matrix_csv(const fs::path& path) {
  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
  read_csv(path, "node", [&](const auto& fields, const std::string& at, bool header) {
    if (header) {
      cols = fields.size() - 1;
      return;
    }
    if (fields.size() != cols + 1) throw ParseError(at + ": wrong column count");
    if (parse_number<std::size_t>(fields[0], at, "node id") != rows.size()) {
      throw ParseError(at + ": rows out of order");
    }
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c) row[c] = parse_number<double>(fields[c + 1], at, "value");
    rows.push_back(std::move(row));
  });
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  return m;
}

void write_modularity_csv(const fs::path& path, const std::vector<double>& q) {
  std::ofstream out = open_out(path);
  out << "t,Q\n";
  for (std::size_t t = 0; t < q.size(); ++t) out << t << ',' << format_double(q[t]) << '\n';
  finish(out, path);
}

std::vector<double> read_modularity_csv(const fs::path& path) {
  std::vector<double> q;
  read_csv(path, "t,Q", [&](const auto& fields, const std::string& at, bool header) {
    if (fields.size() != 2) throw ParseError(at + ": expected 2 columns");
    if (header) return;
    if (parse_number<std::size_t>(fields[0], at, "slice index") != q.size()) {
      throw ParseError(at + ": rows out of order");
    }
    q.push_back(parse_number<double>(fields[1], at, "Q"));
  });
  return q;
}

void write_partition_csv(const fs::path& path, const PartitionSeries& labels) {
  std::ofstream out = open_out(path);
  out << "t,node,community\n";
  for (std::size_t t = 0; t < labels.size(); ++t) {
    for (std::size_t v = 0; v < labels[t].size(); ++v) out << t << ',' << v << ',' << labels[t][v] << '\n';
  }
  finish(out, path);
}

PartitionSeries read_partition_csv(const fs::path& path) {
  PartitionSeries series;
  read_csv(path, "t,node,community", [&](const auto& fields, const std::string& at, bool header) {
    if (fields.size() != 3) throw ParseError(at + ": expected 3 columns");
    if (header) return;
    const auto t = parse_number<std::size_t>(fields[0], at, "slice index");
    const auto v = parse_number<std::size_t>(fields[1], at, "node id");
    const auto c = parse_number<Label>(fields[2], at, "community");
    if (t >= series.size()) series.resize(t + 1);
    if (v >= series[t].size()) series[t].resize(v + 1, 0);
    series[t][v] = c;
  });
  return series;
}

std::string result_json(const ResultFile& r) {
  json j;
  j["per_slice"] = json::array();
  for (const SliceResult& s : r.per_slice) {
    j["per_slice"].push_back(
        {{"t", s.t}, {"Q", s.q}, {"num_communities", s.num_communities}, {"labels", s.labels}});
  }
  j["avg_Q"] = r.avg_q;
  return j.dump(2) + "\n";
}

void write_result_json(const fs::path& path, const ResultFile& r) {
  std::ofstream out = open_out(path);
  out << result_json(r);
  finish(out, path);
}

ResultFile read_result_json(const fs::path& path) {
  const json j = read_json(path);
  try {
    ResultFile r;
    for (const json& s : j.at("per_slice")) {
      r.per_slice.push_back({s.at("t").get<std::size_t>(), s.at("Q").get<double>(),
                             s.at("num_communities").get<std::size_t>(),
                             s.at("labels").get<Labels>()});
    }
    r.avg_q = j.at("avg_Q").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace dyncomm::io
